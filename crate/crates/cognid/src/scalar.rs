use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar underlying all numeric computation in this crate.
///
/// Implemented by `f32` and `f64` through the blanket impl; `f64` is the
/// default everywhere a type parameter can be elided.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Compensated (Neumaier) summation.
///
/// Keeps an error term so that long accumulations stay accurate to within a
/// few ulps of the exact sum regardless of term ordering and magnitude.
#[derive(Debug, Clone, Copy)]
pub struct NeumaierSum<F> {
    sum: F,
    compensation: F,
}

impl<F: Scalar> NeumaierSum<F> {
    pub fn new() -> Self {
        Self {
            sum: F::zero(),
            compensation: F::zero(),
        }
    }

    pub fn add(&mut self, value: F) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation = self.compensation + ((self.sum - t) + value);
        } else {
            self.compensation = self.compensation + ((value - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn total(&self) -> F {
        self.sum + self.compensation
    }
}

impl<F: Scalar> Default for NeumaierSum<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Scalar> FromIterator<F> for NeumaierSum<F> {
    fn from_iter<I: IntoIterator<Item = F>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}
