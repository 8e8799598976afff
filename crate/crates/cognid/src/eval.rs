//! Classification metrics and significance testing: accuracy, Matthews
//! correlation, average precision, the paired t-test, and Pearson
//! correlation.

use thiserror::Error;

use crate::{NeumaierSum, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("metric is undefined for zero instances")]
    Empty,
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("average precision requires at least one positive label")]
    NoPositives,
    #[error("scores must be finite")]
    NonFiniteScore,
    #[error("need at least {min} observations, got {len}")]
    TooFew { len: usize, min: usize },
    #[error("zero variance makes the statistic undefined")]
    ZeroVariance,
}

/// Binary confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub true_neg: u64,
    pub false_pos: u64,
    pub false_neg: u64,
}

impl ConfusionCounts {
    pub fn from_predictions(predicted: &[bool], gold: &[bool]) -> Result<Self, EvalError> {
        if predicted.len() != gold.len() {
            return Err(EvalError::LengthMismatch {
                left: predicted.len(),
                right: gold.len(),
            });
        }
        let mut counts = Self::default();
        for (&p, &g) in predicted.iter().zip(gold) {
            match (p, g) {
                (true, true) => counts.true_pos += 1,
                (false, false) => counts.true_neg += 1,
                (true, false) => counts.false_pos += 1,
                (false, true) => counts.false_neg += 1,
            }
        }
        Ok(counts)
    }

    pub fn n(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

/// (TP + TN) / N.
pub fn accuracy<F: Scalar>(cc: ConfusionCounts) -> Result<F, EvalError> {
    if cc.n() == 0 {
        return Err(EvalError::Empty);
    }
    Ok(F::from_u64(cc.true_pos + cc.true_neg).unwrap() / F::from_u64(cc.n()).unwrap())
}

/// Matthews correlation coefficient, (TP/N − S·P) / √(P·S·(1−P)·(1−S)) with
/// S = (TP+FN)/N the positive rate and P = (TP+FP)/N the predicted-positive
/// rate. Evaluated in integer arithmetic as
/// (TP·TN − FP·FN) / √((TP+FP)(TN+FN)(TP+FN)(TN+FP)), which is the Pearson
/// correlation of the two binary vectors. A zero denominator yields 0.
pub fn mcc<F: Scalar>(cc: ConfusionCounts) -> Result<F, EvalError> {
    if cc.n() == 0 {
        return Err(EvalError::Empty);
    }
    let (tp, tn, fp, fn_) = (
        cc.true_pos as i128,
        cc.true_neg as i128,
        cc.false_pos as i128,
        cc.false_neg as i128,
    );
    let d1 = (tp + fp) * (tn + fn_);
    let d2 = (tp + fn_) * (tn + fp);
    if d1 == 0 || d2 == 0 {
        return Ok(F::zero());
    }
    let numerator = (tp * tn - fp * fn_) as f64;
    Ok(F::from_f64(numerator / ((d1 as f64).sqrt() * (d2 as f64).sqrt())).unwrap())
}

/// Non-interpolated average precision: the mean, over the positive items, of
/// precision at that item's rank when items are sorted by descending score.
/// Ties keep their input order (stable sort), so the result is a
/// deterministic function of the input sequence.
pub fn average_precision<F: Scalar>(scores: &[F], labels: &[bool]) -> Result<F, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore);
    }
    let total_pos = labels.iter().filter(|&&l| l).count();
    if total_pos == 0 {
        return Err(EvalError::NoPositives);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).unwrap());
    let mut hits = 0u64;
    let mut sum = NeumaierSum::new();
    for (rank0, &i) in order.iter().enumerate() {
        if labels[i] {
            hits += 1;
            sum.add(F::from_u64(hits).unwrap() / F::from_usize(rank0 + 1).unwrap());
        }
    }
    Ok(sum.total() / F::from_usize(total_pos).unwrap())
}

/// Result of a paired t-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTTest<F = f64> {
    pub t: F,
    pub p_value: F,
    pub df: usize,
}

/// Paired t-test on the per-item differences of two binary agreement
/// vectors, with n−1 degrees of freedom and a two-sided p-value. Constant
/// differences (including all-zero) have no variance and are rejected.
pub fn paired_ttest<F: Scalar>(
    agree_a: &[bool],
    agree_b: &[bool],
) -> Result<PairedTTest<F>, EvalError> {
    if agree_a.len() != agree_b.len() {
        return Err(EvalError::LengthMismatch {
            left: agree_a.len(),
            right: agree_b.len(),
        });
    }
    let n = agree_a.len();
    if n < 2 {
        return Err(EvalError::TooFew { len: n, min: 2 });
    }
    let diffs: Vec<f64> = agree_a
        .iter()
        .zip(agree_b)
        .map(|(&a, &b)| f64::from(i8::from(a) - i8::from(b)))
        .collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let mut ss = NeumaierSum::new();
    for d in &diffs {
        ss.add((d - mean) * (d - mean));
    }
    let variance = ss.total() / (n - 1) as f64;
    if variance <= 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    let t = mean / (variance / n as f64).sqrt();
    let df = n - 1;
    Ok(PairedTTest {
        t: F::from_f64(t).unwrap(),
        p_value: F::from_f64(student_t_two_sided_p(t, df as f64)).unwrap(),
        df,
    })
}

/// Sample Pearson correlation coefficient.
pub fn pearson_r<F: Scalar>(x: &[F], y: &[F]) -> Result<F, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(EvalError::TooFew { len: n, min: 2 });
    }
    let nf = F::from_usize(n).unwrap();
    let mean_x = x.iter().copied().collect::<NeumaierSum<F>>().total() / nf;
    let mean_y = y.iter().copied().collect::<NeumaierSum<F>>().total() / nf;
    let mut sxy = NeumaierSum::new();
    let mut sxx = NeumaierSum::new();
    let mut syy = NeumaierSum::new();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    let (sxy, sxx, syy) = (sxy.total(), sxx.total(), syy.total());
    if !(sxx > F::zero()) || !(syy > F::zero()) {
        return Err(EvalError::ZeroVariance);
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Ok(r.min(F::one()).max(-F::one()))
}

/// Two-sided p-value of the Student-t distribution,
/// `I_x(df/2, 1/2)` with `x = df/(df + t²)`.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
}

/// Lanczos approximation (g = 7, 9 terms) of ln Γ(x) for x ≥ 0.5.
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x >= 0.5);
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta function, evaluated with the
/// modified Lentz algorithm. Converges quickly for x < (a+1)/(a+b+2).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b) for a, b > 0.
fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}
