//! L2-regularized L2-loss linear classification in the primal.
//!
//! Training minimizes `0.5·‖w‖² + c·Σ max(0, 1 − y_i(w·x_i + b))²` over
//! sparse feature vectors, with an unregularized bias term, using a
//! trust-region Newton method whose inner subproblem is solved by
//! Steihaug conjugate gradients. The solver terminates when the gradient
//! norm falls below 1e-4 of its starting value. Decision scores map to
//! probabilities through the plain sigmoid, and the positive label requires
//! probability strictly above one half (equivalently, score above zero).

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureKey, SparseVector};
use crate::Scalar;

pub const MODEL_FORMAT: &str = "cognid-linear-model";
pub const MODEL_VERSION: u32 = 1;

/// Relative gradient-norm termination threshold.
const EPS_REL: f64 = 1e-4;
/// CG forcing factor: the inner solve stops at `‖r‖ ≤ 0.1·‖g‖`.
const CG_FORCING: f64 = 0.1;
const MAX_OUTER_ITER: usize = 200;
const MAX_CG_ITER: usize = 250;
/// Minimum ratio of actual to predicted reduction for accepting a step.
const ETA_ACCEPT: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("training requires at least one example")]
    Empty,
    #[error("training requires at least one example of each class")]
    SingleClass,
    #[error("feature values must be finite")]
    NonFiniteFeature,
    #[error("regularization trade-off c must be positive and finite, got {0}")]
    BadC(f64),
    #[error("model file I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not a linear model file: {reason}")]
    BadFormat { reason: String },
    #[error("unsupported model file version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
}

/// Bijective map from feature keys to dense column ids, frozen at training
/// time. Keys unseen during training have no column and are dropped at
/// prediction time.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureIndex {
    columns: BTreeMap<FeatureKey, u32>,
}

impl FeatureIndex {
    /// Builds the index over all keys occurring in `vectors`, assigning
    /// columns in sorted key order.
    pub fn from_vectors<'a, F: Scalar + 'a>(
        vectors: impl IntoIterator<Item = &'a SparseVector<F>>,
    ) -> Self {
        let mut columns = BTreeMap::new();
        for fv in vectors {
            for (key, _) in fv.iter() {
                let next = columns.len() as u32;
                columns.entry(key.clone()).or_insert(next);
            }
        }
        // Reassign in sorted key order so the layout does not depend on the
        // order examples were seen in.
        for (i, (_, column)) in columns.iter_mut().enumerate() {
            *column = i as u32;
        }
        Self { columns }
    }

    fn from_ordered_keys(keys: Vec<FeatureKey>) -> Result<Self, ClassifierError> {
        let mut columns = BTreeMap::new();
        for (i, key) in keys.into_iter().enumerate() {
            if columns.insert(key, i as u32).is_some() {
                return Err(ClassifierError::BadFormat {
                    reason: "duplicate feature key".to_string(),
                });
            }
        }
        Ok(Self { columns })
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, key: &FeatureKey) -> Option<usize> {
        self.columns.get(key).map(|&c| c as usize)
    }

    /// Keys ordered by column id.
    pub fn keys_by_column(&self) -> Vec<&FeatureKey> {
        let mut keys: Vec<(&FeatureKey, u32)> =
            self.columns.iter().map(|(k, &c)| (k, c)).collect();
        keys.sort_by_key(|&(_, c)| c);
        keys.into_iter().map(|(k, _)| k).collect()
    }
}

/// Solver provenance kept alongside a trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMeta<F = f64> {
    pub iterations: usize,
    pub final_objective: F,
    pub seed: u64,
    /// Objective value after each accepted step, starting at the initial
    /// point; never increasing.
    pub objective_history: Vec<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<F = f64> {
    index: FeatureIndex,
    weights: Vec<F>,
    bias: F,
    c: F,
    meta: TrainingMeta<F>,
}

/// Output of [`LinearModel::predict`]: `probability = sigmoid(score)` and
/// `label` is positive iff the score is strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<F = f64> {
    pub score: F,
    pub probability: F,
    pub label: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrainOptions {
    /// Parallelize the per-example loops. The accumulation order then
    /// differs from the sequential run, but final objectives agree within
    /// 1e-6. The default sequential mode is bitwise deterministic.
    pub parallel: bool,
}

/// Trains with the default (sequential, deterministic) options. `c` is the
/// loss trade-off, default 1 at call sites following the library convention.
/// The seed is recorded in the model metadata; the solver itself draws no
/// random numbers.
pub fn train<F: Scalar>(
    examples: &[(SparseVector<F>, bool)],
    c: F,
    seed: u64,
) -> Result<LinearModel<F>, ClassifierError> {
    train_with(examples, c, seed, TrainOptions::default())
}

pub fn train_with<F: Scalar>(
    examples: &[(SparseVector<F>, bool)],
    c: F,
    seed: u64,
    options: TrainOptions,
) -> Result<LinearModel<F>, ClassifierError> {
    if examples.is_empty() {
        return Err(ClassifierError::Empty);
    }
    let positives = examples.iter().filter(|(_, label)| *label).count();
    if positives == 0 || positives == examples.len() {
        return Err(ClassifierError::SingleClass);
    }
    if !(c > F::zero()) || !c.is_finite() {
        return Err(ClassifierError::BadC(c.to_f64().unwrap_or(f64::NAN)));
    }
    for (fv, _) in examples {
        if fv.iter().any(|(_, w)| !w.is_finite()) {
            return Err(ClassifierError::NonFiniteFeature);
        }
    }

    let index = FeatureIndex::from_vectors(examples.iter().map(|(fv, _)| fv));
    let n = examples.len();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut y = Vec::with_capacity(n);
    row_ptr.push(0);
    for (fv, label) in examples {
        for (key, weight) in fv.iter() {
            cols.push(index.column(key).expect("indexed key") as u32);
            vals.push(weight);
        }
        row_ptr.push(cols.len());
        y.push(if *label { F::one() } else { -F::one() });
    }

    let problem = Problem {
        dim: index.len(),
        row_ptr,
        cols,
        vals,
        y,
        c,
        parallel: options.parallel,
    };
    let solution = solve(&problem);
    let bias = solution.v[problem.dim];
    let weights = solution.v[..problem.dim].to_vec();
    Ok(LinearModel {
        index,
        weights,
        bias,
        c,
        meta: TrainingMeta {
            iterations: solution.iterations,
            final_objective: *solution.history.last().expect("nonempty history"),
            seed,
            objective_history: solution.history,
        },
    })
}

impl<F: Scalar> LinearModel<F> {
    pub fn predict(&self, fv: &SparseVector<F>) -> Prediction<F> {
        let mut score = self.bias;
        for (key, weight) in fv.iter() {
            if let Some(column) = self.index.column(key) {
                score = score + self.weights[column] * weight;
            }
        }
        let probability = sigmoid(score);
        Prediction {
            score,
            probability,
            label: score > F::zero(),
        }
    }

    pub fn index(&self) -> &FeatureIndex {
        &self.index
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn bias(&self) -> F {
        self.bias
    }

    pub fn c(&self) -> F {
        self.c
    }

    pub fn meta(&self) -> &TrainingMeta<F> {
        &self.meta
    }

    /// Weight entries as (key, weight) pairs in column order.
    pub fn weight_entries(&self) -> Vec<(FeatureKey, F)> {
        self.index
            .keys_by_column()
            .into_iter()
            .zip(self.weights.iter())
            .map(|(key, &w)| (key.clone(), w))
            .collect()
    }

    /// Rebuilds a model from explicit per-key weights, carrying over `c` and
    /// the training metadata. This is how callers fold an affine feature
    /// transform (such as standardization) back into raw-feature space: the
    /// keys need not match the original index.
    pub fn with_weights(
        entries: Vec<(FeatureKey, F)>,
        bias: F,
        c: F,
        meta: TrainingMeta<F>,
    ) -> Result<Self, ClassifierError> {
        if !bias.is_finite() || entries.iter().any(|(_, w)| !w.is_finite()) {
            return Err(ClassifierError::NonFiniteFeature);
        }
        let mut entries = entries;
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let (keys, weights): (Vec<FeatureKey>, Vec<F>) = entries.into_iter().unzip();
        let index = FeatureIndex::from_ordered_keys(keys)?;
        Ok(LinearModel {
            index,
            weights,
            bias,
            c,
            meta,
        })
    }

    /// Serializes the model as versioned JSON. Weights are stored as f64,
    /// which round-trips exactly.
    pub fn to_json_string(&self) -> String {
        let keys = self.index.keys_by_column();
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            c: self.c.to_f64().unwrap(),
            bias: self.bias.to_f64().unwrap(),
            seed: self.meta.seed,
            iterations: self.meta.iterations,
            final_objective: self.meta.final_objective.to_f64().unwrap(),
            objective_history: self
                .meta
                .objective_history
                .iter()
                .map(|f| f.to_f64().unwrap())
                .collect(),
            features: keys
                .iter()
                .zip(&self.weights)
                .map(|(key, w)| (key.render(), w.to_f64().unwrap()))
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str) -> Result<Self, ClassifierError> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != MODEL_FORMAT {
            return Err(ClassifierError::BadFormat {
                reason: format!("format tag {:?}", file.format),
            });
        }
        if file.version != MODEL_VERSION {
            return Err(ClassifierError::VersionMismatch {
                found: file.version,
                expected: MODEL_VERSION,
            });
        }
        let mut keys = Vec::with_capacity(file.features.len());
        let mut weights = Vec::with_capacity(file.features.len());
        for (rendered, weight) in &file.features {
            keys.push(FeatureKey::parse(rendered).map_err(|e| ClassifierError::BadFormat {
                reason: e.to_string(),
            })?);
            weights.push(F::from_f64(*weight).unwrap());
        }
        Ok(Self {
            index: FeatureIndex::from_ordered_keys(keys)?,
            weights,
            bias: F::from_f64(file.bias).unwrap(),
            c: F::from_f64(file.c).unwrap(),
            meta: TrainingMeta {
                iterations: file.iterations,
                final_objective: F::from_f64(file.final_objective).unwrap(),
                seed: file.seed,
                objective_history: file
                    .objective_history
                    .iter()
                    .map(|&f| F::from_f64(f).unwrap())
                    .collect(),
            },
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ClassifierError> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ClassifierError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

fn sigmoid<F: Scalar>(score: F) -> F {
    if score >= F::zero() {
        F::one() / (F::one() + (-score).exp())
    } else {
        let e = score.exp();
        e / (F::one() + e)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    c: f64,
    bias: f64,
    seed: u64,
    iterations: usize,
    final_objective: f64,
    objective_history: Vec<f64>,
    features: Vec<(String, f64)>,
}

/// Training data in CSR form over `dim` weight columns plus an implicit
/// all-ones bias column at index `dim`.
struct Problem<F> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<F>,
    y: Vec<F>,
    c: F,
    parallel: bool,
}

struct Solution<F> {
    v: Vec<F>,
    iterations: usize,
    history: Vec<F>,
}

impl<F: Scalar> Problem<F> {
    fn n(&self) -> usize {
        self.y.len()
    }

    fn row_score(&self, v: &[F], i: usize) -> F {
        let mut z = v[self.dim];
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            z = z + v[self.cols[k] as usize] * self.vals[k];
        }
        z
    }

    fn margins(&self, v: &[F]) -> Vec<F> {
        if self.parallel {
            (0..self.n())
                .into_par_iter()
                .map(|i| self.row_score(v, i))
                .collect()
        } else {
            (0..self.n()).map(|i| self.row_score(v, i)).collect()
        }
    }

    fn objective(&self, v: &[F], z: &[F]) -> F {
        let mut reg = F::zero();
        for &w in &v[..self.dim] {
            reg = reg + w * w;
        }
        let loss_of = |i: usize| {
            let d = F::one() - self.y[i] * z[i];
            if d > F::zero() {
                d * d
            } else {
                F::zero()
            }
        };
        let loss = if self.parallel {
            (0..self.n())
                .into_par_iter()
                .map(loss_of)
                .reduce(F::zero, |a, b| a + b)
        } else {
            (0..self.n()).map(loss_of).fold(F::zero(), |a, b| a + b)
        };
        F::from_f64(0.5).unwrap() * reg + self.c * loss
    }

    fn active_set(&self, z: &[F]) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.y[i] * z[i] < F::one())
            .collect()
    }

    /// `g = [w; 0] + 2c·Σ_{i active} (z_i − y_i)·x̃_i`.
    fn gradient(&self, v: &[F], z: &[F], active: &[usize]) -> Vec<F> {
        let mut g = vec![F::zero(); self.dim + 1];
        g[..self.dim].copy_from_slice(&v[..self.dim]);
        let two_c = self.c + self.c;
        let add_row = |acc: &mut Vec<F>, i: usize| {
            let coef = two_c * (z[i] - self.y[i]);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let col = self.cols[k] as usize;
                acc[col] = acc[col] + coef * self.vals[k];
            }
            acc[self.dim] = acc[self.dim] + coef;
        };
        self.accumulate(active, &mut g, add_row);
        g
    }

    /// `Hs = [s_w; 0] + 2c·Σ_{i active} (x̃_i·s)·x̃_i`.
    fn hess_vec(&self, s: &[F], active: &[usize]) -> Vec<F> {
        let mut hs = vec![F::zero(); self.dim + 1];
        hs[..self.dim].copy_from_slice(&s[..self.dim]);
        let two_c = self.c + self.c;
        let add_row = |acc: &mut Vec<F>, i: usize| {
            let mut xts = s[self.dim];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                xts = xts + s[self.cols[k] as usize] * self.vals[k];
            }
            let coef = two_c * xts;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let col = self.cols[k] as usize;
                acc[col] = acc[col] + coef * self.vals[k];
            }
            acc[self.dim] = acc[self.dim] + coef;
        };
        self.accumulate(active, &mut hs, add_row);
        hs
    }

    fn accumulate(
        &self,
        active: &[usize],
        out: &mut Vec<F>,
        add_row: impl Fn(&mut Vec<F>, usize) + Sync,
    ) {
        if self.parallel {
            let partial = active
                .par_iter()
                .fold(
                    || vec![F::zero(); out.len()],
                    |mut acc, &i| {
                        add_row(&mut acc, i);
                        acc
                    },
                )
                .reduce(
                    || vec![F::zero(); out.len()],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x = *x + y;
                        }
                        a
                    },
                );
            for (x, y) in out.iter_mut().zip(partial) {
                *x = *x + y;
            }
        } else {
            for &i in active {
                add_row(out, i);
            }
        }
    }
}

fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

fn norm<F: Scalar>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

/// Steihaug conjugate gradients for the trust-region subproblem
/// `min gᵀs + 0.5·sᵀHs` subject to `‖s‖ ≤ delta`.
fn cg_steihaug<F: Scalar>(
    problem: &Problem<F>,
    active: &[usize],
    g: &[F],
    delta: F,
) -> Vec<F> {
    let n = g.len();
    let mut z = vec![F::zero(); n];
    let mut r: Vec<F> = g.iter().map(|&gi| -gi).collect();
    let tol = F::from_f64(CG_FORCING).unwrap() * norm(g);
    let mut d = r.clone();
    let mut rr = dot(&r, &r);
    if !(rr.sqrt() > tol) {
        return z;
    }
    for _ in 0..MAX_CG_ITER {
        let hd = problem.hess_vec(&d, active);
        let dhd = dot(&d, &hd);
        if !(dhd > F::zero()) {
            return to_boundary(&z, &d, delta);
        }
        let alpha = rr / dhd;
        let z_next: Vec<F> = z.iter().zip(&d).map(|(&zi, &di)| zi + alpha * di).collect();
        if norm(&z_next) >= delta {
            return to_boundary(&z, &d, delta);
        }
        z = z_next;
        for (ri, hdi) in r.iter_mut().zip(&hd) {
            *ri = *ri - alpha * *hdi;
        }
        let rr_next = dot(&r, &r);
        if rr_next.sqrt() <= tol {
            break;
        }
        let beta = rr_next / rr;
        for (di, &ri) in d.iter_mut().zip(&r) {
            *di = ri + beta * *di;
        }
        rr = rr_next;
    }
    z
}

/// The point `z + τ·d` with τ ≥ 0 on the trust-region boundary.
fn to_boundary<F: Scalar>(z: &[F], d: &[F], delta: F) -> Vec<F> {
    let zz = dot(z, z);
    let zd = dot(z, d);
    let dd = dot(d, d);
    if !(dd > F::zero()) {
        return z.to_vec();
    }
    let radical = (zd * zd + dd * (delta * delta - zz)).max(F::zero()).sqrt();
    let tau = (delta * delta - zz) / (zd + radical);
    z.iter().zip(d).map(|(&zi, &di)| zi + tau * di).collect()
}

fn solve<F: Scalar>(problem: &Problem<F>) -> Solution<F> {
    let n_vars = problem.dim + 1;
    let mut v = vec![F::zero(); n_vars];
    let mut z = problem.margins(&v);
    let mut f = problem.objective(&v, &z);
    let mut history = vec![f];
    let mut active = problem.active_set(&z);
    let mut g = problem.gradient(&v, &z, &active);
    let gnorm0 = norm(&g);
    let mut gnorm = gnorm0;
    let eps = F::from_f64(EPS_REL).unwrap() * gnorm0;
    let mut delta = gnorm0;
    let mut iterations = 0;

    let half = F::from_f64(0.5).unwrap();
    let quarter = F::from_f64(0.25).unwrap();
    let eta = F::from_f64(ETA_ACCEPT).unwrap();

    while iterations < MAX_OUTER_ITER && gnorm > eps && gnorm > F::zero() {
        iterations += 1;
        let s = cg_steihaug(problem, &active, &g, delta);
        let snorm = norm(&s);
        if !(snorm > F::zero()) {
            break;
        }
        let hs = problem.hess_vec(&s, &active);
        let prered = -(dot(&g, &s) + half * dot(&s, &hs));
        let v_next: Vec<F> = v.iter().zip(&s).map(|(&a, &b)| a + b).collect();
        let z_next = problem.margins(&v_next);
        let f_next = problem.objective(&v_next, &z_next);
        let actred = f - f_next;
        if iterations == 1 {
            delta = delta.min(snorm);
        }
        let accepted = f_next.is_finite() && prered > F::zero() && actred > eta * prered;
        if accepted {
            let rho = actred / prered;
            v = v_next;
            z = z_next;
            f = f_next;
            active = problem.active_set(&z);
            g = problem.gradient(&v, &z, &active);
            gnorm = norm(&g);
            history.push(f);
            if rho > F::from_f64(0.75).unwrap() && snorm >= F::from_f64(0.99).unwrap() * delta {
                delta = delta + delta;
            } else if rho < quarter {
                delta = quarter * snorm;
            }
        } else {
            delta = quarter * snorm;
            if !(delta > F::from_f64(1e-30).unwrap()) {
                break;
            }
        }
    }

    Solution {
        v,
        iterations,
        history,
    }
}
