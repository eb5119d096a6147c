//! Linear SVMs with per-class misclassification costs.
//!
//! Training solves the L2-regularized hinge-loss problem
//!
//! ```text
//! min_w  ½‖w‖² + Σ_i C_i · max(0, 1 − y_i · w·x̃_i)
//! ```
//!
//! where `x̃_i` is `x_i` with a constant feature of value 1 appended (so the
//! bias is regularized like any other weight) and `C_i = C × weight(class_i)`.
//! The solver is dual coordinate descent over the box `0 ≤ α_i ≤ C_i`, one
//! seeded random permutation per sweep, without shrinking. It stops once the
//! largest projected-gradient violation is below the tolerance and the
//! duality gap is at most `tolerance × min(1, primal)`, or after
//! `max_iterations` sweeps.
//!
//! Multiclass problems are reduced one-vs-rest.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::ClassId;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub c: f64,
    /// Classes without an entry have weight 1.
    pub class_weights: BTreeMap<ClassId, f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            c: 1.0,
            class_weights: BTreeMap::new(),
            tolerance: 1e-4,
            max_iterations: 1000,
            seed: 42,
        }
    }
}

impl TrainParams {
    pub fn with_c(c: f64) -> Self {
        TrainParams {
            c,
            ..Default::default()
        }
    }

    pub fn weight(&self, class: ClassId) -> f64 {
        self.class_weights.get(&class).copied().unwrap_or(1.0)
    }

    /// Effective cost for instances of `class`.
    pub fn cost(&self, class: ClassId) -> f64 {
        self.c * self.weight(class)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!("C must be positive, got {}", self.c)));
        }
        for (class, w) in &self.class_weights {
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::Config(format!("weight of class {class} must be positive, got {w}")));
            }
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// A binary problem in solver form: labels ±1 and per-instance upper bounds.
#[derive(Debug, Clone)]
pub struct BinaryProblem<'a> {
    xs: &'a [FeatureVector],
    ys: Vec<f64>,
    upper: Vec<f64>,
    dim: usize,
}

/// Solver output for one binary problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    /// Length `dim + 1`; the last entry is the bias.
    pub w: Vec<f64>,
    pub alpha: Vec<f64>,
    pub report: Convergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub sweeps: usize,
    pub converged: bool,
    pub primal: f64,
    pub dual: f64,
    pub max_violation: f64,
}

impl Convergence {
    pub fn gap(&self) -> f64 {
        self.primal - self.dual
    }
}

impl<'a> BinaryProblem<'a> {
    /// `ys` must be ±1 and `upper` positive, both aligned with `xs`.
    pub fn new(xs: &'a [FeatureVector], ys: Vec<f64>, upper: Vec<f64>, dim: usize) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch(xs.len(), ys.len()));
        }
        if xs.len() != upper.len() {
            return Err(Error::LengthMismatch(xs.len(), upper.len()));
        }
        if xs.is_empty() {
            return Err(Error::Training("no training instances".into()));
        }
        if ys.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::Training("binary labels must be -1 or +1".into()));
        }
        if !ys.contains(&1.0) || !ys.contains(&-1.0) {
            return Err(Error::Training("both classes must be present".into()));
        }
        if let Some(&u) = upper.iter().find(|u| !(**u > 0.0 && u.is_finite())) {
            return Err(Error::Training(format!("invalid instance cost {u}")));
        }
        check_range(xs, dim)?;
        Ok(BinaryProblem { xs, ys, upper, dim })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[f64] {
        &self.ys
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }

    pub fn instances(&self) -> &[FeatureVector] {
        self.xs
    }

    fn margin(&self, w: &[f64], i: usize) -> f64 {
        self.ys[i] * (self.xs[i].dot(&w[..self.dim]) + w[self.dim])
    }

    /// `½‖w‖² + Σ C_i · hinge_i` for a weight vector of length `dim + 1`.
    pub fn primal_objective(&self, w: &[f64]) -> f64 {
        let reg = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
        let loss: f64 = (0..self.len())
            .map(|i| self.upper[i] * (1.0 - self.margin(w, i)).max(0.0))
            .sum();
        reg + loss
    }

    /// `Σ α_i − ½‖w(α)‖²` where `w(α) = Σ α_i y_i x̃_i`.
    pub fn dual_objective(&self, alpha: &[f64]) -> f64 {
        let w = self.weights_from_dual(alpha);
        alpha.iter().sum::<f64>() - 0.5 * w.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn weights_from_dual(&self, alpha: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.dim + 1];
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                self.xs[i].add_to(&mut w[..self.dim], a * self.ys[i]);
                w[self.dim] += a * self.ys[i];
            }
        }
        w
    }

    pub fn solve(&self, tolerance: f64, max_iterations: usize, seed: u64) -> DualSolution {
        let n = self.len();
        let d = self.dim;
        let diag: Vec<f64> = self.xs.iter().map(|x| x.squared_norm() + 1.0).collect();
        let mut alpha = vec![0.0; n];
        let mut w = vec![0.0; d + 1];
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = Convergence {
            sweeps: 0,
            converged: false,
            primal: self.primal_objective(&w),
            dual: 0.0,
            max_violation: f64::INFINITY,
        };

        for sweep in 1..=max_iterations {
            order.shuffle(&mut rng);
            let mut max_violation = 0.0f64;
            for &i in &order {
                let g = self.margin(&w, i) - 1.0;
                let u = self.upper[i];
                let pg = if alpha[i] <= 0.0 {
                    g.min(0.0)
                } else if alpha[i] >= u {
                    g.max(0.0)
                } else {
                    g
                };
                max_violation = max_violation.max(pg.abs());
                if pg != 0.0 {
                    let old = alpha[i];
                    alpha[i] = (old - g / diag[i]).clamp(0.0, u);
                    let step = (alpha[i] - old) * self.ys[i];
                    if step != 0.0 {
                        self.xs[i].add_to(&mut w[..d], step);
                        w[d] += step;
                    }
                }
            }
            let sq = w.iter().map(|v| v * v).sum::<f64>();
            let primal = self.primal_objective(&w);
            let dual = alpha.iter().sum::<f64>() - 0.5 * sq;
            debug_assert!(
                primal - dual >= -1e-9 * (1.0 + primal.abs()),
                "weak duality violated: primal {primal} < dual {dual}"
            );
            report = Convergence {
                sweeps: sweep,
                converged: false,
                primal,
                dual,
                max_violation,
            };
            // The gap bound is absolute for large objectives and relative for small ones.
            if max_violation < tolerance && primal - dual <= tolerance * primal.abs().min(1.0) {
                report.converged = true;
                break;
            }
        }
        DualSolution { w, alpha, report }
    }
}

fn check_range(xs: &[FeatureVector], dim: usize) -> Result<()> {
    for x in xs {
        if let Some(id) = x.max_id() {
            if id as usize >= dim {
                return Err(Error::FeatureOutOfRange { id, dim });
            }
        }
    }
    Ok(())
}

/// 64-bit FNV-1a over labels and vector contents.
fn fingerprint(xs: &[FeatureVector], ys: &[ClassId]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for (x, y) in xs.iter().zip(ys) {
        feed(&y.to_le_bytes());
        for &(id, v) in x.entries() {
            feed(&id.to_le_bytes());
            feed(&v.to_bits().to_le_bytes());
        }
        feed(&[0xff]);
    }
    format!("{h:016x}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub params: TrainParams,
    pub space_size: usize,
    pub instances: usize,
    pub data_fingerprint: String,
    /// One entry per binary sub-problem.
    pub convergence: Vec<Convergence>,
}

/// A trained linear classifier.
///
/// A binary model has classes `[negative, positive]` and one weight vector;
/// a one-vs-rest model has one vector per class. Every vector has length
/// `space_size + 1` with the bias last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    classes: Vec<ClassId>,
    weights: Vec<Vec<f64>>,
    metadata: ModelMetadata,
}

impl LinearModel {
    /// Assembles a model from explicit weights (binary when there are two
    /// classes and one vector).
    pub fn from_parts(classes: Vec<ClassId>, weights: Vec<Vec<f64>>, metadata: ModelMetadata) -> Result<Self> {
        let binary = classes.len() == 2 && weights.len() == 1;
        if classes.len() < 2 || !(binary || weights.len() == classes.len()) {
            return Err(Error::Model(format!(
                "{} weight vectors for {} classes",
                weights.len(),
                classes.len()
            )));
        }
        if !classes.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::Model("classes must be strictly increasing".into()));
        }
        let len = metadata.space_size + 1;
        if weights.iter().any(|w| w.len() != len) {
            return Err(Error::Model(format!("weight vectors must have length {len}")));
        }
        Ok(LinearModel {
            classes,
            weights,
            metadata,
        })
    }

    pub fn is_binary(&self) -> bool {
        self.weights.len() == 1
    }

    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    pub fn positive_class(&self) -> ClassId {
        *self.classes.last().expect("at least two classes")
    }

    pub fn space_size(&self) -> usize {
        self.metadata.space_size
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    /// Weight vector `k` without its bias.
    pub fn weights(&self, k: usize) -> &[f64] {
        &self.weights[k][..self.space_size()]
    }

    pub fn bias(&self, k: usize) -> f64 {
        self.weights[k][self.space_size()]
    }

    /// Full vector `k` including the trailing bias.
    pub fn augmented_weights(&self, k: usize) -> &[f64] {
        &self.weights[k]
    }

    /// One value for a binary model, one per class otherwise.
    pub fn decision_values(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        if let Some(id) = x.max_id() {
            if id as usize >= self.space_size() {
                return Err(Error::FeatureOutOfRange {
                    id,
                    dim: self.space_size(),
                });
            }
        }
        Ok((0..self.weights.len())
            .map(|k| x.dot(self.weights(k)) + self.bias(k))
            .collect())
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<ClassId> {
        let values = self.decision_values(x)?;
        Ok(self.class_of(&values))
    }

    pub fn predict_all(&self, xs: &[FeatureVector]) -> Result<Vec<ClassId>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    /// Binary: non-negative → positive class. Otherwise the argmax, with
    /// ties going to the smaller class id.
    pub fn class_of(&self, values: &[f64]) -> ClassId {
        if self.is_binary() {
            return if values[0] >= 0.0 {
                self.classes[1]
            } else {
                self.classes[0]
            };
        }
        let mut best = 0;
        for k in 1..values.len() {
            if values[k] > values[best] {
                best = k;
            }
        }
        self.classes[best]
    }
}

fn convergence_warning(report: &Convergence, what: &str) {
    if !report.converged {
        log::warn!(
            "{what}: stopped after {} sweeps without converging (violation {:.3e}, gap {:.3e})",
            report.sweeps,
            report.max_violation,
            report.gap()
        );
    }
}

fn classes_present(ys: &[ClassId]) -> Vec<ClassId> {
    let mut c: Vec<ClassId> = ys.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// Trains a two-class model. The larger class id is the positive side.
/// Each instance's cost is `C × weight(its class)`.
pub fn train_binary(xs: &[FeatureVector], ys: &[ClassId], dim: usize, params: &TrainParams) -> Result<LinearModel> {
    params.validate()?;
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.is_empty() {
        return Err(Error::Training("no training instances".into()));
    }
    let classes = classes_present(ys);
    if classes.len() != 2 {
        return Err(Error::Training(format!(
            "binary training needs exactly two classes, found {classes:?}"
        )));
    }
    let positive = classes[1];
    let signs = ys.iter().map(|&y| if y == positive { 1.0 } else { -1.0 }).collect();
    let upper = ys.iter().map(|&y| params.cost(y)).collect();
    let problem = BinaryProblem::new(xs, signs, upper, dim)?;
    let sol = problem.solve(params.tolerance, params.max_iterations, params.seed);
    convergence_warning(&sol.report, "binary SVM");
    let metadata = ModelMetadata {
        params: params.clone(),
        space_size: dim,
        instances: xs.len(),
        data_fingerprint: fingerprint(xs, ys),
        convergence: vec![sol.report],
    };
    LinearModel::from_parts(classes, vec![sol.w], metadata)
}

/// One-vs-rest over `labels`. In sub-problem `k` the class-`k` instances cost
/// `C × weight(k)` and all others cost `C`. Sub-problems train in parallel.
pub fn train_multiclass(
    xs: &[FeatureVector],
    ys: &[ClassId],
    dim: usize,
    params: &TrainParams,
    labels: &[ClassId],
) -> Result<LinearModel> {
    params.validate()?;
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.is_empty() {
        return Err(Error::Training("no training instances".into()));
    }
    let labels = classes_present(labels);
    if labels.len() < 2 {
        return Err(Error::Training("at least two classes are required".into()));
    }
    if let Some(y) = ys.iter().find(|y| labels.binary_search(y).is_err()) {
        return Err(Error::LabelOutOfDomain {
            label: *y,
            domain: labels.clone(),
        });
    }
    check_range(xs, dim)?;
    let solutions: Vec<DualSolution> = labels
        .par_iter()
        .enumerate()
        .map(|(k, &class)| {
            let signs = ys.iter().map(|&y| if y == class { 1.0 } else { -1.0 }).collect();
            let upper = ys
                .iter()
                .map(|&y| if y == class { params.cost(class) } else { params.c })
                .collect();
            let problem = BinaryProblem::new(xs, signs, upper, dim)
                .map_err(|e| Error::Training(format!("class {class} vs rest: {e}")))?;
            let sol = problem.solve(params.tolerance, params.max_iterations, params.seed.wrapping_add(k as u64));
            convergence_warning(&sol.report, &format!("class {class} vs rest"));
            Ok(sol)
        })
        .collect::<Result<_>>()?;
    let metadata = ModelMetadata {
        params: params.clone(),
        space_size: dim,
        instances: xs.len(),
        data_fingerprint: fingerprint(xs, ys),
        convergence: solutions.iter().map(|s| s.report.clone()).collect(),
    };
    LinearModel::from_parts(labels, solutions.into_iter().map(|s| s.w).collect(), metadata)
}

/// Binary training for two labels, one-vs-rest for more.
pub fn train(
    xs: &[FeatureVector],
    ys: &[ClassId],
    dim: usize,
    params: &TrainParams,
    labels: &[ClassId],
) -> Result<LinearModel> {
    if classes_present(labels).len() == 2 {
        train_binary(xs, ys, dim, params)
    } else {
        train_multiclass(xs, ys, dim, params, labels)
    }
}
