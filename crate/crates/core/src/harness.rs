//! Desk-scale hyperparameter-search pipeline: Ridge base models, grid and
//! random samplers, out-of-fold prediction matrices and held-out evaluation
//! of every ensemble method.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::relative_mse;
use crate::error::{Error, Result};
use crate::methods::{per_model_losses, Method};
use crate::types::{mean, PredictionMatrix, TargetVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: DMatrix<f64>,
    pub target: Vec<f64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, features: DMatrix<f64>, target: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if features.nrows() != target.len() {
            return Err(Error::DimensionMismatch(format!(
                "dataset `{name}`: {} feature rows, {} targets",
                features.nrows(),
                target.len()
            )));
        }
        if target.len() < 6 {
            return Err(Error::Empty(format!(
                "dataset `{name}` has {} rows, need at least 6",
                target.len()
            )));
        }
        if features.ncols() == 0 {
            return Err(Error::Empty(format!("dataset `{name}` has no features")));
        }
        if features.iter().chain(&target).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("dataset `{name}`")));
        }
        Ok(Self {
            name,
            features,
            target,
        })
    }

    pub fn nrows(&self) -> usize {
        self.target.len()
    }

    pub fn select_rows(&self, rows: &[usize]) -> (DMatrix<f64>, Vec<f64>) {
        (
            self.features.select_rows(rows.iter()),
            rows.iter().map(|&i| self.target[i]).collect(),
        )
    }
}

/// Linear model `x·weights + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl RidgeModel {
    pub fn predict(&self, features: &DMatrix<f64>) -> Vec<f64> {
        let w = DVector::from_column_slice(&self.weights);
        (features * w).iter().map(|v| v + self.intercept).collect()
    }
}

/// Minimizes `‖y − Xw − b‖² + alpha·‖w‖²` with an unpenalized intercept.
///
/// Solved through the SVD of the centered design, so `alpha = 0` yields the
/// minimum-norm least squares solution.
pub fn fit_ridge(features: &DMatrix<f64>, target: &[f64], alpha: f64) -> Result<RidgeModel> {
    let (n, d) = features.shape();
    if n != target.len() {
        return Err(Error::DimensionMismatch(format!(
            "{n} feature rows, {} targets",
            target.len()
        )));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "ridge alpha must be >= 0, got {alpha}"
        )));
    }
    let means: Vec<f64> = (0..d).map(|j| features.column(j).mean()).collect();
    let y_mean = mean(target);
    let xc = DMatrix::from_fn(n, d, |i, j| features[(i, j)] - means[j]);
    let yc = DVector::from_iterator(n, target.iter().map(|v| v - y_mean));

    let svd = xc.svd(true, true);
    let (u, v_t) = match (svd.u.as_ref(), svd.v_t.as_ref()) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("svd requested with u and v_t"),
    };
    let s_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = n.max(d) as f64 * f64::EPSILON * s_max;
    let mut w = DVector::zeros(d);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let factor = s / (s * s + alpha);
        w += v_t.row(i).transpose() * (u.column(i).dot(&yc) * factor);
    }
    let intercept = y_mean - w.iter().zip(&means).map(|(a, m)| a * m).sum::<f64>();
    Ok(RidgeModel {
        weights: w.iter().copied().collect(),
        intercept,
    })
}

/// One hyperparameter configuration of the Ridge base learner.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperparameterTrial {
    pub id: String,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    Grid,
    Random,
}

impl std::str::FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gs" | "grid" => Ok(Sampler::Grid),
            "rs" | "random" => Ok(Sampler::Random),
            _ => Err(Error::InvalidConfig(format!(
                "unknown sampler `{s}` (gs, rs)"
            ))),
        }
    }
}

pub const ALPHA_GRID: [f64; 6] = [0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0];

// The solver names only label grid repeats; every solver reaches the same
// closed-form optimum.
const SOLVER_LABELS: [&str; 6] = ["svd", "cholesky", "lsqr", "sparse_cg", "sag", "saga"];

/// Grid: the six-point alpha grid cycled to `count`. Random: `U[0, 1]`.
pub fn sample_trials(sampler: Sampler, count: usize, seed: u64) -> Vec<HyperparameterTrial> {
    match sampler {
        Sampler::Grid => (0..count)
            .map(|i| {
                let alpha = ALPHA_GRID[i % ALPHA_GRID.len()];
                let rep = i / ALPHA_GRID.len();
                let solver = SOLVER_LABELS[rep % SOLVER_LABELS.len()];
                let id = if rep < SOLVER_LABELS.len() {
                    format!("ridge:alpha={alpha},solver={solver}")
                } else {
                    format!("ridge:alpha={alpha},solver={solver},rep={rep}")
                };
                HyperparameterTrial { id, alpha }
            })
            .collect(),
        Sampler::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|i| {
                    let alpha: f64 = rng.random();
                    HyperparameterTrial {
                        id: format!("ridge:alpha={alpha},trial={i}"),
                        alpha,
                    }
                })
                .collect()
        }
    }
}

/// Assignment of rows to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CvPlan {
    pub k: usize,
    pub seed: u64,
    folds: Vec<usize>,
}

impl CvPlan {
    /// Shuffles rows with `seed` and deals them round-robin into `k` folds.
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k < 2 || n < 2 * k {
            return Err(Error::InvalidConfig(format!(
                "{k}-fold plan needs k >= 2 and at least {} rows, got {n}",
                2 * k.max(2)
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut folds = vec![0; n];
        for (pos, &row) in order.iter().enumerate() {
            folds[row] = pos % k;
        }
        Ok(Self { k, seed, folds })
    }

    pub fn fold_of(&self, row: usize) -> usize {
        self.folds[row]
    }

    pub fn nrows(&self) -> usize {
        self.folds.len()
    }

    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len())
            .filter(|&i| self.folds[i] == fold)
            .collect()
    }

    pub fn training_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len())
            .filter(|&i| self.folds[i] != fold)
            .collect()
    }
}

/// Out-of-fold prediction of every trial: column `j`, row `i` comes from the
/// trial-`j` model trained on the folds that do not contain row `i`.
pub fn build_prediction_matrix(
    ds: &Dataset,
    trials: &[HyperparameterTrial],
    plan: &CvPlan,
) -> Result<(PredictionMatrix, TargetVector)> {
    if plan.nrows() != ds.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "plan covers {} rows, dataset `{}` has {}",
            plan.nrows(),
            ds.name,
            ds.nrows()
        )));
    }
    let n = ds.nrows();
    let folds: Vec<(Vec<usize>, Vec<usize>)> = (0..plan.k)
        .map(|f| (plan.training_rows(f), plan.test_rows(f)))
        .collect();
    let mut columns = Vec::with_capacity(trials.len());
    for trial in trials {
        let mut col = vec![0.0; n];
        for (train, test) in &folds {
            let (xt, yt) = ds.select_rows(train);
            let model = fit_ridge(&xt, &yt, trial.alpha).map_err(|e| Error::TrialFailed {
                trial: trial.id.clone(),
                reason: e.to_string(),
            })?;
            let preds = model.predict(&ds.features.select_rows(test.iter()));
            for (&row, p) in test.iter().zip(preds) {
                col[row] = p;
            }
        }
        columns.push(col);
    }
    let ids = trials.iter().map(|t| t.id.clone()).collect();
    let matrix = PredictionMatrix::from_columns(&columns, ids).map_err(|e| match e {
        Error::NonFinite(at) => Error::TrialFailed {
            trial: at,
            reason: "non-finite prediction".into(),
        },
        other => other,
    })?;
    Ok((matrix, TargetVector::new(ds.target.clone())?))
}

/// Predictions of every trial trained on all of `train` and applied to `test`.
pub fn refit_predictions(
    train_x: &DMatrix<f64>,
    train_y: &[f64],
    test_x: &DMatrix<f64>,
    trials: &[HyperparameterTrial],
) -> Result<PredictionMatrix> {
    let mut columns = Vec::with_capacity(trials.len());
    for trial in trials {
        let model = fit_ridge(train_x, train_y, trial.alpha).map_err(|e| Error::TrialFailed {
            trial: trial.id.clone(),
            reason: e.to_string(),
        })?;
        columns.push(model.predict(test_x));
    }
    PredictionMatrix::from_columns(&columns, trials.iter().map(|t| t.id.clone()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationConfig {
    pub train_fraction: f64,
    pub inner_folds: usize,
    pub seed: u64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            train_fraction: 2.0 / 3.0,
            inner_folds: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodScore {
    pub method: Method,
    pub relative_mse: f64,
    /// Number of models with a nonzero weight.
    pub models_used: usize,
}

/// Seeded shuffle split into (train rows, test rows).
pub fn outer_split(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let n_train = (n as f64 * train_fraction).round() as usize;
    if n_train < 2 || n - n_train < 2 {
        return Err(Error::InvalidConfig(format!(
            "train fraction {train_fraction} leaves too few rows on one side of {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f0e_7ea1));
    let (train, test) = order.split_at(n_train);
    let mut train = train.to_vec();
    let mut test = test.to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Held-out relative MSE of each method on one dataset.
pub fn evaluate_methods(
    ds: &Dataset,
    trials: &[HyperparameterTrial],
    cfg: &EvaluationConfig,
    methods: &[Method],
) -> Result<Vec<MethodScore>> {
    let (train_rows, test_rows) = outer_split(ds.nrows(), cfg.train_fraction, cfg.seed)?;
    let (train_x, train_y) = ds.select_rows(&train_rows);
    let (test_x, test_y) = ds.select_rows(&test_rows);
    let train = Dataset::new(
        format!("{}:train", ds.name),
        train_x.clone(),
        train_y.clone(),
    )?;
    let plan = CvPlan::new(train.nrows(), cfg.inner_folds, cfg.seed)?;
    let (oof, y) = build_prediction_matrix(&train, trials, &plan)?;
    let losses = per_model_losses(&oof, &y);
    let test_matrix = refit_predictions(&train_x, &train_y, &test_x, trials)?;

    methods
        .iter()
        .map(|&method| {
            let scored = method.fit(&oof, &y, &losses).and_then(|fit| {
                let pred = fit.model.predict(&test_matrix)?;
                Ok((relative_mse(&pred, &test_y)?, fit.model.weights.len()))
            });
            let (relative_mse, models_used) = scored.map_err(|e| Error::MethodFailed {
                method: method.to_string(),
                dataset: ds.name.clone(),
                reason: e.to_string(),
            })?;
            Ok(MethodScore {
                method,
                relative_mse,
                models_used,
            })
        })
        .collect()
}
