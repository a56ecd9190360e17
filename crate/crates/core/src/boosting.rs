//! Stagewise least-squares boosting over prediction columns.
//!
//! Every stage fits each column alone against the current residual, keeps
//! the column with the smallest squared error and subtracts its fit from the
//! residual. Columns may be selected any number of times; their slopes
//! accumulate into a single weight. The regularized variant damps the slope
//! of stage `j` by the rule-of-succession weight `j/(j+1)` and, when the stop
//! rule fires, restores the full slope of the last accepted stage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::criteria::{classical_should_stop, icm_should_stop, CriterionKind, StageFit};
use crate::error::{Error, Result};
use crate::least_squares::{fit_simple, is_constant_column, SimpleFit};
use crate::types::{
    column_stats, sum_sq, validate_fit_input, EnsembleModel, PredictionMatrix, StageRecord,
    TargetVector,
};

pub const DEFAULT_MAX_STAGES: usize = 10_000;

/// After the first stage, a candidate whose fit would change the residual
/// sum of squares by less than this fraction of it is a rounding-level no-op
/// and ends the run.
pub const NO_OP_RTOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopRule {
    Icm,
    #[serde(untagged)]
    Criterion(CriterionKind),
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopRule::Icm => f.write_str("icm"),
            StopRule::Criterion(k) => k.fmt(f),
        }
    }
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("icm") {
            Ok(StopRule::Icm)
        } else {
            s.parse().map(StopRule::Criterion)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    pub stop: StopRule,
    pub max_stages: usize,
}

impl BoostConfig {
    pub fn new(stop: StopRule) -> Self {
        Self {
            stop,
            max_stages: DEFAULT_MAX_STAGES,
        }
    }

    pub fn with_max_stages(self, max_stages: usize) -> Self {
        Self { max_stages, ..self }
    }
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self::new(StopRule::Icm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The stop rule fired while evaluating this stage's candidate.
    Criterion { stage: usize },
    /// The best candidate could no longer change the residual.
    Converged { stage: usize },
    /// `max_stages` stages were accepted without the rule firing.
    MaxStages,
    /// Every column is constant; the model is the target mean.
    NoUsableColumn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostFit {
    pub model: EnsembleModel,
    pub stop_reason: StopReason,
}

impl BoostFit {
    pub fn truncated(&self) -> bool {
        self.stop_reason == StopReason::MaxStages
    }

    pub fn accepted_stages(&self) -> usize {
        self.model.accepted_stages().count()
    }
}

/// Laplace rule of succession, `j / (j + 1)`.
pub fn laplace_weight(stage: usize) -> f64 {
    let j = stage as f64;
    j / (j + 1.0)
}

pub fn fit_boost(x: &PredictionMatrix, y: &TargetVector, cfg: &BoostConfig) -> Result<BoostFit> {
    stagewise(x, y, cfg, |_| 1.0, false)
}

pub fn fit_rboost(x: &PredictionMatrix, y: &TargetVector, cfg: &BoostConfig) -> Result<BoostFit> {
    stagewise(x, y, cfg, laplace_weight, true)
}

/// Regularized boosting with a caller-supplied per-stage damping weight in
/// place of [`laplace_weight`]. A constant `1.0` reproduces [`fit_boost`].
pub fn fit_rboost_with_weight<W>(
    x: &PredictionMatrix,
    y: &TargetVector,
    cfg: &BoostConfig,
    weight: W,
) -> Result<BoostFit>
where
    W: Fn(usize) -> f64,
{
    stagewise(x, y, cfg, weight, true)
}

fn stagewise<W>(
    x: &PredictionMatrix,
    y: &TargetVector,
    cfg: &BoostConfig,
    weight: W,
    revert_on_stop: bool,
) -> Result<BoostFit>
where
    W: Fn(usize) -> f64,
{
    validate_fit_input(x, y)?;
    if cfg.max_stages == 0 {
        return Err(Error::InvalidConfig("max_stages must be at least 1".into()));
    }
    let n = x.nrows();
    let p = x.ncols();
    let sst = y.sst();
    let stats = column_stats(x);
    if (0..p).all(|j| is_constant_column(x.column(j))) {
        return Ok(BoostFit {
            model: EnsembleModel::bias_only(y.mean()),
            stop_reason: StopReason::NoUsableColumn,
        });
    }

    let mut residual = y.values().to_vec();
    let mut accepted: Vec<StageRecord> = Vec::new();
    let mut history: Vec<StageFit> = Vec::new();
    let mut in_ensemble = vec![false; p];
    let mut distinct = 0usize;
    let mut bias = 0.0;
    let mut stop_reason = StopReason::MaxStages;
    let mut rejected: Option<StageRecord> = None;

    for stage in 1..=cfg.max_stages {
        let (idx, fit) = best_column(x, &residual);
        let change = n as f64 * ((fit.alpha * stats[idx].std).powi(2) + fit.beta * fit.beta);
        if stage > 1 && change <= NO_OP_RTOL * sum_sq(&residual) {
            stop_reason = StopReason::Converged { stage };
            break;
        }
        let applied_alpha = weight(stage) * fit.alpha;
        let column = x.column(idx);
        let next: Vec<f64> = residual
            .iter()
            .zip(column)
            .map(|(r, f)| r - (applied_alpha * f + fit.beta))
            .collect();
        let record = StageRecord {
            stage,
            selected: x.column_ids()[idx].clone(),
            selected_index: idx,
            alpha: fit.alpha,
            applied_alpha,
            beta: fit.beta,
            loss: sum_sq(&next),
            magnitude: fit.alpha.abs() * stats[idx].std,
            rejected: false,
        };
        let k_distinct = distinct + usize::from(!in_ensemble[idx]);
        let stop = match cfg.stop {
            StopRule::Icm => icm_should_stop(&record, accepted.last()),
            StopRule::Criterion(kind) => {
                history.push(StageFit {
                    n,
                    k_distinct,
                    ssr: record.loss,
                });
                classical_should_stop(kind, &history, sst)
            }
        };
        if stop {
            rejected = Some(StageRecord {
                rejected: true,
                ..record
            });
            stop_reason = StopReason::Criterion { stage };
            break;
        }
        residual = next;
        bias += fit.beta;
        if !in_ensemble[idx] {
            in_ensemble[idx] = true;
            distinct += 1;
        }
        accepted.push(record);
    }

    let revert_last = revert_on_stop && matches!(stop_reason, StopReason::Criterion { .. });
    let mut dense = vec![0.0; p];
    let last = accepted.len().wrapping_sub(1);
    for (i, s) in accepted.iter().enumerate() {
        dense[s.selected_index] += if revert_last && i == last {
            s.alpha
        } else {
            s.applied_alpha
        };
    }
    let mut trace = accepted;
    trace.extend(rejected);
    let model = EnsembleModel::from_dense(x.column_ids(), &dense, bias).with_trace(trace);
    Ok(BoostFit { model, stop_reason })
}

/// Fits every column against `residual`; returns the lowest-SSR column,
/// lowest index on ties.
fn best_column(x: &PredictionMatrix, residual: &[f64]) -> (usize, SimpleFit) {
    let mut best: Option<(usize, SimpleFit)> = None;
    for j in 0..x.ncols() {
        let fit = fit_simple(x.column(j), residual);
        if best.is_none_or(|(_, b)| fit.ssr < b.ssr) {
            best = Some((j, fit));
        }
    }
    best.expect("prediction matrix has at least one column")
}
