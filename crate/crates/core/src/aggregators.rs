//! Non-learning combiners: pick the best model, plain averaging, inverse
//! error weighting and Caruana's forward selection with replacement.

use crate::error::{Error, Result};
use crate::types::{validate_pair, EnsembleModel, PredictionMatrix, StageRecord, TargetVector};

fn check_losses(x: &PredictionMatrix, losses: &[f64]) -> Result<()> {
    if losses.len() != x.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{} losses for {} models",
            losses.len(),
            x.ncols()
        )));
    }
    if let Some(i) = losses.iter().position(|l| !l.is_finite()) {
        return Err(Error::NonFinite(format!("loss of model {i}")));
    }
    Ok(())
}

/// Weight 1 on the lowest-loss model (lowest index on ties).
pub fn fit_best(
    x: &PredictionMatrix,
    y: &TargetVector,
    per_model_loss: &[f64],
) -> Result<EnsembleModel> {
    validate_pair(x, y)?;
    check_losses(x, per_model_loss)?;
    let mut best = 0;
    for (j, &l) in per_model_loss.iter().enumerate() {
        if l < per_model_loss[best] {
            best = j;
        }
    }
    let mut dense = vec![0.0; x.ncols()];
    dense[best] = 1.0;
    Ok(EnsembleModel::from_dense(x.column_ids(), &dense, 0.0))
}

/// Basic ensemble method: the plain average.
pub fn fit_bem(x: &PredictionMatrix, y: &TargetVector) -> Result<EnsembleModel> {
    validate_pair(x, y)?;
    let p = x.ncols();
    Ok(EnsembleModel::from_dense(
        x.column_ids(),
        &vec![1.0 / p as f64; p],
        0.0,
    ))
}

/// Inverse-error weighting. Models with zero error, if any, share all the
/// weight equally.
pub fn fit_iew(
    x: &PredictionMatrix,
    y: &TargetVector,
    per_model_loss: &[f64],
) -> Result<EnsembleModel> {
    validate_pair(x, y)?;
    check_losses(x, per_model_loss)?;
    if per_model_loss.iter().any(|&e| e < 0.0) {
        return Err(Error::InvalidConfig(
            "expected errors must be nonnegative".into(),
        ));
    }
    let zeros = per_model_loss.iter().filter(|&&e| e == 0.0).count();
    let dense: Vec<f64> = if zeros > 0 {
        per_model_loss
            .iter()
            .map(|&e| if e == 0.0 { 1.0 / zeros as f64 } else { 0.0 })
            .collect()
    } else {
        let total: f64 = per_model_loss.iter().map(|e| 1.0 / e).sum();
        per_model_loss.iter().map(|e| (1.0 / e) / total).collect()
    };
    Ok(EnsembleModel::from_dense(x.column_ids(), &dense, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaruanaConfig {
    pub max_rounds: usize,
    /// Rounds without strict improvement before halting.
    pub patience: usize,
}

impl Default for CaruanaConfig {
    fn default() -> Self {
        Self {
            max_rounds: 50,
            patience: 10,
        }
    }
}

impl CaruanaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_rounds == 0 || self.patience == 0 || self.patience > self.max_rounds {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= patience ({}) <= max_rounds ({})",
                self.patience, self.max_rounds
            )));
        }
        Ok(())
    }
}

/// Forward ensemble selection with replacement from an empty bag.
///
/// Each round adds the model whose inclusion gives the lowest squared error
/// of the bag average. The returned bag is the prefix that reached the best
/// loss; later rounds stay in the trace flagged `rejected`. Weights are
/// selection counts over the bag size.
pub fn fit_caruana(
    x: &PredictionMatrix,
    y: &TargetVector,
    cfg: &CaruanaConfig,
) -> Result<EnsembleModel> {
    validate_pair(x, y)?;
    cfg.validate()?;
    let n = x.nrows();
    let target = y.values();
    let mut sum = vec![0.0; n];
    let mut trace: Vec<StageRecord> = Vec::new();
    let mut best_loss = f64::INFINITY;
    let mut best_len = 0;
    let mut stale = 0;

    for round in 1..=cfg.max_rounds {
        let size = round as f64;
        let mut pick: Option<(usize, f64)> = None;
        for j in 0..x.ncols() {
            let loss: f64 = x
                .column(j)
                .iter()
                .zip(&sum)
                .zip(target)
                .map(|((c, s), t)| {
                    let e = t - (s + c) / size;
                    e * e
                })
                .sum();
            if pick.is_none_or(|(_, b)| loss < b) {
                pick = Some((j, loss));
            }
        }
        let (j, loss) = pick.expect("at least one model");
        for (s, c) in sum.iter_mut().zip(x.column(j)) {
            *s += c;
        }
        trace.push(StageRecord {
            stage: round,
            selected: x.column_ids()[j].clone(),
            selected_index: j,
            alpha: 1.0,
            applied_alpha: 1.0,
            beta: 0.0,
            loss,
            magnitude: 0.0,
            rejected: false,
        });
        if loss < best_loss {
            best_loss = loss;
            best_len = round;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }

    let mut counts = vec![0usize; x.ncols()];
    for (i, s) in trace.iter_mut().enumerate() {
        if i < best_len {
            counts[s.selected_index] += 1;
        } else {
            s.rejected = true;
        }
    }
    let dense: Vec<f64> = counts.iter().map(|&c| c as f64 / best_len as f64).collect();
    Ok(EnsembleModel::from_dense(x.column_ids(), &dense, 0.0).with_trace(trace))
}
