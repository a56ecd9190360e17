//! Shared domain types: the prediction matrix, the target, the fitted linear
//! ensemble and its stage trace.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n × p` matrix of base-model predictions. Each column is one model.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    values: DMatrix<f64>,
    column_ids: Vec<String>,
}

impl PredictionMatrix {
    pub fn new(values: DMatrix<f64>, column_ids: Vec<String>) -> Result<Self> {
        let (n, p) = values.shape();
        if n < 2 || p < 1 {
            return Err(Error::Empty(format!(
                "prediction matrix is {n}x{p}, need at least 2 rows and 1 column"
            )));
        }
        if column_ids.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} column ids for {p} columns",
                column_ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(p);
        for id in &column_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        for j in 0..p {
            for i in 0..n {
                if !values[(i, j)].is_finite() {
                    return Err(Error::NonFinite(format!(
                        "row {i}, column `{}`",
                        column_ids[j]
                    )));
                }
            }
        }
        Ok(Self { values, column_ids })
    }

    /// Builds a matrix from column vectors.
    pub fn from_columns(columns: &[Vec<f64>], column_ids: Vec<String>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if let Some((j, c)) = columns.iter().enumerate().find(|(_, c)| c.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "column {j} has {} rows, expected {n}",
                c.len()
            )));
        }
        let flat: Vec<f64> = columns.iter().flatten().copied().collect();
        Self::new(DMatrix::from_vec(n, columns.len(), flat), column_ids)
    }

    /// Convenience constructor that names columns `m0`, `m1`, ...
    pub fn from_columns_auto(columns: &[Vec<f64>]) -> Result<Self> {
        let ids = (0..columns.len()).map(|j| format!("m{j}")).collect();
        Self::from_columns(columns, ids)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column_ids(&self) -> &[String] {
        &self.column_ids
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.nrows();
        &self.values.as_slice()[j * n..(j + 1) * n]
    }

    pub fn column_index(&self, id: &str) -> Option<usize> {
        self.column_ids.iter().position(|c| c == id)
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let values = self.values.select_rows(rows.iter());
        Self::new(values, self.column_ids.clone())
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let values = self.values.select_columns(cols.iter());
        let ids = cols.iter().map(|&j| self.column_ids[j].clone()).collect();
        Self::new(values, ids)
    }
}

/// Regression target, paired row-for-row with a [`PredictionMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    values: Vec<f64>,
}

impl TargetVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("target row {i}")));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Total sum of squares around the mean.
    pub fn sst(&self) -> f64 {
        sum_sq_dev(&self.values)
    }

    pub fn select(&self, rows: &[usize]) -> Self {
        Self {
            values: rows.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Checks the pairing contract shared by every meta-learner.
pub fn validate_pair<'a>(
    x: &'a PredictionMatrix,
    y: &'a TargetVector,
) -> Result<(&'a PredictionMatrix, &'a TargetVector)> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "prediction matrix has {} rows but target has {} entries",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() < 2 || x.ncols() < 1 {
        return Err(Error::Empty(format!("{}x{}", x.nrows(), x.ncols())));
    }
    Ok((x, y))
}

/// Same as [`validate_pair`] but also requires a non-constant target.
pub(crate) fn validate_fit_input(x: &PredictionMatrix, y: &TargetVector) -> Result<()> {
    validate_pair(x, y)?;
    if y.sst() <= 0.0 {
        return Err(Error::ConstantTarget);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnStat {
    pub mean: f64,
    /// Population standard deviation (divisor `n`).
    pub std: f64,
}

/// Per-column mean and population standard deviation.
pub fn column_stats(x: &PredictionMatrix) -> Vec<ColumnStat> {
    (0..x.ncols())
        .map(|j| {
            let c = x.column(j);
            ColumnStat {
                mean: mean(c),
                std: (sum_sq_dev(c) / c.len() as f64).sqrt(),
            }
        })
        .collect()
}

/// Squared-error loss.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SquaredError;

impl SquaredError {
    pub fn evaluate(&self, pred: &[f64], actual: &[f64]) -> f64 {
        pred.iter()
            .zip(actual)
            .map(|(p, a)| {
                let d = a - p;
                d * d
            })
            .sum()
    }
}

/// One stage of an iterative meta-learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub selected: String,
    pub selected_index: usize,
    /// Raw single-feature OLS slope.
    pub alpha: f64,
    /// Slope actually added to the ensemble at this stage.
    pub applied_alpha: f64,
    pub beta: f64,
    /// Sum of squares of the residual after this stage.
    pub loss: f64,
    /// `|alpha|` times the population std of the selected original column.
    pub magnitude: f64,
    /// The candidate evaluated when the stop rule fired; never applied.
    #[serde(default)]
    pub rejected: bool,
}

/// Sparse linear combiner `f(x) = Σ w_i x_i + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct EnsembleModel {
    pub weights: Vec<ModelWeight>,
    pub bias: f64,
    #[serde(default)]
    pub trace: Vec<StageRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelWeight {
    pub id: String,
    pub weight: f64,
}

impl EnsembleModel {
    pub fn bias_only(bias: f64) -> Self {
        Self {
            weights: Vec::new(),
            bias,
            trace: Vec::new(),
        }
    }

    /// Builds a model from one weight per column of `ids`; exact zeros are dropped.
    pub fn from_dense(ids: &[String], dense: &[f64], bias: f64) -> Self {
        let weights = ids
            .iter()
            .zip(dense)
            .filter(|(_, &w)| w != 0.0)
            .map(|(id, &w)| ModelWeight {
                id: id.clone(),
                weight: w,
            })
            .collect();
        Self {
            weights,
            bias,
            trace: Vec::new(),
        }
    }

    pub fn with_trace(mut self, trace: Vec<StageRecord>) -> Self {
        self.trace = trace;
        self
    }

    pub fn weight_of(&self, id: &str) -> f64 {
        self.weights
            .iter()
            .find(|w| w.id == id)
            .map_or(0.0, |w| w.weight)
    }

    /// Weights laid out against the columns of `x` (0 for absent ids).
    pub fn dense_weights(&self, x: &PredictionMatrix) -> Result<Vec<f64>> {
        let index: HashMap<&str, usize> = x
            .column_ids()
            .iter()
            .enumerate()
            .map(|(j, id)| (id.as_str(), j))
            .collect();
        let mut dense = vec![0.0; x.ncols()];
        for w in &self.weights {
            let j = index.get(w.id.as_str()).ok_or_else(|| {
                Error::DimensionMismatch(format!("model id `{}` not in prediction matrix", w.id))
            })?;
            dense[*j] += w.weight;
        }
        Ok(dense)
    }

    pub fn predict(&self, x: &PredictionMatrix) -> Result<Vec<f64>> {
        let dense = self.dense_weights(x)?;
        let mut out = vec![self.bias; x.nrows()];
        for (j, &w) in dense.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(x.column(j)) {
                *o += w * v;
            }
        }
        Ok(out)
    }

    pub fn accepted_stages(&self) -> impl Iterator<Item = &StageRecord> {
        self.trace.iter().filter(|s| !s.rejected)
    }
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn sum_sq_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

pub(crate) fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(cols: &[Vec<f64>]) -> PredictionMatrix {
        PredictionMatrix::from_columns_auto(cols).unwrap()
    }

    #[test]
    fn validate_pair_accepts_matching_shapes() {
        let x = pm(&[vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0]]);
        let y = TargetVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(validate_pair(&x, &y).is_ok());
    }

    #[test]
    fn validate_pair_rejects_length_mismatch() {
        let x = pm(&[vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0]]);
        let y = TargetVector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            validate_pair(&x, &y),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn nan_is_rejected() {
        let err = PredictionMatrix::from_columns_auto(&[vec![1.0, f64::NAN, 3.0]]).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
        assert!(matches!(
            TargetVector::new(vec![f64::INFINITY, 1.0]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn too_small_is_empty() {
        assert!(matches!(
            PredictionMatrix::from_columns_auto(&[vec![1.0]]),
            Err(Error::Empty(_))
        ));
        assert!(matches!(
            PredictionMatrix::from_columns_auto(&[]),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = PredictionMatrix::from_columns(
            &[vec![1.0, 2.0], vec![3.0, 4.0]],
            vec!["a".into(), "a".into()],
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicateId("a".into()));
    }

    #[test]
    fn column_stats_small_cases() {
        let x = pm(&[vec![1.0, 1.0, 1.0]]);
        assert_eq!(
            column_stats(&x)[0],
            ColumnStat {
                mean: 1.0,
                std: 0.0
            }
        );
        let x = pm(&[vec![0.0, 2.0]]);
        assert_eq!(
            column_stats(&x)[0],
            ColumnStat {
                mean: 1.0,
                std: 1.0
            }
        );
    }

    #[test]
    fn column_stats_matches_high_precision_two_pass() {
        // sqrt(1.25) from a 40-digit two-pass computation
        let x = pm(&[vec![1.0, 2.0, 3.0, 4.0]]);
        let s = column_stats(&x)[0];
        assert_eq!(s.mean, 2.5);
        assert!((s.std - 1.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_model_predicts_bias() {
        let x = pm(&[vec![1.0, -5.0, 3.0]]);
        let m = EnsembleModel::bias_only(2.5);
        assert_eq!(m.predict(&x).unwrap(), vec![2.5; 3]);
    }

    #[test]
    fn squared_error_basics() {
        let l = SquaredError;
        assert_eq!(l.evaluate(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(
            l.evaluate(&[1.0, 2.0], &[2.0, 2.0]),
            l.evaluate(&[3.0, 2.0], &[2.0, 2.0])
        );
    }

    #[test]
    fn predict_rejects_unknown_ids() {
        let x = pm(&[vec![1.0, 2.0]]);
        let m = EnsembleModel::from_dense(&["zz".to_string()], &[1.0], 0.0);
        assert!(m.predict(&x).is_err());
    }
}
