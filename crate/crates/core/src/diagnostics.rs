//! Multicollinearity, evaluation error and rank statistics.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::least_squares::fit_multi;
use crate::types::{sum_sq_dev, PredictionMatrix};

/// `R²` above `1 − VIF_R2_LIMIT` is reported as an infinite VIF.
pub const VIF_R2_LIMIT: f64 = 1e-12;

/// Default bucket edges: `[1,5) [5,10) [10,1000) [1000,∞]`.
pub const DEFAULT_VIF_EDGES: [f64; 3] = [5.0, 10.0, 1000.0];

#[derive(Debug, Clone, PartialEq)]
pub struct VifBucket {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub percent: f64,
}

impl VifBucket {
    pub fn label(&self) -> String {
        if self.upper.is_infinite() {
            format!("[{},inf)", self.lower)
        } else {
            format!("[{},{})", self.lower, self.upper)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VifReport {
    pub column_ids: Vec<String>,
    pub vif: Vec<f64>,
}

impl VifReport {
    /// Counts per bucket; `+∞` lands in the top bucket.
    pub fn histogram(&self, edges: &[f64]) -> Vec<VifBucket> {
        let mut bounds = vec![1.0];
        bounds.extend_from_slice(edges);
        bounds.push(f64::INFINITY);
        let total = self.vif.len() as f64;
        bounds
            .windows(2)
            .enumerate()
            .map(|(b, w)| {
                let last = b == bounds.len() - 2;
                let count = self
                    .vif
                    .iter()
                    .filter(|&&v| v >= w[0] && (v < w[1] || (last && v.is_infinite())))
                    .count();
                VifBucket {
                    lower: w[0],
                    upper: w[1],
                    count,
                    percent: 100.0 * count as f64 / total,
                }
            })
            .collect()
    }

    pub fn fraction_above(&self, threshold: f64) -> f64 {
        self.vif.iter().filter(|&&v| v > threshold).count() as f64 / self.vif.len() as f64
    }
}

/// Variance inflation factor of every column against all the others.
pub fn vif(x: &PredictionMatrix) -> Result<VifReport> {
    let p = x.ncols();
    if p < 2 {
        return Err(Error::TooFewColumns(p));
    }
    let values = (0..p)
        .map(|i| {
            let target = x.column(i);
            let sst = sum_sq_dev(target);
            if sst == 0.0 {
                return f64::INFINITY;
            }
            let others: Vec<usize> = (0..p).filter(|&j| j != i).collect();
            let fit = fit_multi(&x.values().select_columns(others.iter()), target, true);
            let r2 = (1.0 - fit.ssr / sst).clamp(0.0, 1.0);
            if r2 > 1.0 - VIF_R2_LIMIT {
                f64::INFINITY
            } else {
                1.0 / (1.0 - r2)
            }
        })
        .collect();
    Ok(VifReport {
        column_ids: x.column_ids().to_vec(),
        vif: values,
    })
}

/// `SSR(pred, actual) / SST(actual)`: 0 is perfect, 1 matches the mean.
pub fn relative_mse(pred: &[f64], actual: &[f64]) -> Result<f64> {
    if pred.len() != actual.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictions for {} targets",
            pred.len(),
            actual.len()
        )));
    }
    let sst = sum_sq_dev(actual);
    if sst == 0.0 {
        return Err(Error::ConstantTarget);
    }
    let ssr: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (a - p) * (a - p))
        .sum();
    Ok(ssr / sst)
}

/// Method-by-dataset error table with Friedman ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    /// `errors[(method, dataset)]`.
    pub errors: DMatrix<f64>,
    pub ranks: DMatrix<f64>,
    pub mean_ranks: Vec<f64>,
    pub friedman_statistic: f64,
}

impl RankTable {
    pub fn methods(&self) -> usize {
        self.errors.nrows()
    }

    pub fn datasets(&self) -> usize {
        self.errors.ncols()
    }
}

/// Ranks methods within each dataset (1 = lowest error, ties averaged) and
/// computes `χ²_F = 12N/(m(m+1)) · [Σ R̄_j² − m(m+1)²/4]`.
pub fn friedman_ranks(errors: &DMatrix<f64>) -> Result<RankTable> {
    let (m, n) = errors.shape();
    if m < 2 || n < 2 {
        return Err(Error::Empty(format!(
            "need at least 2 methods and 2 datasets, got {m}x{n}"
        )));
    }
    if errors.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("error table".into()));
    }
    let mut ranks = DMatrix::zeros(m, n);
    for d in 0..n {
        let col: Vec<f64> = errors.column(d).iter().copied().collect();
        for i in 0..m {
            let below = col.iter().filter(|&&v| v < col[i]).count() as f64;
            let tied = col.iter().filter(|&&v| v == col[i]).count() as f64;
            ranks[(i, d)] = below + (tied + 1.0) / 2.0;
        }
    }
    let mean_ranks: Vec<f64> = (0..m).map(|i| ranks.row(i).mean()).collect();
    let (mf, nf) = (m as f64, n as f64);
    let sum_sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let friedman_statistic =
        12.0 * nf / (mf * (mf + 1.0)) * (sum_sq - mf * (mf + 1.0) * (mf + 1.0) / 4.0);
    Ok(RankTable {
        errors: errors.clone(),
        ranks,
        mean_ranks,
        friedman_statistic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    P90,
    P95,
}

impl Confidence {
    pub fn from_level(level: f64) -> Result<Self> {
        if (level - 0.90).abs() < 1e-9 {
            Ok(Confidence::P90)
        } else if (level - 0.95).abs() < 1e-9 {
            Ok(Confidence::P95)
        } else {
            Err(Error::UnsupportedConfidence(level))
        }
    }

    pub fn level(self) -> f64 {
        match self {
            Confidence::P90 => 0.90,
            Confidence::P95 => 0.95,
        }
    }
}

// Studentized range quantiles q(1−α; m, ∞)/√2 for m = 2..=20.
const Q_90: [f64; 19] = [
    1.645, 2.052, 2.291, 2.460, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978, 3.030, 3.077, 3.120,
    3.159, 3.196, 3.230, 3.261, 3.291, 3.319,
];
const Q_95: [f64; 19] = [
    1.960, 2.344, 2.569, 2.728, 2.850, 2.948, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354,
    3.391, 3.426, 3.458, 3.489, 3.517, 3.544,
];

pub fn nemenyi_q(methods: usize, confidence: Confidence) -> Result<f64> {
    if !(2..=20).contains(&methods) {
        return Err(Error::UnsupportedM { methods });
    }
    let table = match confidence {
        Confidence::P90 => &Q_90,
        Confidence::P95 => &Q_95,
    };
    Ok(table[methods - 2])
}

/// Nemenyi critical difference `q_α·sqrt(m(m+1)/(6N))`.
pub fn nemenyi_cd(methods: usize, datasets: usize, confidence: Confidence) -> Result<f64> {
    let q = nemenyi_q(methods, confidence)?;
    if datasets == 0 {
        return Err(Error::Empty("no datasets".into()));
    }
    let m = methods as f64;
    Ok(q * (m * (m + 1.0) / (6.0 * datasets as f64)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use stackboost_oracles as oracle;

    fn pm(cols: &[Vec<f64>]) -> PredictionMatrix {
        PredictionMatrix::from_columns_auto(cols).unwrap()
    }

    #[test]
    fn vif_orthogonal_and_duplicate() {
        let a = vec![1.0, -1.0, 1.0, -1.0];
        let b = vec![1.0, 1.0, -1.0, -1.0];
        let r = vif(&pm(&[a.clone(), b])).unwrap();
        assert!(r.vif.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(r.histogram(&DEFAULT_VIF_EDGES)[0].percent == 100.0);

        let r = vif(&pm(&[a.clone(), a])).unwrap();
        assert!(r.vif.iter().all(|v| v.is_infinite()));
        let top = r.histogram(&DEFAULT_VIF_EDGES);
        assert_eq!(top.last().unwrap().percent, 100.0);
        assert_eq!(top.last().unwrap().label(), "[1000,inf)");
    }

    #[test]
    fn vif_needs_two_columns() {
        assert!(matches!(
            vif(&pm(&[vec![1.0, 2.0]])),
            Err(Error::TooFewColumns(1))
        ));
    }

    #[test]
    fn vif_is_affine_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..20).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let scaled: Vec<Vec<f64>> = cols
            .iter()
            .enumerate()
            .map(|(j, c)| {
                c.iter()
                    .map(|v| (j as f64 - 1.5) * 3.0 * v + 7.0 * j as f64)
                    .collect()
            })
            .collect();
        let a = vif(&pm(&cols)).unwrap();
        let b = vif(&pm(&scaled)).unwrap();
        for (u, v) in a.vif.iter().zip(&b.vif) {
            assert!((u - v).abs() < 1e-6);
        }
    }

    #[test]
    fn relative_mse_cases() {
        let y = vec![1.0, 2.0, 4.0, 7.0];
        assert_eq!(relative_mse(&y, &y).unwrap(), 0.0);
        assert!((relative_mse(&[3.5; 4], &y).unwrap() - 1.0).abs() < 1e-15);
        let p = vec![1.5, 1.0, 5.0, 6.0];
        // ssr = 0.25 + 1 + 1 + 1, sst = 6.25 + 2.25 + 0.25 + 12.25
        assert!((relative_mse(&p, &y).unwrap() - 3.25 / 21.0).abs() < 1e-15);
        let map = |v: &[f64]| v.iter().map(|x| -2.0 * x + 5.0).collect::<Vec<_>>();
        assert!((relative_mse(&map(&p), &map(&y)).unwrap() - 3.25 / 21.0).abs() < 1e-14);
        assert!(matches!(
            relative_mse(&[1.0], &y),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            relative_mse(&[1.0, 1.0], &[2.0, 2.0]),
            Err(Error::ConstantTarget)
        ));
    }

    #[test]
    fn friedman_ranks_examples() {
        let t = friedman_ranks(&DMatrix::from_column_slice(
            3,
            2,
            &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0],
        ))
        .unwrap();
        assert_eq!(
            t.ranks.column(0).iter().copied().collect::<Vec<_>>(),
            vec![1.0, 2.0, 3.0]
        );
        let t = friedman_ranks(&DMatrix::from_column_slice(2, 2, &[2.0, 2.0, 1.0, 3.0])).unwrap();
        assert_eq!(t.ranks[(0, 0)], 1.5);
        assert_eq!(t.ranks[(1, 0)], 1.5);
        assert_eq!(t.mean_ranks, vec![1.25, 1.75]);
    }

    #[test]
    fn friedman_ranks_match_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let errors = DMatrix::from_fn(6, 15, |_, _| (rng.random_range(0..8) as f64) * 0.125);
        let t = friedman_ranks(&errors).unwrap();
        let mut expected = [0.0; 6];
        for d in 0..15 {
            let col: Vec<f64> = errors.column(d).iter().copied().collect();
            for (i, r) in oracle::average_ranks(&col).into_iter().enumerate() {
                expected[i] += r / 15.0;
            }
        }
        for (a, b) in t.mean_ranks.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let total: f64 = t.mean_ranks.iter().sum();
        assert!((total - 21.0).abs() < 1e-12);
        assert!(t.friedman_statistic >= 0.0);
    }

    #[test]
    fn friedman_rejects_tiny_tables() {
        assert!(friedman_ranks(&DMatrix::from_element(1, 3, 1.0)).is_err());
        assert!(friedman_ranks(&DMatrix::from_element(3, 1, 1.0)).is_err());
    }

    #[test]
    fn nemenyi_two_methods_direct_formula() {
        for n in [1, 4, 30] {
            let cd = nemenyi_cd(2, n, Confidence::P95).unwrap();
            assert!((cd - 1.960 * (1.0 / n as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn nemenyi_reference_values_hold_at_225_blocks() {
        let cases = [
            (9, Confidence::P90, 0.73),
            (9, Confidence::P95, 0.80),
            (6, Confidence::P90, 0.45),
            (6, Confidence::P95, 0.50),
        ];
        for (m, c, expected) in cases {
            let cd = nemenyi_cd(m, 225, c).unwrap();
            assert!((cd - expected).abs() <= 0.01, "m={m} {c:?}: {cd}");
        }
    }

    #[test]
    fn nemenyi_decreases_in_datasets() {
        for c in [Confidence::P90, Confidence::P95] {
            let cds: Vec<f64> = (1..200).map(|n| nemenyi_cd(7, n, c).unwrap()).collect();
            assert!(cds.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn nemenyi_guards() {
        assert!(matches!(
            nemenyi_q(1, Confidence::P90),
            Err(Error::UnsupportedM { methods: 1 })
        ));
        assert!(matches!(
            nemenyi_q(21, Confidence::P95),
            Err(Error::UnsupportedM { .. })
        ));
        assert!(nemenyi_cd(3, 0, Confidence::P95).is_err());
        assert_eq!(Confidence::from_level(0.9).unwrap(), Confidence::P90);
        assert!(matches!(
            Confidence::from_level(0.99),
            Err(Error::UnsupportedConfidence(_))
        ));
    }
}
