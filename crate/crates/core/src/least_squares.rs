//! Closed-form least squares: the single-feature fit used at every boosting
//! stage and the multi-feature minimum-norm fit used by OLS, the criterion
//! sweeps and VIF.

use nalgebra::{DMatrix, DVector};

use crate::types::{mean, sum_sq_dev};

/// Single-feature OLS `r ≈ alpha·f + beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleFit {
    pub alpha: f64,
    pub beta: f64,
    pub ssr: f64,
    pub r2: f64,
}

/// A column whose centered sum of squares falls below this fraction of its
/// raw sum of squares is treated as constant.
const CONSTANT_COLUMN_RTOL: f64 = 1e-24;

pub fn fit_simple(f: &[f64], r: &[f64]) -> SimpleFit {
    debug_assert_eq!(f.len(), r.len());
    let mf = mean(f);
    let mr = mean(r);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    let mut raw = 0.0;
    for (&fi, &ri) in f.iter().zip(r) {
        let df = fi - mf;
        let dr = ri - mr;
        sxx += df * df;
        sxy += df * dr;
        syy += dr * dr;
        raw += fi * fi;
    }
    if is_constant_ss(sxx, raw) {
        return SimpleFit {
            alpha: 0.0,
            beta: mr,
            ssr: syy,
            r2: 0.0,
        };
    }
    let alpha = sxy / sxx;
    let beta = mr - alpha * mf;
    let ssr = f
        .iter()
        .zip(r)
        .map(|(&fi, &ri)| {
            let e = ri - alpha * fi - beta;
            e * e
        })
        .sum::<f64>()
        .min(syy);
    let r2 = if syy > 0.0 {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    } else {
        0.0
    };
    SimpleFit {
        alpha,
        beta,
        ssr,
        r2,
    }
}

fn is_constant_ss(centered_ss: f64, raw_ss: f64) -> bool {
    centered_ss == 0.0 || centered_ss <= CONSTANT_COLUMN_RTOL * raw_ss
}

/// True when [`fit_simple`] treats `f` as a constant column.
pub fn is_constant_column(f: &[f64]) -> bool {
    let m = mean(f);
    let centered: f64 = f.iter().map(|v| (v - m) * (v - m)).sum();
    let raw: f64 = f.iter().map(|v| v * v).sum();
    is_constant_ss(centered, raw)
}

/// Multi-feature least squares.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub ssr: f64,
}

impl MultiFit {
    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<f64> {
        (0..x.nrows())
            .map(|i| {
                self.intercept
                    + self
                        .coefficients
                        .iter()
                        .enumerate()
                        .map(|(j, c)| c * x[(i, j)])
                        .sum::<f64>()
            })
            .collect()
    }
}

/// Minimum-norm least squares of `y` on the columns of `x`.
///
/// With `with_intercept` the columns and target are centered first, so the
/// intercept is never shrunk by the minimum-norm choice. Singular values
/// below `max(n, k)·ε·σ_max` are treated as zero.
pub fn fit_multi(x: &DMatrix<f64>, y: &[f64], with_intercept: bool) -> MultiFit {
    let (n, k) = x.shape();
    debug_assert_eq!(n, y.len());
    let (col_means, y_mean) = if with_intercept {
        let means: Vec<f64> = (0..k).map(|j| x.column(j).mean()).collect();
        (means, mean(y))
    } else {
        (vec![0.0; k], 0.0)
    };
    let centered = DMatrix::from_fn(n, k, |i, j| x[(i, j)] - col_means[j]);
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));

    let coefficients = min_norm_solve(centered, &yc);
    let intercept = y_mean
        - coefficients
            .iter()
            .zip(&col_means)
            .map(|(c, m)| c * m)
            .sum::<f64>();
    let mut fit = MultiFit {
        coefficients,
        intercept,
        ssr: 0.0,
    };
    fit.ssr = fit
        .predict(x)
        .iter()
        .zip(y)
        .map(|(p, a)| (a - p) * (a - p))
        .sum();
    fit
}

pub(crate) fn min_norm_solve(a: DMatrix<f64>, b: &DVector<f64>) -> Vec<f64> {
    let (n, k) = a.shape();
    if n == 0 || k == 0 {
        return vec![0.0; k];
    }
    let svd = a.svd(true, true);
    let (u, v_t) = match (svd.u.as_ref(), svd.v_t.as_ref()) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("svd requested with u and v_t"),
    };
    let s_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = n.max(k) as f64 * f64::EPSILON * s_max;
    let mut coef = DVector::zeros(k);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let proj = u.column(i).dot(b) / s;
        coef += v_t.row(i).transpose() * proj;
    }
    coef.iter().copied().collect()
}

/// Total sum of squares of `y` around its mean.
pub fn sst(y: &[f64]) -> f64 {
    sum_sq_dev(y)
}
