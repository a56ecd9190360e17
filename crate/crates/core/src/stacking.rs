//! Learned non-boosting meta-learners: unconstrained OLS, simplex-constrained
//! least squares (GEM), and the criterion-sized forward stepwise, principal
//! component and partial least squares regressions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::criteria::{score, CriterionKind, CriterionScore};
use crate::error::{Error, Result};
use crate::least_squares::fit_multi;
use crate::types::{
    validate_fit_input, validate_pair, EnsembleModel, PredictionMatrix, TargetVector,
};

/// Components whose eigenvalue is below this fraction of the largest are
/// left out of the PCR sweep.
pub const EIGEN_CUTOFF: f64 = 1e-12;

pub const GEM_TOLERANCE: f64 = 1e-10;
pub const GEM_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Number of features (FSR) or components (PCR, PLS) kept.
    pub chosen_k: usize,
    /// One score per k = 1..=p; `+∞` where the k-th step does not exist.
    pub scores: Vec<CriterionScore>,
    /// Training SSR at each k (`+∞` where undefined).
    pub ssr_path: Vec<f64>,
    /// Column order of the forward path (FSR only).
    pub path: Vec<usize>,
    pub model: EnsembleModel,
}

fn argmin_smallest_k(scores: &[CriterionScore]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.value < scores[best].value {
            best = i;
        }
    }
    best + 1
}

pub fn fit_ols_meta(x: &PredictionMatrix, y: &TargetVector) -> Result<EnsembleModel> {
    validate_pair(x, y)?;
    let fit = fit_multi(x.values(), y.values(), true);
    Ok(EnsembleModel::from_dense(
        x.column_ids(),
        &fit.coefficients,
        fit.intercept,
    ))
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        let sum: f64 = w.iter().sum();
        if w.iter().any(|&v| v < 0.0 || !v.is_finite()) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "weights are not on the probability simplex (sum {sum})"
            )));
        }
        Ok(Self(w))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Euclidean projection onto `{w : w ≥ 0, Σw = 1}` by sorting and
/// thresholding.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&vi| (vi - theta).max(0.0)).collect()
}

/// Minimizes `‖y − Xw‖²` over the probability simplex.
///
/// On the simplex `Xw − y = Dw` with `D = X − y·1ᵀ`, so the objective is the
/// homogeneous quadratic `wᵀ(DᵀD)w`. Solved by accelerated projected
/// gradient with restarts; stops when the relative objective change drops
/// below [`GEM_TOLERANCE`] or after [`GEM_MAX_ITERATIONS`].
pub fn gem_weights(x: &PredictionMatrix, y: &TargetVector) -> Result<SimplexWeights> {
    validate_pair(x, y)?;
    let p = x.ncols();
    let d = DMatrix::from_fn(x.nrows(), p, |i, j| x.values()[(i, j)] - y.values()[i]);
    let gram = d.transpose() * &d;
    let lipschitz = 2.0 * SymmetricEigen::new(gram.clone()).eigenvalues.max();
    let objective = |w: &DVector<f64>| w.dot(&(&gram * w));
    if lipschitz <= 0.0 {
        // every column already equals y
        return SimplexWeights::new(vec![1.0 / p as f64; p]);
    }
    let step = 1.0 / lipschitz;

    let mut w = DVector::from_element(p, 1.0 / p as f64);
    let mut z = w.clone();
    let mut t = 1.0_f64;
    let mut f_prev = objective(&w);
    for _ in 0..GEM_MAX_ITERATIONS {
        let grad = (&gram * &z) * 2.0;
        let moved: Vec<f64> = (z.clone() - grad * step).iter().copied().collect();
        let w_next = DVector::from_vec(project_to_simplex(&moved));
        let f_next = objective(&w_next);
        if f_next > f_prev {
            // momentum overshot; restart from the last iterate
            z = w.clone();
            t = 1.0;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = &w_next + (&w_next - &w) * ((t - 1.0) / t_next);
        t = t_next;
        w = w_next;
        let change = (f_prev - f_next).abs();
        f_prev = f_next;
        if change <= GEM_TOLERANCE * f_prev.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let raw: Vec<f64> = w.iter().copied().collect();
    // one last projection keeps the sum at 1 to rounding
    SimplexWeights::new(project_to_simplex(&raw))
}

pub fn fit_gem(x: &PredictionMatrix, y: &TargetVector) -> Result<EnsembleModel> {
    let w = gem_weights(x, y)?;
    Ok(EnsembleModel::from_dense(x.column_ids(), w.as_slice(), 0.0))
}

/// Forward stepwise regression without replacement, sized by `kind`.
pub fn fit_fsr(x: &PredictionMatrix, y: &TargetVector, kind: CriterionKind) -> Result<SweepResult> {
    validate_fit_input(x, y)?;
    let (n, p) = (x.nrows(), x.ncols());
    let sst = y.sst();
    let mut path: Vec<usize> = Vec::with_capacity(p);
    let mut ssr_path = Vec::with_capacity(p);
    let mut used = vec![false; p];
    for _ in 0..p {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..p).filter(|&j| !used[j]) {
            let mut cols = path.clone();
            cols.push(j);
            let ssr = fit_multi(&x.values().select_columns(cols.iter()), y.values(), true).ssr;
            if best.is_none_or(|(_, b)| ssr < b) {
                best = Some((j, ssr));
            }
        }
        let (j, ssr) = best.expect("an unused column remains");
        used[j] = true;
        path.push(j);
        ssr_path.push(ssr);
    }
    let scores: Vec<CriterionScore> = ssr_path
        .iter()
        .enumerate()
        .map(|(i, &ssr)| score(kind, n, i + 1, ssr, sst))
        .collect();
    let chosen_k = argmin_smallest_k(&scores);
    let chosen = &path[..chosen_k];
    let fit = fit_multi(&x.values().select_columns(chosen.iter()), y.values(), true);
    let mut dense = vec![0.0; p];
    for (&j, &c) in chosen.iter().zip(&fit.coefficients) {
        dense[j] = c;
    }
    Ok(SweepResult {
        chosen_k,
        scores,
        ssr_path,
        path,
        model: EnsembleModel::from_dense(x.column_ids(), &dense, fit.intercept),
    })
}

/// Latent directions shared by PCR and PLS: `scores = (X − x̄)·rotation`.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    /// `p × c` map from centered columns to component scores.
    pub rotation: DMatrix<f64>,
    /// `n × c` component scores.
    pub scores: DMatrix<f64>,
    /// How many leading components are usable in the sweep.
    pub retained: usize,
    pub column_means: Vec<f64>,
}

/// Principal components of the column covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalComponents {
    /// All `p` eigenvalues of the population covariance, descending.
    pub eigenvalues: Vec<f64>,
    pub components: Components,
}

fn centered(x: &PredictionMatrix) -> (DMatrix<f64>, Vec<f64>) {
    let means: Vec<f64> = (0..x.ncols())
        .map(|j| x.values().column(j).mean())
        .collect();
    let xc = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x.values()[(i, j)] - means[j]);
    (xc, means)
}

pub fn principal_components(x: &PredictionMatrix) -> PrincipalComponents {
    let (xc, means) = centered(x);
    let n = x.nrows() as f64;
    let cov = (xc.transpose() * &xc) / n;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..x.ncols()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut rotation = eig.eigenvectors.select_columns(order.iter());
    for mut v in rotation.column_iter_mut() {
        if let Some(first) = v.iter().copied().find(|c| c.abs() > 1e-12) {
            if first < 0.0 {
                v.neg_mut();
            }
        }
    }
    let top = eigenvalues.first().copied().unwrap_or(0.0);
    let retained = eigenvalues
        .iter()
        .take_while(|&&e| top > 0.0 && e >= EIGEN_CUTOFF * top)
        .count();
    let scores = &xc * &rotation;
    PrincipalComponents {
        eigenvalues,
        components: Components {
            rotation,
            scores,
            retained,
            column_means: means,
        },
    }
}

/// PLS1 components by NIPALS: each weight vector is the normalized
/// covariance of the deflated columns with the deflated target.
pub fn pls_components(x: &PredictionMatrix, y: &TargetVector) -> Components {
    let (xc, means) = centered(x);
    let (n, p) = xc.shape();
    let y_mean = y.mean();
    let mut xa = xc.clone();
    let mut ya = DVector::from_iterator(n, y.values().iter().map(|v| v - y_mean));
    let x_scale = xc.norm();
    let w_tol = 1e-12 * x_scale * ya.norm();
    let t_tol = 1e-24 * x_scale * x_scale;

    let mut rotation = DMatrix::zeros(p, p);
    let mut loadings: Vec<DVector<f64>> = Vec::new();
    let mut retained = 0;
    for a in 0..p {
        let w = xa.transpose() * &ya;
        let w_norm = w.norm();
        if w_norm <= w_tol || w_norm == 0.0 {
            break;
        }
        let w = w / w_norm;
        let t = &xa * &w;
        let tt = t.dot(&t);
        if tt <= t_tol || tt == 0.0 {
            break;
        }
        let load = xa.transpose() * &t / tt;
        let q = ya.dot(&t) / tt;
        xa -= &t * load.transpose();
        ya -= &t * q;
        // r_a = w_a − Σ_b (p_bᵀ w_a) r_b maps centered X straight to t_a
        let mut r = w.clone();
        for (b, pb) in loadings.iter().enumerate() {
            let coef = pb.dot(&w);
            r -= rotation.column(b) * coef;
        }
        rotation.set_column(a, &r);
        loadings.push(load);
        retained += 1;
    }
    let rotation = rotation.columns(0, retained.max(1)).into_owned();
    let scores = &xc * &rotation;
    Components {
        rotation,
        scores,
        retained,
        column_means: means,
    }
}

fn component_sweep(
    x: &PredictionMatrix,
    y: &TargetVector,
    kind: CriterionKind,
    comps: &Components,
) -> SweepResult {
    let (n, p) = (x.nrows(), x.ncols());
    let sst = y.sst();
    let usable = comps.retained.max(1).min(comps.scores.ncols());
    let mut ssr_path = vec![f64::INFINITY; p];
    let mut scores: Vec<CriterionScore> = (1..=p)
        .map(|k| CriterionScore {
            value: f64::INFINITY,
            kind,
            k,
            n,
        })
        .collect();
    let mut fits = Vec::with_capacity(usable);
    for k in 1..=usable {
        let fit = fit_multi(&comps.scores.columns(0, k).into_owned(), y.values(), true);
        ssr_path[k - 1] = fit.ssr;
        scores[k - 1] = score(kind, n, k, fit.ssr, sst);
        fits.push(fit);
    }
    let chosen_k = argmin_smallest_k(&scores);
    let fit = &fits[chosen_k - 1];
    let gamma = DVector::from_column_slice(&fit.coefficients);
    let weights = comps.rotation.columns(0, chosen_k) * gamma;
    // scores are centered, so the intercept is ȳ; fold the column means back in
    let bias = fit.intercept
        - weights
            .iter()
            .zip(&comps.column_means)
            .map(|(w, m)| w * m)
            .sum::<f64>();
    let dense: Vec<f64> = weights.iter().copied().collect();
    SweepResult {
        chosen_k,
        scores,
        ssr_path,
        path: Vec::new(),
        model: EnsembleModel::from_dense(x.column_ids(), &dense, bias),
    }
}

pub fn fit_pcr(x: &PredictionMatrix, y: &TargetVector, kind: CriterionKind) -> Result<SweepResult> {
    validate_fit_input(x, y)?;
    let pcs = principal_components(x);
    Ok(component_sweep(x, y, kind, &pcs.components))
}

pub fn fit_pls(x: &PredictionMatrix, y: &TargetVector, kind: CriterionKind) -> Result<SweepResult> {
    validate_fit_input(x, y)?;
    let comps = pls_components(x, y);
    Ok(component_sweep(x, y, kind, &comps))
}
