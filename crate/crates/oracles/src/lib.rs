//! Reference computations for the test suites.
//!
//! Everything here is written against plain `Vec<f64>` columns with textbook
//! algorithms (explicit 2×2 inversion, modified Gram–Schmidt, cyclic Jacobi,
//! grid enumeration) and shares no code with the `stackboost` crate.

/// Columns are stored as `cols[j][i]`.
pub type Columns = [Vec<f64>];

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mean(a: &[f64]) -> f64 {
    a.iter().sum::<f64>() / a.len() as f64
}

/// Slope and intercept from the 2×2 normal equations, inverted explicitly.
pub fn simple_ols_normal_equations(f: &[f64], r: &[f64]) -> (f64, f64) {
    let n = f.len() as f64;
    let sff = dot(f, f);
    let sf: f64 = f.iter().sum();
    let sfr = dot(f, r);
    let sr: f64 = r.iter().sum();
    // [[sff, sf], [sf, n]]^-1
    let det = sff * n - sf * sf;
    let inv = [[n / det, -sf / det], [-sf / det, sff / det]];
    let alpha = inv[0][0] * sfr + inv[0][1] * sr;
    let beta = inv[1][0] * sfr + inv[1][1] * sr;
    (alpha, beta)
}

/// Orthonormal basis of span(cols) by modified Gram–Schmidt with one
/// re-orthogonalisation pass; columns whose remaining norm is below
/// `rel_tol` times their original norm are skipped as dependent.
pub fn orthonormal_basis(cols: &Columns, rel_tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for c in cols {
        let norm0 = dot(c, c).sqrt();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = c.clone();
        for _ in 0..2 {
            for q in &basis {
                let proj = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > rel_tol * norm0 {
            basis.push(v.iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Fitted values of the orthogonal projection of `y` onto span(cols)
/// (plus the constant column when `with_intercept`).
pub fn projection(cols: &Columns, y: &[f64], with_intercept: bool) -> Vec<f64> {
    let n = y.len();
    let mut all: Vec<Vec<f64>> = Vec::new();
    if with_intercept {
        all.push(vec![1.0; n]);
    }
    all.extend(cols.iter().cloned());
    let basis = orthonormal_basis(&all, 1e-9);
    let mut fitted = vec![0.0; n];
    for q in &basis {
        let c = dot(q, y);
        for (f, qi) in fitted.iter_mut().zip(q) {
            *f += c * qi;
        }
    }
    fitted
}

/// Residual sum of squares of the projection of `y` onto span(cols).
pub fn projection_ssr(cols: &Columns, y: &[f64], with_intercept: bool) -> f64 {
    projection(cols, y, with_intercept)
        .iter()
        .zip(y)
        .map(|(f, a)| (a - f) * (a - f))
        .sum()
}

/// Full-rank least squares coefficients by Gram–Schmidt QR and back
/// substitution (no intercept).
pub fn lstsq_qr(cols: &Columns, y: &[f64]) -> Vec<f64> {
    let k = cols.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![vec![0.0; k]; k];
    for (j, c) in cols.iter().enumerate() {
        let mut v = c.clone();
        for (i, qi) in q.iter().enumerate() {
            let proj = dot(qi, &v);
            r[i][j] += proj;
            for (vv, qq) in v.iter_mut().zip(qi) {
                *vv -= proj * qq;
            }
        }
        let norm = dot(&v, &v).sqrt();
        r[j][j] = norm;
        q.push(v.iter().map(|x| x / norm).collect());
    }
    let qty: Vec<f64> = q.iter().map(|qi| dot(qi, y)).collect();
    let mut coef = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = ((i + 1)..k).map(|j| r[i][j] * coef[j]).sum();
        coef[i] = (qty[i] - s) / r[i][i];
    }
    coef
}

/// Ridge with unpenalised intercept via the augmented-rows formulation:
/// stack `sqrt(alpha)·I` under the centered design and zeros under the
/// centered target, then solve plain least squares.
pub fn ridge_augmented(cols: &Columns, y: &[f64], alpha: f64) -> (Vec<f64>, f64) {
    let d = cols.len();
    let my = mean(y);
    let means: Vec<f64> = cols.iter().map(|c| mean(c)).collect();
    let aug_cols: Vec<Vec<f64>> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let mut v: Vec<f64> = c.iter().map(|x| x - means[j]).collect();
            v.extend((0..d).map(|i| if i == j { alpha.sqrt() } else { 0.0 }));
            v
        })
        .collect();
    let mut aug_y: Vec<f64> = y.iter().map(|v| v - my).collect();
    aug_y.extend(std::iter::repeat_n(0.0, d));
    let w = lstsq_qr(&aug_cols, &aug_y);
    let b = my - w.iter().zip(&means).map(|(a, m)| a * m).sum::<f64>();
    (w, b)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// in descending order.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Population covariance matrix of the columns.
pub fn covariance(cols: &Columns) -> Vec<Vec<f64>> {
    let n = cols[0].len() as f64;
    let centered: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let m = mean(c);
            c.iter().map(|x| x - m).collect()
        })
        .collect();
    centered
        .iter()
        .map(|a| centered.iter().map(|b| dot(a, b) / n).collect())
        .collect()
}

/// Smallest `‖y − Xw‖²` over simplex weights on a grid with step
/// `1/steps`, enumerating every composition.
pub fn simplex_grid_min(cols: &Columns, y: &[f64], steps: usize) -> (f64, Vec<f64>) {
    let p = cols.len();
    let mut best = (f64::INFINITY, vec![0.0; p]);
    let mut counts = vec![0usize; p];
    fn rec(
        j: usize,
        left: usize,
        counts: &mut Vec<usize>,
        steps: usize,
        cols: &Columns,
        y: &[f64],
        best: &mut (f64, Vec<f64>),
    ) {
        let p = counts.len();
        if j == p - 1 {
            counts[j] = left;
            let w: Vec<f64> = counts.iter().map(|&c| c as f64 / steps as f64).collect();
            let obj: f64 = (0..y.len())
                .map(|i| {
                    let pred: f64 = (0..p).map(|k| w[k] * cols[k][i]).sum();
                    (y[i] - pred) * (y[i] - pred)
                })
                .sum();
            if obj < best.0 {
                *best = (obj, w);
            }
            return;
        }
        for c in 0..=left {
            counts[j] = c;
            rec(j + 1, left - c, counts, steps, cols, y, best);
        }
    }
    rec(0, steps, &mut counts, steps, cols, y, &mut best);
    best
}

/// Forward stepwise path by brute force: at each step try every unused
/// column and keep the one whose projection SSR is smallest (lowest index
/// on ties). Returns (selected order, ssr after each step).
pub fn greedy_forward_path(cols: &Columns, y: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let p = cols.len();
    let mut selected: Vec<usize> = Vec::new();
    let mut ssrs = Vec::new();
    while selected.len() < p {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..p {
            if selected.contains(&j) {
                continue;
            }
            let trial: Vec<Vec<f64>> = selected
                .iter()
                .chain(std::iter::once(&j))
                .map(|&k| cols[k].clone())
                .collect();
            let ssr = projection_ssr(&trial, y, true);
            if best.is_none_or(|(_, b)| ssr < b) {
                best = Some((j, ssr));
            }
        }
        let (j, ssr) = best.unwrap();
        selected.push(j);
        ssrs.push(ssr);
    }
    (selected, ssrs)
}

/// Caruana forward selection with replacement, enumerating every candidate
/// each round without early stopping. Returns the bag sequence.
pub fn caruana_rounds(cols: &Columns, y: &[f64], rounds: usize) -> Vec<usize> {
    let n = y.len();
    let mut sum = vec![0.0; n];
    let mut bag = Vec::new();
    for round in 0..rounds {
        let size = (round + 1) as f64;
        let mut best: Option<(usize, f64)> = None;
        for (j, c) in cols.iter().enumerate() {
            let loss: f64 = (0..n)
                .map(|i| {
                    let pred = (sum[i] + c[i]) / size;
                    (y[i] - pred) * (y[i] - pred)
                })
                .sum();
            if best.is_none_or(|(_, b)| loss < b) {
                best = Some((j, loss));
            }
        }
        let (j, _) = best.unwrap();
        for (s, v) in sum.iter_mut().zip(&cols[j]) {
            *s += v;
        }
        bag.push(j);
    }
    bag
}

/// Rank of every entry of `values` (1 = smallest), ties sharing the
/// average of the positions they occupy, computed by sorting.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end) as f64 / 2.0 + 1.0;
        for &idx in &order[start..=end] {
            ranks[idx] = avg;
        }
        start = end + 1;
    }
    ranks
}
