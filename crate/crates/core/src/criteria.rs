//! Information criteria used as stop rules and sweep scores, plus the
//! increasing-coefficient-magnitude (ICM) rule for stagewise boosting.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::types::StageRecord;

/// SSR is floored at this fraction of SST before any logarithm.
pub const SSR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionKind {
    Aic,
    Aicc,
    Bic,
    Hqic,
    Gmdl,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 5] = [
        CriterionKind::Aic,
        CriterionKind::Aicc,
        CriterionKind::Bic,
        CriterionKind::Hqic,
        CriterionKind::Gmdl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Aic => "aic",
            CriterionKind::Aicc => "aicc",
            CriterionKind::Bic => "bic",
            CriterionKind::Hqic => "hqic",
            CriterionKind::Gmdl => "gmdl",
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CriterionKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown criterion `{s}`")))
    }
}

/// A criterion value; lower is better. `+∞` marks an undefined score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionScore {
    pub value: f64,
    pub kind: CriterionKind,
    pub k: usize,
    pub n: usize,
}

impl CriterionScore {
    pub fn is_defined(&self) -> bool {
        self.value.is_finite()
    }
}

/// Scores a fit with `k` features, residual sum of squares `ssr` and total
/// sum of squares `sst` over `n` instances.
///
/// ```text
/// AIC  = n·ln(SSR/n) + 2k
/// AICc = AIC + 2k(k+1)/(n−k−1)            (+∞ when n−k−1 ≤ 0)
/// BIC  = n·ln(SSR/n) + k·ln n
/// HQIC = n·ln(SSR/n) + 2k·ln(ln n)
/// gMDL = (n/2)·ln S + (k/2)·ln F + ln n    if R² ≥ k/n
///        (n/2)·ln(SST/n) + (1/2)·ln n      otherwise
///        with S = SSR/(n−k), F = (SST−SSR)/(k·S)
/// ```
pub fn score(kind: CriterionKind, n: usize, k: usize, ssr: f64, sst: f64) -> CriterionScore {
    let value = score_value(kind, n, k, ssr, sst);
    CriterionScore { value, kind, k, n }
}

fn score_value(kind: CriterionKind, n: usize, k: usize, ssr: f64, sst: f64) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    let ssr = ssr.max(SSR_FLOOR * sst);
    let fit_term = nf * (ssr / nf).ln();
    match kind {
        CriterionKind::Aic => fit_term + 2.0 * kf,
        CriterionKind::Aicc => {
            if n <= k + 1 {
                return f64::INFINITY;
            }
            fit_term + 2.0 * kf + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0)
        }
        CriterionKind::Bic => fit_term + kf * nf.ln(),
        CriterionKind::Hqic => fit_term + 2.0 * kf * nf.ln().ln(),
        CriterionKind::Gmdl => {
            let null = 0.5 * nf * (sst / nf).ln() + 0.5 * nf.ln();
            if k == 0 {
                return null;
            }
            if n <= k {
                return f64::INFINITY;
            }
            let r2 = 1.0 - ssr / sst;
            if r2 >= kf / nf {
                let s = ssr / (nf - kf);
                let f = (sst - ssr) / (kf * s);
                0.5 * nf * s.ln() + 0.5 * kf * f.ln() + nf.ln()
            } else {
                null
            }
        }
    }
}

/// ICM: stop when the selected column's `|α|·σ` strictly increases over the
/// previous stage. Never fires on the first stage.
pub fn icm_should_stop(current: &StageRecord, previous: Option<&StageRecord>) -> bool {
    match previous {
        None => false,
        Some(prev) => current.magnitude > prev.magnitude,
    }
}

/// One entry of a boosting run's fit history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageFit {
    pub n: usize,
    /// Number of distinct columns in the ensemble after this stage.
    pub k_distinct: usize,
    pub ssr: f64,
}

/// Classical stop rule for stagewise fits: the last entry of `history` is the
/// candidate; stop when its score is strictly worse than the previous
/// stage's. A single-entry history never stops.
pub fn classical_should_stop(kind: CriterionKind, history: &[StageFit], sst: f64) -> bool {
    let [.., prev, cand] = history else {
        return false;
    };
    let s_cand = score(kind, cand.n, cand.k_distinct, cand.ssr, sst).value;
    let s_prev = score(kind, prev.n, prev.k_distinct, prev.ssr, sst).value;
    s_cand > s_prev
}
