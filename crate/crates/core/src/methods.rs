//! Registry of every meta-learner and aggregator under one calling
//! convention, used by the evaluation harness and the CLI.

use std::fmt;
use std::str::FromStr;

use crate::aggregators::{fit_bem, fit_best, fit_caruana, fit_iew, CaruanaConfig};
use crate::boosting::{fit_boost, fit_rboost, BoostConfig, StopReason, StopRule};
use crate::criteria::CriterionKind;
use crate::error::{Error, Result};
use crate::stacking::{fit_fsr, fit_gem, fit_ols_meta, fit_pcr, fit_pls};
use crate::types::{EnsembleModel, PredictionMatrix, TargetVector};

pub const METHOD_NAMES: [&str; 11] = [
    "best", "bem", "iew", "gem", "ols", "fsr", "pcr", "pls", "caruana", "boost", "rboost",
];
pub const STOP_NAMES: [&str; 6] = ["aic", "aicc", "bic", "hqic", "gmdl", "icm"];

/// Criterion used by the sweep methods when none is given.
pub const DEFAULT_SWEEP_CRITERION: CriterionKind = CriterionKind::Aicc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Best,
    Bem,
    Iew,
    Gem,
    Ols,
    Fsr(CriterionKind),
    Pcr(CriterionKind),
    Pls(CriterionKind),
    Caruana,
    Boost(StopRule),
    Rboost(StopRule),
}

impl Method {
    /// Resolves a registered method name plus optional stop-rule name.
    pub fn parse(method: &str, stop: Option<&str>) -> Result<Self> {
        let method = method.to_ascii_lowercase();
        let stop = stop
            .map(|s| s.parse::<StopRule>())
            .transpose()
            .map_err(|_| {
                Error::InvalidConfig(format!(
                    "unknown stop criterion `{}` (expected one of {})",
                    stop.unwrap_or_default(),
                    STOP_NAMES.join(", ")
                ))
            })?;
        let sweep = |name: &str| match stop {
            None => Ok(DEFAULT_SWEEP_CRITERION),
            Some(StopRule::Criterion(k)) => Ok(k),
            Some(StopRule::Icm) => Err(Error::InvalidConfig(format!(
                "stop criterion `icm` is only valid with boost or rboost, not {name}"
            ))),
        };
        let no_stop = |m: Method| match stop {
            None => Ok(m),
            Some(s) => Err(Error::InvalidConfig(format!(
                "method `{method}` takes no stop criterion (got `{s}`)"
            ))),
        };
        match method.as_str() {
            "best" => no_stop(Method::Best),
            "bem" => no_stop(Method::Bem),
            "iew" => no_stop(Method::Iew),
            "gem" => no_stop(Method::Gem),
            "ols" => no_stop(Method::Ols),
            "caruana" => no_stop(Method::Caruana),
            "fsr" => sweep("fsr").map(Method::Fsr),
            "pcr" => sweep("pcr").map(Method::Pcr),
            "pls" => sweep("pls").map(Method::Pls),
            "boost" => Ok(Method::Boost(stop.unwrap_or(StopRule::Icm))),
            "rboost" => Ok(Method::Rboost(stop.unwrap_or(StopRule::Icm))),
            _ => Err(Error::InvalidConfig(format!(
                "unknown method `{method}` (expected one of {})",
                METHOD_NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Best => "best",
            Method::Bem => "bem",
            Method::Iew => "iew",
            Method::Gem => "gem",
            Method::Ols => "ols",
            Method::Fsr(_) => "fsr",
            Method::Pcr(_) => "pcr",
            Method::Pls(_) => "pls",
            Method::Caruana => "caruana",
            Method::Boost(_) => "boost",
            Method::Rboost(_) => "rboost",
        }
    }

    pub fn stop_name(&self) -> Option<String> {
        match self {
            Method::Fsr(k) | Method::Pcr(k) | Method::Pls(k) => Some(k.to_string()),
            Method::Boost(s) | Method::Rboost(s) => Some(s.to_string()),
            _ => None,
        }
    }

    /// Whether the method consumes per-model losses.
    pub fn uses_losses(&self) -> bool {
        matches!(self, Method::Best | Method::Iew)
    }

    pub fn fit(
        &self,
        x: &PredictionMatrix,
        y: &TargetVector,
        per_model_loss: &[f64],
    ) -> Result<MethodFit> {
        let plain = |model: EnsembleModel| MethodFit {
            model,
            chosen_k: None,
            stop_reason: None,
        };
        Ok(match *self {
            Method::Best => plain(fit_best(x, y, per_model_loss)?),
            Method::Bem => plain(fit_bem(x, y)?),
            Method::Iew => plain(fit_iew(x, y, per_model_loss)?),
            Method::Gem => plain(fit_gem(x, y)?),
            Method::Ols => plain(fit_ols_meta(x, y)?),
            Method::Caruana => plain(fit_caruana(x, y, &CaruanaConfig::default())?),
            Method::Fsr(k) | Method::Pcr(k) | Method::Pls(k) => {
                let sweep = match self {
                    Method::Fsr(_) => fit_fsr(x, y, k)?,
                    Method::Pcr(_) => fit_pcr(x, y, k)?,
                    _ => fit_pls(x, y, k)?,
                };
                MethodFit {
                    model: sweep.model,
                    chosen_k: Some(sweep.chosen_k),
                    stop_reason: None,
                }
            }
            Method::Boost(stop) | Method::Rboost(stop) => {
                let cfg = BoostConfig::new(stop);
                let fit = if matches!(self, Method::Boost(_)) {
                    fit_boost(x, y, &cfg)?
                } else {
                    fit_rboost(x, y, &cfg)?
                };
                MethodFit {
                    model: fit.model,
                    chosen_k: None,
                    stop_reason: Some(fit.stop_reason),
                }
            }
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stop_name() {
            Some(s) => write!(f, "{}-{}", self.name(), s),
            None => f.write_str(self.name()),
        }
    }
}

/// Accepts `name` or `name-stop` (e.g. `rboost-icm`, `pls-bic`).
impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('-') {
            Some((m, stop)) => Method::parse(m, Some(stop)),
            None => Method::parse(s, None),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodFit {
    pub model: EnsembleModel,
    pub chosen_k: Option<usize>,
    pub stop_reason: Option<StopReason>,
}

/// Mean squared error of every column against `y`; the losses handed to
/// Best and IEW when the matrix holds out-of-fold predictions.
pub fn per_model_losses(x: &PredictionMatrix, y: &TargetVector) -> Vec<f64> {
    let n = x.nrows() as f64;
    (0..x.ncols())
        .map(|j| {
            x.column(j)
                .iter()
                .zip(y.values())
                .map(|(p, a)| (a - p) * (a - p))
                .sum::<f64>()
                / n
        })
        .collect()
}
