//! Text serialization of fitted models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::methods::{Method, MethodFit};
use crate::types::{EnsembleModel, ModelWeight, StageRecord};

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A fitted ensemble with enough metadata to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub library_version: String,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_reason: Option<String>,
    pub bias: f64,
    #[serde(default)]
    pub weights: Vec<ModelWeight>,
    #[serde(default)]
    pub stage: Vec<StageRecord>,
}

impl ModelDocument {
    pub fn new(method: &Method, fit: &MethodFit) -> Self {
        Self {
            library_version: LIBRARY_VERSION.to_string(),
            method: method.name().to_string(),
            stop: method.stop_name(),
            chosen_k: fit.chosen_k,
            stop_reason: fit.stop_reason.map(|r| format!("{r:?}")),
            bias: fit.model.bias,
            weights: fit.model.weights.clone(),
            stage: fit.model.trace.clone(),
        }
    }

    pub fn model(&self) -> EnsembleModel {
        EnsembleModel {
            weights: self.weights.clone(),
            bias: self.bias,
            trace: self.stage.clone(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
