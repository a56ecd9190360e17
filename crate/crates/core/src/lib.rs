//! Meta-learners for stacking the models produced by a hyperparameter search.
//!
//! The centerpiece is stagewise least-squares boosting over the matrix of
//! base-model predictions ([`boosting::fit_boost`]) and its regularized form
//! ([`boosting::fit_rboost`]), stopped either by a classical information
//! criterion or by the increasing-coefficient-magnitude rule. The crate also
//! provides the usual comparison combiners, multicollinearity and rank-test
//! diagnostics, and a small Ridge-based search harness that produces
//! out-of-fold prediction matrices.

pub mod aggregators;
pub mod boosting;
pub mod criteria;
pub mod diagnostics;
pub mod document;
pub mod error;
pub mod harness;
pub mod io;
pub mod least_squares;
pub mod methods;
pub mod stacking;
pub mod synthetic;
pub mod types;

pub use boosting::{BoostConfig, BoostFit, StopReason, StopRule};
pub use criteria::{CriterionKind, CriterionScore};
pub use error::{Error, Result};
pub use methods::Method;
pub use types::{
    column_stats, validate_pair, ColumnStat, EnsembleModel, ModelWeight, PredictionMatrix,
    SquaredError, StageRecord, TargetVector,
};

pub use nalgebra::DMatrix;
