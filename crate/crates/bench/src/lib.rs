//! Shared inputs for the benchmarks.

use stackboost::harness::{build_prediction_matrix, sample_trials, CvPlan, Sampler};
use stackboost::synthetic::{generate, DatasetKind};
use stackboost::{PredictionMatrix, TargetVector};

/// Out-of-fold Ridge prediction matrix with `trials` random-search columns
/// over a redundant dataset of `n` rows.
pub fn prediction_matrix(n: usize, trials: usize, seed: u64) -> (PredictionMatrix, TargetVector) {
    let ds = generate(DatasetKind::Redundant, n, 9, 0.8, seed).expect("valid dataset");
    let trials = sample_trials(Sampler::Random, trials, seed);
    let plan = CvPlan::new(n, 5, seed).expect("valid plan");
    build_prediction_matrix(&ds, &trials, &plan).expect("ridge fits")
}
