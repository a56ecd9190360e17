#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stackboost::{PredictionMatrix, TargetVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent uniform columns and target.
pub fn random_instance(seed: u64, n: usize, p: usize) -> (PredictionMatrix, TargetVector) {
    let mut rng = rng(seed);
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let y = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    (
        PredictionMatrix::from_columns_auto(&cols).unwrap(),
        TargetVector::new(y).unwrap(),
    )
}

/// Columns are noisy, rescaled copies of the target, as produced by a
/// hyperparameter search over one model family.
pub fn correlated_instance(seed: u64, n: usize, p: usize) -> (PredictionMatrix, TargetVector) {
    let mut rng = rng(seed);
    let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let shared: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            let gain = rng.random_range(0.6..1.1);
            let noise = rng.random_range(0.05..0.6);
            (0..n)
                .map(|i| gain * y[i] + shared[i] + noise * rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    (
        PredictionMatrix::from_columns_auto(&cols).unwrap(),
        TargetVector::new(y).unwrap(),
    )
}

pub fn ssr(pred: &[f64], y: &[f64]) -> f64 {
    pred.iter().zip(y).map(|(p, t)| (t - p) * (t - p)).sum()
}
