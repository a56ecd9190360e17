//! Seeded synthetic regression datasets for tests, benches and the CLI.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::harness::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    /// `y = Xβ + ε` with independent features.
    Linear,
    /// Features are noisy copies of a few latent factors.
    Redundant,
    /// Nonlinear target that a linear base learner cannot capture.
    Underfit,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 3] = [
        DatasetKind::Linear,
        DatasetKind::Redundant,
        DatasetKind::Underfit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Linear => "linear",
            DatasetKind::Redundant => "redundant",
            DatasetKind::Underfit => "underfit",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown dataset kind `{s}`")))
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Generates `n × d` data of the given kind. `noise` is the standard
/// deviation of the additive target noise.
pub fn generate(kind: DatasetKind, n: usize, d: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if d == 0 {
        return Err(Error::InvalidConfig("need at least one feature".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // small feature scale keeps the [0, 1] alpha range relevant to the fit
    let scale: f64 = rng.random_range(0.05..0.3);
    let (features, signal): (DMatrix<f64>, Vec<f64>) = match kind {
        DatasetKind::Linear => {
            let x = DMatrix::from_fn(n, d, |_, _| scale * normal(&mut rng));
            let beta: Vec<f64> = (0..d).map(|_| normal(&mut rng) / scale).collect();
            let s = (0..n)
                .map(|i| (0..d).map(|j| x[(i, j)] * beta[j]).sum())
                .collect();
            (x, s)
        }
        DatasetKind::Redundant => {
            let latent_count = d.div_ceil(3).max(1);
            let latent = DMatrix::from_fn(n, latent_count, |_, _| normal(&mut rng));
            let loading: Vec<usize> = (0..d).map(|j| j % latent_count).collect();
            let x = DMatrix::from_fn(n, d, |i, j| {
                scale * (latent[(i, loading[j])] + 0.1 * normal(&mut rng))
            });
            let beta: Vec<f64> = (0..latent_count).map(|_| normal(&mut rng)).collect();
            let s = (0..n)
                .map(|i| (0..latent_count).map(|l| latent[(i, l)] * beta[l]).sum())
                .collect();
            (x, s)
        }
        DatasetKind::Underfit => {
            let x = DMatrix::from_fn(n, d, |_, _| scale * normal(&mut rng));
            let beta: Vec<f64> = (0..d).map(|_| normal(&mut rng)).collect();
            let s = (0..n)
                .map(|i| {
                    let z: Vec<f64> = (0..d).map(|j| x[(i, j)] / scale).collect();
                    let lin: f64 = z.iter().zip(&beta).map(|(a, b)| a * b).sum();
                    lin + (1.5 * z[0]).sin() + 0.5 * z[d - 1] * z[d - 1] + 0.3 * z[0] * z[d / 2]
                })
                .collect();
            (x, s)
        }
    };
    let offset = 10.0 * normal(&mut rng);
    let target = signal
        .into_iter()
        .map(|s: f64| offset + s + noise * normal(&mut rng))
        .collect();
    Dataset::new(format!("{kind}-{seed}"), features, target)
}

/// A mixed suite of `count` datasets cycling through the three kinds with
/// varying sizes; every member is deterministic in `seed`.
pub fn collinear_suite(count: usize, seed: u64) -> Result<Vec<Dataset>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let kind = DatasetKind::ALL[i % DatasetKind::ALL.len()];
            let n = rng.random_range(60..=150);
            let d = rng.random_range(4..=12);
            let noise = rng.random_range(0.3..1.5);
            let member_seed = rng.random::<u64>();
            generate(kind, n, d, noise, member_seed)
        })
        .collect()
}
