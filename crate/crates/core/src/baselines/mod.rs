//! Reference stochastic processes the market model is compared against.

mod noise;
mod sequential;

pub use noise::{step_additive, step_multiplicative, step_scaled_beta, NoiseKind, NoiseProcess};
pub use sequential::{marsili_rank_prediction, step_marsili_sequential, SequentialCities};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    /// Number of firms or cities.
    pub n_units: usize,
    /// Total size; sets the initial mean size of every unit.
    pub n_workers: u64,
    /// Noise scale. For the size-scaled process this is the prefactor of `sigma * n^-beta`.
    pub sigma: f64,
    pub beta: f64,
    pub replacement_mean: f64,
    pub seed: u64,
    pub iterations: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            n_units: 10_000,
            n_workers: 500_000,
            sigma: 0.2,
            beta: 0.0,
            replacement_mean: 1.5,
            seed: 0,
            iterations: 4_000,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_units == 0 {
            return Err(Error::Config("n_units must be positive".into()));
        }
        if self.n_workers == 0 {
            return Err(Error::Config("n_workers must be positive".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!("beta must lie in [0, 1], got {}", self.beta)));
        }
        if !(self.replacement_mean > 0.0) {
            return Err(Error::Config(format!(
                "replacement_mean must be > 0, got {}",
                self.replacement_mean
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be positive".into()));
        }
        Ok(())
    }

    pub fn initial_size(&self) -> f64 {
        self.n_workers as f64 / self.n_units as f64
    }
}
