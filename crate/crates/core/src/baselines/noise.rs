use rand::Rng;
use rand_distr::StandardNormal;

use super::BaselineConfig;
use crate::error::{Error, Result};
use crate::growth::{GrowthRecord, Metric};
use crate::model::probabilistic_round;
use crate::rng::{substream, Purpose};
use crate::snapshot::{SizeSnapshot, SnapshotRow};

/// Adds Gaussian noise of fixed width to every size.
///
/// Sizes that fall to zero or below are restarted at `replacement_mean`, and
/// the whole population is then rescaled so its total equals `target_total`.
/// Returns one record per unit comparing the size before the step with the
/// size after noise (zero for extinct units), before rescaling.
pub fn step_additive<R: Rng + ?Sized>(
    sizes: &mut [f64],
    sigma: f64,
    replacement_mean: f64,
    target_total: f64,
    rng: &mut R,
) -> Vec<GrowthRecord> {
    let mut records = Vec::with_capacity(sizes.len());
    for n in sizes.iter_mut() {
        let xi: f64 = rng.sample(StandardNormal);
        let next = (*n + sigma * xi).max(0.0);
        if *n > 0.0 {
            records.push(GrowthRecord { size_before: *n, size_after: next, metric: Metric::Employees });
        }
        *n = if next > 0.0 { next } else { replacement_mean };
    }
    let total: f64 = sizes.iter().sum();
    if total > 0.0 {
        let scale = target_total / total;
        sizes.iter_mut().for_each(|n| *n *= scale);
    }
    records
}

/// `n -> g * n` with `g ~ Normal(1, sigma^2)`, rounded probabilistically to an
/// integer. Extinct units restart at `replacement_mean` on average.
pub fn step_multiplicative<R: Rng + ?Sized>(
    sizes: &mut [f64],
    sigma: f64,
    replacement_mean: f64,
    rng: &mut R,
) -> Vec<GrowthRecord> {
    multiplicative(sizes, |_| sigma, replacement_mean, rng)
}

/// Multiplicative noise whose width shrinks with size: `sigma(n) = sqrt(c) * n^-beta`.
pub fn step_scaled_beta<R: Rng + ?Sized>(
    sizes: &mut [f64],
    c: f64,
    beta: f64,
    replacement_mean: f64,
    rng: &mut R,
) -> Result<Vec<GrowthRecord>> {
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("c must be > 0, got {c}")));
    }
    if !(0.0..=0.5).contains(&beta) {
        return Err(Error::InvalidInput(format!("beta must lie in [0, 0.5], got {beta}")));
    }
    let scale = c.sqrt();
    Ok(multiplicative(sizes, |n| scale * n.powf(-beta), replacement_mean, rng))
}

fn multiplicative<R: Rng + ?Sized>(
    sizes: &mut [f64],
    sigma_of: impl Fn(f64) -> f64,
    replacement_mean: f64,
    rng: &mut R,
) -> Vec<GrowthRecord> {
    let mut records = Vec::with_capacity(sizes.len());
    for n in sizes.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        let g = 1.0 + sigma_of(*n) * z;
        let next = probabilistic_round((g * *n).max(0.0), rng) as f64;
        records.push(GrowthRecord { size_before: *n, size_after: next, metric: Metric::Employees });
        *n = if next > 0.0 { next } else { restart(replacement_mean, rng) };
    }
    records
}

fn restart<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    probabilistic_round(mean, rng).max(1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Additive,
    Multiplicative,
    ScaledBeta,
}

/// A population driven by one of the reference noise processes.
#[derive(Debug, Clone)]
pub struct NoiseProcess {
    kind: NoiseKind,
    config: BaselineConfig,
    sizes: Vec<f64>,
    target_total: f64,
    time: u64,
}

impl NoiseProcess {
    pub fn new(kind: NoiseKind, config: BaselineConfig) -> Result<Self> {
        config.validate()?;
        if kind == NoiseKind::ScaledBeta && config.beta > 0.5 {
            return Err(Error::Config(format!(
                "size-scaled noise needs beta in [0, 0.5], got {}",
                config.beta
            )));
        }
        let n0 = config.initial_size();
        let sizes = match kind {
            NoiseKind::Additive => vec![n0; config.n_units],
            _ => {
                let mut rng = substream(config.seed, 0, Purpose::Init);
                (0..config.n_units).map(|_| probabilistic_round(n0, &mut rng).max(1) as f64).collect()
            }
        };
        let target_total = sizes.iter().sum();
        Ok(Self { kind, config, sizes, target_total, time: 0 })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn config(&self) -> &BaselineConfig {
        &self.config
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn step(&mut self) -> Result<Vec<GrowthRecord>> {
        let mut rng = substream(self.config.seed, self.time, Purpose::Noise);
        let c = &self.config;
        let records = match self.kind {
            NoiseKind::Additive => {
                step_additive(&mut self.sizes, c.sigma, c.replacement_mean, self.target_total, &mut rng)
            }
            NoiseKind::Multiplicative => {
                step_multiplicative(&mut self.sizes, c.sigma, c.replacement_mean, &mut rng)
            }
            NoiseKind::ScaledBeta => {
                step_scaled_beta(&mut self.sizes, c.sigma * c.sigma, c.beta, c.replacement_mean, &mut rng)?
            }
        };
        self.time += 1;
        Ok(records)
    }

    pub fn snapshot(&self) -> SizeSnapshot {
        SizeSnapshot::new(self.time, self.sizes.iter().copied())
    }

    pub fn rows(&self) -> Vec<SnapshotRow> {
        self.sizes
            .iter()
            .enumerate()
            .map(|(firm_id, &size)| SnapshotRow { firm_id, size, output: size, sold: size })
            .collect()
    }
}
