//! The firm/worker economy and its one-iteration update.

mod economy;
pub mod equations;
pub mod market;
pub mod rounding;

pub use economy::{Economy, FirmState, Replacement, StepReport};
pub use equations::{expected_margin, plan_production, production, realized_margin, required_workers};
pub use market::{allocate_market, allocate_with_probability, Allocation, MarketProbabilities};
pub use rounding::{per_job_trinomial, per_unit_offer, probabilistic_round};

use crate::error::{Error, Result};

/// Who spends income in the goods market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scenario {
    /// Firms and workers both consume; workforce is the scarce resource.
    #[default]
    FirmsConsume,
    /// Only workers consume; purchasing power is the scarce resource.
    WorkersOnlyConsume,
}

/// How fractional offers and production are turned into integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    /// Round the whole quantity up with probability equal to its fractional part.
    #[default]
    Probabilistic,
    /// Every existing unit independently asks for one or two units.
    PerUnit,
}

/// Global parameters of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub n_firms: usize,
    pub n_workers: u64,
    pub margin: f64,
    pub wage: f64,
    pub price: f64,
    pub scenario: Scenario,
    pub rounding: Rounding,
    pub allocation: Allocation,
    pub replacement_low: f64,
    pub replacement_high: f64,
    pub seed: u64,
    pub iterations: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n_firms: 2_000,
            n_workers: 90_000,
            margin: 0.1,
            wage: 1.0,
            price: 1.0,
            scenario: Scenario::FirmsConsume,
            rounding: Rounding::Probabilistic,
            allocation: Allocation::ExactMatching,
            replacement_low: 1.0,
            replacement_high: 2.0,
            seed: 0,
            iterations: 1_000,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.margin > 0.0) || !self.margin.is_finite() {
            return fail(format!("margin must be > 0, got {}", self.margin));
        }
        if self.n_firms < 2 {
            return fail(format!("n_firms must be >= 2, got {}", self.n_firms));
        }
        if self.n_workers < self.n_firms as u64 {
            return fail(format!(
                "n_workers ({}) must be >= n_firms ({})",
                self.n_workers, self.n_firms
            ));
        }
        if !(self.wage > 0.0) || !(self.price > 0.0) {
            return fail(format!("wage and price must be > 0, got {} and {}", self.wage, self.price));
        }
        if !(self.replacement_low >= 1.0) || !(self.replacement_high >= self.replacement_low) {
            return fail(format!(
                "replacement range must satisfy 1 <= low <= high, got [{}, {}]",
                self.replacement_low, self.replacement_high
            ));
        }
        if self.iterations == 0 {
            return fail("iterations must be positive".into());
        }
        if self.rounding == Rounding::PerUnit {
            rounding::check_unit_margin(self.margin)?;
        }
        Ok(())
    }
}
