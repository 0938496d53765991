//! Agent-based firm growth under competition for a scarce resource.
//!
//! Firms hire workers to produce goods at a fixed expected margin. Either
//! the workforce or the purchasing power of consumers is scarce, and the
//! scarce side is matched at random against all claims. The crate contains
//! the economy ([`model`]), reference noise processes ([`baselines`]), the
//! statistics used to read the results ([`analytics`]) and CSV import/export
//! ([`io`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod baselines;
mod error;
mod growth;
pub mod io;
pub mod model;
pub mod rng;
mod snapshot;

pub use error::{Error, Result};
pub use growth::{GrowthRecord, Metric};
pub use snapshot::{SizeSnapshot, SnapshotRow};

pub use analytics::{FitMethod, FitResult, Histogram, TheoryParams};
pub use baselines::BaselineConfig;
pub use model::{Allocation, Economy, FirmState, MarketProbabilities, ModelConfig, Rounding, Scenario};
