//! Statistics over size snapshots and growth records.

mod ccdf;
mod fit;
mod growth;
mod histogram;
pub mod moments;
mod oracle;
mod regression;
mod theory;

pub use ccdf::ccdf;
pub use fit::{default_tail_range, fit_power_law_tail, fit_tail_mle, fit_tail_ols, FitMethod, FitRange, FitResult, TailFits};
pub use growth::{bin_by_size, fit_beta, growth_histogram, GrowthStats, SizeBin, SizeBinning, MIN_RECORDS_PER_BIN, TENT_WINDOW};
pub use histogram::{BinSpec, Histogram};
pub use oracle::{job_count_pmf_oracle, ORACLE_MAX_SIZE};
pub use regression::{ols, LinearFit};
pub use theory::{growth_density_unnormalized, theoretical_growth_density, TheoryParams};
