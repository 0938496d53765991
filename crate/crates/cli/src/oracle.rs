//! Reference tables: exact next-size pmf and the theoretical growth density.

use std::io::Write;

use firmgrowth_core::analytics::{job_count_pmf_oracle, theoretical_growth_density, TheoryParams};
use firmgrowth_core::io::fmt_g9;

use crate::CliError;

pub fn write_pmf_table<W: Write>(out: &mut W, size: u64, margin: f64) -> Result<(), CliError> {
    let pmf = job_count_pmf_oracle(size, margin)?;
    writeln!(out, "next_size,prob")?;
    for (k, p) in pmf.iter().enumerate() {
        writeln!(out, "{k},{}", fmt_g9(*p))?;
    }
    Ok(())
}

/// Density on `points` evenly spaced growth rates in `[low, high]`, skipping
/// `g = 1` where the density may be singular.
pub fn write_density_table<W: Write>(
    out: &mut W,
    params: &TheoryParams,
    low: f64,
    high: f64,
    points: usize,
) -> Result<(), CliError> {
    if points < 2 || !(high > low) {
        return Err(CliError::Input(format!("need at least 2 points on a non-empty range, got {points} on [{low}, {high}]")));
    }
    let step = (high - low) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| low + step * i as f64).filter(|g| (g - 1.0).abs() > 1e-12).collect();
    let density = theoretical_growth_density(params, &grid)?;
    writeln!(out, "g,density")?;
    for (g, d) in grid.iter().zip(density) {
        writeln!(out, "{},{}", fmt_g9(*g), fmt_g9(d))?;
    }
    Ok(())
}
