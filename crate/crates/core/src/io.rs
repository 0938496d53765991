//! Plain-text CSV formats shared by the simulator and the command line.
//!
//! Floating-point fields use nine significant digits in the style of C's
//! `%.9g`, so files are byte-identical across runs with the same seed.

use std::io::{BufRead, Write};

use crate::analytics::{FitResult, Histogram, SizeBin};
use crate::error::{Error, Result};
use crate::snapshot::SnapshotRow;

/// Formats `x` with nine significant digits, trimming trailing zeros.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("i/o error: {e}"))
}

pub const SNAPSHOT_HEADER: &str = "t,firm_id,size,output,sold";

pub fn write_snapshot_header<W: Write>(out: &mut W) -> Result<()> {
    writeln!(out, "{SNAPSHOT_HEADER}").map_err(io_err)
}

pub fn write_snapshot_rows<W: Write>(out: &mut W, time: u64, rows: &[SnapshotRow]) -> Result<()> {
    for r in rows {
        writeln!(out, "{},{},{},{},{}", time, r.firm_id, fmt_g9(r.size), fmt_g9(r.output), fmt_g9(r.sold))
            .map_err(io_err)?;
    }
    Ok(())
}

/// Reads a snapshot export back as `(t, row)` pairs.
pub fn read_snapshots<R: BufRead>(input: R) -> Result<Vec<(u64, SnapshotRow)>> {
    let mut lines = input.lines();
    let header = lines.next().transpose().map_err(io_err)?.unwrap_or_default();
    if header.trim() != SNAPSHOT_HEADER {
        return Err(Error::InvalidInput(format!("expected header `{SNAPSHOT_HEADER}`, got `{header}`")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::InvalidInput(format!("line {}: malformed snapshot row `{line}`", i + 2));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(bad());
        }
        let t = fields[0].parse().map_err(|_| bad())?;
        let firm_id = fields[1].parse().map_err(|_| bad())?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        rows.push((t, SnapshotRow { firm_id, size: num(fields[2])?, output: num(fields[3])?, sold: num(fields[4])? }));
    }
    Ok(rows)
}

pub fn write_ccdf<W: Write>(out: &mut W, points: &[(f64, f64)]) -> Result<()> {
    writeln!(out, "size,prob").map_err(io_err)?;
    for &(x, p) in points {
        writeln!(out, "{},{}", fmt_g9(x), fmt_g9(p)).map_err(io_err)?;
    }
    Ok(())
}

pub fn write_growth_histogram<W: Write>(out: &mut W, hist: &Histogram) -> Result<()> {
    writeln!(out, "bin_low,bin_high,density,log_density").map_err(io_err)?;
    for ((e, d), ld) in hist.bin_edges.windows(2).zip(&hist.densities).zip(hist.log_density()) {
        writeln!(out, "{},{},{},{}", fmt_g9(e[0]), fmt_g9(e[1]), fmt_g9(*d), fmt_g9(ld)).map_err(io_err)?;
    }
    Ok(())
}

pub fn write_binned_sigma<W: Write>(out: &mut W, bins: &[SizeBin]) -> Result<()> {
    writeln!(out, "bin_low,bin_high,sigma,tent_slope,count").map_err(io_err)?;
    for b in bins {
        writeln!(out, "{},{},{},{},{}", fmt_g9(b.low), fmt_g9(b.high), fmt_g9(b.sigma_g), fmt_g9(b.tent_slope), b.count)
            .map_err(io_err)?;
    }
    Ok(())
}

pub const FIT_HEADER: &str = "method,exponent,std_error,range_low,range_high,n_points";

pub fn write_fits<W: Write>(out: &mut W, fits: &[FitResult]) -> Result<()> {
    writeln!(out, "{FIT_HEADER}").map_err(io_err)?;
    for f in fits {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            f.method.as_str(),
            fmt_g9(f.exponent),
            fmt_g9(f.std_error),
            fmt_g9(f.fit_range.0),
            fmt_g9(f.fit_range.1),
            f.n_points
        )
        .map_err(io_err)?;
    }
    Ok(())
}
