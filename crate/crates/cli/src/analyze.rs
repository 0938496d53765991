//! Re-runs the analytics on an existing snapshot export.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

use firmgrowth_core::analytics::{BinSpec, GrowthStats, SizeBinning};
use firmgrowth_core::io::read_snapshots;
use firmgrowth_core::{Metric, SizeSnapshot, SnapshotRow};

use crate::run::{analyze_snapshot, records_between, write_analysis, Analysis};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    /// Snapshot time to fit; the latest when `None`.
    pub time: Option<u64>,
    pub binning: SizeBinning,
    pub metric: Metric,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self { time: None, binning: SizeBinning::default(), metric: Metric::Employees }
    }
}

/// Reads `snapshots`, fits the chosen time and writes the analytics CSVs
/// into `out_dir`. Growth statistics use every pair of snapshots taken one
/// iteration apart; without such pairs the growth files stay empty.
pub fn analyze(snapshots: &Path, out_dir: &Path, opts: AnalyzeOptions) -> Result<Analysis, CliError> {
    let file = File::open(snapshots).map_err(|e| CliError::io(snapshots, e))?;
    let rows = read_snapshots(BufReader::new(file))?;
    let mut by_time: BTreeMap<u64, Vec<SnapshotRow>> = BTreeMap::new();
    for (t, row) in rows {
        by_time.entry(t).or_default().push(row);
    }
    let time = match opts.time {
        Some(t) if by_time.contains_key(&t) => t,
        Some(t) => return Err(CliError::Input(format!("no snapshot at time {t} in {}", snapshots.display()))),
        None => *by_time
            .keys()
            .next_back()
            .ok_or_else(|| CliError::Input(format!("{} holds no snapshots", snapshots.display())))?,
    };

    let mut stats = GrowthStats::new(BinSpec::GROWTH_DEFAULT, opts.binning)?;
    for (t, before) in &by_time {
        if let Some(after) = by_time.get(&(t + 1)) {
            stats.extend(&records_between(before, after, opts.metric));
        }
    }
    let snapshot = SizeSnapshot::new(time, by_time[&time].iter().map(|r| r.size));
    let analysis = analyze_snapshot(&snapshot, &stats);
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    write_analysis(out_dir, &analysis)?;
    Ok(analysis)
}
