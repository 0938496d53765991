//! Seeded simulation runs and their CSV outputs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use firmgrowth_core::analytics::{
    ccdf, default_tail_range, fit_beta, fit_power_law_tail, BinSpec, GrowthStats, SizeBin, TailFits,
};
use firmgrowth_core::baselines::{NoiseProcess, SequentialCities};
use firmgrowth_core::io::{
    write_binned_sigma, write_ccdf, write_fits, write_growth_histogram, write_snapshot_header,
    write_snapshot_rows,
};
use firmgrowth_core::rng::{substream, Purpose};
use firmgrowth_core::{Economy, FitResult, GrowthRecord, Histogram, Metric, SizeSnapshot, SnapshotRow};

use crate::config::{Experiment, Resolved, RunSpec};
use crate::manifest::{blob_hash, write_manifest};
use crate::CliError;

pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const CCDF_FILE: &str = "ccdf.csv";
pub const FIT_FILE: &str = "fit.csv";
pub const BETA_FILE: &str = "beta_fit.csv";
pub const GROWTH_HIST_FILE: &str = "growth_hist.csv";
pub const BINNED_SIGMA_FILE: &str = "binned_sigma.csv";
pub const MANIFEST_FILE: &str = "manifest.csv";

/// Results of one seed.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub dir: PathBuf,
    /// Sizes after the last iteration.
    pub snapshot: SizeSnapshot,
    /// `None` when the final sizes cannot support a tail fit.
    pub tail: Option<TailFits>,
    /// Aggregate growth-rate histogram over all collected records.
    pub histogram: Option<Histogram>,
    pub size_bins: Vec<SizeBin>,
    pub beta: Option<FitResult>,
    /// Output files relative to the run directory, with their blob hashes.
    pub files: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub resolved: Resolved,
    pub outcomes: Vec<SeedOutcome>,
    pub manifest: PathBuf,
    pub manifest_hash: String,
}

enum Simulation {
    Model(Economy),
    Noise(NoiseProcess),
    Sequential { cities: SequentialCities, moves: u64, seed: u64 },
}

impl Simulation {
    fn new(experiment: &Experiment) -> firmgrowth_core::Result<Self> {
        Ok(match experiment {
            Experiment::Model(cfg) => Simulation::Model(Economy::new(cfg.clone())?),
            Experiment::Noise(kind, cfg) => Simulation::Noise(NoiseProcess::new(*kind, cfg.clone())?),
            Experiment::Sequential { config, moves_per_iteration } => {
                config.validate()?;
                Simulation::Sequential {
                    cities: SequentialCities::even(config.n_units, config.n_workers, config.replacement_mean)?,
                    moves: *moves_per_iteration,
                    seed: config.seed,
                }
            }
        })
    }

    fn step(&mut self) -> firmgrowth_core::Result<Vec<GrowthRecord>> {
        match self {
            Simulation::Model(e) => e.step().map(|r| r.records),
            Simulation::Noise(p) => p.step(),
            Simulation::Sequential { cities, moves, seed } => {
                let mut rng = substream(*seed, cities.time(), Purpose::Moves);
                cities.run_batch(*moves, &mut rng)
            }
        }
    }

    fn rows(&self) -> Vec<SnapshotRow> {
        match self {
            Simulation::Model(e) => e.rows(),
            Simulation::Noise(p) => p.rows(),
            Simulation::Sequential { cities, .. } => cities.rows(),
        }
    }

    fn snapshot(&self) -> SizeSnapshot {
        match self {
            Simulation::Model(e) => e.snapshot(),
            Simulation::Noise(p) => p.snapshot(),
            Simulation::Sequential { cities, .. } => cities.snapshot(),
        }
    }
}

/// Runs every seed of `spec` and writes the outputs and the manifest.
pub fn run(spec: &RunSpec) -> Result<RunSummary, CliError> {
    let resolved = spec.resolve()?;
    let root = &resolved.output_dir;
    fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;

    let outcomes: Vec<SeedOutcome> =
        resolved.seeds.par_iter().map(|&seed| run_seed(&resolved, seed)).collect::<Result<_, _>>()?;

    let manifest = root.join(MANIFEST_FILE);
    let bytes = write_manifest(&resolved, &outcomes);
    fs::write(&manifest, &bytes).map_err(|e| CliError::io(&manifest, e))?;
    Ok(RunSummary { resolved, outcomes, manifest, manifest_hash: blob_hash(&bytes) })
}

pub fn seed_dir(root: &Path, seed: u64) -> PathBuf {
    root.join(format!("seed-{seed}"))
}

fn run_seed(resolved: &Resolved, seed: u64) -> Result<SeedOutcome, CliError> {
    let dir = seed_dir(&resolved.output_dir, seed);
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let experiment = resolved.experiment.with_seed(seed);
    let mut sim = Simulation::new(&experiment)?;

    let snap_path = dir.join(SNAPSHOTS_FILE);
    let mut snaps = BufWriter::new(File::create(&snap_path).map_err(|e| CliError::io(&snap_path, e))?);
    write_snapshot_header(&mut snaps)?;
    let mut times = resolved.snapshot_times.iter().copied().peekable();
    if times.next_if_eq(&0).is_some() {
        write_snapshot_rows(&mut snaps, 0, &sim.rows())?;
    }

    let mut stats = GrowthStats::new(BinSpec::GROWTH_DEFAULT, resolved.binning)?;
    for t in 0..experiment.iterations() {
        let records = sim.step()?;
        if t >= resolved.warmup {
            stats.extend(records.iter().filter(|r| r.metric == resolved.metric));
        }
        if times.next_if_eq(&(t + 1)).is_some() {
            write_snapshot_rows(&mut snaps, t + 1, &sim.rows())?;
        }
    }
    snaps.flush().map_err(|e| CliError::io(&snap_path, e))?;
    drop(snaps);

    let snapshot = sim.snapshot();
    let analysis = analyze_snapshot(&snapshot, &stats);
    let mut written = write_analysis(&dir, &analysis)?;
    written.insert(0, SNAPSHOTS_FILE.to_string());

    let files = written
        .into_iter()
        .map(|name| {
            let path = dir.join(&name);
            let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            Ok((format!("seed-{seed}/{name}"), blob_hash(&bytes)))
        })
        .collect::<Result<_, CliError>>()?;

    Ok(SeedOutcome {
        seed,
        dir,
        snapshot,
        tail: analysis.tail,
        histogram: analysis.histogram,
        size_bins: analysis.size_bins,
        beta: analysis.beta,
        files,
    })
}

/// Analytics of one final snapshot plus its growth statistics.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub ccdf: Vec<(f64, f64)>,
    pub tail: Option<TailFits>,
    pub histogram: Option<Histogram>,
    pub size_bins: Vec<SizeBin>,
    pub beta: Option<FitResult>,
}

/// Runs every estimator that the data supports; the rest come back empty.
pub fn analyze_snapshot(snapshot: &SizeSnapshot, stats: &GrowthStats) -> Analysis {
    let tail = default_tail_range(snapshot).and_then(|r| fit_power_law_tail(snapshot, r)).ok();
    let size_bins = stats.size_bins().unwrap_or_default();
    Analysis {
        ccdf: ccdf(snapshot).unwrap_or_default(),
        tail,
        histogram: stats.histogram().ok(),
        beta: fit_beta(&size_bins).ok(),
        size_bins,
    }
}

/// Writes the analytics CSVs into `dir` and returns their file names.
pub fn write_analysis(dir: &Path, analysis: &Analysis) -> Result<Vec<String>, CliError> {
    let mut names = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(&mut BufWriter<File>) -> firmgrowth_core::Result<()>| {
        let path = dir.join(name);
        let mut out = BufWriter::new(File::create(&path).map_err(|e| CliError::io(&path, e))?);
        f(&mut out)?;
        out.flush().map_err(|e| CliError::io(&path, e))?;
        names.push(name.to_string());
        Ok::<_, CliError>(())
    };
    emit(CCDF_FILE, &|out| write_ccdf(out, &analysis.ccdf))?;
    let fits: Vec<FitResult> = analysis.tail.iter().flat_map(|t| [t.ols, t.mle]).collect();
    emit(FIT_FILE, &|out| write_fits(out, &fits))?;
    if let Some(hist) = &analysis.histogram {
        emit(GROWTH_HIST_FILE, &|out| write_growth_histogram(out, hist))?;
    }
    emit(BINNED_SIGMA_FILE, &|out| write_binned_sigma(out, &analysis.size_bins))?;
    let beta: Vec<FitResult> = analysis.beta.iter().copied().collect();
    emit(BETA_FILE, &|out| write_fits(out, &beta))?;
    Ok(names)
}

/// Growth records between consecutive snapshot times, matched by firm id.
pub fn records_between(before: &[SnapshotRow], after: &[SnapshotRow], metric: Metric) -> Vec<GrowthRecord> {
    let value = |r: &SnapshotRow| match metric {
        Metric::Employees => r.size,
        Metric::Sales => r.sold,
    };
    let mut after_by_id: Vec<&SnapshotRow> = after.iter().collect();
    after_by_id.sort_by_key(|r| r.firm_id);
    before
        .iter()
        .filter(|b| value(b) > 0.0)
        .filter_map(|b| {
            let i = after_by_id.binary_search_by_key(&b.firm_id, |r| r.firm_id).ok()?;
            Some(GrowthRecord { size_before: value(b), size_after: value(after_by_id[i]), metric })
        })
        .collect()
}
