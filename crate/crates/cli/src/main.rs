use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use firmgrowth_cli::analyze::{analyze, AnalyzeOptions};
use firmgrowth_cli::oracle::{write_density_table, write_pmf_table};
use firmgrowth_cli::{parse_config, run, CliError, RunSpec, Source};
use firmgrowth_core::analytics::{SizeBinning, TheoryParams};
use firmgrowth_core::Metric;

#[derive(Parser)]
#[command(name = "firmgrowth", version, about = "Agent-based firm growth simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a preset for every seed and write CSV outputs.
    Run(Box<RunArgs>),
    /// Re-run the analytics on an existing snapshots.csv.
    Analyze(AnalyzeArgs),
    /// Print reference tables.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

/// Every config key is also a flag; flags win over the file.
#[derive(Args)]
struct RunArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,
    /// Comma-separated iteration indices.
    #[arg(long)]
    snapshot_times: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    warmup: Option<String>,
    #[arg(long)]
    min_size: Option<String>,
    #[arg(long)]
    bins_per_decade: Option<String>,
    #[arg(long)]
    n_firms: Option<String>,
    #[arg(long)]
    n_workers: Option<String>,
    #[arg(long)]
    margin: Option<String>,
    #[arg(long)]
    wage: Option<String>,
    #[arg(long)]
    price: Option<String>,
    /// probabilistic | per_unit
    #[arg(long)]
    rounding: Option<String>,
    /// exact | binomial
    #[arg(long)]
    allocation: Option<String>,
    #[arg(long)]
    replacement_low: Option<String>,
    #[arg(long)]
    replacement_high: Option<String>,
    /// i | ii (Custom preset only)
    #[arg(long)]
    scenario: Option<String>,
    /// employees | sales
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    n_units: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    replacement_mean: Option<String>,
    #[arg(long)]
    moves_per_iteration: Option<String>,
}

impl RunArgs {
    fn flags(&self) -> Vec<(&'static str, &String)> {
        let all = [
            ("preset", &self.preset),
            ("output_dir", &self.output_dir),
            ("seeds", &self.seeds),
            ("snapshot_times", &self.snapshot_times),
            ("iterations", &self.iterations),
            ("warmup", &self.warmup),
            ("min_size", &self.min_size),
            ("bins_per_decade", &self.bins_per_decade),
            ("n_firms", &self.n_firms),
            ("n_workers", &self.n_workers),
            ("margin", &self.margin),
            ("wage", &self.wage),
            ("price", &self.price),
            ("rounding", &self.rounding),
            ("allocation", &self.allocation),
            ("replacement_low", &self.replacement_low),
            ("replacement_high", &self.replacement_high),
            ("scenario", &self.scenario),
            ("metric", &self.metric),
            ("n_units", &self.n_units),
            ("sigma", &self.sigma),
            ("beta", &self.beta),
            ("replacement_mean", &self.replacement_mean),
            ("moves_per_iteration", &self.moves_per_iteration),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// snapshots.csv written by `run`.
    snapshots: PathBuf,
    #[arg(long, default_value = "analysis")]
    out: PathBuf,
    /// Snapshot time to fit (default: latest).
    #[arg(long)]
    time: Option<u64>,
    #[arg(long, default_value_t = SizeBinning::default().min_size)]
    min_size: f64,
    #[arg(long, default_value_t = 1)]
    bins_per_decade: usize,
    #[arg(long)]
    sales: bool,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact next-size distribution of a firm under per-unit rounding.
    Pmf {
        #[arg(long)]
        size: u64,
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
    },
    /// Growth-rate density of a power-law mixture of Gaussians.
    Density {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        cutoff: f64,
        #[arg(long, default_value_t = 0.1 / 1.21)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        low: f64,
        #[arg(long, default_value_t = 2.0)]
        high: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Run(args) => {
            let mut spec = match &args.config {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                    parse_config(&text)?
                }
                None => RunSpec::default(),
            };
            for (key, value) in args.flags() {
                spec.set(key, value, Source::Flag)?;
            }
            let summary = run(&spec)?;
            for o in &summary.outcomes {
                match &o.tail {
                    Some(t) => writeln!(
                        out,
                        "seed {}: alpha {:.3} (ols) {:.3} (mle) over [{}, {}]",
                        o.seed, t.ols.exponent, t.mle.exponent, t.ols.fit_range.0, t.ols.fit_range.1
                    )?,
                    None => writeln!(out, "seed {}: too few sizes for a tail fit", o.seed)?,
                }
                if let Some(b) = &o.beta {
                    writeln!(out, "seed {}: beta {:.3} from {} size classes", o.seed, b.exponent, b.n_points)?;
                }
            }
            writeln!(out, "manifest {} {}", summary.manifest.display(), summary.manifest_hash)?;
        }
        Command::Analyze(args) => {
            let opts = AnalyzeOptions {
                time: args.time,
                binning: SizeBinning { bins_per_decade: args.bins_per_decade, min_size: args.min_size },
                metric: if args.sales { Metric::Sales } else { Metric::Employees },
            };
            let analysis = analyze(&args.snapshots, &args.out, opts)?;
            if let Some(t) = analysis.tail {
                writeln!(out, "alpha {:.3} (ols) {:.3} (mle)", t.ols.exponent, t.mle.exponent)?;
            }
            writeln!(out, "wrote {}", args.out.display())?;
        }
        Command::Oracle(OracleCommand::Pmf { size, margin }) => write_pmf_table(&mut out, size, margin)?,
        Command::Oracle(OracleCommand::Density { alpha, beta, cutoff, c, low, high, points }) => {
            let params = TheoryParams { alpha, beta, cutoff_n0: cutoff, c };
            write_density_table(&mut out, &params, low, high, points)?
        }
    }
    Ok(())
}
