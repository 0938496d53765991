//! Line-oriented run configuration and experiment presets.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use firmgrowth_core::analytics::SizeBinning;
use firmgrowth_core::baselines::NoiseKind;
use firmgrowth_core::{Allocation, BaselineConfig, Metric, ModelConfig, Rounding, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preset {
    ScenarioI,
    ScenarioII,
    Additive,
    Multiplicative,
    ScaledBeta,
    MarsiliSequential,
    #[default]
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::ScenarioI,
        Preset::ScenarioII,
        Preset::Additive,
        Preset::Multiplicative,
        Preset::ScaledBeta,
        Preset::MarsiliSequential,
        Preset::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::ScenarioI => "ScenarioI",
            Preset::ScenarioII => "ScenarioII",
            Preset::Additive => "Additive",
            Preset::Multiplicative => "Multiplicative",
            Preset::ScaledBeta => "ScaledBeta",
            Preset::MarsiliSequential => "MarsiliSequential",
            Preset::Custom => "Custom",
        }
    }

    fn family(self) -> Family {
        match self {
            Preset::ScenarioI | Preset::ScenarioII | Preset::Custom => Family::Model,
            Preset::Additive | Preset::Multiplicative | Preset::ScaledBeta => Family::Noise,
            Preset::MarsiliSequential => Family::Sequential,
        }
    }

    /// Whether `key` means anything for this preset.
    fn accepts(self, key: &str) -> bool {
        if COMMON_KEYS.contains(&key) {
            return true;
        }
        match (self.family(), key) {
            (Family::Model, "scenario") => self == Preset::Custom,
            (Family::Model, "metric") => self != Preset::ScenarioI,
            (Family::Model, k) => MODEL_KEYS.contains(&k),
            (Family::Noise, "sigma") => true,
            (Family::Noise, "beta") => self == Preset::ScaledBeta,
            (Family::Sequential, "moves_per_iteration") => true,
            (Family::Noise | Family::Sequential, k) => BASELINE_KEYS.contains(&k),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let wanted: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(&wanted))
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.as_str()).collect();
                format!("unknown preset `{s}`, expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Model,
    Noise,
    Sequential,
}

const COMMON_KEYS: &[&str] =
    &["preset", "output_dir", "seeds", "snapshot_times", "iterations", "warmup", "min_size", "bins_per_decade"];
const MODEL_KEYS: &[&str] = &[
    "n_firms",
    "n_workers",
    "margin",
    "wage",
    "price",
    "rounding",
    "allocation",
    "replacement_low",
    "replacement_high",
    "scenario",
    "metric",
];
const BASELINE_KEYS: &[&str] =
    &["n_units", "n_workers", "sigma", "beta", "replacement_mean", "moves_per_iteration"];

/// Every key a configuration file or flag may set.
pub fn known_keys() -> Vec<&'static str> {
    let mut keys: Vec<_> = COMMON_KEYS.iter().chain(MODEL_KEYS).chain(BASELINE_KEYS).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys
}

/// Where a setting came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Line(usize),
    Flag,
    Default,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Line(n) => write!(f, "line {n}"),
            Source::Flag => f.write_str("command line"),
            Source::Default => f.write_str("defaults"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{origin}: `{key}`: {message}")]
pub struct ConfigError {
    pub origin: Source,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(source: Source, key: &str, message: impl Into<String>) -> Self {
        Self { origin: source, key: key.to_string(), message: message.into() }
    }
}

/// A parsed run request: preset, raw overrides and run plumbing.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub preset: Preset,
    pub overrides: BTreeMap<String, String>,
    pub output_dir: PathBuf,
    pub snapshot_times: Option<Vec<u64>>,
    pub seeds: Vec<u64>,
    sources: BTreeMap<String, Source>,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            preset: Preset::default(),
            overrides: BTreeMap::new(),
            output_dir: PathBuf::from("out"),
            snapshot_times: None,
            seeds: vec![1],
            sources: BTreeMap::new(),
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<RunSpec, ConfigError> {
    let mut spec = RunSpec::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let source = Source::Line(i + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::new(source.clone(), line, "expected `key = value`"))?;
        let key = key.trim();
        if spec.sources.contains_key(key) {
            return Err(ConfigError::new(source, key, "set more than once"));
        }
        spec.set(key, value.trim(), source)?;
    }
    spec.resolve()?;
    Ok(spec)
}

impl RunSpec {
    /// Applies one setting. Later calls override earlier ones.
    pub fn set(&mut self, key: &str, value: &str, source: Source) -> Result<(), ConfigError> {
        let err = |msg: String| ConfigError::new(source.clone(), key, msg);
        match key {
            "preset" => self.preset = value.parse().map_err(err)?,
            "output_dir" => {
                if value.is_empty() {
                    return Err(err("empty path".into()));
                }
                self.output_dir = PathBuf::from(value);
            }
            "seeds" => self.seeds = parse_list(value).map_err(err)?,
            "snapshot_times" => self.snapshot_times = Some(parse_list(value).map_err(err)?),
            _ if known_keys().contains(&key) => {
                check_value(key, value).map_err(err)?;
                self.overrides.insert(key.to_string(), value.to_string());
            }
            _ => return Err(err("unknown key".into())),
        }
        self.sources.insert(key.to_string(), source);
        Ok(())
    }

    fn source_of(&self, key: &str) -> Source {
        self.sources.get(key).cloned().unwrap_or(Source::Default)
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::new(self.source_of(key), key, message)
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> T {
        self.overrides.get(key).and_then(|v| v.parse().ok()).unwrap_or(default)
    }

    /// Fills preset defaults, applies overrides and checks every invariant.
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        for key in self.overrides.keys() {
            if !self.preset.accepts(key) {
                return Err(self.error(key, format!("not used by preset {}", self.preset)));
            }
        }
        if self.seeds.is_empty() {
            return Err(self.error("seeds", "at least one seed is required"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(self.error("seeds", "seeds must be distinct"));
        }

        let experiment = match self.preset.family() {
            Family::Model => Experiment::Model(self.model_config()?),
            Family::Noise => Experiment::Noise(self.noise_kind(), self.baseline_config()?),
            Family::Sequential => {
                let config = self.baseline_config()?;
                let default_moves = (config.n_workers / 20).max(1);
                let moves = self.get("moves_per_iteration", default_moves);
                if moves == 0 || moves > config.n_workers {
                    return Err(self.error(
                        "moves_per_iteration",
                        format!("must be in 1..={}, got {moves}", config.n_workers),
                    ));
                }
                Experiment::Sequential { config, moves_per_iteration: moves }
            }
        };
        let iterations = experiment.iterations();

        let snapshot_times = self.snapshot_times.clone().unwrap_or_else(|| vec![iterations]);
        if snapshot_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(self.error("snapshot_times", "must be strictly ascending"));
        }
        if let Some(&last) = snapshot_times.last() {
            if last > iterations {
                return Err(self.error("snapshot_times", format!("{last} is past the last iteration {iterations}")));
            }
        }

        let warmup = self.get("warmup", iterations / 10);
        if warmup >= iterations {
            return Err(self.error("warmup", format!("must be below iterations ({iterations}), got {warmup}")));
        }
        let binning = SizeBinning {
            bins_per_decade: self.get("bins_per_decade", SizeBinning::default().bins_per_decade),
            min_size: self.get("min_size", SizeBinning::default().min_size),
        };
        if binning.bins_per_decade == 0 {
            return Err(self.error("bins_per_decade", "must be positive"));
        }
        if !(binning.min_size > 0.0) {
            return Err(self.error("min_size", "must be positive"));
        }
        let metric = match self.overrides.get("metric").map(String::as_str) {
            None | Some("employees") => Metric::Employees,
            Some(_) => Metric::Sales,
        };
        if let Experiment::Model(cfg) = &experiment {
            if metric == Metric::Sales && cfg.scenario != Scenario::WorkersOnlyConsume {
                return Err(self.error("metric", "sales growth exists only when workers alone consume"));
            }
        }

        Ok(Resolved {
            preset: self.preset,
            experiment,
            output_dir: self.output_dir.clone(),
            snapshot_times,
            seeds: self.seeds.clone(),
            warmup,
            binning,
            metric,
        })
    }

    fn model_config(&self) -> Result<ModelConfig, ConfigError> {
        let base = match self.preset {
            Preset::ScenarioI => ModelConfig {
                n_firms: 10_000,
                n_workers: 1_000_000,
                rounding: Rounding::PerUnit,
                scenario: Scenario::FirmsConsume,
                iterations: 3000,
                ..ModelConfig::default()
            },
            Preset::ScenarioII => ModelConfig {
                n_firms: 2000,
                n_workers: 90_000,
                scenario: Scenario::WorkersOnlyConsume,
                iterations: 5000,
                ..ModelConfig::default()
            },
            _ => ModelConfig::default(),
        };
        let cfg = ModelConfig {
            n_firms: self.get("n_firms", base.n_firms),
            n_workers: self.get("n_workers", base.n_workers),
            margin: self.get("margin", base.margin),
            wage: self.get("wage", base.wage),
            price: self.get("price", base.price),
            scenario: match self.overrides.get("scenario").map(String::as_str) {
                Some("ii") => Scenario::WorkersOnlyConsume,
                Some(_) => Scenario::FirmsConsume,
                None => base.scenario,
            },
            rounding: match self.overrides.get("rounding").map(String::as_str) {
                Some("per_unit") => Rounding::PerUnit,
                Some(_) => Rounding::Probabilistic,
                None => base.rounding,
            },
            allocation: match self.overrides.get("allocation").map(String::as_str) {
                Some("binomial") => Allocation::IndependentBinomial,
                Some(_) => Allocation::ExactMatching,
                None => base.allocation,
            },
            replacement_low: self.get("replacement_low", base.replacement_low),
            replacement_high: self.get("replacement_high", base.replacement_high),
            iterations: self.get("iterations", base.iterations),
            ..base
        };
        cfg.validate().map_err(|e| self.blame(e.to_string(), MODEL_KEYS))?;
        Ok(cfg)
    }

    fn noise_kind(&self) -> NoiseKind {
        match self.preset {
            Preset::Additive => NoiseKind::Additive,
            Preset::ScaledBeta => NoiseKind::ScaledBeta,
            _ => NoiseKind::Multiplicative,
        }
    }

    fn baseline_config(&self) -> Result<BaselineConfig, ConfigError> {
        let base = match self.preset {
            Preset::Additive => BaselineConfig {
                n_units: 1000,
                n_workers: 100_000,
                sigma: 1.0,
                iterations: 2000,
                ..BaselineConfig::default()
            },
            Preset::Multiplicative => BaselineConfig {
                n_units: 10_000,
                n_workers: 500_000,
                sigma: 0.2,
                iterations: 4000,
                ..BaselineConfig::default()
            },
            Preset::ScaledBeta => BaselineConfig {
                n_units: 10_000,
                n_workers: 1_000_000,
                // sqrt(mu) / (1 + mu) at mu = 0.1, the model's own noise amplitude
                sigma: 0.1f64.sqrt() / 1.1,
                beta: 0.25,
                iterations: 3000,
                ..BaselineConfig::default()
            },
            _ => BaselineConfig { n_units: 1000, n_workers: 100_000, iterations: 1000, ..BaselineConfig::default() },
        };
        let cfg = BaselineConfig {
            n_units: self.get("n_units", base.n_units),
            n_workers: self.get("n_workers", base.n_workers),
            sigma: self.get("sigma", base.sigma),
            beta: self.get("beta", base.beta),
            replacement_mean: self.get("replacement_mean", base.replacement_mean),
            iterations: self.get("iterations", base.iterations),
            ..base
        };
        cfg.validate().map_err(|e| self.blame(e.to_string(), BASELINE_KEYS))?;
        if self.preset == Preset::ScaledBeta && !(0.0..=0.5).contains(&cfg.beta) {
            return Err(self.error("beta", format!("size-scaled noise needs beta in [0, 0.5], got {}", cfg.beta)));
        }
        Ok(cfg)
    }

    /// Pins a validation failure on the key it mentions, if any.
    fn blame(&self, message: String, keys: &[&str]) -> ConfigError {
        let key = keys
            .iter()
            .chain(["iterations"].iter())
            .filter(|k| self.overrides.contains_key(**k))
            .find(|k| message.contains(**k))
            .or_else(|| keys.iter().find(|k| message.contains(**k)))
            .copied()
            .unwrap_or("config");
        self.error(key, message)
    }
}

fn parse_list(value: &str) -> Result<Vec<u64>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| format!("`{s}` is not a non-negative integer")))
        .collect()
}

fn check_value(key: &str, value: &str) -> Result<(), String> {
    let one_of = |options: &[&str]| {
        if options.contains(&value) {
            Ok(())
        } else {
            Err(format!("expected one of {}, got `{value}`", options.join(", ")))
        }
    };
    match key {
        "rounding" => one_of(&["probabilistic", "per_unit"]),
        "allocation" => one_of(&["exact", "binomial"]),
        "scenario" => one_of(&["i", "ii"]),
        "metric" => one_of(&["employees", "sales"]),
        "n_firms" | "n_units" | "bins_per_decade" => {
            value.parse::<usize>().map(drop).map_err(|_| format!("`{value}` is not a non-negative integer"))
        }
        "n_workers" | "iterations" | "warmup" | "moves_per_iteration" => {
            value.parse::<u64>().map(drop).map_err(|_| format!("`{value}` is not a non-negative integer"))
        }
        _ => match value.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(()),
            _ => Err(format!("`{value}` is not a finite number")),
        },
    }
}

/// What to simulate, with preset defaults and overrides applied.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Model(ModelConfig),
    Noise(NoiseKind, BaselineConfig),
    Sequential { config: BaselineConfig, moves_per_iteration: u64 },
}

impl Experiment {
    pub fn iterations(&self) -> u64 {
        match self {
            Experiment::Model(c) => c.iterations,
            Experiment::Noise(_, c) | Experiment::Sequential { config: c, .. } => c.iterations,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out {
            Experiment::Model(c) => c.seed = seed,
            Experiment::Noise(_, c) | Experiment::Sequential { config: c, .. } => c.seed = seed,
        }
        out
    }

    /// Resolved parameters as sorted `(key, value)` pairs, seed excluded.
    pub fn settings(&self) -> Vec<(&'static str, String)> {
        let mut out = match self {
            Experiment::Model(c) => vec![
                ("n_firms", c.n_firms.to_string()),
                ("n_workers", c.n_workers.to_string()),
                ("margin", c.margin.to_string()),
                ("wage", c.wage.to_string()),
                ("price", c.price.to_string()),
                ("scenario", format!("{:?}", c.scenario)),
                ("rounding", format!("{:?}", c.rounding)),
                ("allocation", format!("{:?}", c.allocation)),
                ("replacement_low", c.replacement_low.to_string()),
                ("replacement_high", c.replacement_high.to_string()),
                ("iterations", c.iterations.to_string()),
            ],
            Experiment::Noise(kind, c) => vec![
                ("noise", format!("{kind:?}")),
                ("n_units", c.n_units.to_string()),
                ("n_workers", c.n_workers.to_string()),
                ("sigma", c.sigma.to_string()),
                ("beta", c.beta.to_string()),
                ("replacement_mean", c.replacement_mean.to_string()),
                ("iterations", c.iterations.to_string()),
            ],
            Experiment::Sequential { config: c, moves_per_iteration } => vec![
                ("n_units", c.n_units.to_string()),
                ("n_workers", c.n_workers.to_string()),
                ("replacement_mean", c.replacement_mean.to_string()),
                ("moves_per_iteration", moves_per_iteration.to_string()),
                ("iterations", c.iterations.to_string()),
            ],
        };
        out.sort_unstable();
        out
    }
}

/// A fully checked run.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub preset: Preset,
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    pub snapshot_times: Vec<u64>,
    pub seeds: Vec<u64>,
    /// Growth records are collected from this iteration on.
    pub warmup: u64,
    pub binning: SizeBinning,
    pub metric: Metric,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let spec = parse_config("").unwrap();
        assert_eq!(spec.preset, Preset::Custom);
        assert_eq!(spec.seeds, vec![1]);
        let r = spec.resolve().unwrap();
        let Experiment::Model(cfg) = r.experiment else { panic!("custom runs the model") };
        assert_eq!(cfg.margin, 0.1);
        assert_eq!((cfg.wage, cfg.price), (1.0, 1.0));
        assert_eq!((cfg.replacement_low, cfg.replacement_high), (1.0, 2.0));
        assert_eq!(cfg.allocation, Allocation::ExactMatching);
        assert_eq!(cfg.rounding, Rounding::Probabilistic);
        assert_eq!(r.snapshot_times, vec![cfg.iterations]);
    }

    #[test]
    fn margin_is_read() {
        let r = parse_config("margin = 0.05\n").unwrap().resolve().unwrap();
        let Experiment::Model(cfg) = r.experiment else { panic!() };
        assert_eq!(cfg.margin, 0.05);
    }

    #[test]
    fn negative_margin_names_line_and_key() {
        let err = parse_config("# comment\n\nmargin = -2").unwrap_err();
        assert_eq!(err.origin, Source::Line(3));
        assert_eq!(err.key, "margin");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = parse_config("seeds = 1\nmargn = 0.1").unwrap_err();
        assert_eq!((&err.origin, err.key.as_str()), (&Source::Line(2), "margn"));
        assert!(err.to_string().contains("unknown key"));
    }

    #[test]
    fn unparsable_value_is_rejected() {
        let err = parse_config("iterations = lots").unwrap_err();
        assert_eq!(err.key, "iterations");
        let err = parse_config("rounding = sometimes").unwrap_err();
        assert_eq!(err.key, "rounding");
        let err = parse_config("no equals sign").unwrap_err();
        assert_eq!(err.origin, Source::Line(1));
    }

    #[test]
    fn preset_mismatch_is_rejected() {
        let err = parse_config("preset = ScenarioI\nbeta = 0.3").unwrap_err();
        assert_eq!(err.key, "beta");
        assert!(err.message.contains("ScenarioI"));
        assert!(parse_config("preset = Multiplicative\nmargin = 0.1").is_err());
        assert!(parse_config("preset = ScenarioII\nscenario = i").is_err());
        assert!(parse_config("preset = ScaledBeta\nbeta = 0.3").is_ok());
    }

    #[test]
    fn comments_and_whitespace_are_ignored() {
        let spec = parse_config("  preset = scenario_ii   # the demand-limited case\nseeds = 1, 2,3\n").unwrap();
        assert_eq!(spec.preset, Preset::ScenarioII);
        assert_eq!(spec.seeds, vec![1, 2, 3]);
    }

    #[test]
    fn snapshot_times_must_be_sorted_and_in_range() {
        assert!(parse_config("iterations = 10\nsnapshot_times = 5, 3").is_err());
        assert!(parse_config("iterations = 10\nsnapshot_times = 5, 11").is_err());
        assert!(parse_config("iterations = 10\nsnapshot_times = 0, 5, 10").is_ok());
    }

    #[test]
    fn at_least_one_seed() {
        let err = parse_config("seeds = ").unwrap_err();
        assert_eq!(err.key, "seeds");
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let err = parse_config("margin = 0.1\nmargin = 0.2").unwrap_err();
        assert_eq!(err.origin, Source::Line(2));
    }

    #[test]
    fn flags_override_file_values() {
        let mut spec = parse_config("margin = 0.05").unwrap();
        spec.set("margin", "0.2", Source::Flag).unwrap();
        let Experiment::Model(cfg) = spec.resolve().unwrap().experiment else { panic!() };
        assert_eq!(cfg.margin, 0.2);
    }

    #[test]
    fn presets_pin_paper_sizes() {
        let resolve = |p: &str| parse_config(&format!("preset = {p}")).unwrap().resolve().unwrap().experiment;
        let Experiment::Model(two) = resolve("ScenarioII") else { panic!() };
        assert_eq!((two.n_firms, two.n_workers, two.iterations), (2000, 90_000, 5000));
        assert_eq!(two.scenario, Scenario::WorkersOnlyConsume);
        let Experiment::Model(one) = resolve("ScenarioI") else { panic!() };
        assert_eq!((one.n_firms, one.n_workers, one.rounding), (10_000, 1_000_000, Rounding::PerUnit));
        let Experiment::Noise(NoiseKind::Multiplicative, m) = resolve("Multiplicative") else { panic!() };
        assert_eq!((m.sigma, m.iterations), (0.2, 4000));
        let Experiment::Noise(NoiseKind::ScaledBeta, s) = resolve("ScaledBeta") else { panic!() };
        assert_eq!((s.n_units, s.beta, s.iterations), (10_000, 0.25, 3000));
        let Experiment::Sequential { config, moves_per_iteration } = resolve("MarsiliSequential") else { panic!() };
        assert_eq!(moves_per_iteration, config.n_workers / 20);
    }

    #[test]
    fn sales_metric_needs_scenario_ii() {
        assert!(parse_config("metric = sales").is_err());
        assert!(parse_config("scenario = ii\nmetric = sales").is_ok());
        assert!(parse_config("preset = ScenarioI\nmetric = sales").is_err());
    }
}
