//! Growth-rate statistics, accumulated in a single streaming pass.

use std::collections::BTreeMap;

use super::fit::{FitMethod, FitResult};
use super::histogram::{BinSpec, Histogram};
use super::regression::ols;
use crate::error::{Error, Result};
use crate::growth::GrowthRecord;

/// Size bins with fewer records are dropped from the binned statistics.
pub const MIN_RECORDS_PER_BIN: u64 = 30;

/// `|g - 1|` window of the per-bin tent-slope fit.
pub const TENT_WINDOW: (f64, f64) = (0.02, 0.5);

/// Logarithmic size classes for growth statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeBinning {
    /// 1 for decades, 2 for half-decades.
    pub bins_per_decade: usize,
    /// Records whose initial size is below this are ignored.
    pub min_size: f64,
}

impl Default for SizeBinning {
    fn default() -> Self {
        Self { bins_per_decade: 1, min_size: 10.0 }
    }
}

/// Growth statistics of one size class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeBin {
    pub low: f64,
    pub high: f64,
    /// Sample standard deviation of g.
    pub sigma_g: f64,
    /// Slope of the log-density of g against |g - 1|; NaN when the class
    /// histogram has too few populated bins.
    pub tent_slope: f64,
    pub count: u64,
    /// Geometric mean of the initial sizes in the class.
    pub mean_size: f64,
}

#[derive(Debug, Clone)]
struct ClassAccumulator {
    count: u64,
    sum_dev: f64,
    sum_dev2: f64,
    sum_ln_size: f64,
    counts: Vec<u64>,
    underflow: u64,
    overflow: u64,
}

impl ClassAccumulator {
    fn new(n_bins: usize) -> Self {
        Self { count: 0, sum_dev: 0.0, sum_dev2: 0.0, sum_ln_size: 0.0, counts: vec![0; n_bins], underflow: 0, overflow: 0 }
    }

    fn push(&mut self, spec: &BinSpec, size: f64, g: f64) {
        self.count += 1;
        let dev = g - 1.0;
        self.sum_dev += dev;
        self.sum_dev2 += dev * dev;
        self.sum_ln_size += size.ln();
        match spec.locate(g) {
            Ok(i) => self.counts[i] += 1,
            Err(std::cmp::Ordering::Less) => self.underflow += 1,
            Err(_) => self.overflow += 1,
        }
    }

    fn std_dev(&self) -> f64 {
        let n = self.count as f64;
        let mean = self.sum_dev / n;
        ((self.sum_dev2 - n * mean * mean) / (n - 1.0)).max(0.0).sqrt()
    }

    fn histogram(&self, spec: BinSpec) -> Histogram {
        Histogram::from_counts(spec, &self.counts, self.underflow, self.overflow)
    }
}

/// Streaming accumulator for the aggregate growth histogram and the per-size
/// statistics. Memory is bounded by the number of bins, not by the number of
/// records.
#[derive(Debug, Clone)]
pub struct GrowthStats {
    spec: BinSpec,
    binning: SizeBinning,
    aggregate: ClassAccumulator,
    classes: BTreeMap<i64, ClassAccumulator>,
    filtered: u64,
}

impl GrowthStats {
    pub fn new(spec: BinSpec, binning: SizeBinning) -> Result<Self> {
        spec.validate()?;
        if binning.bins_per_decade == 0 {
            return Err(Error::InvalidInput("bins_per_decade must be positive".into()));
        }
        Ok(Self { spec, binning, aggregate: ClassAccumulator::new(spec.n_bins()), classes: BTreeMap::new(), filtered: 0 })
    }

    pub fn push(&mut self, record: &GrowthRecord) {
        let size = record.size_before;
        if !(size > 0.0) || size < self.binning.min_size {
            self.filtered += 1;
            return;
        }
        let g = record.growth_rate();
        self.aggregate.push(&self.spec, size, g);
        let b = self.binning.bins_per_decade as f64;
        let key = (size.log10() * b + 1e-9).floor() as i64;
        let n_bins = self.spec.n_bins();
        self.classes.entry(key).or_insert_with(|| ClassAccumulator::new(n_bins)).push(&self.spec, size, g);
    }

    pub fn extend<'a>(&mut self, records: impl IntoIterator<Item = &'a GrowthRecord>) {
        records.into_iter().for_each(|r| self.push(r));
    }

    /// Records that passed the size filter.
    pub fn count(&self) -> u64 {
        self.aggregate.count
    }

    pub fn filtered(&self) -> u64 {
        self.filtered
    }

    /// Normalized density of g over all retained records.
    pub fn histogram(&self) -> Result<Histogram> {
        if self.aggregate.count == 0 {
            return Err(Error::InsufficientData("no growth records left after the size filter".into()));
        }
        Ok(self.aggregate.histogram(self.spec))
    }

    /// Standard deviation of g over all retained records.
    pub fn sigma(&self) -> f64 {
        self.aggregate.std_dev()
    }

    /// Per-class statistics for every class with at least
    /// [`MIN_RECORDS_PER_BIN`] records, in ascending size order.
    pub fn size_bins(&self) -> Result<Vec<SizeBin>> {
        let b = self.binning.bins_per_decade as f64;
        let bins: Vec<SizeBin> = self
            .classes
            .iter()
            .filter(|(_, acc)| acc.count >= MIN_RECORDS_PER_BIN)
            .map(|(&k, acc)| SizeBin {
                low: 10f64.powf(k as f64 / b),
                high: 10f64.powf((k + 1) as f64 / b),
                sigma_g: acc.std_dev(),
                tent_slope: acc
                    .histogram(self.spec)
                    .tent_slope(TENT_WINDOW.0, TENT_WINDOW.1)
                    .map(|f| f.slope)
                    .unwrap_or(f64::NAN),
                count: acc.count,
                mean_size: (acc.sum_ln_size / acc.count as f64).exp(),
            })
            .collect();
        if bins.is_empty() {
            return Err(Error::InsufficientData(format!(
                "no size class holds {MIN_RECORDS_PER_BIN} records"
            )));
        }
        Ok(bins)
    }
}

/// Normalized histogram of g for records with `size_before >= min_size`.
pub fn growth_histogram(records: &[GrowthRecord], spec: BinSpec, min_size: f64) -> Result<Histogram> {
    let mut stats = GrowthStats::new(spec, SizeBinning { bins_per_decade: 1, min_size })?;
    stats.extend(records);
    stats.histogram()
}

/// Standard deviation and tent slope of g per logarithmic size class.
pub fn bin_by_size(records: &[GrowthRecord], binning: SizeBinning) -> Result<Vec<SizeBin>> {
    let mut stats = GrowthStats::new(BinSpec::GROWTH_DEFAULT, binning)?;
    stats.extend(records);
    stats.size_bins()
}

/// Scaling exponent `beta` of `sigma(n) ~ n^-beta` by least squares of
/// `ln sigma_g` on the log of each class's geometric-mean size.
pub fn fit_beta(bins: &[SizeBin]) -> Result<FitResult> {
    let usable: Vec<&SizeBin> = bins.iter().filter(|b| b.sigma_g > 0.0).collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!("beta fit needs 3 size classes, got {}", usable.len())));
    }
    let xs: Vec<f64> = usable.iter().map(|b| b.mean_size.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|b| b.sigma_g.ln()).collect();
    let fit = ols(&xs, &ys)?;
    Ok(FitResult {
        exponent: -fit.slope,
        std_error: fit.slope_std_error,
        fit_range: (usable[0].low, usable[usable.len() - 1].high),
        method: FitMethod::LogLogOLS,
        n_points: usable.len(),
    })
}
