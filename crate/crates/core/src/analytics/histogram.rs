use super::regression::{ols, LinearFit};
use crate::error::{Error, Result};

/// Bin layout for a histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinSpec {
    Linear { bins: usize, low: f64, high: f64 },
    /// `bins_per_decade` equal-ratio bins per factor of ten, edges anchored at powers of ten.
    Logarithmic { bins_per_decade: usize, low: f64, high: f64 },
}

impl BinSpec {
    /// 101 linear bins on [0, 2].
    pub const GROWTH_DEFAULT: BinSpec = BinSpec::Linear { bins: 101, low: 0.0, high: 2.0 };

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            BinSpec::Linear { bins, low, high } => bins > 0 && low < high && low.is_finite() && high.is_finite(),
            BinSpec::Logarithmic { bins_per_decade, low, high } => {
                bins_per_decade > 0 && low > 0.0 && low < high && high.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid bin spec {self:?}")))
        }
    }

    pub fn edges(&self) -> Vec<f64> {
        match *self {
            BinSpec::Linear { bins, low, high } => {
                let width = (high - low) / bins as f64;
                (0..=bins).map(|i| if i == bins { high } else { low + i as f64 * width }).collect()
            }
            BinSpec::Logarithmic { bins_per_decade, low, high } => {
                let b = bins_per_decade as f64;
                let first = (low.log10() * b + 1e-9).floor() as i64;
                let last = (high.log10() * b - 1e-9).ceil() as i64;
                (first..=last).map(|k| 10f64.powf(k as f64 / b)).collect()
            }
        }
    }

    pub fn n_bins(&self) -> usize {
        self.edges().len() - 1
    }

    /// Bin holding `x`, or `Err(side)` for values outside the edges
    /// (`Less` below, `Greater` above). The top edge belongs to the last bin.
    pub fn locate(&self, x: f64) -> std::result::Result<usize, std::cmp::Ordering> {
        use std::cmp::Ordering;
        match *self {
            BinSpec::Linear { bins, low, high } => {
                if x < low {
                    return Err(Ordering::Less);
                }
                if x > high || x.is_nan() {
                    return Err(Ordering::Greater);
                }
                let i = ((x - low) / (high - low) * bins as f64).floor() as usize;
                Ok(i.min(bins - 1))
            }
            BinSpec::Logarithmic { .. } => {
                let edges = self.edges();
                if x < edges[0] {
                    return Err(Ordering::Less);
                }
                if x > *edges.last().expect("at least one bin") {
                    return Err(Ordering::Greater);
                }
                let i = edges.partition_point(|&e| e <= x);
                Ok((i.max(1) - 1).min(edges.len() - 2))
            }
        }
    }
}

/// A normalized density estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub bin_scheme: BinSpec,
    /// Values that fell inside the edges.
    pub count: u64,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn from_values(values: impl IntoIterator<Item = f64>, spec: BinSpec) -> Result<Self> {
        spec.validate()?;
        let mut counts = vec![0u64; spec.n_bins()];
        let (mut under, mut over) = (0, 0);
        for v in values {
            match spec.locate(v) {
                Ok(i) => counts[i] += 1,
                Err(std::cmp::Ordering::Less) => under += 1,
                Err(_) => over += 1,
            }
        }
        Ok(Self::from_counts(spec, &counts, under, over))
    }

    /// Normalizes raw counts so that `sum(density * width) == 1` over the
    /// in-range values.
    pub fn from_counts(spec: BinSpec, counts: &[u64], underflow: u64, overflow: u64) -> Self {
        let bin_edges = spec.edges();
        let count: u64 = counts.iter().sum();
        let densities = counts
            .iter()
            .zip(bin_edges.windows(2))
            .map(|(&c, e)| if count == 0 { 0.0 } else { c as f64 / (count as f64 * (e[1] - e[0])) })
            .collect();
        Self { bin_edges, densities, bin_scheme: spec, count, underflow, overflow }
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.bin_edges.windows(2).map(|e| e[1] - e[0])
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    /// `ln(density + 1 / (2 * count * width))`; the offset keeps empty bins finite.
    pub fn log_density(&self) -> Vec<f64> {
        let n = self.count.max(1) as f64;
        self.densities.iter().zip(self.widths()).map(|(d, w)| (d + 1.0 / (2.0 * n * w)).ln()).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.densities.iter().zip(self.widths()).map(|(d, w)| d * w).sum()
    }

    /// Slope of log-density against `ln|g - 1|` for bin centers with
    /// `|g - 1|` in `[lo, hi]`, both flanks pooled. A `1/|g - 1|` density gives -1.
    pub fn central_loglog_slope(&self, lo: f64, hi: f64) -> Result<LinearFit> {
        self.flank_fit(lo, hi, f64::ln)
    }

    /// Slope of log-density against `|g - 1|`, the tent slope.
    pub fn tent_slope(&self, lo: f64, hi: f64) -> Result<LinearFit> {
        self.flank_fit(lo, hi, |d| d)
    }

    fn flank_fit(&self, lo: f64, hi: f64, transform: impl Fn(f64) -> f64) -> Result<LinearFit> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for ((c, ld), d) in self.centers().into_iter().zip(self.log_density()).zip(&self.densities) {
            let dist = (c - 1.0).abs();
            if (lo..=hi).contains(&dist) && *d > 0.0 {
                xs.push(transform(dist));
                ys.push(ld);
            }
        }
        if xs.len() < 3 {
            return Err(Error::InsufficientData(format!("{} populated bins in the fit window", xs.len())));
        }
        ols(&xs, &ys)
    }
}
