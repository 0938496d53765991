use super::ccdf::ccdf;
use super::regression::ols;
use crate::error::{Error, Result};
use crate::snapshot::SizeSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Least squares on log-log axes.
    LogLogOLS,
    /// Maximum-likelihood (Hill) tail exponent.
    DiscreteMLE,
}

impl FitMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FitMethod::LogLogOLS => "LogLogOLS",
            FitMethod::DiscreteMLE => "DiscreteMLE",
        }
    }
}

/// Closed interval of sizes a fit uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRange {
    pub low: f64,
    pub high: f64,
}

impl FitRange {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low > 0.0) || !(low < high) {
            return Err(Error::InvalidInput(format!("fit range needs 0 < low < high, got [{low}, {high}]")));
        }
        Ok(Self { low, high })
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.low..=self.high).contains(&x)
    }
}

/// An estimated exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    pub std_error: f64,
    pub fit_range: (f64, f64),
    pub method: FitMethod,
    pub n_points: usize,
}

/// Both tail estimators on the same snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFits {
    pub ols: FitResult,
    pub mle: FitResult,
}

/// Firms excluded from the top of the default tail window.
pub const EXCLUDED_LARGEST: usize = 5;

/// Default tail window: from the size where the counter-cumulative
/// probability first drops to 10% up to the sixth-largest size, which leaves
/// out the five largest firms.
pub fn default_tail_range(snapshot: &SizeSnapshot) -> Result<FitRange> {
    let sizes = snapshot.sizes();
    if sizes.len() <= EXCLUDED_LARGEST + 3 {
        return Err(Error::InsufficientData(format!("{} sizes are too few for a tail fit", sizes.len())));
    }
    let high = sizes[EXCLUDED_LARGEST];
    let low = ccdf(snapshot)?
        .into_iter()
        .find(|&(_, p)| p <= 0.1)
        .map(|(x, _)| x)
        .unwrap_or(high);
    FitRange::new(low, high).map_err(|_| {
        Error::InsufficientData(format!("tail window [{low}, {high}] is empty"))
    })
}

/// Exponent `alpha` of `P(n >= x) ~ x^-alpha` by least squares over the
/// counter-cumulative points inside `range`.
pub fn fit_tail_ols(points: &[(f64, f64)], range: FitRange) -> Result<FitResult> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(x, p) in points.iter().filter(|(x, _)| range.contains(*x)) {
        if !(x > 0.0) || !(p > 0.0) {
            return Err(Error::InvalidInput(format!("non-positive point ({x}, {p}) in tail fit")));
        }
        xs.push(x.ln());
        ys.push(p.ln());
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!("{} points inside the tail window", xs.len())));
    }
    let fit = ols(&xs, &ys)?;
    Ok(FitResult {
        exponent: -fit.slope,
        std_error: fit.slope_std_error,
        fit_range: (range.low, range.high),
        method: FitMethod::LogLogOLS,
        n_points: xs.len(),
    })
}

/// Hill estimator `[mean ln(x / x_min)]^-1` over all sizes at or above `x_min`,
/// with standard error `alpha / sqrt(n_tail)`.
pub fn fit_tail_mle(sizes: &[f64], x_min: f64) -> Result<FitResult> {
    if !(x_min > 0.0) {
        return Err(Error::InvalidInput(format!("x_min must be positive, got {x_min}")));
    }
    if let Some(bad) = sizes.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::InvalidInput(format!("non-positive size {bad} in tail fit")));
    }
    let tail: Vec<f64> = sizes.iter().copied().filter(|&x| x >= x_min).collect();
    if tail.len() < 3 {
        return Err(Error::InsufficientData(format!("{} sizes in the tail", tail.len())));
    }
    let log_sum: f64 = tail.iter().map(|x| (x / x_min).ln()).sum();
    if log_sum <= 0.0 {
        return Err(Error::InsufficientData("all tail sizes equal x_min".into()));
    }
    let n = tail.len() as f64;
    let exponent = n / log_sum;
    let high = tail.iter().copied().fold(x_min, f64::max);
    Ok(FitResult {
        exponent,
        std_error: exponent / n.sqrt(),
        fit_range: (x_min, high),
        method: FitMethod::DiscreteMLE,
        n_points: tail.len(),
    })
}

/// Least-squares and maximum-likelihood tail exponents of a snapshot.
pub fn fit_power_law_tail(snapshot: &SizeSnapshot, range: FitRange) -> Result<TailFits> {
    let points = ccdf(snapshot)?;
    Ok(TailFits { ols: fit_tail_ols(&points, range)?, mle: fit_tail_mle(snapshot.sizes(), range.low)? })
}
