//! Aggregate growth-rate density of a power-law population whose members have
//! Gaussian growth rates with size-dependent width `sqrt(c) * n^-beta`.
//!
//! The density is the size mixture
//! `G(g) = Int_{n0}^inf n^beta * n^(-alpha-1) * (2 pi c)^(-1/2) * exp(-n^(2 beta) (g-1)^2 / (2c)) dn`,
//! evaluated in `s = ln n` so the integrand is smooth on both ends.

use crate::error::{Error, Result};

/// Parameters of the mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    /// Tail exponent of the size distribution, `rho(n) ~ n^(-alpha-1)`.
    pub alpha: f64,
    /// Scaling exponent of the growth-rate width.
    pub beta: f64,
    /// Lower integration cutoff; zero integrates from the origin.
    pub cutoff_n0: f64,
    pub c: f64,
}

impl TheoryParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) {
            return Err(Error::InvalidInput(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta <= 0.5) {
            return Err(Error::InvalidInput(format!("beta must lie in (0, 0.5], got {}", self.beta)));
        }
        if !(self.c > 0.0) {
            return Err(Error::InvalidInput(format!("c must be > 0, got {}", self.c)));
        }
        if !(self.cutoff_n0 >= 0.0) {
            return Err(Error::InvalidInput(format!("cutoff must be >= 0, got {}", self.cutoff_n0)));
        }
        // Near the origin the integrand behaves like n^(beta - alpha - 1).
        if self.cutoff_n0 == 0.0 && self.alpha >= self.beta {
            return Err(Error::Divergent(format!(
                "without a cutoff the integral needs alpha < beta (alpha = {}, beta = {})",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }
}

const RELATIVE_TOLERANCE: f64 = 1e-8;
/// ln(1e16): the integration window stops where the integrand is this far below its peak.
const LOG_DYNAMIC_RANGE: f64 = 36.85;

/// Unnormalized mixture density at one growth rate `g != 1`.
pub fn growth_density_unnormalized(params: &TheoryParams, g: f64) -> Result<f64> {
    params.validate()?;
    let x = g - 1.0;
    if x == 0.0 || !x.is_finite() {
        return Err(Error::InvalidInput(format!("density is singular or undefined at g = {g}")));
    }
    let TheoryParams { alpha, beta, cutoff_n0, c } = *params;
    let a = x * x / (2.0 * c);
    let log_f = |s: f64| (beta - alpha) * s - (2.0 * beta * s).exp() * a;

    let lower_bound = (cutoff_n0 > 0.0).then(|| cutoff_n0.ln());
    let stationary = (beta > alpha).then(|| ((beta - alpha) / (2.0 * beta * a)).ln() / (2.0 * beta));
    let peak = match (lower_bound, stationary) {
        (Some(lo), Some(st)) => lo.max(st),
        (Some(lo), None) => lo,
        (None, Some(st)) => st,
        (None, None) => unreachable!("validated: no cutoff implies beta > alpha"),
    };
    let log_peak = log_f(peak);
    // Shift by the peak so the integrand is O(1) at its maximum.
    let f = |s: f64| (log_f(s) - log_peak).exp();

    let lo = lower_bound.unwrap_or(peak - LOG_DYNAMIC_RANGE / (beta - alpha));
    let mut hi = peak + 1.0;
    let mut guard = 0;
    while log_f(hi) - log_peak > -LOG_DYNAMIC_RANGE {
        hi += 1.0;
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Divergent("integrand does not decay".into()));
        }
    }
    let integral = adaptive_simpson(&f, lo, hi, RELATIVE_TOLERANCE);
    let z = (2.0 * std::f64::consts::PI * c).sqrt().recip();
    Ok(z * integral * log_peak.exp())
}

/// Mixture density on `grid`, normalized by the trapezoidal rule so that it
/// integrates to one over the grid. `grid` must be strictly increasing and
/// must not contain `g = 1`.
pub fn theoretical_growth_density(params: &TheoryParams, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.len() < 2 {
        return Err(Error::InsufficientData("density grid needs at least two points".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("density grid must be strictly increasing".into()));
    }
    let raw = grid.iter().map(|&g| growth_density_unnormalized(params, g)).collect::<Result<Vec<_>>>()?;
    let mass: f64 = grid.windows(2).zip(raw.windows(2)).map(|(g, d)| 0.5 * (d[0] + d[1]) * (g[1] - g[0])).sum();
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Divergent(format!("density mass over the grid is {mass}")));
    }
    Ok(raw.into_iter().map(|d| d / mass).collect())
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    let panels: Vec<(f64, f64, f64, f64, f64)> = (0..PANELS)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, f1) = (f(x0), f(x1));
            let fm = f(0.5 * (x0 + x1));
            (x0, x1, f0, fm, f1)
        })
        .collect();
    let coarse: f64 = panels.iter().map(|&(x0, x1, f0, fm, f1)| simpson(x0, x1, f0, fm, f1)).sum();
    let eps = (rel_tol * coarse.abs()).max(f64::MIN_POSITIVE) / PANELS as f64;
    panels
        .into_iter()
        .map(|(x0, x1, f0, fm, f1)| refine(f, x0, x1, f0, fm, f1, simpson(x0, x1, f0, fm, f1), eps, 50))
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + refine(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (0..=200).map(|i| i as f64 * 0.01).filter(|g| (g - 1.0).abs() > 1e-9).collect()
    }

    #[test]
    fn zero_alpha_half_beta_is_inverse_distance() {
        let p = TheoryParams { alpha: 0.0, beta: 0.5, cutoff_n0: 0.0, c: 0.0826 };
        let d1 = growth_density_unnormalized(&p, 1.1).unwrap();
        let d2 = growth_density_unnormalized(&p, 1.2).unwrap();
        assert!((d1 / d2 - 2.0).abs() < 1e-7, "{}", d1 / d2);
        // closed form: Int n^-1/2 e^{-a n} dn / sqrt(2 pi c) = sqrt(pi / a) / sqrt(2 pi c) = 1 / |x|
        assert!((d1 - 10.0).abs() < 1e-6, "{d1}");
    }

    #[test]
    fn zero_alpha_any_beta_is_inverse_distance() {
        for beta in [0.1, 0.25, 0.4] {
            let p = TheoryParams { alpha: 0.0, beta, cutoff_n0: 0.0, c: 0.05 };
            let d1 = growth_density_unnormalized(&p, 0.95).unwrap();
            let d2 = growth_density_unnormalized(&p, 0.8).unwrap();
            assert!((d1 / d2 - 4.0).abs() < 1e-6);
        }
    }

    #[test]
    fn normalized_over_grid() {
        let g = grid();
        for p in [
            TheoryParams { alpha: 0.7, beta: 0.5, cutoff_n0: 10.0, c: 0.165 },
            TheoryParams { alpha: 1.0, beta: 0.25, cutoff_n0: 1.0, c: 0.0826 },
            TheoryParams { alpha: 0.2, beta: 0.5, cutoff_n0: 0.0, c: 0.0826 },
        ] {
            let d = theoretical_growth_density(&p, &g).unwrap();
            let mass: f64 = g.windows(2).zip(d.windows(2)).map(|(g, d)| 0.5 * (d[0] + d[1]) * (g[1] - g[0])).sum();
            assert!((mass - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn divergent_without_cutoff() {
        let p = TheoryParams { alpha: 0.7, beta: 0.5, cutoff_n0: 0.0, c: 0.1 };
        assert!(matches!(growth_density_unnormalized(&p, 1.1), Err(Error::Divergent(_))));
        let p = TheoryParams { alpha: 0.7, beta: 0.5, cutoff_n0: 1.0, c: 0.1 };
        assert!(growth_density_unnormalized(&p, 1.0).is_err());
    }

    #[test]
    fn symmetric_and_decreasing() {
        let p = TheoryParams { alpha: 0.7, beta: 0.5, cutoff_n0: 10.0, c: 0.165 };
        let mut prev = f64::INFINITY;
        for k in 1..60 {
            let x = k as f64 * 0.01;
            let up = growth_density_unnormalized(&p, 1.0 + x).unwrap();
            let down = growth_density_unnormalized(&p, 1.0 - x).unwrap();
            assert!(((up - down) / up).abs() < 1e-6);
            assert!(up < prev);
            prev = up;
        }
    }

    #[test]
    fn smaller_beta_is_less_peaked() {
        let peakedness = |beta: f64| {
            let p = TheoryParams { alpha: 1.0, beta, cutoff_n0: 1.0, c: 0.0826 };
            growth_density_unnormalized(&p, 1.02).unwrap() / growth_density_unnormalized(&p, 1.3).unwrap()
        };
        let values: Vec<f64> = [0.5, 0.35, 0.2, 0.05].iter().map(|&b| peakedness(b)).collect();
        assert!(values.windows(2).all(|w| w[0] > w[1]), "{values:?}");
    }
}
