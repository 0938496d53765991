//! Integer rounding schemes for offers and production.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Rounds `x` up with probability `frac(x)` and down otherwise, so the
/// expectation equals `x`.
pub fn probabilistic_round<R: Rng + ?Sized>(x: f64, rng: &mut R) -> u64 {
    debug_assert!(x >= 0.0, "probabilistic_round needs x >= 0, got {x}");
    let floor = x.floor();
    let frac = x - floor;
    let base = floor as u64;
    if frac > 0.0 && rng.random::<f64>() < frac {
        base + 1
    } else {
        base
    }
}

/// Per-position offer: each of the `size` existing positions asks for two
/// positions with probability `margin` and one otherwise.
///
/// The result lies in `[size, 2 * size]` and is `size + Binomial(size, margin)`.
pub fn per_unit_offer<R: Rng + ?Sized>(size: u64, margin: f64, rng: &mut R) -> Result<u64> {
    check_unit_margin(margin)?;
    if size == 0 || margin == 0.0 {
        return Ok(size);
    }
    if margin == 1.0 {
        return Ok(2 * size);
    }
    let doublings = Binomial::new(size, margin).expect("margin checked").sample(rng);
    Ok(size + doublings)
}

/// Probabilities that a single position maps to 0, 1 or 2 positions after a
/// per-unit offer followed by a fill with probability `1 / (1 + margin)`.
pub fn per_job_trinomial(margin: f64) -> Result<[f64; 3]> {
    check_unit_margin(margin)?;
    let d = (1.0 + margin) * (1.0 + margin);
    let q = margin / d;
    Ok([q, (1.0 + margin * margin) / d, q])
}

pub(crate) fn check_unit_margin(margin: f64) -> Result<()> {
    if (0.0..=1.0).contains(&margin) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "per-unit rounding needs a margin in [0, 1], got {margin}"
        )))
    }
}
