//! Closed-form relations between workers, output and margins.
//!
//! Only the ratio `wage / price` ever matters; both default to 1.

use crate::error::{Error, Result};

/// Margin a firm earns when it sells `output` goods with `size` employees:
/// `(output * price - size * wage) / (size * wage)`.
pub fn expected_margin(output: f64, size: u64, wage: f64, price: f64) -> Result<f64> {
    if size == 0 || !(wage > 0.0) {
        return Err(Error::UndefinedMargin);
    }
    let cost = size as f64 * wage;
    Ok((output * price - cost) / cost)
}

/// Net realized margin from the quantity actually sold. Same formula as
/// [`expected_margin`] with sales in place of output.
pub fn realized_margin(sold: f64, size: u64, wage: f64, price: f64) -> Result<f64> {
    expected_margin(sold, size, wage, price)
}

/// Workers needed to produce `planned_output` at the given margin.
///
/// This is the inverse of [`production`].
pub fn required_workers(planned_output: f64, margin: f64, wage: f64, price: f64) -> Result<f64> {
    if margin <= -1.0 {
        return Err(Error::MarginDomain(margin));
    }
    if planned_output < 0.0 {
        return Err(Error::InvalidInput(format!(
            "planned output must be non-negative, got {planned_output}"
        )));
    }
    Ok(planned_output * (price / wage) / (1.0 + margin))
}

/// Goods produced by `size` workers.
pub fn production(size: u64, margin: f64, wage: f64, price: f64) -> f64 {
    size as f64 * (wage / price) * (1.0 + margin)
}

/// Next planned output from last period's output and realized margin, floored at zero.
pub fn plan_production(prev_output: f64, prev_realized_margin: f64) -> f64 {
    (prev_output * (1.0 + prev_realized_margin)).max(0.0)
}
