use crate::error::{Error, Result};
use crate::model::per_job_trinomial;

/// Largest firm size the exact enumeration accepts.
pub const ORACLE_MAX_SIZE: u64 = 30;

/// Exact distribution of next period's size for a firm of `size` employees
/// under per-unit offers and a fill probability of `1 / (1 + margin)`.
///
/// Every job independently becomes 0, 1 or 2 jobs, so the pmf over
/// `0..=2 * size` is the `size`-fold convolution of the per-job trinomial.
pub fn job_count_pmf_oracle(size: u64, margin: f64) -> Result<Vec<f64>> {
    if size > ORACLE_MAX_SIZE {
        return Err(Error::OracleTooLarge { size, limit: ORACLE_MAX_SIZE });
    }
    let job = per_job_trinomial(margin)?;
    let mut pmf = vec![1.0];
    for _ in 0..size {
        let mut next = vec![0.0; pmf.len() + 2];
        for (k, &p) in pmf.iter().enumerate() {
            for (d, &q) in job.iter().enumerate() {
                next[k + d] += p * q;
            }
        }
        pmf = next;
    }
    Ok(pmf)
}
