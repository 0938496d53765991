use crate::error::{Error, Result};
use crate::snapshot::SizeSnapshot;

/// Counter-cumulative distribution `P(n >= x)` at every distinct size `x`,
/// in ascending order of `x`. The first point has probability 1 and the
/// largest size has `1 / N` times its multiplicity.
pub fn ccdf(snapshot: &SizeSnapshot) -> Result<Vec<(f64, f64)>> {
    let sizes = snapshot.sizes();
    if sizes.is_empty() {
        return Err(Error::InsufficientData("ccdf of an empty snapshot".into()));
    }
    let n = sizes.len() as f64;
    // sizes are sorted descending: the count of sizes >= x is the index
    // just past the last occurrence of x.
    let mut points = Vec::new();
    let mut i = 0;
    while i < sizes.len() {
        let x = sizes[i];
        let mut j = i;
        while j < sizes.len() && sizes[j] == x {
            j += 1;
        }
        points.push((x, j as f64 / n));
        i = j;
    }
    points.reverse();
    Ok(points)
}
