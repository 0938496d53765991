//! Sample moments.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn central(xs: &[f64]) -> (f64, f64, f64) {
    let m = mean(xs);
    let n = xs.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    central(xs).0
}

pub fn skewness(xs: &[f64]) -> f64 {
    let (m2, m3, _) = central(xs);
    m3 / m2.powf(1.5)
}

/// Kurtosis minus 3, zero for a Gaussian.
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let (m2, _, m4) = central(xs);
    m4 / (m2 * m2) - 3.0
}
