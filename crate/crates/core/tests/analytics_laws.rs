use firmgrowth_core::analytics::moments::{excess_kurtosis, skewness};
use firmgrowth_core::analytics::{
    bin_by_size, ccdf, fit_beta, fit_tail_mle, fit_tail_ols, growth_histogram, job_count_pmf_oracle,
    theoretical_growth_density, BinSpec, FitRange, SizeBinning, TheoryParams,
};
use firmgrowth_core::baselines::{step_scaled_beta, NoiseKind, NoiseProcess};
use firmgrowth_core::model::{allocate_with_probability, per_unit_offer};
use firmgrowth_core::rng::{substream, Purpose};
use firmgrowth_core::{BaselineConfig, GrowthRecord, Metric, SizeSnapshot};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn pareto_sample(alpha: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = substream(seed, 0, Purpose::Init);
    (0..n).map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / alpha)).collect()
}

#[test]
fn hill_estimator_recovers_pareto_exponents() {
    for (alpha, tol) in [(0.7, 0.01), (1.0, 0.015)] {
        let xs = pareto_sample(alpha, 100_000, 17);
        let fit = fit_tail_mle(&xs, 1.0).unwrap();
        assert!((fit.exponent - alpha).abs() < tol, "alpha {alpha}: got {}", fit.exponent);
        assert!((fit.exponent - alpha).abs() < 2.0 * fit.std_error + tol);
    }
}

#[test]
fn least_squares_is_exact_on_a_pure_power_law() {
    let points: Vec<(f64, f64)> = (1..=200).map(|x| (x as f64, (x as f64).powf(-0.7))).collect();
    let fit = fit_tail_ols(&points, FitRange::new(5.0, 150.0).unwrap()).unwrap();
    assert!((fit.exponent - 0.7).abs() < 1e-12);
}

#[test]
fn growth_histogram_of_gaussian_rates_matches_the_density() {
    let mut rng = substream(2, 0, Purpose::Noise);
    let sigma = 0.1;
    let records: Vec<GrowthRecord> = (0..1_000_000)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            GrowthRecord { size_before: 100.0, size_after: 100.0 * (1.0 + sigma * z), metric: Metric::Employees }
        })
        .collect();
    let hist = growth_histogram(&records, BinSpec::GROWTH_DEFAULT, 10.0).unwrap();
    let pdf = |g: f64| (-(g - 1.0).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    for (i, d) in hist.densities.iter().enumerate() {
        let (lo, hi) = (hist.bin_edges[i], hist.bin_edges[i + 1]);
        if ((lo + hi) / 2.0 - 1.0).abs() > 2.0 * sigma {
            continue;
        }
        // bin average of the pdf by Simpson's rule
        let expected = (pdf(lo) + 4.0 * pdf((lo + hi) / 2.0) + pdf(hi)) / 6.0;
        assert!((d / expected - 1.0).abs() < 0.03, "bin [{lo}, {hi}]: {d} vs {expected}");
    }
    assert!((hist.total_mass() - 1.0).abs() < 1e-6);
}

/// Records with `g ~ Normal(1, c / n^(2 beta))` and sizes log-uniform on `[10, 10^5]`.
fn scaled_records(beta: f64, n: usize, seed: u64) -> Vec<GrowthRecord> {
    let mut rng = substream(seed, 0, Purpose::Noise);
    (0..n)
        .map(|_| {
            let size = 10f64.powf(rng.random_range(1.0..5.0)).round();
            let z: f64 = rng.sample(StandardNormal);
            let g = 1.0 + 0.5 * size.powf(-beta) * z;
            GrowthRecord { size_before: size, size_after: size * g, metric: Metric::Employees }
        })
        .collect()
}

#[test]
fn decade_sigma_ratio_is_ten_to_minus_half() {
    let records = scaled_records(0.5, 400_000, 5);
    let bins = bin_by_size(&records, SizeBinning::default()).unwrap();
    assert_eq!(bins.len(), 4);
    for pair in bins.windows(2) {
        let ratio = pair[1].sigma_g / pair[0].sigma_g;
        let expected = (pair[1].mean_size / pair[0].mean_size).powf(-0.5);
        assert!((ratio / expected - 1.0).abs() < 0.1, "ratio {ratio} vs {expected}");
        assert!((ratio / 10f64.powf(-0.5) - 1.0).abs() < 0.1, "ratio {ratio}");
    }
}

#[test]
fn beta_does_not_depend_on_binning() {
    let records = scaled_records(0.5, 400_000, 6);
    let decade = fit_beta(&bin_by_size(&records, SizeBinning { bins_per_decade: 1, min_size: 10.0 }).unwrap()).unwrap();
    let half = fit_beta(&bin_by_size(&records, SizeBinning { bins_per_decade: 2, min_size: 10.0 }).unwrap()).unwrap();
    assert!((decade.exponent - 0.5).abs() < 0.02, "decade beta {}", decade.exponent);
    assert!((decade.exponent - half.exponent).abs() < 0.05);
}

#[test]
fn scaled_noise_with_half_beta_gives_square_root_law() {
    let c = 0.1 / 1.21;
    let mut rng = substream(12, 0, Purpose::Noise);
    let mut records = Vec::new();
    for _ in 0..50 {
        let mut sizes: Vec<f64> = [100.0, 1_000.0, 10_000.0, 100_000.0].repeat(500);
        records.extend(step_scaled_beta(&mut sizes, c, 0.5, 1.5, &mut rng).unwrap());
    }
    let bins = bin_by_size(&records, SizeBinning { bins_per_decade: 1, min_size: 100.0 }).unwrap();
    assert_eq!(bins.len(), 4);
    let fit = fit_beta(&bins).unwrap();
    assert!((fit.exponent - 0.5).abs() < 0.05, "beta {}", fit.exponent);
    // sigma^2 * n is the same in every decade
    for b in &bins {
        let scaled = b.sigma_g * b.sigma_g * b.mean_size;
        assert!((scaled / c - 1.0).abs() < 0.1, "decade at {}: {scaled}", b.low);
    }
}

#[test]
fn additive_baseline_sizes_stay_gaussian() {
    let cfg = BaselineConfig { n_units: 1000, n_workers: 100_000, sigma: 1.0, iterations: 2000, seed: 3, ..BaselineConfig::default() };
    let mut process = NoiseProcess::new(NoiseKind::Additive, cfg).unwrap();
    for _ in 0..2000 {
        process.step().unwrap();
    }
    let sizes = process.sizes();
    assert!(excess_kurtosis(sizes).abs() < 0.5, "kurtosis {}", excess_kurtosis(sizes));
    assert!(skewness(sizes).abs() < 0.3, "skewness {}", skewness(sizes));
    assert!((sizes.iter().sum::<f64>() - 100_000.0).abs() < 1e-6);
}

#[test]
fn pmf_oracle_agrees_with_simulation() {
    let reps = 1_000_000u64;
    for (size, mu) in [(1u64, 0.1), (3, 0.05), (7, 0.2)] {
        let pmf = job_count_pmf_oracle(size, mu).unwrap();
        let mut counts = vec![0u64; pmf.len()];
        let mut rng = substream(size, 0, Purpose::JobMarket);
        for _ in 0..reps {
            let offer = per_unit_offer(size, mu, &mut rng).unwrap();
            counts[allocate_with_probability(&[offer], 1.0 / (1.0 + mu), &mut rng)[0] as usize] += 1;
        }
        for (k, (c, p)) in counts.iter().zip(&pmf).enumerate() {
            let se = (p * (1.0 - p) / reps as f64).sqrt().max(1e-12);
            let freq = *c as f64 / reps as f64;
            assert!((freq - p).abs() <= 4.0 * se, "size {size}, k {k}: {freq} vs {p}");
        }
    }
}

#[test]
fn theory_density_is_symmetric_and_decreasing() {
    let params = TheoryParams { alpha: 0.7, beta: 0.5, cutoff_n0: 1.0, c: 0.0826 };
    let right: Vec<f64> = (1..40).map(|i| 1.0 + 0.025 * i as f64).collect();
    let left: Vec<f64> = right.iter().rev().map(|g| 2.0 - g).collect();
    let mut grid = left.clone();
    grid.extend(&right);
    let d = theoretical_growth_density(&params, &grid).unwrap();
    let (dl, dr) = d.split_at(left.len());
    for (a, b) in dl.iter().rev().zip(dr) {
        assert!((a - b).abs() <= 1e-6 * a.max(*b));
    }
    assert!(dr.windows(2).all(|w| w[1] < w[0]));
}

proptest! {
    #[test]
    fn ccdf_starts_at_one_and_never_rises(sizes in prop::collection::vec(1u32..10_000, 1..300)) {
        let snap = SizeSnapshot::new(0, sizes.iter().map(|&s| s as f64));
        let points = ccdf(&snap).unwrap();
        prop_assert_eq!(points[0].1, 1.0);
        prop_assert!(points.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 > w[0].0));
    }

    #[test]
    fn pmf_oracle_is_a_symmetric_distribution(size in 1u64..=30, mu in 0.0f64..=1.0) {
        let pmf = job_count_pmf_oracle(size, mu).unwrap();
        prop_assert_eq!(pmf.len() as u64, 2 * size + 1);
        prop_assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        prop_assert!((mean - size as f64).abs() < 1e-9);
        for k in 0..pmf.len() {
            prop_assert!((pmf[k] - pmf[pmf.len() - 1 - k]).abs() < 1e-12);
        }
    }

    #[test]
    fn hill_fit_of_exact_quantiles_is_close(alpha in 0.5f64..2.0) {
        // Pareto quantiles at evenly spaced probabilities
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|i| (1.0 - (i as f64 + 0.5) / n as f64).powf(-1.0 / alpha)).collect();
        let fit = fit_tail_mle(&xs, xs.iter().copied().fold(f64::MAX, f64::min)).unwrap();
        prop_assert!((fit.exponent - alpha).abs() < 2.0 * fit.std_error);
    }
}
