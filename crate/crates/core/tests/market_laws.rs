use firmgrowth_core::analytics::moments::{mean, variance};
use firmgrowth_core::model::{
    allocate_market, allocate_with_probability, per_job_trinomial, per_unit_offer, probabilistic_round,
};
use firmgrowth_core::rng::{substream, Purpose};
use firmgrowth_core::{Allocation, Economy, ModelConfig, Scenario};
use proptest::prelude::*;

const MU: f64 = 0.1;

fn binomial_next_sizes(n: u64, reps: u64) -> Vec<f64> {
    let mut rng = substream(7, 0, Purpose::JobMarket);
    (0..reps)
        .map(|_| {
            let offer = probabilistic_round(n as f64 * (1.0 + MU), &mut rng);
            allocate_with_probability(&[offer], 1.0 / (1.0 + MU), &mut rng)[0] as f64
        })
        .collect()
}

fn per_unit_next_sizes(n: u64, reps: u64) -> Vec<f64> {
    let mut rng = substream(8, 0, Purpose::JobMarket);
    (0..reps)
        .map(|_| {
            let offer = per_unit_offer(n, MU, &mut rng).unwrap();
            allocate_with_probability(&[offer], 1.0 / (1.0 + MU), &mut rng)[0] as f64
        })
        .collect()
}

#[test]
fn binomial_market_preserves_mean_size() {
    let xs = binomial_next_sizes(1000, 100_000);
    let se = (variance(&xs) / xs.len() as f64).sqrt();
    assert!((mean(&xs) - 1000.0).abs() < 4.0 * se, "mean {}", mean(&xs));
}

#[test]
fn binomial_market_variance_is_n_mu_over_one_plus_mu() {
    // Binomial(n(1 + mu), 1 / (1 + mu)) has variance n * mu / (1 + mu).
    let xs = binomial_next_sizes(1000, 100_000);
    let expected = 1000.0 * MU / (1.0 + MU);
    let v = variance(&xs);
    assert!((v / expected - 1.0).abs() < 0.05, "variance {v}, expected {expected}");
}

#[test]
fn per_unit_variance_is_two_mu_over_one_plus_mu_squared() {
    let xs = per_unit_next_sizes(1000, 100_000);
    let expected = 1000.0 * 2.0 * MU / ((1.0 + MU) * (1.0 + MU));
    let v = variance(&xs);
    assert!((v / expected - 1.0).abs() < 0.05, "variance {v}, expected {expected}");
    let se = (v / xs.len() as f64).sqrt();
    assert!((mean(&xs) - 1000.0).abs() < 4.0 * se);
}

#[test]
fn single_job_outcomes_follow_the_trinomial() {
    let reps = 1_000_000;
    let mut counts = [0u64; 3];
    for k in per_unit_next_sizes(1, reps) {
        counts[k as usize] += 1;
    }
    for (c, p) in counts.iter().zip(per_job_trinomial(MU).unwrap()) {
        let freq = *c as f64 / reps as f64;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * se, "freq {freq} vs {p}");
    }
}

#[test]
fn probabilistic_round_is_unbiased() {
    let mut rng = substream(3, 0, Purpose::Offers);
    let reps = 1_000_000;
    for x in [0.3, 1.1, 2.5] {
        let draws: Vec<f64> = (0..reps).map(|_| probabilistic_round(x, &mut rng) as f64).collect();
        let frac: f64 = x - f64::floor(x);
        let se = (frac * (1.0 - frac) / reps as f64).sqrt();
        assert!((mean(&draws) - x).abs() < 4.0 * se, "x = {x}: mean {}", mean(&draws));
    }
}

#[test]
fn exact_matching_fills_each_slot_with_equal_probability() {
    // Two firms with 10 and 30 slots share 20 workers: expected hires 5 and 15.
    let mut rng = substream(5, 0, Purpose::JobMarket);
    let reps = 100_000;
    let mut total = [0u64; 2];
    for _ in 0..reps {
        let hired = allocate_market(&[10, 30], 20, Allocation::ExactMatching, &mut rng);
        assert_eq!(hired[0] + hired[1], 20);
        total[0] += hired[0];
        total[1] += hired[1];
    }
    let m0 = total[0] as f64 / reps as f64;
    // hypergeometric variance 20 * 1/4 * 3/4 * 20/39
    let se = (20.0 * 0.25 * 0.75 * 20.0 / 39.0 / reps as f64).sqrt();
    assert!((m0 - 5.0).abs() < 4.0 * se, "mean hires {m0}");
}

#[test]
fn scenario_ii_sales_average_wage_bill_and_margin_averages_zero() {
    let cfg = ModelConfig {
        scenario: Scenario::WorkersOnlyConsume,
        n_firms: 500,
        n_workers: 50_000,
        seed: 21,
        ..ModelConfig::default()
    };
    let mut economy = Economy::new(cfg).unwrap();
    let mut margins = Vec::new();
    let mut sold = 0.0;
    let mut wage_bill = 0.0;
    for _ in 0..200 {
        economy.step().unwrap();
        for f in economy.firms().iter().filter(|f| f.size > 0) {
            margins.push(f.realized_margin);
            sold += f.sold;
            wage_bill += f.size as f64;
        }
    }
    assert!((sold / wage_bill - 1.0).abs() < 1e-3, "sales / wage bill = {}", sold / wage_bill);
    let weighted: f64 = margins.iter().sum::<f64>() / margins.len() as f64;
    assert!(weighted.abs() < 0.02, "mean realized margin {weighted}");
}

#[test]
fn scenario_i_keeps_every_worker_employed() {
    let cfg = ModelConfig { n_firms: 200, n_workers: 20_000, seed: 4, ..ModelConfig::default() };
    let mut economy = Economy::new(cfg).unwrap();
    for _ in 0..300 {
        let report = economy.step().unwrap();
        assert_eq!(report.hired, 20_000);
        assert_eq!(economy.firms().len(), 200);
        assert!(economy.firms().iter().all(|f| f.size > 0));
    }
}

#[test]
fn same_seed_same_history() {
    for scenario in [Scenario::FirmsConsume, Scenario::WorkersOnlyConsume] {
        let cfg = ModelConfig { scenario, n_firms: 100, n_workers: 5_000, seed: 99, ..ModelConfig::default() };
        let mut a = Economy::new(cfg.clone()).unwrap();
        let mut b = Economy::new(cfg.clone()).unwrap();
        let mut c = Economy::new(ModelConfig { seed: 100, ..cfg }).unwrap();
        for _ in 0..50 {
            assert_eq!(a.step().unwrap().records, b.step().unwrap().records);
            c.step().unwrap();
        }
        assert_eq!(a.rows(), b.rows());
        assert_ne!(a.rows(), c.rows());
    }
}

proptest! {
    #[test]
    fn allocation_never_overfills(
        demands in prop::collection::vec(0u64..50, 1..40),
        supply in 0u64..1500,
        seed in any::<u64>(),
        exact in any::<bool>(),
    ) {
        let mode = if exact { Allocation::ExactMatching } else { Allocation::IndependentBinomial };
        let mut rng = substream(seed, 0, Purpose::JobMarket);
        let got = allocate_market(&demands, supply, mode, &mut rng);
        prop_assert_eq!(got.len(), demands.len());
        prop_assert!(got.iter().zip(&demands).all(|(g, d)| g <= d));
        let total: u64 = demands.iter().sum();
        if exact || total <= supply {
            prop_assert_eq!(got.iter().sum::<u64>(), total.min(supply));
        }
    }

    #[test]
    fn rounding_lands_on_a_neighbour(x in 0.0f64..1e6, seed in any::<u64>()) {
        let mut rng = substream(seed, 0, Purpose::Offers);
        let k = probabilistic_round(x, &mut rng) as f64;
        prop_assert!(k == x.floor() || k == x.ceil());
    }

    #[test]
    fn per_unit_offer_stays_between_size_and_double(size in 0u64..500, mu in 0.0f64..=1.0, seed in any::<u64>()) {
        let mut rng = substream(seed, 0, Purpose::Offers);
        let offer = per_unit_offer(size, mu, &mut rng).unwrap();
        prop_assert!(offer >= size && offer <= 2 * size);
    }

    #[test]
    fn workers_are_conserved_in_scenario_i(seed in any::<u64>(), n_firms in 2usize..40, per_firm in 1u64..60) {
        let cfg = ModelConfig { n_firms, n_workers: n_firms as u64 * per_firm, seed, ..ModelConfig::default() };
        let mut economy = Economy::new(cfg).unwrap();
        for _ in 0..20 {
            let report = economy.step().unwrap();
            prop_assert_eq!(report.hired, n_firms as u64 * per_firm);
        }
    }
}
