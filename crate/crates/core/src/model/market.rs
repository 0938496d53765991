//! Random matching of a scarce supply against integer demands.
//!
//! The same allocator clears the job market (positions vs. workers) and the
//! goods market (goods vs. purchasing power).

use rand::Rng;
use rand_distr::{Binomial, Distribution, Hypergeometric};

/// How a scarce supply is spread over claimants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Allocation {
    /// Supply units are assigned to distinct demand slots drawn uniformly
    /// without replacement. The total handed out equals the supply exactly.
    #[default]
    ExactMatching,
    /// Every slot is filled independently with probability `supply / total`.
    /// The supply is conserved only on average.
    IndependentBinomial,
}

/// Market-wide fill and sell probabilities for one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketProbabilities {
    /// Probability that an open position is filled.
    pub fill_prob: f64,
    /// Probability that a produced good is sold.
    pub sell_prob: f64,
    pub aggregate_demand: f64,
    pub aggregate_output: f64,
}

impl MarketProbabilities {
    pub fn new(workers: u64, total_offers: u64, aggregate_demand: f64, aggregate_output: f64) -> Self {
        Self {
            fill_prob: ratio_clamped(workers as f64, total_offers as f64),
            sell_prob: ratio_clamped(aggregate_demand, aggregate_output),
            aggregate_demand,
            aggregate_output,
        }
    }
}

fn ratio_clamped(supply: f64, demand: f64) -> f64 {
    if demand > 0.0 {
        (supply / demand).min(1.0)
    } else {
        1.0
    }
}

/// Distributes `supply` units over `demands`.
///
/// When the supply covers every demand, each claimant receives its full
/// demand. Otherwise the claimants share the supply according to `mode`; in
/// both modes `0 <= k_i <= demand_i` and `E[k_i] = demand_i * supply / sum`.
pub fn allocate_market<R: Rng + ?Sized>(
    demands: &[u64],
    supply: u64,
    mode: Allocation,
    rng: &mut R,
) -> Vec<u64> {
    let total: u64 = demands.iter().sum();
    if total <= supply {
        return demands.to_vec();
    }
    match mode {
        Allocation::ExactMatching => multivariate_hypergeometric(demands, total, supply, rng),
        Allocation::IndependentBinomial => {
            allocate_with_probability(demands, supply as f64 / total as f64, rng)
        }
    }
}

/// Fills each slot independently with probability `prob`.
pub fn allocate_with_probability<R: Rng + ?Sized>(demands: &[u64], prob: f64, rng: &mut R) -> Vec<u64> {
    let prob = prob.clamp(0.0, 1.0);
    demands
        .iter()
        .map(|&d| {
            if d == 0 || prob == 0.0 {
                0
            } else if prob == 1.0 {
                d
            } else {
                Binomial::new(d, prob).expect("valid probability").sample(rng)
            }
        })
        .collect()
}

/// Draws `draws` slots without replacement from `total` slots split into
/// groups of `demands`, one conditional hypergeometric per group.
fn multivariate_hypergeometric<R: Rng + ?Sized>(
    demands: &[u64],
    total: u64,
    draws: u64,
    rng: &mut R,
) -> Vec<u64> {
    let mut remaining_slots = total;
    let mut remaining_draws = draws;
    demands
        .iter()
        .map(|&d| {
            let k = if remaining_draws == 0 || d == 0 {
                0
            } else if d == remaining_slots {
                remaining_draws
            } else if remaining_draws == remaining_slots {
                d
            } else {
                hypergeometric(remaining_slots, d, remaining_draws, rng)
            };
            remaining_slots -= d;
            remaining_draws -= k;
            k
        })
        .collect()
}

/// Variance below which draws come from the tabulated pmf. Above it rand_distr
/// always takes its constant-time rejection sampler; below it rand_distr may
/// fall back to an inversion whose setup loops over the whole population.
const TABLE_MAX_VARIANCE: f64 = 2500.0;

fn hypergeometric<R: Rng + ?Sized>(total: u64, marked: u64, draws: u64, rng: &mut R) -> u64 {
    let (n, k, m) = (total as f64, marked as f64, draws as f64);
    let variance = m * (k / n) * (1.0 - k / n) * (n - m) / (n - 1.0);
    if variance < TABLE_MAX_VARIANCE {
        return hypergeometric_by_table(total, marked, draws, rng);
    }
    match Hypergeometric::new(total, marked, draws) {
        Ok(h) => h.sample(rng),
        Err(_) => hypergeometric_by_table(total, marked, draws, rng),
    }
}

/// Inverse-transform draw over the pmf tabulated outward from the mode, cut
/// where the weight falls below 1e-18 of the peak. Weights are relative to the
/// mode, so nothing underflows however large the population.
fn hypergeometric_by_table<R: Rng + ?Sized>(total: u64, marked: u64, draws: u64, rng: &mut R) -> u64 {
    let lo = (draws + marked).saturating_sub(total);
    let hi = marked.min(draws);
    let (n, k, m) = (total as f64, marked as f64, draws as f64);
    let mode = ((((m + 1.0) * (k + 1.0)) / (n + 2.0)).floor() as u64).clamp(lo, hi);
    // p(x+1)/p(x)
    let ratio = |x: f64| (k - x) * (m - x) / ((x + 1.0) * (n - k - m + x + 1.0));
    const CUTOFF: f64 = 1e-18;

    let mut below = Vec::new();
    let mut w = 1.0;
    let mut x = mode;
    while x > lo {
        w /= ratio((x - 1) as f64);
        if w < CUTOFF {
            break;
        }
        below.push(w);
        x -= 1;
    }
    let mut above = Vec::new();
    let mut w = 1.0;
    let mut x = mode;
    while x < hi {
        w *= ratio(x as f64);
        if w < CUTOFF {
            break;
        }
        above.push(w);
        x += 1;
    }

    let start = mode - below.len() as u64;
    let weights: Vec<f64> = below
        .iter()
        .rev()
        .copied()
        .chain(std::iter::once(1.0))
        .chain(above.iter().copied())
        .collect();
    let total_weight: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total_weight;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return start + i as u64;
        }
        u -= w;
    }
    start + weights.len() as u64 - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Purpose};
    use std::collections::HashMap;

    #[test]
    fn single_claimant_takes_everything() {
        let mut rng = substream(1, 0, Purpose::JobMarket);
        assert_eq!(allocate_market(&[5], 5, Allocation::ExactMatching, &mut rng), vec![5]);
        assert_eq!(allocate_market(&[5], 3, Allocation::ExactMatching, &mut rng), vec![3]);
    }

    #[test]
    fn surplus_supply_satisfies_all() {
        let mut rng = substream(1, 0, Purpose::JobMarket);
        for mode in [Allocation::ExactMatching, Allocation::IndependentBinomial] {
            assert_eq!(allocate_market(&[3, 0, 4], 10, mode, &mut rng), vec![3, 0, 4]);
        }
    }

    /// Enumerates every 2-subset of the four slots {a, a, b, b}.
    fn two_by_two_oracle() -> HashMap<(u64, u64), f64> {
        let owner = [0usize, 0, 1, 1];
        let mut counts: HashMap<(u64, u64), f64> = HashMap::new();
        let mut subsets = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let mut k = [0u64; 2];
                k[owner[i]] += 1;
                k[owner[j]] += 1;
                *counts.entry((k[0], k[1])).or_default() += 1.0;
                subsets += 1.0;
            }
        }
        counts.values_mut().for_each(|c| *c /= subsets);
        counts
    }

    #[test]
    fn exact_matching_two_by_two_matches_enumeration() {
        let oracle = two_by_two_oracle();
        assert_eq!(oracle.len(), 3);
        assert!((oracle[&(1, 1)] - 4.0 / 6.0).abs() < 1e-15);

        let mut rng = substream(9, 0, Purpose::JobMarket);
        let n = 300_000;
        let mut seen: HashMap<(u64, u64), f64> = HashMap::new();
        for _ in 0..n {
            let k = allocate_market(&[2, 2], 2, Allocation::ExactMatching, &mut rng);
            assert_eq!(k[0] + k[1], 2);
            *seen.entry((k[0], k[1])).or_default() += 1.0;
        }
        for (outcome, p) in oracle {
            let freq = seen.get(&outcome).copied().unwrap_or(0.0) / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * se, "{outcome:?}: {freq} vs {p}");
        }
    }

    #[test]
    fn exact_matching_conserves_supply() {
        let mut rng = substream(4, 0, Purpose::JobMarket);
        let demands: Vec<u64> = (0..500).map(|i| (i % 37) as u64).collect();
        let total: u64 = demands.iter().sum();
        for supply in [0, 1, total / 3, total - 1] {
            let k = allocate_market(&demands, supply, Allocation::ExactMatching, &mut rng);
            assert_eq!(k.iter().sum::<u64>(), supply);
            assert!(k.iter().zip(&demands).all(|(k, d)| k <= d));
        }
    }

    #[test]
    fn fill_probability_for_aggregated_offers() {
        let p = MarketProbabilities::new(10_000, 11_000, 0.0, 0.0);
        assert!((p.fill_prob - 1.0 / 1.1).abs() < 1e-12);
        let v = MarketProbabilities::new(1, 1, 100.0, 110.0);
        assert!((v.sell_prob - 1.0 / 1.1).abs() < 1e-12);
        assert_eq!(MarketProbabilities::new(5, 2, 3.0, 1.0).sell_prob, 1.0);
        assert_eq!(MarketProbabilities::new(5, 2, 3.0, 1.0).fill_prob, 1.0);
    }

    #[test]
    fn binomial_mode_mean_matches_share() {
        let mut rng = substream(5, 0, Purpose::JobMarket);
        let demands = [11u64, 55, 110];
        let supply = 160u64;
        let reps = 50_000;
        let mut sums = [0.0f64; 3];
        for _ in 0..reps {
            let k = allocate_market(&demands, supply, Allocation::IndependentBinomial, &mut rng);
            for i in 0..3 {
                assert!(k[i] <= demands[i]);
                sums[i] += k[i] as f64;
            }
        }
        let p = supply as f64 / 176.0;
        for i in 0..3 {
            let mean = sums[i] / reps as f64;
            let se = (demands[i] as f64 * p * (1.0 - p) / reps as f64).sqrt();
            assert!((mean - demands[i] as f64 * p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn table_sampler_matches_small_pmf() {
        // N=10, K=4, n=3: P(x) = C(4,x) C(6,3-x) / C(10,3)
        let exact = [20.0 / 120.0, 60.0 / 120.0, 36.0 / 120.0, 4.0 / 120.0];
        let mut rng = substream(9, 0, Purpose::JobMarket);
        let reps = 200_000;
        let mut counts = [0usize; 4];
        for _ in 0..reps {
            counts[hypergeometric_by_table(10, 4, 3, &mut rng) as usize] += 1;
        }
        for (c, p) in counts.iter().zip(exact) {
            assert!((*c as f64 / reps as f64 - p).abs() < 0.005);
        }
    }

    #[test]
    fn large_sparse_population_does_not_panic() {
        let mut rng = substream(3, 0, Purpose::JobMarket);
        let demands = vec![1u64; 1_000_000];
        let hired = allocate_market(&demands, 999_990, Allocation::ExactMatching, &mut rng);
        assert_eq!(hired.iter().sum::<u64>(), 999_990);
    }
}
