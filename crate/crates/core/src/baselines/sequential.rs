//! Sequential-update city model: workers leave one at a time and settle in a
//! city chosen with probability proportional to its current population.

use rand::Rng;

use crate::error::{Error, Result};
use crate::growth::{GrowthRecord, Metric};
use crate::model::probabilistic_round;
use crate::snapshot::{SizeSnapshot, SnapshotRow};

/// Prefix sums over city sizes with O(log n) point updates and weighted search.
#[derive(Debug, Clone)]
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn from_weights(weights: &[u64]) -> Self {
        let mut tree = vec![0; weights.len() + 1];
        for (i, &w) in weights.iter().enumerate() {
            let mut j = i + 1;
            while j < tree.len() {
                tree[j] += w;
                j += j & j.wrapping_neg();
            }
        }
        Self { tree }
    }

    fn add(&mut self, index: usize, delta: i64) {
        let mut j = index + 1;
        while j < self.tree.len() {
            self.tree[j] = self.tree[j].wrapping_add_signed(delta);
            j += j & j.wrapping_neg();
        }
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    fn find(&self, mut target: u64) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

/// City populations under sequential proportional moves.
#[derive(Debug, Clone)]
pub struct SequentialCities {
    sizes: Vec<u64>,
    weights: Fenwick,
    n_workers: u64,
    replacement_mean: f64,
    /// Whether a moving worker may settle back in the city it left.
    pub allow_self_moves: bool,
    time: u64,
}

impl SequentialCities {
    pub fn new(sizes: Vec<u64>, replacement_mean: f64) -> Result<Self> {
        let n_workers: u64 = sizes.iter().sum();
        if n_workers == 0 {
            return Err(Error::InvalidInput("cities hold no workers".into()));
        }
        if sizes.len() < 2 {
            return Err(Error::InvalidInput("need at least two cities".into()));
        }
        let weights = Fenwick::from_weights(&sizes);
        Ok(Self { sizes, weights, n_workers, replacement_mean, allow_self_moves: true, time: 0 })
    }

    /// `n_cities` cities sharing `n_workers` as evenly as possible.
    pub fn even(n_cities: usize, n_workers: u64, replacement_mean: f64) -> Result<Self> {
        if n_cities == 0 {
            return Err(Error::InvalidInput("need at least two cities".into()));
        }
        let base = n_workers / n_cities as u64;
        let extra = (n_workers % n_cities as u64) as usize;
        Self::new((0..n_cities).map(|i| base + u64::from(i < extra)).collect(), replacement_mean)
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn n_workers(&self) -> u64 {
        self.n_workers
    }

    /// Number of completed batches.
    pub fn time(&self) -> u64 {
        self.time
    }

    /// Moves `n_moves` workers one after another and returns the growth of
    /// every city over the whole batch.
    ///
    /// A batch may move at most as many workers as exist.
    pub fn run_batch<R: Rng + ?Sized>(&mut self, n_moves: u64, rng: &mut R) -> Result<Vec<GrowthRecord>> {
        if n_moves > self.n_workers {
            return Err(Error::InfeasibleMoves { requested: n_moves, feasible: self.n_workers });
        }
        let before = self.sizes.clone();
        for _ in 0..n_moves {
            self.move_one(rng);
        }
        self.time += 1;
        Ok(before
            .iter()
            .zip(&self.sizes)
            .filter(|(b, _)| **b > 0)
            .map(|(&b, &a)| GrowthRecord { size_before: b as f64, size_after: a as f64, metric: Metric::Employees })
            .collect())
    }

    fn pick_weighted<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.weights.find(rng.random_range(0..self.n_workers))
    }

    fn take(&mut self, city: usize) {
        self.sizes[city] -= 1;
        self.weights.add(city, -1);
    }

    fn put(&mut self, city: usize) {
        self.sizes[city] += 1;
        self.weights.add(city, 1);
    }

    fn move_one<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let origin = self.pick_weighted(rng);
        self.take(origin);
        self.n_workers -= 1;
        let destination = loop {
            let d = self.pick_weighted(rng);
            if self.allow_self_moves || d != origin || self.sizes[origin] == self.n_workers {
                break d;
            }
        };
        self.put(destination);
        self.n_workers += 1;
        if self.sizes[origin] == 0 {
            self.restart(origin, rng);
        }
    }

    /// Refills an empty city with workers taken uniformly at random from the
    /// other cities, so the total population is unchanged.
    fn restart<R: Rng + ?Sized>(&mut self, city: usize, rng: &mut R) {
        let mut pending = vec![city];
        while let Some(c) = pending.pop() {
            let wanted = probabilistic_round(self.replacement_mean, rng).max(1);
            let others = self.n_workers - self.sizes[c];
            for _ in 0..wanted.min(others.saturating_sub(1)) {
                let donor = loop {
                    let d = self.pick_weighted(rng);
                    if d != c {
                        break d;
                    }
                };
                self.take(donor);
                self.put(c);
                if self.sizes[donor] == 0 {
                    pending.push(donor);
                }
            }
        }
    }

    pub fn snapshot(&self) -> SizeSnapshot {
        SizeSnapshot::new(self.time, self.sizes.iter().map(|&s| s as f64))
    }

    pub fn rows(&self) -> Vec<SnapshotRow> {
        self.sizes
            .iter()
            .enumerate()
            .map(|(firm_id, &s)| SnapshotRow { firm_id, size: s as f64, output: s as f64, sold: s as f64 })
            .collect()
    }
}

/// Runs one batch of `n_moves` sequential moves on `city_sizes`.
pub fn step_marsili_sequential<R: Rng + ?Sized>(
    city_sizes: &[u64],
    n_moves: u64,
    replacement_mean: f64,
    rng: &mut R,
) -> Result<(Vec<u64>, Vec<GrowthRecord>)> {
    let mut cities = SequentialCities::new(city_sizes.to_vec(), replacement_mean)?;
    let records = cities.run_batch(n_moves, rng)?;
    Ok((cities.sizes, records))
}

/// Rank-size curve `m * exp(1 - rank)` predicted for the linear case.
pub fn marsili_rank_prediction(rank: u64, m: f64) -> f64 {
    m * (1.0 - rank as f64).exp()
}
