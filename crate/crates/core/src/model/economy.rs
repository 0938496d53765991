use rand::Rng;

use super::equations::{plan_production, production, realized_margin, required_workers};
use super::market::{allocate_market, Allocation, MarketProbabilities};
use super::rounding::{per_unit_offer, probabilistic_round};
use super::{ModelConfig, Rounding, Scenario};
use crate::error::{Error, Result};
use crate::growth::{GrowthRecord, Metric};
use crate::rng::{substream, Purpose, SimRng};
use crate::snapshot::{SizeSnapshot, SnapshotRow};

/// Per-firm dynamic quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FirmState {
    /// Employees.
    pub size: u64,
    pub job_offer: u64,
    pub planned_output: f64,
    /// Goods produced this iteration.
    pub output: f64,
    /// Goods sold this iteration, never above `output`.
    pub sold: f64,
    pub realized_margin: f64,
}

/// Result of one replacement pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Replacement {
    pub replaced: usize,
    /// Offer slots that should have been removed from survivors but did not
    /// exist. Non-zero only in degenerate, tiny systems.
    pub clamped_slots: u64,
}

/// Everything one iteration produced besides the new state.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub time: u64,
    pub records: Vec<GrowthRecord>,
    pub probabilities: MarketProbabilities,
    /// Workers placed by the job market.
    pub hired: u64,
    pub total_offers: u64,
    pub replacement: Replacement,
}

/// Firms, workers and the iteration counter.
#[derive(Debug, Clone)]
pub struct Economy {
    config: ModelConfig,
    firms: Vec<FirmState>,
    time: u64,
}

impl Economy {
    /// Spreads all workers as evenly as possible over the firms.
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n_firms as u64;
        let base = config.n_workers / n;
        let extra = (config.n_workers % n) as usize;
        let sizes = (0..config.n_firms).map(|i| base + u64::from(i < extra)).collect::<Vec<_>>();
        Self::with_sizes(config, &sizes)
    }

    /// Starts from explicit firm sizes, as if each firm had sold its
    /// expected share last period.
    pub fn with_sizes(config: ModelConfig, sizes: &[u64]) -> Result<Self> {
        config.validate()?;
        if sizes.len() != config.n_firms {
            return Err(Error::Config(format!(
                "expected {} initial sizes, got {}",
                config.n_firms,
                sizes.len()
            )));
        }
        let (w, p, mu) = (config.wage, config.price, config.margin);
        let firms = sizes
            .iter()
            .map(|&size| {
                let output = production(size, mu, w, p);
                let (sold, realized_margin) = match config.scenario {
                    Scenario::FirmsConsume => (output, mu),
                    Scenario::WorkersOnlyConsume => (size as f64 * w / p, 0.0),
                };
                FirmState { size, job_offer: size, planned_output: output, output, sold, realized_margin }
            })
            .collect();
        Ok(Self { config, firms, time: 0 })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn firms(&self) -> &[FirmState] {
        &self.firms
    }

    pub fn firms_mut(&mut self) -> &mut [FirmState] {
        &mut self.firms
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn total_employed(&self) -> u64 {
        self.firms.iter().map(|f| f.size).sum()
    }

    pub fn snapshot(&self) -> SizeSnapshot {
        SizeSnapshot::new(self.time, self.firms.iter().map(|f| f.size as f64))
    }

    pub fn rows(&self) -> Vec<SnapshotRow> {
        self.firms
            .iter()
            .enumerate()
            .map(|(id, f)| SnapshotRow { firm_id: id, size: f.size as f64, output: f.output, sold: f.sold })
            .collect()
    }

    fn stream(&self, purpose: Purpose) -> SimRng {
        substream(self.config.seed, self.time, purpose)
    }

    /// Advances one iteration in whichever scenario the economy is configured for.
    pub fn step(&mut self) -> Result<StepReport> {
        match self.config.scenario {
            Scenario::FirmsConsume => self.step_scenario_i(),
            Scenario::WorkersOnlyConsume => self.step_scenario_ii(),
        }
    }

    /// Workforce-shortage iteration: every firm asks for `size * (1 + margin)`
    /// workers, the workforce is matched at random against all offers, and
    /// all output sells.
    pub fn step_scenario_i(&mut self) -> Result<StepReport> {
        self.expect_scenario(Scenario::FirmsConsume)?;
        let cfg = self.config.clone();
        let mut offer_rng = self.stream(Purpose::Offers);
        for firm in &mut self.firms {
            firm.job_offer = match cfg.rounding {
                Rounding::Probabilistic => {
                    probabilistic_round(firm.size as f64 * (1.0 + cfg.margin), &mut offer_rng)
                }
                Rounding::PerUnit => per_unit_offer(firm.size, cfg.margin, &mut offer_rng)?,
            };
            firm.planned_output = production(firm.job_offer, cfg.margin, cfg.wage, cfg.price);
        }

        let before: Vec<u64> = self.firms.iter().map(|f| f.size).collect();
        let offers: Vec<u64> = self.firms.iter().map(|f| f.job_offer).collect();
        let total_offers: u64 = offers.iter().sum();
        let hired_by_firm =
            allocate_market(&offers, cfg.n_workers, cfg.allocation, &mut self.stream(Purpose::JobMarket));

        let mut aggregate_output = 0.0;
        for (firm, &hired) in self.firms.iter_mut().zip(&hired_by_firm) {
            firm.size = hired;
            firm.output = production(hired, cfg.margin, cfg.wage, cfg.price);
            firm.sold = firm.output;
            firm.realized_margin = cfg.margin;
            aggregate_output += firm.output;
        }
        let hired: u64 = hired_by_firm.iter().sum();
        let records = employee_records(&before, &hired_by_firm);
        let probabilities =
            MarketProbabilities::new(cfg.n_workers, total_offers, aggregate_output, aggregate_output);

        let replacement = self.replace_extinct(&mut self.stream(Purpose::Replacement))?;
        self.time += 1;
        Ok(StepReport { time: self.time, records, probabilities, hired, total_offers, replacement })
    }

    /// Demand-shortage iteration: only wages are spent, so goods compete for
    /// purchasing power and unsold goods are lost.
    pub fn step_scenario_ii(&mut self) -> Result<StepReport> {
        self.expect_scenario(Scenario::WorkersOnlyConsume)?;
        let cfg = self.config.clone();
        let (w, p, mu) = (cfg.wage, cfg.price, cfg.margin);

        let mut offer_rng = self.stream(Purpose::Offers);
        for firm in &mut self.firms {
            firm.planned_output = plan_production(firm.output, firm.realized_margin);
            let needed = required_workers(firm.planned_output, mu, w, p)?;
            firm.job_offer = probabilistic_round(needed, &mut offer_rng);
        }
        let replacement = self.replace_extinct(&mut self.stream(Purpose::Replacement))?;

        let before_size: Vec<u64> = self.firms.iter().map(|f| f.size).collect();
        let before_sold: Vec<f64> = self.firms.iter().map(|f| f.sold).collect();
        let offers: Vec<u64> = self.firms.iter().map(|f| f.job_offer).collect();
        let total_offers: u64 = offers.iter().sum();
        let sizes =
            allocate_market(&offers, cfg.n_workers, cfg.allocation, &mut self.stream(Purpose::JobMarket));

        let mut production_rng = self.stream(Purpose::Production);
        let mut goods = Vec::with_capacity(sizes.len());
        for (firm, &size) in self.firms.iter_mut().zip(&sizes) {
            firm.size = size;
            let units = match cfg.rounding {
                Rounding::Probabilistic => probabilistic_round(production(size, mu, w, p), &mut production_rng),
                Rounding::PerUnit => {
                    let per_worker = per_unit_offer(size, mu, &mut production_rng)?;
                    if w == p {
                        per_worker
                    } else {
                        probabilistic_round(per_worker as f64 * w / p, &mut production_rng)
                    }
                }
            };
            firm.output = units as f64;
            goods.push(units);
        }

        let hired: u64 = sizes.iter().sum();
        let aggregate_demand = hired as f64 * w;
        let aggregate_output = goods.iter().sum::<u64>() as f64 * p;
        let mut goods_rng = self.stream(Purpose::GoodsMarket);
        let demand_units = probabilistic_round(aggregate_demand / p, &mut goods_rng);
        let sold = allocate_market(&goods, demand_units, cfg.allocation, &mut goods_rng);

        for (firm, &s) in self.firms.iter_mut().zip(&sold) {
            firm.sold = s as f64;
            firm.realized_margin = if firm.size > 0 { realized_margin(firm.sold, firm.size, w, p)? } else { 0.0 };
        }

        let mut records = employee_records(&before_size, &sizes);
        records.extend(before_sold.iter().zip(&sold).filter(|(b, _)| **b > 0.0).map(|(&b, &a)| {
            GrowthRecord { size_before: b, size_after: a as f64, metric: Metric::Sales }
        }));
        let probabilities = MarketProbabilities::new(cfg.n_workers, total_offers, aggregate_demand, aggregate_output);
        self.time += 1;
        Ok(StepReport { time: self.time, records, probabilities, hired, total_offers, replacement })
    }

    /// Restarts extinct firms with a size drawn uniformly from the
    /// replacement range and rounded probabilistically.
    ///
    /// With firms consuming, a firm is extinct when it has no employees, and
    /// the newcomer's offer simply adds to the next job market. With only
    /// workers consuming, a firm is extinct when it plans to hire nobody;
    /// the newcomer's offer is then taken from the offers of the survivors,
    /// every surviving slot being equally likely to go, so the total offer
    /// is unchanged.
    pub fn replace_extinct<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Replacement> {
        let cfg = &self.config;
        let (low, high) = (cfg.replacement_low, cfg.replacement_high);
        let draw_size = |rng: &mut R| {
            let x = if high > low { rng.random_range(low..=high) } else { low };
            probabilistic_round(x, rng).max(1)
        };
        match cfg.scenario {
            Scenario::FirmsConsume => {
                let (mu, w, p) = (cfg.margin, cfg.wage, cfg.price);
                let mut replaced = 0;
                for firm in self.firms.iter_mut().filter(|f| f.size == 0) {
                    let size = draw_size(rng);
                    let output = production(size, mu, w, p);
                    *firm = FirmState {
                        size,
                        job_offer: 0,
                        planned_output: output,
                        output,
                        sold: output,
                        realized_margin: mu,
                    };
                    replaced += 1;
                }
                Ok(Replacement { replaced, clamped_slots: 0 })
            }
            Scenario::WorkersOnlyConsume => {
                let extinct: Vec<usize> =
                    (0..self.firms.len()).filter(|&i| self.firms[i].job_offer == 0).collect();
                if extinct.is_empty() {
                    return Ok(Replacement::default());
                }
                let new_offers: Vec<u64> = extinct.iter().map(|_| draw_size(rng)).collect();
                let to_remove: u64 = new_offers.iter().sum();

                let survivor_offers: Vec<u64> = self.firms.iter().map(|f| f.job_offer).collect();
                let available: u64 = survivor_offers.iter().sum();
                let removed = to_remove.min(available);
                let kept = allocate_market(&survivor_offers, available - removed, Allocation::ExactMatching, rng);
                for (firm, k) in self.firms.iter_mut().zip(kept) {
                    firm.job_offer = k;
                }
                for (&i, &offer) in extinct.iter().zip(&new_offers) {
                    let firm = &mut self.firms[i];
                    firm.job_offer = offer;
                    firm.planned_output = production(offer, cfg.margin, cfg.wage, cfg.price);
                }
                Ok(Replacement { replaced: extinct.len(), clamped_slots: to_remove - removed })
            }
        }
    }

    fn expect_scenario(&self, scenario: Scenario) -> Result<()> {
        if self.config.scenario == scenario {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "economy is configured for {:?}, not {:?}",
                self.config.scenario, scenario
            )))
        }
    }
}

fn employee_records(before: &[u64], after: &[u64]) -> Vec<GrowthRecord> {
    before
        .iter()
        .zip(after)
        .filter(|(b, _)| **b > 0)
        .map(|(&b, &a)| GrowthRecord { size_before: b as f64, size_after: a as f64, metric: Metric::Employees })
        .collect()
}
