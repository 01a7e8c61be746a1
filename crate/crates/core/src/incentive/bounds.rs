use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::optimizer::{incentive_ratio_cd, OptimizerConfig, RatioQuery};
use crate::error::{Error, Result};
use crate::market::Economy;
use crate::sampling::{sample_cd_economy, sample_rng};

/// `e^(1/e)`, the two-commodity bound.
pub const E_TO_ONE_OVER_E: f64 = 1.444_667_861_009_766_2;

/// Slack allowed on the bounds for optimizer round-off.
const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub agents: usize,
    pub commodities: usize,
    pub samples: usize,
    pub seed: u64,
    /// Symmetric Dirichlet concentration for endowment columns and exponents.
    pub concentration: f64,
    pub min_endowment: f64,
    /// Economies evaluated before the random draws (same shape required).
    pub anchors: Vec<Economy>,
    /// Agent whose ratio is measured in every sample.
    pub agent: usize,
    pub optimizer: OptimizerConfig,
}

impl SamplerConfig {
    pub fn new(agents: usize, commodities: usize, samples: usize, seed: u64) -> Self {
        SamplerConfig {
            agents,
            commodities,
            samples,
            seed,
            concentration: 1.0,
            min_endowment: 1e-3,
            anchors: Vec::new(),
            agent: 0,
            optimizer: OptimizerConfig::default(),
        }
    }

    /// Draws random sample `index`.
    pub fn sample(&self, index: usize) -> Economy {
        let mut rng = sample_rng(self.seed, index as u64);
        sample_cd_economy(
            &mut rng,
            self.agents,
            self.commodities,
            self.concentration,
            self.min_endowment,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub anchor: bool,
    pub ratio: f64,
    pub best_report: Vec<f64>,
    pub budget_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub agents: usize,
    pub commodities: usize,
    pub evaluated: usize,
    /// `m`.
    pub bound: f64,
    /// `e^(1/e)` when `m = 2`.
    pub two_commodity_bound: Option<f64>,
    pub tolerance: f64,
    pub max_ratio: f64,
    pub argmax_index: usize,
    pub argmax_economy: Economy,
    pub argmax_report: Vec<f64>,
    pub worst_budget_residual: f64,
    pub violations: usize,
    pub outcomes: Vec<SampleOutcome>,
    pub passed: bool,
}

/// Runs the ratio search on anchors plus random markets and checks every
/// ratio against `m` (and `e^(1/e)` for two commodities).
pub fn verify_upper_bound_m(config: &SamplerConfig) -> Result<BoundReport> {
    let (n, m) = (config.agents, config.commodities);
    if n == 0 || m == 0 {
        return Err(Error::InvalidShape("sampler needs n, m >= 1".into()));
    }
    if let Some(a) = config
        .anchors
        .iter()
        .find(|a| a.agents() != n || a.commodities() != m)
    {
        return Err(Error::InvalidShape(format!(
            "anchor is {}x{}, sampler is {n}x{m}",
            a.agents(),
            a.commodities()
        )));
    }
    let agent = config.agent;
    let economies: Vec<(bool, Economy)> = config
        .anchors
        .iter()
        .cloned()
        .map(|e| (true, e))
        .chain((0..config.samples).map(|k| (false, config.sample(k))))
        .collect();

    let results: Vec<Result<SampleOutcome>> = economies
        .par_iter()
        .enumerate()
        .map(|(index, (anchor, economy))| {
            let q = RatioQuery::with_optimizer(economy.clone(), agent, config.optimizer.clone())?;
            let r = incentive_ratio_cd(&q)?;
            Ok(SampleOutcome {
                index,
                anchor: *anchor,
                ratio: r.ratio,
                best_report: r.best_report.alpha().to_vec(),
                budget_residual: r.budget_residual,
            })
        })
        .collect();
    let outcomes = results.into_iter().collect::<Result<Vec<_>>>()?;

    let bound = m as f64;
    let two_commodity_bound = (m == 2).then_some(E_TO_ONE_OVER_E);
    let limit = two_commodity_bound.unwrap_or(bound).min(bound) + BOUND_SLACK;
    let violations = outcomes.iter().filter(|o| !(o.ratio <= limit)).count();
    let (argmax_index, max_ratio) = outcomes
        .iter()
        .map(|o| (o.index, o.ratio))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let worst_budget_residual = outcomes.iter().fold(0.0_f64, |a, o| a.max(o.budget_residual));
    Ok(BoundReport {
        agents: n,
        commodities: m,
        evaluated: outcomes.len(),
        bound,
        two_commodity_bound,
        tolerance: BOUND_SLACK,
        max_ratio,
        argmax_index,
        argmax_economy: economies[argmax_index].1.clone(),
        argmax_report: outcomes[argmax_index].best_report.clone(),
        worst_budget_residual,
        violations,
        passed: violations == 0,
        outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub samples: usize,
    /// Largest `y ln x - x y / e` seen (log form of `x^y - e^(xy/e)`).
    pub worst_slack: f64,
    pub tolerance: f64,
    pub failures: usize,
    pub passed: bool,
}

/// Checks `x^y <= e^(xy/e)` on each pair, with `0^0 = 1`. The comparison
/// is done on logarithms so large exponents do not lose the equality case
/// `x = e` to rounding.
pub fn check_power_inequality(samples: &[(f64, f64)]) -> PowerReport {
    const TOL: f64 = 1e-12;
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for &(x, y) in samples {
        let lhs = if x == 0.0 {
            if y == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            y * x.ln()
        };
        let rhs = x * y / std::f64::consts::E;
        let slack = lhs - rhs;
        worst = worst.max(slack);
        if !(slack <= TOL) {
            failures += 1;
        }
    }
    PowerReport {
        samples: samples.len(),
        worst_slack: worst,
        tolerance: TOL,
        failures,
        passed: failures == 0,
    }
}

/// Uniform pairs from `[0, 10]^2`.
pub fn power_samples(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = sample_rng(seed, 0);
    (0..count)
        .map(|_| (rng.random_range(0.0..=10.0), rng.random_range(0.0..=10.0)))
        .collect()
}
