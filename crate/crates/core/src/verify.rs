//! Randomized sweeps behind the verification suites: determinant budget
//! invariance and agreement between the Cobb-Douglas solver and the
//! brute-force oracle.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adjugate::{budget_determinant, check_budget_invariance};
use crate::error::Result;
use crate::sampling::{random_exponents, sample_cd_economy, sample_rng};
use crate::solvers::{brute_force_equilibrium, solve_cobb_douglas, SolverConfig};

pub const BUDGET_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetSweepReport {
    pub samples: usize,
    pub max_agents: usize,
    pub max_commodities: usize,
    /// `|det - det'| / |det|`.
    pub worst_residual: f64,
    pub tolerance: f64,
    pub failures: usize,
    pub passed: bool,
}

/// Random markets (`1 <= n <= max_agents`, `2 <= m <= max_commodities`) with
/// one agent switching to random exponents.
pub fn budget_invariance_sweep(
    samples: usize,
    seed: u64,
    max_agents: usize,
    max_commodities: usize,
) -> Result<BudgetSweepReport> {
    let residuals: Vec<Result<f64>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k as u64);
            let n = rng.random_range(1..=max_agents);
            let m = rng.random_range(2..=max_commodities.max(2));
            let economy = sample_cd_economy(&mut rng, n, m, 1.0, 1e-3);
            let agent = rng.random_range(0..n);
            let mut deviant = economy.deviation(agent, random_exponents(&mut rng, m, 1.0))?;
            while !deviant.strongly_competitive() {
                deviant = economy.deviation(agent, random_exponents(&mut rng, m, 1.0))?;
            }
            let truthful = economy.truthful();
            let raw = check_budget_invariance(&economy, &truthful, &deviant, agent)?;
            let scale = budget_determinant(&economy, &truthful, agent)?.abs().max(f64::MIN_POSITIVE);
            Ok(raw / scale)
        })
        .collect();
    let residuals = residuals.into_iter().collect::<Result<Vec<_>>>()?;
    let failures = residuals.iter().filter(|r| !(**r <= BUDGET_TOL)).count();
    Ok(BudgetSweepReport {
        samples,
        max_agents,
        max_commodities,
        worst_residual: residuals.iter().fold(0.0, |a, r| a.max(*r)),
        tolerance: BUDGET_TOL,
        failures,
        passed: failures == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSweepReport {
    pub samples: usize,
    /// Largest `|r_oracle - r_solver| / max(1, |r_solver|)` over price
    /// ratios `p_j / p_1`.
    pub worst_deviation: f64,
    pub tolerance: f64,
    pub failures: usize,
    pub passed: bool,
}

/// Brute-force oracle against the Cobb-Douglas solver on random markets
/// with `2 <= n <= 3` and `2 <= m <= max_commodities`.
pub fn oracle_sweep(samples: usize, seed: u64, max_commodities: usize) -> Result<OracleSweepReport> {
    let oracle_config = SolverConfig {
        grid_resolution: 41,
        max_iterations: 100_000,
        ..SolverConfig::default()
    };
    let deviations: Vec<Result<f64>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k as u64);
            let n = rng.random_range(2..=3);
            let m = rng.random_range(2..=max_commodities.max(2));
            let economy = sample_cd_economy(&mut rng, n, m, 1.0, 1e-2);
            let reports = economy.truthful();
            let solved = solve_cobb_douglas(&economy, &reports, &SolverConfig::default())?;
            let oracle = brute_force_equilibrium(&economy, &reports, &oracle_config)?;
            Ok(ratio_deviation(&solved.prices, &oracle.prices))
        })
        .collect();
    let deviations = deviations.into_iter().collect::<Result<Vec<_>>>()?;
    let failures = deviations.iter().filter(|d| !(**d <= ORACLE_TOL)).count();
    Ok(OracleSweepReport {
        samples,
        worst_deviation: deviations.iter().fold(0.0, |a, d| a.max(*d)),
        tolerance: ORACLE_TOL,
        failures,
        passed: failures == 0,
    })
}

/// Relative disagreement of two price vectors on the ratios `p_j / p_1`.
pub fn ratio_deviation(reference: &[f64], other: &[f64]) -> f64 {
    reference
        .iter()
        .zip(other)
        .map(|(r, o)| {
            let a = r / reference[0];
            let b = o / other[0];
            (a - b).abs() / a.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}
