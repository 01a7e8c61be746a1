use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adjugate::{budget_determinant, check_budget_invariance};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::market::{require_regularity, Economy, Equilibrium, ReportProfile, UtilityFunction, UtilityKind};
use crate::sampling::sample_rng;
use crate::simplex;
use crate::solvers::{cd_prices, solve_cobb_douglas, CdMethod, SolverConfig};

/// Floor applied to report coordinates when interior reports are required.
const INTERIOR_FLOOR: f64 = 1e-9;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Lattice points per simplex edge.
    pub grid_resolution: usize,
    pub refine_iterations: usize,
    pub refine_shrink: f64,
    /// Orders the pattern-search poll directions.
    pub seed: u64,
    /// Clip report coordinates below 1e-9 up to 1e-9 before evaluating.
    pub interior_reports: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_resolution: 21,
            refine_iterations: 200,
            refine_shrink: 0.5,
            seed: 0,
            interior_reports: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioQuery {
    pub economy: Economy,
    pub agent: usize,
    pub optimizer: OptimizerConfig,
}

impl RatioQuery {
    pub fn new(economy: Economy, agent: usize) -> Result<Self> {
        Self::with_optimizer(economy, agent, OptimizerConfig::default())
    }

    pub fn with_optimizer(economy: Economy, agent: usize, optimizer: OptimizerConfig) -> Result<Self> {
        economy.check_agent(agent)?;
        if optimizer.grid_resolution < 2 {
            return Err(Error::OutOfRange {
                name: "grid_resolution",
                value: optimizer.grid_resolution as f64,
                range: ">= 2",
            });
        }
        if !(optimizer.refine_shrink > 0.0 && optimizer.refine_shrink < 1.0) {
            return Err(Error::OutOfRange {
                name: "refine_shrink",
                value: optimizer.refine_shrink,
                range: "(0, 1)",
            });
        }
        Ok(RatioQuery {
            economy,
            agent,
            optimizer,
        })
    }
}

/// One evaluated report; `utility` is `None` when the report was skipped
/// because no agent would desire some commodity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub report: Vec<f64>,
    pub utility: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioResult {
    pub agent: usize,
    pub truthful_equilibrium: Equilibrium,
    pub truthful_utility: f64,
    pub best_report: UtilityFunction,
    pub deviant_equilibrium: Equilibrium,
    /// Utility of the deviant bundle under the agent's true utility.
    pub deviant_utility: f64,
    pub ratio: f64,
    /// Relative difference of the agent's determinant budget between the
    /// truthful and the best deviant profile.
    pub budget_residual: f64,
    pub trace: Vec<TraceEntry>,
}

/// Outcome of one fixed misreport.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationOutcome {
    pub agent: usize,
    pub report: UtilityFunction,
    pub truthful_equilibrium: Equilibrium,
    pub truthful_utility: f64,
    pub deviant_equilibrium: Equilibrium,
    pub deviant_utility: f64,
    pub ratio: f64,
    pub budget_residual: f64,
}

/// Solves the market truthfully and with `agent` announcing `report`, and
/// compares the agent's true utility across the two equilibria.
pub fn evaluate_deviation(
    economy: &Economy,
    agent: usize,
    report: &UtilityFunction,
) -> Result<DeviationOutcome> {
    economy.check_agent(agent)?;
    if economy.kind() != UtilityKind::CobbDouglas || report.kind() != UtilityKind::CobbDouglas {
        return Err(Error::KindMismatch {
            expected: "Cobb-Douglas",
        });
    }
    let truthful = economy.truthful();
    require_regularity(economy, &truthful)?;
    let config = SolverConfig::default();
    let truthful_equilibrium = solve_cobb_douglas(economy, &truthful, &config)?;
    let true_u = economy.utility(agent);
    let truthful_utility = true_u.eval(truthful_equilibrium.bundle(agent))?;
    if !(truthful_utility > 0.0) {
        return Err(Error::ZeroTruthfulUtility);
    }
    let deviant = economy.deviation(agent, report.clone())?;
    let deviant_equilibrium = solve_cobb_douglas(economy, &deviant, &config)?;
    let deviant_utility = true_u.eval(deviant_equilibrium.bundle(agent))?;
    let budget_residual = relative_budget_residual(economy, &truthful, &deviant, agent)?;
    Ok(DeviationOutcome {
        agent,
        report: report.clone(),
        truthful_equilibrium,
        truthful_utility,
        deviant_equilibrium,
        deviant_utility,
        ratio: deviant_utility / truthful_utility,
        budget_residual,
    })
}

fn relative_budget_residual(
    economy: &Economy,
    truthful: &ReportProfile,
    deviant: &ReportProfile,
    agent: usize,
) -> Result<f64> {
    let raw = check_budget_invariance(economy, truthful, deviant, agent)?;
    let scale = budget_determinant(economy, truthful, agent)?.abs().max(1.0);
    Ok(raw / scale)
}

/// Searches the agent's Cobb-Douglas reports for the largest true-utility
/// gain: an exhaustive simplex lattice, then a compass search along
/// transfer directions from the best lattice point. The truthful report is
/// always evaluated first, so the ratio is never below 1.
pub fn incentive_ratio_cd(query: &RatioQuery) -> Result<RatioResult> {
    let RatioQuery {
        economy,
        agent,
        optimizer,
    } = query;
    let agent = *agent;
    economy.check_agent(agent)?;
    if economy.kind() != UtilityKind::CobbDouglas {
        return Err(Error::KindMismatch {
            expected: "Cobb-Douglas",
        });
    }
    require_regularity(economy, &economy.truthful())?;

    let truth = economy.utility(agent).alpha().to_vec();
    let (n, m) = (economy.agents(), economy.commodities());
    let objective = Objective {
        economy,
        agent,
        interior: optimizer.interior_reports,
    };

    let mut trace = vec![TraceEntry {
        report: truth.clone(),
        utility: objective.eval(&truth),
    }];
    let mut best = (truth.clone(), trace[0].utility.unwrap_or(f64::NEG_INFINITY));

    // A lone agent keeps its endowment, and a single commodity leaves no
    // relative price to move; every report yields the truthful bundle.
    if n > 1 && m > 1 {
        let lattice = simplex::lattice(m, optimizer.grid_resolution);
        let values: Vec<Option<f64>> = lattice.par_iter().map(|a| objective.eval(a)).collect();
        for (a, v) in lattice.into_iter().zip(values) {
            if let Some(u) = v {
                if u > best.1 {
                    best = (a.clone(), u);
                }
            }
            trace.push(TraceEntry {
                report: a,
                utility: v,
            });
        }

        let mut dirs = simplex::transfer_directions(m);
        dirs.shuffle(&mut sample_rng(optimizer.seed, 0));
        let mut step = 1.0 / (optimizer.grid_resolution - 1) as f64;
        for _ in 0..optimizer.refine_iterations {
            if step < MIN_STEP {
                break;
            }
            let mut moved = false;
            for &(to, from) in &dirs {
                let Some(candidate) = simplex::transfer(&best.0, to, from, step) else {
                    continue;
                };
                let v = objective.eval(&candidate);
                trace.push(TraceEntry {
                    report: candidate.clone(),
                    utility: v,
                });
                if let Some(u) = v {
                    if u > best.1 {
                        best = (candidate, u);
                        moved = true;
                        break;
                    }
                }
            }
            if !moved {
                step *= optimizer.refine_shrink;
            }
        }
    }

    let best_report = UtilityFunction::cobb_douglas(objective.prepare(&best.0))?;
    let outcome = evaluate_deviation(economy, agent, &best_report)?;
    Ok(RatioResult {
        agent,
        truthful_equilibrium: outcome.truthful_equilibrium,
        truthful_utility: outcome.truthful_utility,
        best_report,
        deviant_equilibrium: outcome.deviant_equilibrium,
        deviant_utility: outcome.deviant_utility,
        ratio: outcome.ratio,
        budget_residual: outcome.budget_residual,
        trace,
    })
}

struct Objective<'a> {
    economy: &'a Economy,
    agent: usize,
    interior: bool,
}

impl Objective<'_> {
    fn prepare(&self, alpha: &[f64]) -> Vec<f64> {
        let a = if self.interior {
            alpha.iter().map(|v| v.max(INTERIOR_FLOOR)).collect()
        } else {
            alpha.to_vec()
        };
        simplex::normalize(&a).expect("nonzero report")
    }

    /// True utility of the agent's equilibrium bundle when it reports `alpha`.
    fn eval(&self, alpha: &[f64]) -> Option<f64> {
        let report = UtilityFunction::cobb_douglas(self.prepare(alpha)).ok()?;
        let reports = self.economy.deviation(self.agent, report).ok()?;
        if !reports.strongly_competitive() {
            return None;
        }
        let p = cd_prices(self.economy, &reports, CdMethod::Direct, 0).ok()?;
        let budget = dot(&p, self.economy.endowment(self.agent));
        let a = reports.report(self.agent).alpha();
        let bundle: Vec<f64> = a.iter().zip(&p).map(|(aj, pj)| aj * budget / pj).collect();
        self.economy.utility(self.agent).eval(&bundle).ok()
    }
}
