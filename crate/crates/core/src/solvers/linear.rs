use rayon::prelude::*;

use super::flow::FlowNetwork;
use super::{check_kind, dedup_sorted, detect_continuum, EquilibriumSet, SolverConfig};
use crate::error::Result;
use crate::linalg::dot;
use crate::market::{
    bang_per_buck_support, is_equilibrium, Economy, Equilibrium, ReportProfile, UtilityKind,
};
use crate::simplex;

/// Relative tie tolerance used when certifying a linear equilibrium.
const FINAL_TIE: f64 = 1e-9;
const MIN_STEP: f64 = 1e-13;

/// Desk-scale search for linear exchange equilibria (n, m <= 4 or so).
///
/// Every lattice price is tested by a max-flow feasibility check: each
/// agent's budget may only flow to its bang-per-buck commodities (all
/// commodities for a zero utility), and must exactly buy the supply.
/// Near-feasible prices are refined by a shrinking pattern search in which
/// the tie tolerance shrinks with the step. The result is never marked
/// exhaustive.
pub fn solve_linear_smallscale(
    economy: &Economy,
    reports: &ReportProfile,
    config: &SolverConfig,
) -> Result<EquilibriumSet> {
    check_kind(economy, reports, UtilityKind::Linear, "linear")?;
    economy.ensure_valid(false)?;
    let m = economy.commodities();
    let res = config.grid_resolution.max(2);
    let h = 1.0 / (res - 1) as f64;
    let tol = config.clearing_tol;

    let found: Vec<Equilibrium> = simplex::lattice(m, res)
        .par_iter()
        .filter_map(|p| {
            finalize(economy, reports, p, tol).or_else(|| {
                clearing(economy, reports, p, h)?;
                let q = refine(economy, reports, p, h, tol);
                finalize(economy, reports, &q, tol)
            })
        })
        .collect();

    let members = dedup_sorted(found);
    let family_note = detect_continuum(&members, |p| finalize(economy, reports, p, tol).is_some());
    Ok(EquilibriumSet {
        members,
        exhaustive: false,
        family_note,
    })
}

struct Clearing {
    deficit: f64,
    allocation: Vec<Vec<f64>>,
}

/// Max-flow market-clearing attempt at prices `p` (on the simplex). `None`
/// when some agent values a free commodity or a free commodity has no
/// willing holder.
fn clearing(economy: &Economy, reports: &ReportProfile, p: &[f64], tie: f64) -> Option<Clearing> {
    let (n, m) = (economy.agents(), economy.commodities());
    let source = 0;
    let sink = n + m + 1;
    let good = |j: usize| n + 1 + j;
    let mut g = FlowNetwork::new(n + m + 2);
    let mut eligible_free: Vec<Vec<usize>> = vec![Vec::new(); m];

    for (i, u) in reports.reports().iter().enumerate() {
        let alpha = u.alpha();
        g.add_edge(source, i + 1, dot(p, economy.endowment(i)));
        if u.is_zero() {
            for j in 0..m {
                if p[j] > 0.0 {
                    g.add_edge(i + 1, good(j), f64::INFINITY);
                } else {
                    eligible_free[j].push(i);
                }
            }
            continue;
        }
        if (0..m).any(|j| p[j] == 0.0 && alpha[j] > 0.0) {
            return None;
        }
        for j in bang_per_buck_support(alpha, p, tie) {
            g.add_edge(i + 1, good(j), f64::INFINITY);
        }
        for j in (0..m).filter(|&j| p[j] == 0.0) {
            eligible_free[j].push(i);
        }
    }
    let supply = economy.supply();
    let mut priced_total = 0.0;
    for j in 0..m {
        if p[j] > 0.0 {
            g.add_edge(good(j), sink, p[j] * supply[j]);
            priced_total += p[j] * supply[j];
        } else if eligible_free[j].is_empty() {
            return None;
        }
    }
    let flow = g.max_flow(source, sink);

    let mut allocation = vec![vec![0.0; m]; n];
    for (i, x) in allocation.iter_mut().enumerate() {
        for j in 0..m {
            if p[j] > 0.0 {
                x[j] = g.flow(i + 1, good(j)).max(0.0) / p[j];
            }
        }
    }
    // Free commodities go to the agents willing to hold them, in
    // proportion to what they brought.
    for j in (0..m).filter(|&j| p[j] == 0.0) {
        let takers = &eligible_free[j];
        let brought: f64 = takers.iter().map(|&i| economy.endowment(i)[j]).sum();
        for &i in takers {
            let share = if brought > 0.0 {
                economy.endowment(i)[j] / brought
            } else {
                1.0 / takers.len() as f64
            };
            allocation[i][j] = share * supply[j];
        }
    }
    Some(Clearing {
        deficit: (priced_total - flow).max(0.0),
        allocation,
    })
}

fn deficit(economy: &Economy, reports: &ReportProfile, p: &[f64], tie: f64) -> f64 {
    clearing(economy, reports, p, tie).map_or(f64::INFINITY, |c| c.deficit)
}

fn refine(economy: &Economy, reports: &ReportProfile, start: &[f64], h: f64, tol: f64) -> Vec<f64> {
    let dirs = simplex::transfer_directions(start.len());
    let mut p = start.to_vec();
    let mut step = h;
    while step > MIN_STEP {
        let mut cur = deficit(economy, reports, &p, step);
        if cur <= tol * 1e-3 && finalize(economy, reports, &p, tol).is_some() {
            return p;
        }
        let mut moved = false;
        for &(to, from) in &dirs {
            if let Some(q) = simplex::transfer(&p, to, from, step) {
                let fq = deficit(economy, reports, &q, step);
                if fq < cur {
                    p = q;
                    cur = fq;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    p
}

fn finalize(economy: &Economy, reports: &ReportProfile, p: &[f64], tol: f64) -> Option<Equilibrium> {
    let c = clearing(economy, reports, p, FINAL_TIE)?;
    if c.deficit > tol {
        return None;
    }
    is_equilibrium(economy, reports, p, &c.allocation, tol)
        .holds
        .then(|| Equilibrium::new(economy, p.to_vec(), c.allocation))
}
