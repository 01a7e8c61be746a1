use super::SolverConfig;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::market::{excess_demand, Economy, Equilibrium, ReportProfile};
use crate::simplex;

/// Independent oracle: exhaustive lattice search of the price simplex for
/// the smallest excess demand, then a shrinking pattern search along
/// transfer directions. Needs single-valued demand at interior prices.
///
/// The refinement minimizes `|z|^2` (smooth); the reported residual is
/// `max_j |z_j|`.
pub fn brute_force_equilibrium(
    economy: &Economy,
    reports: &ReportProfile,
    config: &SolverConfig,
) -> Result<Equilibrium> {
    economy.check_reports(reports)?;
    let m = economy.commodities();
    let objective = |p: &[f64]| -> f64 {
        match excess_demand(economy, reports, p) {
            Ok(z) => z.iter().map(|v| v * v).sum(),
            Err(_) => f64::INFINITY,
        }
    };

    let res = config.grid_resolution.max(2);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for p in simplex::lattice(m, res) {
        let f = objective(&p);
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((p, f));
        }
    }
    let (mut p, mut f) = best.expect("nonempty lattice");
    if !f.is_finite() {
        return Err(Error::NoEquilibrium {
            best_residual: f64::INFINITY,
        });
    }

    let dirs = simplex::transfer_directions(m);
    let mut step = 1.0 / (res - 1) as f64;
    let mut iterations = 0;
    while step > 1e-16 && iterations < config.max_iterations {
        iterations += 1;
        let mut moved = false;
        for &(to, from) in &dirs {
            if let Some(q) = simplex::transfer(&p, to, from, step) {
                let fq = objective(&q);
                if fq < f {
                    p = q;
                    f = fq;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }

    let z = excess_demand(economy, reports, &p)?;
    let residual = z.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if residual > config.clearing_tol {
        return Err(Error::NoEquilibrium {
            best_residual: residual,
        });
    }
    let allocation = reports
        .reports()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            u.demand(&p, dot(&p, economy.endowment(i)))
                .ok()
                .and_then(|d| d.into_bundle())
                .ok_or(Error::CorrespondenceDemand { agent: i })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Equilibrium::new(economy, p, allocation))
}
