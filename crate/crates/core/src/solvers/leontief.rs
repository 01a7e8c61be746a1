use rayon::prelude::*;

use super::{check_kind, dedup_sorted, detect_continuum, EquilibriumSet, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::market::{excess_demand, is_equilibrium, Economy, Equilibrium, ReportProfile, UtilityKind};
use crate::simplex;

/// Multi-start projected price adjustment `p <- proj(p + step * z(p))`,
/// seeded from a simplex lattice. Returns every distinct clearing price
/// found, and flags a continuum when one is detected.
pub fn solve_leontief(
    economy: &Economy,
    reports: &ReportProfile,
    config: &SolverConfig,
) -> Result<EquilibriumSet> {
    check_kind(economy, reports, UtilityKind::Leontief, "Leontief")?;
    economy.ensure_valid(false)?;
    let m = economy.commodities();
    let seeds = simplex::lattice(m, config.grid_resolution.max(2));

    let runs: Vec<(Option<Vec<f64>>, f64)> = seeds
        .par_iter()
        .map(|seed| adjust(economy, reports, seed, config))
        .collect();

    let best_residual = runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let found: Vec<Equilibrium> = runs
        .into_iter()
        .filter_map(|(p, _)| p)
        .filter_map(|p| certify(economy, reports, p, config.clearing_tol))
        .collect();
    if found.is_empty() {
        return Err(Error::NoEquilibrium { best_residual });
    }
    let members = dedup_sorted(found);
    let family_note = detect_continuum(&members, |p| {
        residual(economy, reports, p) <= config.clearing_tol
    });
    Ok(EquilibriumSet {
        members,
        exhaustive: false,
        family_note,
    })
}

fn residual(economy: &Economy, reports: &ReportProfile, p: &[f64]) -> f64 {
    match excess_demand(economy, reports, p) {
        Ok(z) => z.iter().fold(0.0, |a, v| a.max(v.abs())),
        Err(_) => f64::INFINITY,
    }
}

fn floor_prices(p: Vec<f64>, floor: f64) -> Vec<f64> {
    if floor <= 0.0 {
        return p;
    }
    let clipped: Vec<f64> = p.iter().map(|x| x.max(floor)).collect();
    simplex::normalize(&clipped).unwrap_or(p)
}

/// Damped adjustment from one seed; halves the step whenever the residual
/// would grow. Returns the final price when it clears, and the residual.
fn adjust(
    economy: &Economy,
    reports: &ReportProfile,
    seed: &[f64],
    config: &SolverConfig,
) -> (Option<Vec<f64>>, f64) {
    let mut p = floor_prices(seed.to_vec(), config.price_floor);
    let mut r = residual(economy, reports, &p);
    let mut step = 0.5;
    for _ in 0..config.max_iterations {
        if r <= config.clearing_tol {
            return (Some(p), r);
        }
        let z = match excess_demand(economy, reports, &p) {
            Ok(z) => z,
            Err(_) => break,
        };
        let trial: Vec<f64> = p.iter().zip(&z).map(|(pj, zj)| pj + step * zj).collect();
        let trial = floor_prices(simplex::project(&trial), config.price_floor);
        let rt = residual(economy, reports, &trial);
        if rt < r {
            p = trial;
            r = rt;
            step = (step * 1.5).min(1.0);
        } else {
            step *= 0.5;
            if step < 1e-16 {
                break;
            }
        }
    }
    ((r <= config.clearing_tol).then_some(p), r)
}

fn certify(economy: &Economy, reports: &ReportProfile, p: Vec<f64>, tol: f64) -> Option<Equilibrium> {
    let allocation: Vec<Vec<f64>> = reports
        .reports()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            u.demand(&p, dot(&p, economy.endowment(i)))
                .ok()
                .and_then(|d| d.into_bundle())
        })
        .collect::<Option<_>>()?;
    is_equilibrium(economy, reports, &p, &allocation, tol)
        .holds
        .then(|| Equilibrium::new(economy, p, allocation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::UtilityFunction;

    fn leo(a: &[f64]) -> UtilityFunction {
        UtilityFunction::leontief(a.to_vec()).unwrap()
    }

    #[test]
    fn witness_market_is_a_continuum() {
        let eps = 0.01;
        let e = Economy::new(
            vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]],
            vec![leo(&[1.0, 1.0]), leo(&[1.0, 1.0])],
        )
        .unwrap();
        let set = solve_leontief(&e, &e.truthful(), &SolverConfig::default()).unwrap();
        assert!(set.family_note.is_some());
        let (mid, d) = set.nearest(&[1.0, 1.0]).unwrap();
        assert!(d < 1e-12);
        for x in &mid.allocation {
            assert!((x[0] - 0.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_pair_has_one_price() {
        let e = Economy::new(
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![leo(&[1.0, 2.0]), leo(&[2.0, 1.0])],
        )
        .unwrap();
        let set = solve_leontief(&e, &e.truthful(), &SolverConfig::default()).unwrap();
        assert_eq!(set.len(), 1, "{:?}", set.members);
        assert!(set.family_note.is_none());
        let p = set.members[0].simplex_prices();
        assert!((p[0] - 0.5).abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn autarky() {
        let e = Economy::new(vec![vec![1.0, 1.0]], vec![leo(&[1.0, 1.0])]).unwrap();
        let set = solve_leontief(&e, &e.truthful(), &SolverConfig::default()).unwrap();
        for eq in &set.members {
            assert!((eq.allocation[0][0] - 1.0).abs() < 1e-12);
            assert!((eq.allocation[0][1] - 1.0).abs() < 1e-12);
        }
        assert!(set.family_note.is_some());
    }
}
