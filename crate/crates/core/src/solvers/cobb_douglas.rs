use serde::{Deserialize, Serialize};

use super::{check_kind, CdMethod, SolverConfig};
use crate::adjugate::{build_spending_matrix, price_from_adjugate};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::market::{require_regularity, Economy, Equilibrium, ReportProfile, UtilityKind};
use crate::simplex;

/// The unique Cobb-Douglas equilibrium under positive endowments and
/// strongly competitive reports. Prices are on the unit simplex.
pub fn solve_cobb_douglas(
    economy: &Economy,
    reports: &ReportProfile,
    config: &SolverConfig,
) -> Result<Equilibrium> {
    check_kind(economy, reports, UtilityKind::CobbDouglas, "Cobb-Douglas")?;
    require_regularity(economy, reports)?;
    let prices = cd_prices(economy, reports, config.cd_method, config.max_iterations)?;
    let allocation = reports
        .reports()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let budget = dot(&prices, economy.endowment(i));
            u.alpha()
                .iter()
                .zip(&prices)
                .map(|(a, p)| a * budget / p)
                .collect()
        })
        .collect();
    Ok(Equilibrium::new(economy, prices, allocation))
}

/// Equilibrium prices normalized to the simplex. Assumes the caller has
/// checked positivity and strong competitiveness.
pub fn cd_prices(
    economy: &Economy,
    reports: &ReportProfile,
    method: CdMethod,
    max_iterations: usize,
) -> Result<Vec<f64>> {
    let raw = match method {
        CdMethod::Direct => direct(economy, reports)?,
        CdMethod::FixedPoint => fixed_point(economy, reports, max_iterations)?,
        CdMethod::Adjugate => price_from_adjugate(economy, reports)?,
    };
    if raw.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::NoEquilibrium {
            best_residual: f64::NAN,
        });
    }
    Ok(simplex::normalize(&raw).expect("positive prices"))
}

fn direct(economy: &Economy, reports: &ReportProfile) -> Result<Vec<f64>> {
    let m = economy.commodities();
    if m == 1 {
        return Ok(vec![1.0]);
    }
    let spend = build_spending_matrix(economy, reports)?;
    let mat = spend.matrix();
    // p^T M = 0 with p_0 = 1: columns k >= 1 give
    // sum_{j >= 1} p_j M[j][k] = -M[0][k].
    let reduced = Matrix::from_fn(m - 1, m - 1, |k, j| mat[(j + 1, k + 1)]);
    let rhs: Vec<f64> = (1..m).map(|k| -mat[(0, k)]).collect();
    let rest = reduced.solve(&rhs).ok_or(Error::NoEquilibrium {
        best_residual: f64::NAN,
    })?;
    let mut p = Vec::with_capacity(m);
    p.push(1.0);
    p.extend(rest);
    Ok(p)
}

fn fixed_point(economy: &Economy, reports: &ReportProfile, max_iterations: usize) -> Result<Vec<f64>> {
    let m = economy.commodities();
    let mut p = vec![1.0 / m as f64; m];
    let mut delta = f64::INFINITY;
    for _ in 0..max_iterations {
        let mut next = vec![0.0; m];
        for (i, u) in reports.reports().iter().enumerate() {
            let budget = dot(&p, economy.endowment(i));
            for (nk, a) in next.iter_mut().zip(u.alpha()) {
                *nk += a * budget;
            }
        }
        // lazy step: avoids oscillation on periodic spending structures
        let next: Vec<f64> = p.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        let next = simplex::normalize(&next).ok_or(Error::NoEquilibrium {
            best_residual: f64::NAN,
        })?;
        delta = simplex::max_abs_diff(&next, &p);
        p = next;
        if delta <= 4.0 * f64::EPSILON {
            return Ok(p);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
        residual: delta,
    })
}

/// Closed-form equilibrium of the two-agent, two-commodity Cobb-Douglas
/// economy with `p_1 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cd2x2 {
    pub p2: f64,
    pub x1: [f64; 2],
    pub x2: [f64; 2],
}

/// Agent 1 has exponents `(alpha, 1 - alpha)` and endowment `(e11, e12)`;
/// agent 2 has `(beta, 1 - beta)` and the complement.
pub fn solve_cd_2x2(alpha: f64, beta: f64, e11: f64, e12: f64) -> Result<Cd2x2> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("e11", e11), ("e12", e12)] {
        open_unit(name, v)?;
    }
    let (e21, e22) = (1.0 - e11, 1.0 - e12);
    let p2 = (1.0 - alpha * e11 - beta * e21) / (alpha * e12 + beta * e22);
    let b1 = e11 + e12 * p2;
    let b2 = e21 + e22 * p2;
    Ok(Cd2x2 {
        p2,
        x1: [alpha * b1, (1.0 - alpha) * b1 / p2],
        x2: [beta * b2, (1.0 - beta) * b2 / p2],
    })
}

pub(crate) fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::OutOfRange {
            name,
            value: v,
            range: "(0, 1)",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{is_equilibrium, UtilityFunction};

    fn cd(a: &[f64]) -> UtilityFunction {
        UtilityFunction::cobb_douglas(a.to_vec()).unwrap()
    }

    fn example() -> Economy {
        Economy::new(
            vec![vec![0.99, 0.01, 0.01], vec![0.01, 0.99, 0.99]],
            vec![cd(&[0.2, 0.3, 0.5]), cd(&[0.4, 0.6, 0.0])],
        )
        .unwrap()
    }

    #[test]
    fn example_truthful_prices() {
        let e = example();
        let eq = solve_cobb_douglas(&e, &e.truthful(), &SolverConfig::default()).unwrap();
        let r = eq.price_ratios().unwrap();
        assert!((r[1] - 1.5).abs() < 1e-12);
        assert!((r[2] - 0.505).abs() < 2e-3);
        let x = &eq.allocation[0];
        assert!((x[0] - 0.202).abs() < 2e-3 && (x[1] - 0.202).abs() < 2e-3 && (x[2] - 1.0).abs() < 2e-3);
        assert!(eq.max_clearing_residual() < 1e-14);
    }

    #[test]
    fn example_misreport_prices() {
        let e = example();
        let r = e.deviation(0, cd(&[0.85, 0.1, 0.05])).unwrap();
        let eq = solve_cobb_douglas(&e, &r, &SolverConfig::default()).unwrap();
        let ratio = eq.price_ratios().unwrap();
        assert!((ratio[1] - 0.3323).abs() < 2e-3);
        assert!((ratio[2] - 0.0497).abs() < 2e-3);
        let x = &eq.allocation[0];
        assert!((x[0] - 0.845).abs() < 2e-3 && (x[1] - 0.299).abs() < 2e-3 && (x[2] - 1.0).abs() < 2e-3);
    }

    #[test]
    fn methods_agree() {
        let e = example();
        for r in [e.truthful(), e.deviation(0, cd(&[0.85, 0.1, 0.05])).unwrap()] {
            let d = cd_prices(&e, &r, CdMethod::Direct, 0).unwrap();
            let f = cd_prices(&e, &r, CdMethod::FixedPoint, 1_000_000).unwrap();
            let a = cd_prices(&e, &r, CdMethod::Adjugate, 0).unwrap();
            assert!(simplex::max_abs_diff(&d, &f) < 1e-10, "{d:?} vs {f:?}");
            assert!(simplex::max_abs_diff(&d, &a) < 1e-12);
        }
    }

    #[test]
    fn symmetric_market() {
        let e = Economy::new(
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![cd(&[0.5, 0.5]), cd(&[0.5, 0.5])],
        )
        .unwrap();
        let eq = solve_cobb_douglas(&e, &e.truthful(), &SolverConfig::default()).unwrap();
        assert!((eq.prices[0] - eq.prices[1]).abs() < 1e-15);
        for x in &eq.allocation {
            assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_regularity_violation() {
        let e = Economy::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![cd(&[0.5, 0.5]), cd(&[0.5, 0.5])],
        )
        .unwrap();
        assert!(matches!(
            solve_cobb_douglas(&e, &e.truthful(), &SolverConfig::default()),
            Err(Error::Regularity(_))
        ));
    }

    #[test]
    fn two_by_two_formula() {
        let s = solve_cd_2x2(0.5, 0.5, 0.5, 0.5).unwrap();
        assert!((s.p2 - 1.0).abs() < 1e-15);
        let s = solve_cd_2x2(0.2, 0.4, 0.99, 0.01).unwrap();
        // (1 - .198 - .004) / (.002 + .396)
        assert!((s.p2 - 0.798 / 0.398).abs() < 1e-12);
        assert!(solve_cd_2x2(0.0, 0.4, 0.5, 0.5).is_err());
        assert!(solve_cd_2x2(0.3, 0.4, 1.0, 0.5).is_err());
    }

    #[test]
    fn two_by_two_is_an_equilibrium() {
        let (a, b, e11, e12) = (0.3, 0.7, 0.6, 0.2);
        let s = solve_cd_2x2(a, b, e11, e12).unwrap();
        let e = Economy::new(
            vec![vec![e11, e12], vec![1.0 - e11, 1.0 - e12]],
            vec![cd(&[a, 1.0 - a]), cd(&[b, 1.0 - b])],
        )
        .unwrap();
        let v = is_equilibrium(
            &e,
            &e.truthful(),
            &[1.0, s.p2],
            &[s.x1.to_vec(), s.x2.to_vec()],
            1e-10,
        );
        assert!(v.holds, "{:?}", v.failures);
    }
}
