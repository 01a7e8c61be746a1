use serde::{Deserialize, Serialize};

use super::economy::{Economy, ReportProfile};
use super::utility::check_prices;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::simplex;

/// A price vector with an allocation and its residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub prices: Vec<f64>,
    pub allocation: Vec<Vec<f64>>,
    /// `sum_i x_ij - sum_i e_ij`.
    pub clearing_residual: Vec<f64>,
    /// `p . x_i - p . e_i`.
    pub budget_residual: Vec<f64>,
}

impl Equilibrium {
    pub fn new(economy: &Economy, prices: Vec<f64>, allocation: Vec<Vec<f64>>) -> Self {
        let supply = economy.supply();
        let clearing_residual = (0..economy.commodities())
            .map(|j| allocation.iter().map(|x| x[j]).sum::<f64>() - supply[j])
            .collect();
        let budget_residual = allocation
            .iter()
            .zip(economy.endowments())
            .map(|(x, e)| dot(&prices, x) - dot(&prices, e))
            .collect();
        Equilibrium {
            prices,
            allocation,
            clearing_residual,
            budget_residual,
        }
    }

    pub fn max_clearing_residual(&self) -> f64 {
        self.clearing_residual
            .iter()
            .fold(0.0, |a, r| a.max(r.abs()))
    }

    /// Prices scaled to sum to one.
    pub fn simplex_prices(&self) -> Vec<f64> {
        simplex::normalize(&self.prices).unwrap_or_else(|| self.prices.clone())
    }

    /// Prices relative to commodity 1; `None` if its price is zero.
    pub fn price_ratios(&self) -> Option<Vec<f64>> {
        simplex::ratios_to_first(&self.prices)
    }

    pub fn bundle(&self, agent: usize) -> &[f64] {
        &self.allocation[agent]
    }

    /// Budget `p . e_i`.
    pub fn budget(&self, economy: &Economy, agent: usize) -> f64 {
        dot(&self.prices, economy.endowment(agent))
    }
}

/// Aggregate excess demand `z(p) = sum_i x_i(p, p . e_i) - supply`.
/// Errors when some agent's demand is not single-valued.
pub fn excess_demand(economy: &Economy, reports: &ReportProfile, prices: &[f64]) -> Result<Vec<f64>> {
    economy.check_reports(reports)?;
    if prices.len() != economy.commodities() {
        return Err(Error::DimensionMismatch {
            expected: economy.commodities(),
            found: prices.len(),
        });
    }
    let mut z: Vec<f64> = economy.supply().iter().map(|s| -s).collect();
    for (i, u) in reports.reports().iter().enumerate() {
        let budget = dot(prices, economy.endowment(i));
        let d = u.demand(prices, budget)?;
        let x = d
            .single_valued()
            .ok_or(Error::CorrespondenceDemand { agent: i })?;
        for (zj, xj) in z.iter_mut().zip(x) {
            *zj += xj;
        }
    }
    Ok(z)
}

/// Verdict of [`is_equilibrium`] with the residuals behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub clearing_residual: Vec<f64>,
    pub budget_residual: Vec<f64>,
    /// `max utility on the budget set - utility of the assigned bundle`,
    /// under the reported utilities.
    pub optimality_gap: Vec<f64>,
    pub failures: Vec<String>,
}

/// Checks market clearing, budget feasibility and optimality of every
/// agent's bundle under its reported utility.
///
/// Optimality is judged against the analytic maximum over the budget set,
/// so correspondence-valued demands (linear ties, free goods, zero
/// utility, broke Cobb-Douglas agents) are handled.
pub fn is_equilibrium(
    economy: &Economy,
    reports: &ReportProfile,
    prices: &[f64],
    allocation: &[Vec<f64>],
    tol: f64,
) -> Verdict {
    let (n, m) = (economy.agents(), economy.commodities());
    let mut failures = Vec::new();
    let shape_ok = reports.len() == n
        && prices.len() == m
        && allocation.len() == n
        && allocation.iter().all(|x| x.len() == m)
        && reports.reports().iter().all(|u| u.commodities() == m);
    if !shape_ok {
        return Verdict {
            holds: false,
            clearing_residual: vec![],
            budget_residual: vec![],
            optimality_gap: vec![],
            failures: vec!["dimension mismatch".into()],
        };
    }
    if let Err(e) = check_prices(prices) {
        failures.push(e.to_string());
    }
    let eq = Equilibrium::new(economy, prices.to_vec(), allocation.to_vec());
    let scale = prices.iter().fold(1.0_f64, |a, p| a.max(*p));

    for (j, r) in eq.clearing_residual.iter().enumerate() {
        if !(r.abs() <= tol) {
            failures.push(format!("commodity {j} does not clear (residual {r:e})"));
        }
    }
    for (i, x) in allocation.iter().enumerate() {
        if let Some(j) = x.iter().position(|v| !(*v >= -tol)) {
            failures.push(format!("agent {i} holds negative amount of commodity {j}"));
        }
    }
    for (i, r) in eq.budget_residual.iter().enumerate() {
        if !(*r <= tol * scale) {
            failures.push(format!("agent {i} overspends by {r:e}"));
        }
    }
    let mut gaps = Vec::with_capacity(n);
    for i in 0..n {
        let u = reports.report(i);
        let budget = dot(prices, economy.endowment(i));
        let clipped: Vec<f64> = allocation[i].iter().map(|v| v.max(0.0)).collect();
        let best = u.indirect_utility(prices, budget);
        let got = u.eval(&clipped);
        match (best, got) {
            (Ok(best), Ok(got)) => {
                let gap = best - got;
                gaps.push(gap);
                if !(gap <= tol * best.abs().max(1.0)) {
                    failures.push(format!(
                        "agent {i} is not optimizing (gap {gap:e}, best {best})"
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                gaps.push(f64::NAN);
                failures.push(format!("agent {i}: {e}"));
            }
        }
    }
    Verdict {
        holds: failures.is_empty(),
        clearing_residual: eq.clearing_residual,
        budget_residual: eq.budget_residual,
        optimality_gap: gaps,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::UtilityFunction;

    fn linear_example(eps: f64) -> Economy {
        Economy::new(
            vec![vec![eps, 1.0 - eps], vec![1.0 - eps, eps]],
            vec![
                UtilityFunction::linear(vec![1.0, 0.0]).unwrap(),
                UtilityFunction::linear(vec![0.0, 0.0]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn linear_example_both_equilibria_verify() {
        let eps = 0.1;
        let e = linear_example(eps);
        let r = e.truthful();
        let v = is_equilibrium(
            &e,
            &r,
            &[1.0, 0.0],
            &[vec![eps, 1.0 - eps], vec![1.0 - eps, eps]],
            1e-8,
        );
        assert!(v.holds, "{:?}", v.failures);
        let v = is_equilibrium(&e, &r, &[1.0, 1.0], &[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-8);
        assert!(v.holds, "{:?}", v.failures);
    }

    #[test]
    fn overspending_is_rejected() {
        let cd = |a: &[f64]| UtilityFunction::cobb_douglas(a.to_vec()).unwrap();
        let e = Economy::new(
            vec![vec![0.99, 0.01, 0.01], vec![0.01, 0.99, 0.99]],
            vec![cd(&[0.2, 0.3, 0.5]), cd(&[0.4, 0.6, 0.0])],
        )
        .unwrap();
        let v = is_equilibrium(
            &e,
            &e.truthful(),
            &[0.398, 0.597, 0.201],
            &[vec![1.0, 1.0, 1.0], vec![0.0, 0.0, 0.0]],
            1e-8,
        );
        assert!(!v.holds);
        assert!(v.failures.iter().any(|f| f.contains("agent 0 overspends")));
    }

    #[test]
    fn excess_demand_symmetric_market_clears() {
        let cd = |a: &[f64]| UtilityFunction::cobb_douglas(a.to_vec()).unwrap();
        let e = Economy::new(
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            vec![cd(&[0.5, 0.5]), cd(&[0.5, 0.5])],
        )
        .unwrap();
        let z = excess_demand(&e, &e.truthful(), &[1.0, 1.0]).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn excess_demand_rejects_correspondences() {
        let e = linear_example(0.1);
        assert!(matches!(
            excess_demand(&e, &e.truthful(), &[1.0, 1.0]),
            Err(Error::CorrespondenceDemand { agent: 1 })
        ));
    }
}
