use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;

/// Tolerance on `sum(alpha) == 1` for Cobb-Douglas exponents.
pub const CD_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityKind {
    Linear,
    Leontief,
    CobbDouglas,
}

impl UtilityKind {
    pub fn name(self) -> &'static str {
        match self {
            UtilityKind::Linear => "linear",
            UtilityKind::Leontief => "leontief",
            UtilityKind::CobbDouglas => "cobb_douglas",
        }
    }
}

impl fmt::Display for UtilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A utility function from one of the three supported families, with its
/// parameter vector.
///
/// * Linear: `u(x) = alpha . x`, `alpha >= 0` (zero allowed).
/// * Leontief: `u(x) = min_j x_j / alpha_j`, `alpha > 0`.
/// * Cobb-Douglas: `u(x) = prod_j x_j^alpha_j`, `alpha` on the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityFunction {
    kind: UtilityKind,
    alpha: Vec<f64>,
}

impl UtilityFunction {
    pub fn new(kind: UtilityKind, alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidUtility("empty parameter vector".into()));
        }
        if let Some(j) = alpha.iter().position(|a| !a.is_finite()) {
            return Err(Error::InvalidUtility(format!("alpha[{j}] is not finite")));
        }
        match kind {
            UtilityKind::Linear => {
                if let Some(j) = alpha.iter().position(|&a| a < 0.0) {
                    return Err(Error::InvalidUtility(format!(
                        "linear alpha[{j}] = {} is negative",
                        alpha[j]
                    )));
                }
            }
            UtilityKind::Leontief => {
                if let Some(j) = alpha.iter().position(|&a| a <= 0.0) {
                    return Err(Error::InvalidUtility(format!(
                        "Leontief alpha[{j}] = {} is not strictly positive",
                        alpha[j]
                    )));
                }
            }
            UtilityKind::CobbDouglas => {
                if let Some(j) = alpha.iter().position(|&a| !(0.0..=1.0).contains(&a)) {
                    return Err(Error::InvalidUtility(format!(
                        "Cobb-Douglas alpha[{j}] = {} is outside [0, 1]",
                        alpha[j]
                    )));
                }
                let s: f64 = alpha.iter().sum();
                if (s - 1.0).abs() > CD_SUM_TOL {
                    return Err(Error::InvalidUtility(format!(
                        "Cobb-Douglas exponents sum to {s}, not 1"
                    )));
                }
            }
        }
        Ok(UtilityFunction { kind, alpha })
    }

    pub fn linear(alpha: Vec<f64>) -> Result<Self> {
        Self::new(UtilityKind::Linear, alpha)
    }

    pub fn leontief(alpha: Vec<f64>) -> Result<Self> {
        Self::new(UtilityKind::Leontief, alpha)
    }

    pub fn cobb_douglas(alpha: Vec<f64>) -> Result<Self> {
        Self::new(UtilityKind::CobbDouglas, alpha)
    }

    pub fn kind(&self) -> UtilityKind {
        self.kind
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn commodities(&self) -> usize {
        self.alpha.len()
    }

    /// Whether the function assigns positive weight to commodity `j`.
    pub fn desires(&self, j: usize) -> bool {
        self.alpha[j] > 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0.0)
    }

    /// Evaluates the utility of `bundle`. For Cobb-Douglas, `0^0 = 1`.
    pub fn eval(&self, bundle: &[f64]) -> Result<f64> {
        self.check_len(bundle.len())?;
        Ok(match self.kind {
            UtilityKind::Linear => dot(&self.alpha, bundle),
            UtilityKind::Leontief => self
                .alpha
                .iter()
                .zip(bundle)
                .map(|(a, x)| x / a)
                .fold(f64::INFINITY, f64::min),
            UtilityKind::CobbDouglas => self
                .alpha
                .iter()
                .zip(bundle)
                .filter(|(a, _)| **a > 0.0)
                .map(|(a, x)| x.powf(*a))
                .product(),
        })
    }

    /// Maximum utility attainable on the budget set `{x >= 0 : p.x <= budget}`.
    /// Infinite when demand is unbounded.
    pub fn indirect_utility(&self, prices: &[f64], budget: f64) -> Result<f64> {
        self.check_len(prices.len())?;
        let valued_free = (0..prices.len()).any(|j| self.alpha[j] > 0.0 && prices[j] == 0.0);
        Ok(match self.kind {
            UtilityKind::Linear => {
                if valued_free {
                    f64::INFINITY
                } else {
                    let best = (0..prices.len())
                        .filter(|&j| prices[j] > 0.0)
                        .map(|j| self.alpha[j] / prices[j])
                        .fold(0.0, f64::max);
                    budget * best
                }
            }
            UtilityKind::Leontief => {
                let cost = dot(&self.alpha, prices);
                if cost <= 0.0 {
                    f64::INFINITY
                } else {
                    budget / cost
                }
            }
            UtilityKind::CobbDouglas => {
                if valued_free {
                    let priced_valued =
                        (0..prices.len()).any(|j| self.alpha[j] > 0.0 && prices[j] > 0.0);
                    if budget == 0.0 && priced_valued {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (0..prices.len())
                        .filter(|&j| self.alpha[j] > 0.0)
                        .map(|j| (self.alpha[j] * budget / prices[j]).powf(self.alpha[j]))
                        .product()
                }
            }
        })
    }

    /// Utility-maximizing demand at `prices` with income `budget`.
    pub fn demand(&self, prices: &[f64], budget: f64) -> Result<Demand> {
        self.check_len(prices.len())?;
        check_prices(prices)?;
        if !(budget >= 0.0 && budget.is_finite()) {
            return Err(Error::InvalidPrices(format!("budget {budget} is not a nonnegative number")));
        }
        let m = prices.len();
        let zero_priced: Vec<usize> = (0..m).filter(|&j| prices[j] == 0.0).collect();
        match self.kind {
            UtilityKind::CobbDouglas => {
                if let Some(&j) = zero_priced.iter().find(|&&j| self.alpha[j] > 0.0) {
                    let priced_valued = (0..m).any(|k| self.alpha[k] > 0.0 && prices[k] > 0.0);
                    // A broke agent who needs a priced good gets utility zero
                    // whatever it holds, so any affordable bundle is optimal.
                    if budget == 0.0 && priced_valued {
                        return Ok(Demand::WithFree {
                            bundle: vec![0.0; m],
                            free: zero_priced,
                        });
                    }
                    return Err(Error::UnboundedDemand { commodity: j });
                }
                let bundle: Vec<f64> = (0..m)
                    .map(|j| {
                        if self.alpha[j] > 0.0 {
                            self.alpha[j] * budget / prices[j]
                        } else {
                            0.0
                        }
                    })
                    .collect();
                if zero_priced.is_empty() {
                    Ok(Demand::Unique(bundle))
                } else {
                    Ok(Demand::WithFree {
                        bundle,
                        free: zero_priced,
                    })
                }
            }
            UtilityKind::Leontief => {
                let cost = dot(&self.alpha, prices);
                if cost <= 0.0 {
                    return Err(Error::ZeroValueBundle);
                }
                let scale = budget / cost;
                Ok(Demand::Unique(self.alpha.iter().map(|a| a * scale).collect()))
            }
            UtilityKind::Linear => {
                if self.is_zero() {
                    return Ok(Demand::BudgetSet { budget });
                }
                if let Some(&j) = zero_priced.iter().find(|&&j| self.alpha[j] > 0.0) {
                    return Err(Error::UnboundedDemand { commodity: j });
                }
                let support = bang_per_buck_support(&self.alpha, prices, 0.0);
                if support.len() == 1 && zero_priced.is_empty() {
                    let mut bundle = vec![0.0; m];
                    bundle[support[0]] = budget / prices[support[0]];
                    return Ok(Demand::Unique(bundle));
                }
                Ok(Demand::Spend {
                    support,
                    free: zero_priced,
                    budget,
                })
            }
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alpha.len(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Commodities with positive price maximizing `alpha_j / p_j`, ties within
/// relative tolerance `rel_tol`.
pub fn bang_per_buck_support(alpha: &[f64], prices: &[f64], rel_tol: f64) -> Vec<usize> {
    let best = (0..prices.len())
        .filter(|&j| prices[j] > 0.0)
        .map(|j| alpha[j] / prices[j])
        .fold(0.0, f64::max);
    (0..prices.len())
        .filter(|&j| prices[j] > 0.0 && alpha[j] / prices[j] >= best * (1.0 - rel_tol))
        .collect()
}

pub(crate) fn check_prices(prices: &[f64]) -> Result<()> {
    if prices.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidPrices("prices must be finite and nonnegative".into()));
    }
    if prices.iter().all(|&p| p == 0.0) {
        return Err(Error::InvalidPrices("prices are all zero".into()));
    }
    Ok(())
}

/// The optimal-choice set of one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Demand {
    /// A single optimal bundle.
    Unique(Vec<f64>),
    /// `bundle` is optimal, and so is any change to the `free` components.
    WithFree { bundle: Vec<f64>, free: Vec<usize> },
    /// Linear: spend all of `budget` on `support` in any split; `free`
    /// (zero-priced, unvalued) commodities may be taken in any amount.
    Spend {
        support: Vec<usize>,
        free: Vec<usize>,
        budget: f64,
    },
    /// Zero utility: every affordable bundle is optimal.
    BudgetSet { budget: f64 },
}

impl Demand {
    pub fn single_valued(&self) -> Option<&[f64]> {
        match self {
            Demand::Unique(x) => Some(x),
            _ => None,
        }
    }

    pub fn into_bundle(self) -> Option<Vec<f64>> {
        match self {
            Demand::Unique(x) => Some(x),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constructor_enforces_family_invariants() {
        assert!(UtilityFunction::linear(vec![0.0, 0.0]).is_ok());
        assert!(UtilityFunction::linear(vec![-1.0, 0.0]).is_err());
        assert!(UtilityFunction::leontief(vec![1.0, 0.0]).is_err());
        assert!(UtilityFunction::cobb_douglas(vec![0.5, 0.6]).is_err());
        assert!(UtilityFunction::cobb_douglas(vec![1.2, -0.2]).is_err());
        assert!(UtilityFunction::cobb_douglas(vec![0.85, 0.1, 0.05]).is_ok());
        assert!(UtilityFunction::cobb_douglas(vec![]).is_err());
    }

    #[test]
    fn eval_matches_known_values() {
        let u = UtilityFunction::cobb_douglas(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(close(u.eval(&[0.202, 0.202, 1.0]).unwrap(), 0.4495, 5e-4));
        let l = UtilityFunction::leontief(vec![1.0, 1.0]).unwrap();
        assert_eq!(l.eval(&[0.5, 0.5]).unwrap(), 0.5);
        let c = UtilityFunction::cobb_douglas(vec![1.0, 0.0]).unwrap();
        for x in [0.0, 0.3, 7.0] {
            assert_eq!(c.eval(&[x, 0.0]).unwrap(), x);
        }
        assert!(matches!(u.eval(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cobb_douglas_demand() {
        let eps = 0.01;
        let u = UtilityFunction::cobb_douglas(vec![0.5, 0.5]).unwrap();
        let d = u.demand(&[1.0, 1.0 / (2.0 * eps)], 1.0).unwrap();
        let x = d.single_valued().unwrap();
        assert!(close(x[0], 0.5, 1e-15) && close(x[1], eps, 1e-15));
        assert!(matches!(
            u.demand(&[1.0, 0.0], 1.0),
            Err(Error::UnboundedDemand { commodity: 1 })
        ));
        // broke agent facing a free valued good: anything affordable
        let w = UtilityFunction::cobb_douglas(vec![0.3, 0.7]).unwrap();
        assert_eq!(
            w.demand(&[1.0, 0.0], 0.0).unwrap(),
            Demand::WithFree {
                bundle: vec![0.0, 0.0],
                free: vec![1]
            }
        );
        // unvalued free good
        let v = UtilityFunction::cobb_douglas(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            v.demand(&[1.0, 0.0], 1.0).unwrap(),
            Demand::WithFree {
                bundle: vec![1.0, 0.0],
                free: vec![1]
            }
        );
    }

    #[test]
    fn linear_demand() {
        let u = UtilityFunction::linear(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            u.demand(&[1.0, 1.0], 1.0).unwrap(),
            Demand::Unique(vec![1.0, 0.0])
        );
        let t = UtilityFunction::linear(vec![1.0, 1.0]).unwrap();
        assert_eq!(
            t.demand(&[0.5, 0.5], 0.5).unwrap(),
            Demand::Spend {
                support: vec![0, 1],
                free: vec![],
                budget: 0.5
            }
        );
        assert!(matches!(
            t.demand(&[1.0, 0.0], 0.5),
            Err(Error::UnboundedDemand { commodity: 1 })
        ));
        let z = UtilityFunction::linear(vec![0.0, 0.0]).unwrap();
        assert_eq!(
            z.demand(&[1.0, 0.0], 0.9).unwrap(),
            Demand::BudgetSet { budget: 0.9 }
        );
    }

    #[test]
    fn leontief_demand() {
        let (eps, delta) = (0.01, 0.2);
        let u = UtilityFunction::leontief(vec![1.0, 1.0]).unwrap();
        let budget = delta * (1.0 - eps) + eps;
        let x = u.demand(&[delta, 1.0], budget).unwrap().into_bundle().unwrap();
        let k = (eps + delta - delta * eps) / (1.0 + delta);
        assert!(close(x[0], k, 1e-15) && close(x[1], k, 1e-15));
    }

    #[test]
    fn bad_prices_rejected() {
        let u = UtilityFunction::leontief(vec![1.0, 1.0]).unwrap();
        assert!(u.demand(&[0.0, 0.0], 1.0).is_err());
        assert!(u.demand(&[-1.0, 1.0], 1.0).is_err());
        assert!(u.demand(&[1.0, 1.0], -1.0).is_err());
    }

    #[test]
    fn indirect_utility_degenerate_cases() {
        let w = UtilityFunction::cobb_douglas(vec![0.3, 0.7]).unwrap();
        assert_eq!(w.indirect_utility(&[1.0, 0.0], 0.0).unwrap(), 0.0);
        assert_eq!(w.indirect_utility(&[1.0, 0.0], 1.0).unwrap(), f64::INFINITY);
        let z = UtilityFunction::linear(vec![0.0, 0.0]).unwrap();
        assert_eq!(z.indirect_utility(&[1.0, 0.0], 1.0).unwrap(), 0.0);
    }
}
