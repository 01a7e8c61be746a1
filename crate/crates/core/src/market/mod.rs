//! Domain types of exchange economies, demand and equilibrium checks.

mod economy;
mod equilibrium;
mod utility;

pub use economy::{
    regularity_violations, validate_economy, Economy, ReportProfile, Rule, Violation, SUPPLY_TOL,
};
pub(crate) use economy::require_regularity;
pub use equilibrium::{excess_demand, is_equilibrium, Equilibrium, Verdict};
pub use utility::{bang_per_buck_support, Demand, UtilityFunction, UtilityKind, CD_SUM_TOL};

/// Shorthand for [`UtilityFunction::eval`].
pub fn utility_eval(u: &UtilityFunction, bundle: &[f64]) -> crate::Result<f64> {
    u.eval(bundle)
}

/// Shorthand for [`UtilityFunction::demand`].
pub fn demand(u: &UtilityFunction, prices: &[f64], budget: f64) -> crate::Result<Demand> {
    u.demand(prices, budget)
}
