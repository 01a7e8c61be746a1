//! Parametric markets whose incentive ratio grows without bound as the
//! parameter shrinks. Each returns a truthful and a deviant equilibrium
//! built from closed forms, both checked by the equilibrium verifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{is_equilibrium, Economy, Equilibrium, ReportProfile, UtilityFunction, UtilityKind, Verdict};
use crate::solvers::EquilibriumSet;

const CERTIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub family: UtilityKind,
    pub economy: Economy,
    pub truthful_reports: ReportProfile,
    pub deviant_reports: ReportProfile,
    pub truthful: Equilibrium,
    pub deviant: Equilibrium,
    pub truthful_verdict: Verdict,
    pub deviant_verdict: Verdict,
    /// Closed-form ratio for agent 1.
    pub ratio: f64,
}

impl Witness {
    fn build(
        family: UtilityKind,
        economy: Economy,
        deviant_reports: ReportProfile,
        truthful: (Vec<f64>, Vec<Vec<f64>>),
        deviant: (Vec<f64>, Vec<Vec<f64>>),
        ratio: f64,
    ) -> Self {
        let truthful_reports = economy.truthful();
        let truthful_verdict =
            is_equilibrium(&economy, &truthful_reports, &truthful.0, &truthful.1, CERTIFY_TOL);
        let deviant_verdict =
            is_equilibrium(&economy, &deviant_reports, &deviant.0, &deviant.1, CERTIFY_TOL);
        Witness {
            family,
            truthful: Equilibrium::new(&economy, truthful.0, truthful.1),
            deviant: Equilibrium::new(&economy, deviant.0, deviant.1),
            economy,
            truthful_reports,
            deviant_reports,
            truthful_verdict,
            deviant_verdict,
            ratio,
        }
    }

    pub fn certified(&self) -> bool {
        self.truthful_verdict.holds && self.deviant_verdict.holds
    }

    /// Agent 1's true utility at the deviant bundle over the truthful one.
    pub fn utility_ratio(&self) -> f64 {
        let u = self.economy.utility(0);
        u.eval(self.deviant.bundle(0)).unwrap_or(f64::NAN)
            / u.eval(self.truthful.bundle(0)).unwrap_or(f64::NAN)
    }

    pub fn equilibria(&self) -> EquilibriumSet {
        EquilibriumSet {
            members: vec![self.truthful.clone(), self.deviant.clone()],
            exhaustive: false,
            family_note: None,
        }
    }
}

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::OutOfRange {
            name,
            value: v,
            range: "(0, 1)",
        });
    }
    Ok(())
}

/// Linear market where agent 1 only values commodity 1 and agent 2 values
/// nothing. Both `p = (1, 0)` and `p = (1, 1)` are equilibria under the
/// same reports; the gain from the better one is `1 / epsilon`.
pub fn witness_linear(epsilon: f64) -> Result<Witness> {
    open_unit("epsilon", epsilon)?;
    let economy = Economy::new(
        vec![vec![epsilon, 1.0 - epsilon], vec![1.0 - epsilon, epsilon]],
        vec![
            UtilityFunction::linear(vec![1.0, 0.0])?,
            UtilityFunction::linear(vec![0.0, 0.0])?,
        ],
    )?;
    let reports = economy.truthful();
    Ok(Witness::build(
        UtilityKind::Linear,
        economy,
        reports,
        (
            vec![1.0, 0.0],
            vec![vec![epsilon, 1.0 - epsilon], vec![1.0 - epsilon, epsilon]],
        ),
        (vec![1.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
        1.0 / epsilon,
    ))
}

/// Leontief market with perfect complements on both sides. Every price
/// clears; selecting `p = (delta, 1)` against `p = (1, 1)` gives agent 1
/// the gain `(1 + delta) / (2 (epsilon + delta - delta epsilon))`.
pub fn witness_leontief(epsilon: f64, delta: f64) -> Result<Witness> {
    open_unit("epsilon", epsilon)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, inf)",
        });
    }
    let economy = Economy::new(
        vec![vec![1.0 - epsilon, epsilon], vec![epsilon, 1.0 - epsilon]],
        vec![
            UtilityFunction::leontief(vec![1.0, 1.0])?,
            UtilityFunction::leontief(vec![1.0, 1.0])?,
        ],
    )?;
    let reports = economy.truthful();
    let k1 = (epsilon + delta - delta * epsilon) / (1.0 + delta);
    let k2 = (1.0 - epsilon + delta * epsilon) / (1.0 + delta);
    Ok(Witness::build(
        UtilityKind::Leontief,
        economy,
        reports,
        (vec![delta, 1.0], vec![vec![k1, k1], vec![k2, k2]]),
        (vec![1.0, 1.0], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
        (1.0 + delta) / (2.0 * (epsilon + delta - delta * epsilon)),
    ))
}

/// Cobb-Douglas market with corner endowments. By announcing that it only
/// wants commodity 1, agent 1 drives the price of commodity 2 to zero,
/// wiping out agent 2's budget; the gain is `sqrt(2 / epsilon)`.
pub fn witness_cd(epsilon: f64) -> Result<Witness> {
    open_unit("epsilon", epsilon)?;
    let economy = Economy::new(
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![
            UtilityFunction::cobb_douglas(vec![0.5, 0.5])?,
            UtilityFunction::cobb_douglas(vec![epsilon, 1.0 - epsilon])?,
        ],
    )?;
    let deviant_reports = economy.deviation(0, UtilityFunction::cobb_douglas(vec![1.0, 0.0])?)?;
    Ok(Witness::build(
        UtilityKind::CobbDouglas,
        economy,
        deviant_reports,
        (
            vec![1.0, 1.0 / (2.0 * epsilon)],
            vec![vec![0.5, epsilon], vec![0.5, 1.0 - epsilon]],
        ),
        (vec![1.0, 0.0], vec![vec![1.0, 1.0], vec![0.0, 0.0]]),
        (2.0 / epsilon).sqrt(),
    ))
}
