use std::fmt;

use serde::{Deserialize, Serialize};

use super::utility::{UtilityFunction, UtilityKind};
use crate::error::{Error, Result};

/// Tolerance on the per-commodity supply normalization `sum_i e_ij = 1`.
pub const SUPPLY_TOL: f64 = 1e-12;

/// An exchange economy: `n` agents, `m` commodities, an endowment matrix
/// (row `i` is agent `i`'s bundle) and the agents' true utilities.
///
/// Construction checks shape only; value invariants are reported by
/// [`validate_economy`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Economy {
    endowments: Vec<Vec<f64>>,
    utilities: Vec<UtilityFunction>,
}

impl Economy {
    pub fn new(endowments: Vec<Vec<f64>>, utilities: Vec<UtilityFunction>) -> Result<Self> {
        let n = endowments.len();
        if n == 0 {
            return Err(Error::InvalidShape("no agents".into()));
        }
        let m = endowments[0].len();
        if m == 0 {
            return Err(Error::InvalidShape("no commodities".into()));
        }
        if let Some(i) = endowments.iter().position(|e| e.len() != m) {
            return Err(Error::InvalidShape(format!(
                "endowment of agent {i} has {} entries, expected {m}",
                endowments[i].len()
            )));
        }
        if utilities.len() != n {
            return Err(Error::InvalidShape(format!(
                "{} utilities for {n} agents",
                utilities.len()
            )));
        }
        if let Some(i) = utilities.iter().position(|u| u.commodities() != m) {
            return Err(Error::InvalidShape(format!(
                "utility of agent {i} has {} parameters, expected {m}",
                utilities[i].commodities()
            )));
        }
        check_single_kind(&utilities)?;
        Ok(Economy {
            endowments,
            utilities,
        })
    }

    /// [`Economy::new`] followed by a type-invariant check.
    pub fn checked(endowments: Vec<Vec<f64>>, utilities: Vec<UtilityFunction>) -> Result<Self> {
        let e = Self::new(endowments, utilities)?;
        e.ensure_valid(false)?;
        Ok(e)
    }

    pub fn agents(&self) -> usize {
        self.endowments.len()
    }

    pub fn commodities(&self) -> usize {
        self.endowments[0].len()
    }

    pub fn kind(&self) -> UtilityKind {
        self.utilities[0].kind()
    }

    pub fn endowments(&self) -> &[Vec<f64>] {
        &self.endowments
    }

    pub fn endowment(&self, i: usize) -> &[f64] {
        &self.endowments[i]
    }

    pub fn utilities(&self) -> &[UtilityFunction] {
        &self.utilities
    }

    pub fn utility(&self, i: usize) -> &UtilityFunction {
        &self.utilities[i]
    }

    /// Total supply of each commodity.
    pub fn supply(&self) -> Vec<f64> {
        (0..self.commodities())
            .map(|j| self.endowments.iter().map(|e| e[j]).sum())
            .collect()
    }

    /// Everyone reports truthfully.
    pub fn truthful(&self) -> ReportProfile {
        ReportProfile {
            reports: self.utilities.clone(),
        }
    }

    /// Everyone truthful except `agent`, who announces `report`.
    pub fn deviation(&self, agent: usize, report: UtilityFunction) -> Result<ReportProfile> {
        self.check_agent(agent)?;
        let mut reports = self.utilities.clone();
        reports[agent] = report;
        ReportProfile::new(reports)
    }

    pub fn check_agent(&self, agent: usize) -> Result<()> {
        if agent >= self.agents() {
            return Err(Error::AgentIndex {
                agent,
                n: self.agents(),
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_valid(&self, require_regularity: bool) -> Result<()> {
        let v = validate_economy(self, false);
        if !v.is_empty() {
            return Err(Error::InvalidEconomy(v));
        }
        if require_regularity {
            let v = validate_economy(self, true);
            if !v.is_empty() {
                return Err(Error::Regularity(v));
            }
        }
        Ok(())
    }

    /// Checks that `reports` fits this economy (count, dimension).
    pub(crate) fn check_reports(&self, reports: &ReportProfile) -> Result<()> {
        if reports.len() != self.agents() {
            return Err(Error::DimensionMismatch {
                expected: self.agents(),
                found: reports.len(),
            });
        }
        if let Some(u) = reports
            .reports()
            .iter()
            .find(|u| u.commodities() != self.commodities())
        {
            return Err(Error::DimensionMismatch {
                expected: self.commodities(),
                found: u.commodities(),
            });
        }
        Ok(())
    }
}

fn check_single_kind(utilities: &[UtilityFunction]) -> Result<()> {
    let kind = utilities[0].kind();
    if utilities.iter().any(|u| u.kind() != kind) {
        return Err(Error::MixedKinds {
            expected: kind.name(),
        });
    }
    Ok(())
}

/// The utilities each agent announces to the market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportProfile {
    reports: Vec<UtilityFunction>,
}

impl ReportProfile {
    pub fn new(reports: Vec<UtilityFunction>) -> Result<Self> {
        if reports.is_empty() {
            return Err(Error::InvalidShape("empty report profile".into()));
        }
        check_single_kind(&reports)?;
        Ok(ReportProfile { reports })
    }

    pub fn reports(&self) -> &[UtilityFunction] {
        &self.reports
    }

    pub fn report(&self, i: usize) -> &UtilityFunction {
        &self.reports[i]
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn kind(&self) -> UtilityKind {
        self.reports[0].kind()
    }

    /// Agents whose report differs from `other`.
    pub fn differing_agents(&self, other: &ReportProfile) -> Vec<usize> {
        (0..self.len().max(other.len()))
            .filter(|&i| self.reports.get(i) != other.reports.get(i))
            .collect()
    }

    /// Every commodity is desired by some reporting agent.
    pub fn strongly_competitive(&self) -> bool {
        let m = self.reports[0].commodities();
        (0..m).all(|j| self.reports.iter().any(|u| u.desires(j)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `e_ij` outside `[0, 1]`.
    EndowmentRange,
    /// `sum_i e_ij != 1`.
    SupplyNormalization,
    /// `e_ij > 0` required.
    PositiveEndowment,
    /// Some commodity is desired by no agent.
    StrongCompetitiveness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub agent: Option<usize>,
    pub commodity: Option<usize>,
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Rule::EndowmentRange => write!(
                f,
                "endowment e[{}][{}] = {} outside [0, 1]",
                self.agent.unwrap_or(0),
                self.commodity.unwrap_or(0),
                self.value
            ),
            Rule::SupplyNormalization => write!(
                f,
                "commodity {} has total supply {}, expected 1",
                self.commodity.unwrap_or(0),
                self.value
            ),
            Rule::PositiveEndowment => write!(
                f,
                "endowment e[{}][{}] = {} is not strictly positive",
                self.agent.unwrap_or(0),
                self.commodity.unwrap_or(0),
                self.value
            ),
            Rule::StrongCompetitiveness => write!(
                f,
                "commodity {} is desired by no agent",
                self.commodity.unwrap_or(0)
            ),
        }
    }
}

/// Lists every invariant the economy breaks. With `require_regularity`,
/// also checks strictly positive endowments and that each commodity is
/// desired by at least one agent.
pub fn validate_economy(economy: &Economy, require_regularity: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    let (n, m) = (economy.agents(), economy.commodities());
    for i in 0..n {
        for j in 0..m {
            let e = economy.endowments[i][j];
            if !(0.0..=1.0).contains(&e) {
                out.push(Violation {
                    rule: Rule::EndowmentRange,
                    agent: Some(i),
                    commodity: Some(j),
                    value: e,
                });
            }
        }
    }
    for (j, s) in economy.supply().into_iter().enumerate() {
        if !((s - 1.0).abs() <= SUPPLY_TOL) {
            out.push(Violation {
                rule: Rule::SupplyNormalization,
                agent: None,
                commodity: Some(j),
                value: s,
            });
        }
    }
    if require_regularity {
        out.extend(regularity_violations(economy, &economy.truthful()));
    }
    out
}

/// Positivity of endowments plus strong competitiveness of `reports`.
pub fn regularity_violations(economy: &Economy, reports: &ReportProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    for i in 0..economy.agents() {
        for j in 0..economy.commodities() {
            let e = economy.endowments[i][j];
            if e.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                out.push(Violation {
                    rule: Rule::PositiveEndowment,
                    agent: Some(i),
                    commodity: Some(j),
                    value: e,
                });
            }
        }
    }
    for j in 0..economy.commodities() {
        if !reports.reports().iter().any(|u| u.desires(j)) {
            out.push(Violation {
                rule: Rule::StrongCompetitiveness,
                agent: None,
                commodity: Some(j),
                value: 0.0,
            });
        }
    }
    out
}

/// Errors unless the economy is valid and the positivity and strong-competitiveness conditions
/// hold for `reports`.
pub(crate) fn require_regularity(economy: &Economy, reports: &ReportProfile) -> Result<()> {
    economy.ensure_valid(false)?;
    economy.check_reports(reports)?;
    let v = regularity_violations(economy, reports);
    if !v.is_empty() {
        return Err(Error::Regularity(v));
    }
    Ok(())
}
