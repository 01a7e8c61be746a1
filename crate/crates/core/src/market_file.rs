//! Market description files.
//!
//! TOML (or the equivalent JSON object):
//!
//! ```toml
//! format = 1
//! market_kind = "cobb_douglas"   # linear | leontief | cobb_douglas
//! commodities = 2
//!
//! [[agents]]
//! endowment = [0.6, 0.3]
//! alpha = [0.5, 0.5]
//!
//! [[agents]]
//! endowment = [0.4, 0.7]
//! alpha = [0.2, 0.8]
//!
//! [deviation]                    # optional
//! agent = 1                      # 1-based
//! alpha = [0.9, 0.1]
//! ```
//!
//! Endowment columns must sum to 1; a column off by more than
//! [`RENORMALIZE_TOL`] is rescaled and a warning is returned.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{Economy, ReportProfile, UtilityFunction, UtilityKind, SUPPLY_TOL};

pub const FORMAT_VERSION: u32 = 1;
pub const RENORMALIZE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSpec {
    pub format: u32,
    pub market_kind: UtilityKind,
    pub commodities: usize,
    pub agents: Vec<AgentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub endowment: Vec<f64>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationSpec {
    /// 1-based agent index.
    pub agent: usize,
    pub alpha: Vec<f64>,
}

/// A loaded market: the economy, the optional deviation profile and any
/// loader warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedMarket {
    pub economy: Economy,
    /// 0-based deviating agent and the resulting report profile.
    pub deviation: Option<(usize, ReportProfile)>,
    pub warnings: Vec<String>,
}

impl MarketSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::MarketFile(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MarketFile(e.to_string()))
    }

    /// JSON if the document starts with `{`, TOML otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_toml(text)
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MarketFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("market spec serializes")
    }

    pub fn from_economy(economy: &Economy) -> Self {
        MarketSpec {
            format: FORMAT_VERSION,
            market_kind: economy.kind(),
            commodities: economy.commodities(),
            agents: economy
                .endowments()
                .iter()
                .zip(economy.utilities())
                .map(|(e, u)| AgentSpec {
                    endowment: e.clone(),
                    alpha: u.alpha().to_vec(),
                })
                .collect(),
            deviation: None,
        }
    }

    /// Builds the economy, renormalizing endowment columns if needed.
    pub fn load(&self) -> Result<LoadedMarket> {
        if self.format != FORMAT_VERSION {
            return Err(Error::MarketFile(format!(
                "unsupported format {} (expected {FORMAT_VERSION})",
                self.format
            )));
        }
        let m = self.commodities;
        let mut endowments: Vec<Vec<f64>> = self.agents.iter().map(|a| a.endowment.clone()).collect();
        if let Some(i) = endowments.iter().position(|e| e.len() != m) {
            return Err(Error::InvalidShape(format!(
                "agent {} endowment has {} entries, commodities = {m}",
                i + 1,
                endowments[i].len()
            )));
        }
        let utilities = self
            .agents
            .iter()
            .map(|a| UtilityFunction::new(self.market_kind, a.alpha.clone()))
            .collect::<Result<Vec<_>>>()?;

        let mut warnings = Vec::new();
        for j in 0..m {
            let sum: f64 = endowments.iter().map(|e| e[j]).sum();
            if (sum - 1.0).abs() <= SUPPLY_TOL || !(sum > 0.0) {
                continue;
            }
            if (sum - 1.0).abs() > RENORMALIZE_TOL {
                warnings.push(format!(
                    "endowment column {} sums to {sum}; renormalized to 1",
                    j + 1
                ));
            }
            for e in &mut endowments {
                e[j] /= sum;
            }
        }
        let economy = Economy::checked(endowments, utilities)?;

        let deviation = match &self.deviation {
            None => None,
            Some(d) => {
                if d.agent == 0 || d.agent > economy.agents() {
                    return Err(Error::AgentIndex {
                        agent: d.agent,
                        n: economy.agents(),
                    });
                }
                let report = UtilityFunction::new(self.market_kind, d.alpha.clone())?;
                let i = d.agent - 1;
                Some((i, economy.deviation(i, report)?))
            }
        };
        Ok(LoadedMarket {
            economy,
            deviation,
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
format = 1
market_kind = "cobb_douglas"
commodities = 2

[[agents]]
endowment = [0.6, 0.3]
alpha = [0.5, 0.5]

[[agents]]
endowment = [0.4, 0.7]
alpha = [0.2, 0.8]

[deviation]
agent = 2
alpha = [0.9, 0.1]
"#;

    #[test]
    fn parses_toml() {
        let loaded = MarketSpec::parse(EXAMPLE).unwrap().load().unwrap();
        assert!(loaded.warnings.is_empty());
        assert_eq!(loaded.economy.agents(), 2);
        let (i, profile) = loaded.deviation.unwrap();
        assert_eq!(i, 1);
        assert_eq!(profile.report(1).alpha(), &[0.9, 0.1]);
    }

    #[test]
    fn json_equivalent() {
        let spec = MarketSpec::parse(EXAMPLE).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(MarketSpec::parse(&json).unwrap(), spec);
    }

    #[test]
    fn renormalizes_with_warning() {
        let text = EXAMPLE.replace("[0.4, 0.7]", "[0.3, 0.7]");
        let loaded = MarketSpec::parse(&text).unwrap().load().unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert!(loaded.warnings[0].contains("column 1"));
        let col: f64 = loaded.economy.endowments().iter().map(|e| e[0]).sum();
        assert!((col - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(MarketSpec::parse("format = 1").is_err());
        assert!(MarketSpec::parse(&EXAMPLE.replace("format = 1", "format = 2"))
            .unwrap()
            .load()
            .is_err());
        assert!(MarketSpec::parse(&EXAMPLE.replace("agent = 2", "agent = 3"))
            .unwrap()
            .load()
            .is_err());
        assert!(MarketSpec::parse(&EXAMPLE.replace("cobb_douglas", "ces")).is_err());
    }

    #[test]
    fn round_trip() {
        let spec = MarketSpec::parse(EXAMPLE).unwrap();
        let economy = spec.load().unwrap().economy;
        let back = MarketSpec::parse(&MarketSpec::from_economy(&economy).to_toml())
            .unwrap()
            .load()
            .unwrap();
        assert_eq!(back.economy, economy);
    }
}
