use thiserror::Error;

use crate::market::Violation;

/// Errors raised by the market model, the solvers and the incentive engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid utility parameters: {0}")]
    InvalidUtility(String),

    #[error("invalid economy shape: {0}")]
    InvalidShape(String),

    #[error("economy violates its invariants: {}", join(.0))]
    InvalidEconomy(Vec<Violation>),

    #[error("positivity / strong competitiveness violated: {}", join(.0))]
    Regularity(Vec<Violation>),

    #[error("utility kinds are mixed; expected {expected}")]
    MixedKinds { expected: &'static str },

    #[error("invalid prices: {0}")]
    InvalidPrices(String),

    #[error("demand is unbounded: commodity {commodity} is valued but free")]
    UnboundedDemand { commodity: usize },

    #[error("Leontief bundle has zero value at these prices")]
    ZeroValueBundle,

    #[error("demand of agent {agent} is a correspondence, not a single bundle")]
    CorrespondenceDemand { agent: usize },

    #[error("operation requires {expected} utilities")]
    KindMismatch { expected: &'static str },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no equilibrium found (best residual {best_residual:e})")]
    NoEquilibrium { best_residual: f64 },

    #[error("adjugate price row has mixed signs")]
    MixedSignAdjugate,

    #[error("parameter {name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("agent index {agent} out of range for {n} agents")]
    AgentIndex { agent: usize, n: usize },

    #[error("reports differ from the truthful profile at agents {0:?}, expected at most one")]
    DeviationMismatch(Vec<usize>),

    #[error("market file: {0}")]
    MarketFile(String),

    #[error("truthful utility is zero; the incentive ratio is undefined")]
    ZeroTruthfulUtility,
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
