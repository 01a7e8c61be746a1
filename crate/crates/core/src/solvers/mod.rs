//! Equilibrium computation for the three utility families, plus a
//! brute-force grid oracle used to cross-check the closed forms.

mod brute_force;
mod cobb_douglas;
mod flow;
mod leontief;
mod linear;

use serde::{Deserialize, Serialize};

pub use brute_force::brute_force_equilibrium;
pub use cobb_douglas::{cd_prices, solve_cd_2x2, solve_cobb_douglas, Cd2x2};
pub use leontief::solve_leontief;
pub use linear::solve_linear_smallscale;

use crate::market::{Economy, Equilibrium, ReportProfile};
use crate::simplex;

/// How the Cobb-Douglas price vector is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdMethod {
    /// Solve the reduced linear system of `p^T (E A^T - I) = 0` with `p_1` fixed.
    #[default]
    Direct,
    /// Damped iteration of `p_k <- sum_i alpha_ik (p . e_i)`.
    FixedPoint,
    /// First row of the adjugate of `E A^T - I`.
    Adjugate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub clearing_tol: f64,
    pub price_floor: f64,
    pub max_iterations: usize,
    pub grid_resolution: usize,
    pub cd_method: CdMethod,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            clearing_tol: 1e-8,
            price_floor: 0.0,
            max_iterations: 10_000,
            grid_resolution: 11,
            cd_method: CdMethod::Direct,
        }
    }
}

impl SolverConfig {
    pub fn with_grid(mut self, grid_resolution: usize) -> Self {
        self.grid_resolution = grid_resolution;
        self
    }

    pub fn with_tol(mut self, clearing_tol: f64) -> Self {
        self.clearing_tol = clearing_tol;
        self
    }

    pub fn with_method(mut self, cd_method: CdMethod) -> Self {
        self.cd_method = cd_method;
        self
    }
}

/// A set of verified equilibria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub members: Vec<Equilibrium>,
    /// Whether the set is known complete at the search resolution.
    pub exhaustive: bool,
    /// Set when a continuum of clearing prices was detected.
    pub family_note: Option<String>,
}

impl EquilibriumSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Member whose simplex-normalized prices are closest to `prices`
    /// (after normalizing), with the distance.
    pub fn nearest(&self, prices: &[f64]) -> Option<(&Equilibrium, f64)> {
        let target = simplex::normalize(prices)?;
        self.members
            .iter()
            .map(|e| (e, simplex::max_abs_diff(&e.simplex_prices(), &target)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Distinctness threshold for price vectors on the simplex.
pub(crate) const DEDUP_TOL: f64 = 1e-6;

/// Sorts lexicographically by price and drops near-duplicates.
pub(crate) fn dedup_sorted(mut found: Vec<Equilibrium>) -> Vec<Equilibrium> {
    found.sort_by(|a, b| {
        for (x, y) in a.prices.iter().zip(&b.prices) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut out: Vec<Equilibrium> = Vec::new();
    for e in found {
        if !out
            .iter()
            .any(|k| simplex::max_abs_diff(&k.prices, &e.prices) < DEDUP_TOL)
        {
            out.push(e);
        }
    }
    out
}

/// Looks for three distinct collinear clearing prices whose segment also
/// clears at interior sample points. `clears` decides a single price.
pub(crate) fn detect_continuum(
    members: &[Equilibrium],
    clears: impl Fn(&[f64]) -> bool,
) -> Option<String> {
    if members.len() < 3 {
        return None;
    }
    let a = &members[0].prices;
    for k in (2..members.len()).rev() {
        let c = &members[k].prices;
        let collinear = members[1..k]
            .iter()
            .any(|b| on_segment(a, &b.prices, c));
        if !collinear {
            continue;
        }
        let interior_clears = [0.1, 0.3, 0.5, 0.7, 0.9].iter().all(|&t| {
            let p: Vec<f64> = a.iter().zip(c).map(|(x, y)| (1.0 - t) * x + t * y).collect();
            clears(&p)
        });
        if interior_clears {
            return Some(format!(
                "continuum: every price on the segment from {a:?} to {c:?} clears the market"
            ));
        }
    }
    None
}

fn on_segment(a: &[f64], b: &[f64], c: &[f64]) -> bool {
    let d: Vec<f64> = c.iter().zip(a).map(|(x, y)| x - y).collect();
    let len2: f64 = d.iter().map(|x| x * x).sum();
    if len2 == 0.0 {
        return false;
    }
    let t = b
        .iter()
        .zip(a)
        .zip(&d)
        .map(|((bi, ai), di)| (bi - ai) * di)
        .sum::<f64>()
        / len2;
    if !(0.0..=1.0).contains(&t) {
        return false;
    }
    let dist = b
        .iter()
        .zip(a)
        .zip(&d)
        .fold(0.0_f64, |acc, ((bi, ai), di)| acc.max((ai + t * di - bi).abs()));
    dist < DEDUP_TOL
}

pub(crate) fn check_kind(
    economy: &Economy,
    reports: &ReportProfile,
    kind: crate::market::UtilityKind,
    name: &'static str,
) -> crate::Result<()> {
    economy.check_reports(reports)?;
    if reports.kind() != kind {
        return Err(crate::Error::KindMismatch { expected: name });
    }
    Ok(())
}
