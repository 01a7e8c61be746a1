//! Cobb-Douglas equilibrium through the spending matrix `E A^T - I`.
//!
//! Equilibrium prices are left null vectors of the spending matrix, so
//! every row of its adjugate is proportional to the price vector. Replacing
//! the first column of the spending matrix by an agent's endowment and
//! taking the determinant gives that agent's budget on the same scale; this
//! quantity does not depend on what the agent reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::market::{Economy, ReportProfile, UtilityKind};

/// `M = E A^T - I_m`, entry `(j, k) = sum_i e_ij alpha_ik - [j == k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpendingMatrix(Matrix);

impl SpendingMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

pub fn build_spending_matrix(economy: &Economy, reports: &ReportProfile) -> Result<SpendingMatrix> {
    economy.check_reports(reports)?;
    if reports.kind() != UtilityKind::CobbDouglas {
        return Err(Error::KindMismatch {
            expected: "Cobb-Douglas",
        });
    }
    let m = economy.commodities();
    let mut mat = Matrix::from_fn(m, m, |j, k| if j == k { -1.0 } else { 0.0 });
    for (e, u) in economy.endowments().iter().zip(reports.reports()) {
        let a = u.alpha();
        for j in 0..m {
            if e[j] == 0.0 {
                continue;
            }
            for k in 0..m {
                mat[(j, k)] += e[j] * a[k];
            }
        }
    }
    Ok(SpendingMatrix(mat))
}

/// Classical adjugate: `adj[j][i] = (-1)^(i+j) det(minor(i, j))`.
/// The adjugate of a 1x1 matrix is `[[1]]`.
pub fn adjugate(m: &Matrix) -> Matrix {
    assert!(m.is_square(), "adjugate of a non-square matrix");
    let n = m.rows();
    if n == 1 {
        return Matrix::identity(1);
    }
    let mut adj = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[(j, i)] = sign * m.minor(i, j).determinant();
        }
    }
    adj
}

/// First adjugate row of the spending matrix, flipped to be nonnegative.
/// Proportional to the equilibrium prices; not normalized.
pub fn price_from_adjugate(economy: &Economy, reports: &ReportProfile) -> Result<Vec<f64>> {
    let spend = build_spending_matrix(economy, reports)?;
    let adj = adjugate(spend.matrix());
    sign_fixed(adj.row(0))
}

fn sign_fixed(row: &[f64]) -> Result<Vec<f64>> {
    let scale = row.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::MixedSignAdjugate);
    }
    let first = row.iter().find(|v| v.abs() > 0.0).copied().unwrap_or(0.0);
    let flip = if first < 0.0 { -1.0 } else { 1.0 };
    let out: Vec<f64> = row.iter().map(|v| v * flip).collect();
    if out.iter().any(|v| *v < -1e-12 * scale) {
        return Err(Error::MixedSignAdjugate);
    }
    Ok(out.into_iter().map(|v| v.max(0.0)).collect())
}

/// `det` of the spending matrix with column 1 replaced by `e_i`. Equals
/// `c * (p . e_i)` where `c * p` is the first adjugate row.
pub fn budget_determinant(economy: &Economy, reports: &ReportProfile, agent: usize) -> Result<f64> {
    economy.check_agent(agent)?;
    let mut mat = build_spending_matrix(economy, reports)?.into_inner();
    mat.set_column(0, economy.endowment(agent));
    Ok(mat.determinant())
}

/// Same quantity through the adjugate row: `adj(M)[0] . e_i`.
pub fn budget_from_adjugate_row(economy: &Economy, reports: &ReportProfile, agent: usize) -> Result<f64> {
    economy.check_agent(agent)?;
    let spend = build_spending_matrix(economy, reports)?;
    let adj = adjugate(spend.matrix());
    Ok(dot(adj.row(0), economy.endowment(agent)))
}

/// `|budget_determinant(truthful) - budget_determinant(deviant)|`, where
/// the profiles may differ only at `agent`.
pub fn check_budget_invariance(
    economy: &Economy,
    truthful: &ReportProfile,
    deviant: &ReportProfile,
    agent: usize,
) -> Result<f64> {
    let differ = truthful.differing_agents(deviant);
    if differ.iter().any(|&i| i != agent) {
        return Err(Error::DeviationMismatch(differ));
    }
    let a = budget_determinant(economy, truthful, agent)?;
    let b = budget_determinant(economy, deviant, agent)?;
    Ok((a - b).abs())
}

/// `prod_j (1 / alpha_j)^alpha_j` with `0^0` terms contributing 1. Lies in
/// `[1, m]`; `m` exactly at uniform weights, 1 at a point mass.
pub fn concentration_bound(alpha: &[f64]) -> f64 {
    let entropy: f64 = alpha
        .iter()
        .filter(|&&a| a > 0.0)
        .map(|&a| -a * a.ln())
        .sum();
    entropy.exp()
}
