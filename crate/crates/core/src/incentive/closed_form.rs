use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sampling::sample_rng;
use crate::solvers::solve_cd_2x2;

/// `ratio = t1^alpha * t2^(1 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoByTwoRatio {
    pub t1: f64,
    pub t2: f64,
    pub ratio: f64,
}

/// Closed-form gain of agent 1 in the 2x2 Cobb-Douglas economy when it
/// reports `alpha_dev` instead of `alpha`; agent 2 has exponent `beta`,
/// agent 1 holds `(e11, e12)` and agent 2 the rest.
pub fn ratio_closed_form_2x2(
    alpha: f64,
    alpha_dev: f64,
    beta: f64,
    e11: f64,
    e12: f64,
) -> Result<TwoByTwoRatio> {
    // validates every parameter
    solve_cd_2x2(alpha, beta, e11, e12)?;
    solve_cd_2x2(alpha_dev, beta, e11, e12)?;
    let (e21, e22) = (1.0 - e11, 1.0 - e12);
    let t1 = alpha_dev * (alpha * e12 + beta * e22) / (alpha * (alpha_dev * e12 + beta * e22));
    let t2 = (1.0 - alpha_dev) * (1.0 - alpha * e11 - beta * e21)
        / ((1.0 - alpha) * (1.0 - alpha_dev * e11 - beta * e21));
    Ok(TwoByTwoRatio {
        t1,
        t2,
        ratio: t1.powf(alpha) * t2.powf(1.0 - alpha),
    })
}

/// Same gain through the two equilibria: agent 1's true utility at the
/// deviant bundle over its true utility at the truthful bundle.
pub fn ratio_from_equilibria_2x2(
    alpha: f64,
    alpha_dev: f64,
    beta: f64,
    e11: f64,
    e12: f64,
) -> Result<f64> {
    let truthful = solve_cd_2x2(alpha, beta, e11, e12)?;
    let deviant = solve_cd_2x2(alpha_dev, beta, e11, e12)?;
    let u = |x: [f64; 2]| x[0].powf(alpha) * x[1].powf(1.0 - alpha);
    Ok(u(deviant.x1) / u(truthful.x1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactsReport {
    pub samples: usize,
    /// Violation counts for: alpha' >= alpha => t1 <= alpha'/alpha;
    /// alpha' < alpha => t1 < 1; alpha' >= alpha => t2 <= 1;
    /// alpha' < alpha => t2 < (1 - alpha')/(1 - alpha).
    pub violations: [usize; 4],
    pub max_ratio: f64,
    pub passed: bool,
}

/// Samples parameter tuples uniformly from `(0,1)^5` and checks the four
/// inequalities on `t1`, `t2` that bound the 2x2 gain by `e^(1/e)`.
pub fn check_two_by_two_facts(samples: usize, seed: u64) -> FactsReport {
    const SLACK: f64 = 1e-12;
    let mut rng = sample_rng(seed, 0);
    let mut violations = [0usize; 4];
    let mut max_ratio = 0.0_f64;
    let mut drawn = 0;
    while drawn < samples {
        let mut draw = || loop {
            let v: f64 = rng.random();
            if v > 0.0 {
                return v;
            }
        };
        let (a, ad, b, e11, e12) = (draw(), draw(), draw(), draw(), draw());
        let Ok(r) = ratio_closed_form_2x2(a, ad, b, e11, e12) else {
            continue;
        };
        drawn += 1;
        max_ratio = max_ratio.max(r.ratio);
        if ad >= a {
            if r.t1 > (ad / a) * (1.0 + SLACK) {
                violations[0] += 1;
            }
            if r.t2 > 1.0 + SLACK {
                violations[2] += 1;
            }
        } else {
            if !(r.t1 < 1.0) {
                violations[1] += 1;
            }
            if !(r.t2 < (1.0 - ad) / (1.0 - a)) {
                violations[3] += 1;
            }
        }
    }
    FactsReport {
        samples,
        violations,
        max_ratio,
        passed: violations.iter().all(|&v| v == 0),
    }
}
