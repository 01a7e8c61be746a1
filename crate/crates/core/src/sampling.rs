//! Random Cobb-Douglas economies for property sweeps. Sample `k` of a
//! sweep with seed `s` always comes from ChaCha stream `k` of seed `s`, so
//! sweeps are reproducible and can run in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::market::{Economy, UtilityFunction};

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Symmetric Dirichlet draw; falls back to uniform on degenerate draws.
pub fn dirichlet<R: Rng>(rng: &mut R, dim: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    let g: Vec<f64> = (0..dim).map(|_| gamma.sample(rng)).collect();
    let s: f64 = g.iter().sum();
    if s > 0.0 && s.is_finite() {
        g.iter().map(|x| x / s).collect()
    } else {
        vec![1.0 / dim as f64; dim]
    }
}

/// Cobb-Douglas exponents on the simplex; tiny draws are rounded to zero
/// so the vector passes the family's validation.
pub fn random_exponents<R: Rng>(rng: &mut R, dim: usize, concentration: f64) -> UtilityFunction {
    let mut a = dirichlet(rng, dim, concentration);
    for v in a.iter_mut() {
        if *v < 1e-12 {
            *v = 0.0;
        }
    }
    let s: f64 = a.iter().sum();
    a.iter_mut().for_each(|v| *v /= s);
    UtilityFunction::cobb_douglas(a).expect("normalized exponents")
}

/// A Cobb-Douglas economy satisfying positivity (every endowment at least
/// roughly `min_endowment`) and strong competitiveness (by rejection).
pub fn sample_cd_economy<R: Rng>(
    rng: &mut R,
    agents: usize,
    commodities: usize,
    concentration: f64,
    min_endowment: f64,
) -> Economy {
    let mut endowments = vec![vec![0.0; commodities]; agents];
    for j in 0..commodities {
        let col = dirichlet(rng, agents, concentration);
        let floored: Vec<f64> = col.iter().map(|v| v.max(min_endowment)).collect();
        let s: f64 = floored.iter().sum();
        for i in 0..agents {
            endowments[i][j] = floored[i] / s;
        }
    }
    loop {
        let utilities: Vec<UtilityFunction> = (0..agents)
            .map(|_| random_exponents(rng, commodities, concentration))
            .collect();
        let competitive =
            (0..commodities).all(|j| utilities.iter().any(|u| u.desires(j)));
        if competitive {
            return Economy::new(endowments, utilities).expect("well-formed sample");
        }
    }
}
