//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::time::{Duration, Instant};

use rand::Rng;

use exchange_cli::{cmd_reproduce, cmd_verify, run, Suite, EXIT_VALIDATION};
use exchange_core::incentive::{
    check_power_inequality, check_two_by_two_facts, incentive_ratio_cd, power_samples,
    ratio_closed_form_2x2, ratio_from_equilibria_2x2, witness_cd, witness_leontief,
    witness_linear, RatioQuery,
};
use exchange_core::market::UtilityFunction;
use exchange_core::market_file::MarketSpec;
use exchange_core::sampling::sample_rng;
use exchange_core::solvers::{solve_cd_2x2, solve_cobb_douglas};
use exchange_core::verify::{budget_invariance_sweep, oracle_sweep};
use exchange_core::{Economy, SolverConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > limit {
        o.passed = false;
    }
    o.detail = format!("{}; {:.2?} (limit {:?})", o.detail, took, limit);
    o
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn a1() -> Outcome {
    timed(Duration::from_secs(1), || match cmd_reproduce() {
        Ok(r) => {
            let failing: Vec<&str> = r.failing().map(|c| c.name.as_str()).collect();
            let ratio = r.data["ratio"].as_f64().unwrap_or(f64::NAN);
            outcome(r.passed, format!("{} checks, failing {failing:?}, ratio {ratio:.6}", r.checks.len()))
        }
        Err(e) => outcome(false, e.to_string()),
    })
}

fn a2() -> Outcome {
    timed(Duration::from_secs(10), || {
        const N: usize = 10_000;
        let mut rng = sample_rng(2024, 0);
        let mut open = || loop {
            let v: f64 = rng.random();
            if v > 1e-3 && v < 1.0 - 1e-3 {
                return v;
            }
        };
        let (mut worst_solve, mut worst_ratio) = (0.0_f64, 0.0_f64);
        for _ in 0..N {
            let (a, a_dev, b, e11, e12) = (open(), open(), open(), open(), open());
            let closed = solve_cd_2x2(a, b, e11, e12).unwrap();
            let economy = Economy::new(
                vec![vec![e11, e12], vec![1.0 - e11, 1.0 - e12]],
                vec![
                    UtilityFunction::cobb_douglas(vec![a, 1.0 - a]).unwrap(),
                    UtilityFunction::cobb_douglas(vec![b, 1.0 - b]).unwrap(),
                ],
            )
            .unwrap();
            let eq = solve_cobb_douglas(&economy, &economy.truthful(), &SolverConfig::default()).unwrap();
            let mut d = rel(eq.prices[1] / eq.prices[0], closed.p2);
            for j in 0..2 {
                d = d.max(rel(eq.allocation[0][j], closed.x1[j]));
                d = d.max(rel(eq.allocation[1][j], closed.x2[j]));
            }
            worst_solve = worst_solve.max(d);
            let c = ratio_closed_form_2x2(a, a_dev, b, e11, e12).unwrap().ratio;
            let via = ratio_from_equilibria_2x2(a, a_dev, b, e11, e12).unwrap();
            worst_ratio = worst_ratio.max(rel(c, via));
        }
        let facts = check_two_by_two_facts(N, 7);
        outcome(
            worst_solve <= 1e-10 && worst_ratio <= 1e-10 && facts.passed,
            format!(
                "solver gap {worst_solve:.2e}, ratio gap {worst_ratio:.2e} (tol 1e-10); fact violations {:?}",
                facts.violations
            ),
        )
    })
}

fn a3() -> Outcome {
    timed(Duration::from_secs(30), || match budget_invariance_sweep(1000, 3, 5, 6) {
        Ok(r) => outcome(
            r.passed,
            format!("{} markets, worst relative residual {:.2e} (tol {:e})", r.samples, r.worst_residual, r.tolerance),
        ),
        Err(e) => outcome(false, e.to_string()),
    })
}

fn a4() -> Outcome {
    timed(Duration::from_secs(300), || match cmd_verify(Suite::Bounds, 1, Some(200), 21) {
        Ok(r) => {
            let shapes = r.data["bounds"]["shapes"].as_array().cloned().unwrap_or_default();
            let maxima: Vec<String> = shapes
                .iter()
                .map(|s| format!("{}x{}:{:.4}", s["agents"], s["commodities"], s["max_ratio"].as_f64().unwrap_or(f64::NAN)))
                .collect();
            let failing: Vec<&str> = r.failing().map(|c| c.name.as_str()).collect();
            outcome(r.passed, format!("200 samples/shape, max ratios [{}], failing {failing:?}", maxima.join(", ")))
        }
        Err(e) => outcome(false, e.to_string()),
    })
}

fn a5() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (eps, want) in [(0.5, 2.0), (0.1, 20f64.sqrt()), (0.02, 10.0), (0.001, 2000f64.sqrt())] {
        match witness_cd(eps) {
            Ok(w) => {
                ok &= w.certified() && rel(w.ratio, want) <= 1e-12 && rel(w.utility_ratio(), want) <= 1e-9;
                notes.push(format!("cd({eps})={:.4}", w.ratio));
            }
            Err(_) => ok = false,
        }
    }
    match witness_leontief(0.001, 0.001) {
        Ok(w) => {
            ok &= w.certified() && (w.ratio - 250.375).abs() < 1e-3;
            notes.push(format!("leontief={:.4}", w.ratio));
        }
        Err(_) => ok = false,
    }
    match witness_linear(0.01) {
        Ok(w) => {
            ok &= w.certified() && rel(w.ratio, 100.0) <= 1e-12;
            notes.push(format!("linear={:.4}", w.ratio));
        }
        Err(_) => ok = false,
    }
    let grid: Vec<f64> = (1..=40).map(|k| 0.5 * 0.8f64.powi(k)).collect();
    let mut last = [0.0_f64; 3];
    for &eps in &grid {
        let ws = [witness_linear(eps), witness_leontief(eps, eps), witness_cd(eps)];
        for (k, w) in ws.into_iter().enumerate() {
            match w {
                Ok(w) => {
                    ok &= w.certified() && w.ratio > last[k];
                    last[k] = w.ratio;
                }
                Err(_) => ok = false,
            }
        }
    }
    notes.push(format!("monotone over {} parameter values", grid.len()));
    outcome(ok, notes.join(", "))
}

fn a6() -> Outcome {
    timed(Duration::from_secs(120), || match oracle_sweep(100, 6, 3) {
        Ok(r) => outcome(
            r.passed,
            format!("{} markets, worst price-ratio deviation {:.2e} (tol {:e})", r.samples, r.worst_deviation, r.tolerance),
        ),
        Err(e) => outcome(false, e.to_string()),
    })
}

fn a7() -> Outcome {
    let r = check_power_inequality(&power_samples(10_000, 7));
    outcome(r.passed, format!("{} samples, worst log slack {:.2e}", r.samples, r.worst_slack))
}

fn a8() -> Outcome {
    let cd = |a: &[f64]| UtilityFunction::cobb_douglas(a.to_vec()).unwrap();
    let single_agent = Economy::new(vec![vec![1.0, 1.0, 1.0]], vec![cd(&[0.2, 0.3, 0.5])]).unwrap();
    let single_good = Economy::new(vec![vec![0.3], vec![0.7]], vec![cd(&[1.0]), cd(&[1.0])]).unwrap();
    let ratio = |e: Economy| {
        RatioQuery::new(e, 0)
            .and_then(|q| incentive_ratio_cd(&q))
            .map(|r| r.ratio)
            .unwrap_or(f64::NAN)
    };
    let (r1, r2) = (ratio(single_agent), ratio(single_good));

    let violating = Economy::new(
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![cd(&[0.5, 0.5]), cd(&[0.1, 0.9])],
    )
    .unwrap();
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("violating.toml");
    std::fs::write(&path, MarketSpec::from_economy(&violating).to_toml()).expect("write");
    let out = run(["exchange", "ratio", path.to_str().unwrap()]);
    outcome(
        r1 == 1.0 && r2 == 1.0 && out.code == EXIT_VALIDATION,
        format!("n=1 ratio {r1}, m=1 ratio {r2}, zero-endowment market exit {}", out.code),
    )
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 8] = [
        ("A1", "reference market reproduction", a1),
        ("A2", "2x2 closed form", a2),
        ("A3", "budget invariance", a3),
        ("A4", "ratio bounds", a4),
        ("A5", "witness families", a5),
        ("A6", "oracle equivalence", a6),
        ("A7", "power inequality", a7),
        ("A8", "degenerate guards", a8),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let o = f();
        if !o.passed {
            failed += 1;
        }
        println!("{id} {} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
