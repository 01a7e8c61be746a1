use std::path::Path;

use serde_json::{json, Value};

use exchange_core::incentive::{
    check_power_inequality, check_two_by_two_facts, evaluate_deviation, incentive_ratio_cd,
    power_samples, verify_upper_bound_m, witness_cd, witness_leontief, witness_linear,
    OptimizerConfig, RatioQuery, SamplerConfig, Witness, E_TO_ONE_OVER_E,
};
use exchange_core::market::{is_equilibrium, Equilibrium, ReportProfile, UtilityFunction};
use exchange_core::market_file::{LoadedMarket, MarketSpec};
use exchange_core::reference::{reference_economy, reference_misreport, ALPHA, MISREPORT};
use exchange_core::sampling::{sample_cd_economy, sample_rng};
use exchange_core::solvers::{
    solve_cobb_douglas, solve_leontief, solve_linear_smallscale, EquilibriumSet,
};
use exchange_core::verify::{budget_invariance_sweep, oracle_sweep};
use exchange_core::{Economy, Error, SolverConfig, UtilityKind};

use crate::report::{Check, CliError, RunReport};

/// Relative tolerance for closed-form ratio agreement.
const RATIO_TOL: f64 = 1e-9;
const BOUND_SLACK: f64 = 1e-6;

fn load(path: &Path) -> Result<(MarketSpec, LoadedMarket), CliError> {
    let spec = MarketSpec::read(path)?;
    let loaded = spec.load()?;
    Ok((spec, loaded))
}

fn equilibrium_view(economy: &Economy, reports: &ReportProfile, eq: &Equilibrium, tol: f64) -> Value {
    let verdict = is_equilibrium(economy, reports, &eq.prices, &eq.allocation, tol);
    let utilities: Vec<Option<f64>> = (0..economy.agents())
        .map(|i| economy.utility(i).eval(eq.bundle(i)).ok())
        .collect();
    json!({
        "prices": eq.prices,
        "price_ratios": eq.price_ratios(),
        "simplex_prices": eq.simplex_prices(),
        "allocation": eq.allocation,
        "true_utilities": utilities,
        "clearing_residual": eq.clearing_residual,
        "budget_residual": eq.budget_residual,
        "verified": verdict.holds,
        "failures": verdict.failures,
        "tolerance": tol,
    })
}

fn solve_set(economy: &Economy, reports: &ReportProfile, config: &SolverConfig) -> exchange_core::Result<EquilibriumSet> {
    match economy.kind() {
        UtilityKind::CobbDouglas => Ok(EquilibriumSet {
            members: vec![solve_cobb_douglas(economy, reports, config)?],
            exhaustive: true,
            family_note: None,
        }),
        UtilityKind::Leontief => solve_leontief(economy, reports, config),
        UtilityKind::Linear => solve_linear_smallscale(economy, reports, config),
    }
}

pub fn cmd_solve(path: &Path, tol: f64, grid: usize) -> Result<RunReport, CliError> {
    let (spec, loaded) = load(path)?;
    let economy = &loaded.economy;
    let config = SolverConfig::default().with_tol(tol).with_grid(grid);
    let mut report = RunReport::new("solve");
    report.warnings = loaded.warnings.clone();

    let mut profiles = vec![("truthful", economy.truthful())];
    if let Some((_, dev)) = &loaded.deviation {
        profiles.push(("deviant", dev.clone()));
    }
    let mut data = serde_json::Map::new();
    for (label, reports) in &profiles {
        match solve_set(economy, reports, &config) {
            Ok(set) => {
                if let Some(note) = &set.family_note {
                    report.notes.push(format!("{label}: {note}"));
                }
                let views: Vec<Value> = set
                    .members
                    .iter()
                    .map(|eq| equilibrium_view(economy, reports, eq, tol))
                    .collect();
                for (k, eq) in set.members.iter().enumerate() {
                    report.check(
                        Check::at_most(format!("{label}[{k}] clearing residual"), eq.max_clearing_residual(), 0.0, tol)
                            .residual(),
                    );
                    let verdict = is_equilibrium(economy, reports, &eq.prices, &eq.allocation, tol);
                    report.check(Check::holds(format!("{label}[{k}] equilibrium verified"), verdict.holds).residual());
                }
                data.insert(
                    (*label).into(),
                    json!({ "exhaustive": set.exhaustive, "equilibria": views }),
                );
            }
            Err(Error::NoEquilibrium { best_residual }) => {
                report.check(Check::at_most(format!("{label} clearing residual"), best_residual, 0.0, tol).residual());
                data.insert((*label).into(), json!({ "equilibria": [], "best_residual": best_residual }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    report.data = Value::Object(data);
    report.market = Some(spec);
    Ok(report.finish())
}

pub struct RatioArgs {
    /// 1-based.
    pub agent: usize,
    pub grid: usize,
    pub refine: usize,
    pub seed: u64,
    pub deviation: Option<Vec<f64>>,
    pub truthful: bool,
}

pub fn cmd_ratio(path: &Path, args: &RatioArgs) -> Result<RunReport, CliError> {
    let (spec, loaded) = load(path)?;
    let economy = loaded.economy.clone();
    if economy.kind() != UtilityKind::CobbDouglas {
        return Err(CliError::Validation("ratio analysis needs a cobb_douglas market".into()));
    }
    if args.agent == 0 || args.agent > economy.agents() {
        return Err(CliError::Validation(format!(
            "--agent {} out of range 1..={}",
            args.agent,
            economy.agents()
        )));
    }
    let agent = args.agent - 1;
    let m = economy.commodities();
    let mut report = RunReport::new("ratio");
    report.warnings = loaded.warnings.clone();

    let fixed = if args.truthful {
        Some(economy.utility(agent).clone())
    } else if let Some(a) = &args.deviation {
        Some(UtilityFunction::cobb_douglas(a.clone())?)
    } else {
        loaded
            .deviation
            .as_ref()
            .filter(|(i, _)| *i == agent)
            .map(|(_, p)| p.report(agent).clone())
    };

    let (ratio, budget_residual) = match fixed {
        Some(r) => {
            let out = evaluate_deviation(&economy, agent, &r)?;
            report.notes.push("deviation fixed; no search".into());
            report.data = json!({
                "agent": args.agent,
                "truthful_utility": out.truthful_utility,
                "report": out.report.alpha(),
                "deviant_utility": out.deviant_utility,
                "ratio": out.ratio,
                "budget_residual": out.budget_residual,
                "truthful_equilibrium": equilibrium_view(&economy, &economy.truthful(), &out.truthful_equilibrium, 1e-8),
                "deviant_equilibrium": equilibrium_view(&economy, &economy.deviation(agent, out.report.clone())?, &out.deviant_equilibrium, 1e-8),
            });
            (out.ratio, out.budget_residual)
        }
        None => {
            let optimizer = OptimizerConfig {
                grid_resolution: args.grid,
                refine_iterations: args.refine,
                seed: args.seed,
                ..OptimizerConfig::default()
            };
            let q = RatioQuery::with_optimizer(economy.clone(), agent, optimizer.clone())?;
            let r = incentive_ratio_cd(&q)?;
            report.data = json!({
                "agent": args.agent,
                "optimizer": optimizer,
                "truthful_utility": r.truthful_utility,
                "best_report": r.best_report.alpha(),
                "deviant_utility": r.deviant_utility,
                "ratio": r.ratio,
                "budget_residual": r.budget_residual,
                "evaluations": r.trace.len(),
                "truthful_equilibrium": equilibrium_view(&economy, &economy.truthful(), &r.truthful_equilibrium, 1e-8),
                "deviant_equilibrium": equilibrium_view(&economy, &economy.deviation(agent, r.best_report.clone())?, &r.deviant_equilibrium, 1e-8),
            });
            (r.ratio, r.budget_residual)
        }
    };
    report.check(Check::at_most("ratio <= m", ratio, m as f64, BOUND_SLACK));
    if m == 2 {
        report.check(Check::at_most("ratio <= e^(1/e)", ratio, E_TO_ONE_OVER_E, BOUND_SLACK));
    }
    report.check(Check::at_most("budget invariance residual", budget_residual, 0.0, 1e-9));
    report.market = Some(spec);
    Ok(report.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Linear,
    Leontief,
    CobbDouglas,
}

fn build_witness(family: Family, epsilon: f64, delta: f64) -> exchange_core::Result<Witness> {
    match family {
        Family::Linear => witness_linear(epsilon),
        Family::Leontief => witness_leontief(epsilon, delta),
        Family::CobbDouglas => witness_cd(epsilon),
    }
}

pub const WITNESS_CSV_HEADER: [&str; 7] = [
    "family",
    "epsilon",
    "delta",
    "ratio",
    "utility_ratio",
    "truthful_verified",
    "deviant_verified",
];

pub struct WitnessRun {
    pub report: RunReport,
    pub rows: Vec<[String; 7]>,
}

/// One witness per epsilon (sorted largest first); `delta` defaults to
/// epsilon for the Leontief family.
pub fn cmd_witness(family: Family, epsilons: &[f64], delta: Option<f64>) -> Result<WitnessRun, CliError> {
    let mut eps: Vec<f64> = epsilons.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut report = RunReport::new("witness");
    let mut rows = Vec::new();
    let mut views = Vec::new();
    let mut last: Option<f64> = None;
    for &e in &eps {
        let d = delta.unwrap_or(e);
        let w = build_witness(family, e, d)?;
        let tag = format!("{} eps={e}", w.family.name());
        report.check(Check::holds(format!("{tag} certificates verify"), w.certified()));
        report.check(Check::within(
            format!("{tag} closed form vs equilibria"),
            w.utility_ratio() / w.ratio,
            1.0,
            RATIO_TOL,
        ));
        if let Some(prev) = last {
            report.check(Check::holds(format!("{tag} ratio increases"), w.ratio > prev));
        }
        last = Some(w.ratio);
        rows.push([
            w.family.name().to_string(),
            e.to_string(),
            if family == Family::Leontief { d.to_string() } else { String::new() },
            w.ratio.to_string(),
            w.utility_ratio().to_string(),
            w.truthful_verdict.holds.to_string(),
            w.deviant_verdict.holds.to_string(),
        ]);
        views.push(json!({
            "epsilon": e,
            "delta": (family == Family::Leontief).then_some(d),
            "ratio": w.ratio,
            "utility_ratio": w.utility_ratio(),
            "market": MarketSpec::from_economy(&w.economy),
            "deviant_report": w.deviant_reports.report(0).alpha(),
            "truthful": equilibrium_view(&w.economy, &w.truthful_reports, &w.truthful, 1e-8),
            "deviant": equilibrium_view(&w.economy, &w.deviant_reports, &w.deviant, 1e-8),
        }));
    }
    report.data = json!({ "witnesses": views, "ratio_tolerance": RATIO_TOL });
    Ok(WitnessRun {
        report: report.finish(),
        rows,
    })
}

pub fn witness_csv(rows: &[[String; 7]]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(WITNESS_CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bounds,
    Budget,
    Oracle,
    Power,
    Facts,
    All,
}

pub fn cmd_verify(suite: Suite, seed: u64, samples: Option<usize>, grid: usize) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("verify");
    let mut data = serde_json::Map::new();
    let run = |s: Suite| suite == s || suite == Suite::All;

    if run(Suite::Bounds) {
        data.insert("bounds".into(), verify_bounds(&mut report, seed, samples.unwrap_or(200), grid)?);
    }
    if run(Suite::Budget) {
        let r = budget_invariance_sweep(samples.unwrap_or(1000), seed, 5, 6)?;
        report.check(Check::at_most("budget: worst relative residual", r.worst_residual, 0.0, r.tolerance));
        data.insert("budget".into(), serde_json::to_value(&r).expect("serializes"));
    }
    if run(Suite::Oracle) {
        let r = oracle_sweep(samples.unwrap_or(100), seed, 3)?;
        report.check(Check::at_most("oracle: worst price-ratio deviation", r.worst_deviation, 0.0, r.tolerance));
        data.insert("oracle".into(), serde_json::to_value(&r).expect("serializes"));
    }
    if run(Suite::Power) {
        let r = check_power_inequality(&power_samples(samples.unwrap_or(10_000), seed));
        report.check(Check::at_most("power: worst log slack", r.worst_slack, 0.0, r.tolerance));
        data.insert("power".into(), serde_json::to_value(&r).expect("serializes"));
    }
    if run(Suite::Facts) {
        let r = check_two_by_two_facts(samples.unwrap_or(10_000), seed);
        report.check(Check::holds("facts: four 2x2 inequalities", r.passed));
        report.check(Check::at_most("facts: max 2x2 ratio", r.max_ratio, E_TO_ONE_OVER_E, BOUND_SLACK));
        data.insert("facts".into(), serde_json::to_value(&r).expect("serializes"));
    }
    report.data = Value::Object(data);
    Ok(report.finish())
}

/// Bound sweep over `{2,3} x {2,3,4}`; the 2x3 shape is anchored at the
/// reference market.
fn verify_bounds(report: &mut RunReport, seed: u64, samples: usize, grid: usize) -> Result<Value, CliError> {
    let mut shapes = Vec::new();
    let mut best_m3: f64 = 0.0;
    for n in [2, 3] {
        for m in [2, 3, 4] {
            let mut cfg = SamplerConfig::new(n, m, samples, seed);
            cfg.optimizer.grid_resolution = grid;
            if (n, m) == (2, 3) {
                cfg.anchors.push(reference_economy());
            }
            let r = verify_upper_bound_m(&cfg)?;
            let limit = r.two_commodity_bound.unwrap_or(r.bound);
            report.check(Check::at_most(format!("bounds n={n} m={m}: max ratio"), r.max_ratio, limit, r.tolerance));
            if m == 3 {
                best_m3 = best_m3.max(r.max_ratio);
            }
            shapes.push(json!({
                "agents": n,
                "commodities": m,
                "evaluated": r.evaluated,
                "anchors": cfg.anchors.len(),
                "bound": limit,
                "tolerance": r.tolerance,
                "max_ratio": r.max_ratio,
                "argmax_market": MarketSpec::from_economy(&r.argmax_economy),
                "argmax_report": r.argmax_report,
                "worst_budget_residual": r.worst_budget_residual,
                "violations": r.violations,
            }));
        }
    }
    report.check(Check::at_least("bounds m=3: some ratio exceeds 1.45", best_m3, 1.45, 0.0));
    Ok(json!({ "samples_per_shape": samples, "shapes": shapes }))
}

/// Reference values, rounded to three or four digits.
mod golden {
    pub const TRUTHFUL_RATIOS: [f64; 3] = [1.0, 1.5, 0.505];
    pub const X1: [f64; 3] = [0.202, 0.202, 1.0];
    pub const U1: f64 = 0.4495;
    pub const DEVIANT_RATIOS: [f64; 3] = [1.0, 0.3323, 0.0497];
    pub const X1_DEV: [f64; 3] = [0.845, 0.299, 1.0];
    pub const U1_DEV: f64 = 0.6731;
    pub const RATIO: f64 = 1.50;

    pub const BUNDLE_TOL: f64 = 2e-3;
    pub const UTILITY_TOL: f64 = 5e-4;
    pub const GOLDEN_RATIO_TOL: f64 = 0.01;
}

pub fn cmd_reproduce() -> Result<RunReport, CliError> {
    use golden::*;
    let economy = reference_economy();
    let out = evaluate_deviation(&economy, 0, &reference_misreport())?;
    let mut report = RunReport::new("reproduce");
    report.notes.push(format!(
        "agent 2's utility is stated with a repeated bundle index; read as exponents {:?}",
        ALPHA[1]
    ));
    report.notes.push(format!(
        "exact ratio {:.6} vs rounded reference {RATIO}; {U1_DEV}/{U1} = {:.4} is the quotient of rounded utilities",
        out.ratio,
        U1_DEV / U1
    ));

    let truthful_ratios = out.truthful_equilibrium.price_ratios().expect("positive first price");
    let deviant_ratios = out.deviant_equilibrium.price_ratios().expect("positive first price");
    let vector_checks = [
        ("truthful price ratio", &truthful_ratios[..], &TRUTHFUL_RATIOS[..]),
        ("x1", out.truthful_equilibrium.bundle(0), &X1[..]),
        ("deviant price ratio", &deviant_ratios[..], &DEVIANT_RATIOS[..]),
        ("x1'", out.deviant_equilibrium.bundle(0), &X1_DEV[..]),
    ];
    for (name, got, want) in vector_checks {
        for (j, (g, w)) in got.iter().zip(want).enumerate() {
            report.check(Check::within(format!("{name}[{}]", j + 1), *g, *w, BUNDLE_TOL));
        }
    }
    report.check(Check::within("u1(x1)", out.truthful_utility, U1, UTILITY_TOL));
    report.check(Check::within("u1(x1')", out.deviant_utility, U1_DEV, UTILITY_TOL));
    report.check(Check::within("ratio", out.ratio, RATIO, GOLDEN_RATIO_TOL));

    // Witness replay at closed-form values.
    let replay = [
        (Family::CobbDouglas, 0.5, 0.0, 2.0),
        (Family::CobbDouglas, 0.02, 0.0, 10.0),
        (Family::Leontief, 0.001, 0.001, 250.375_187_593_796_9),
        (Family::Linear, 0.01, 0.0, 100.0),
    ];
    let mut witnesses = Vec::new();
    for (family, eps, delta, want) in replay {
        let w = build_witness(family, eps, delta)?;
        let tag = format!("witness {} eps={eps}", w.family.name());
        report.check(Check::within(format!("{tag} ratio"), w.ratio / want, 1.0, RATIO_TOL));
        report.check(Check::holds(format!("{tag} certificates verify"), w.certified()));
        witnesses.push(json!({ "family": w.family, "epsilon": eps, "ratio": w.ratio, "expected": want }));
    }

    report.data = json!({
        "misreport": MISREPORT,
        "truthful": equilibrium_view(&economy, &economy.truthful(), &out.truthful_equilibrium, 1e-8),
        "deviant": equilibrium_view(&economy, &economy.deviation(0, reference_misreport())?, &out.deviant_equilibrium, 1e-8),
        "truthful_utility": out.truthful_utility,
        "deviant_utility": out.deviant_utility,
        "ratio": out.ratio,
        "budget_residual": out.budget_residual,
        "witnesses": witnesses,
        "tolerances": {
            "bundle_and_price_ratio": BUNDLE_TOL,
            "utility": UTILITY_TOL,
            "ratio": GOLDEN_RATIO_TOL,
            "witness_relative": RATIO_TOL,
        },
    });
    report.market = Some(MarketSpec::from_economy(&economy));
    Ok(report.finish())
}

/// A random Cobb-Douglas market file satisfying positivity and strong
/// competitiveness.
pub fn cmd_generate(agents: usize, commodities: usize, seed: u64, concentration: f64) -> Result<String, CliError> {
    if agents == 0 || commodities == 0 {
        return Err(CliError::Validation("need at least one agent and one commodity".into()));
    }
    if !(concentration > 0.0) {
        return Err(CliError::Validation("concentration must be positive".into()));
    }
    let economy = sample_cd_economy(&mut sample_rng(seed, 0), agents, commodities, concentration, 1e-3);
    Ok(MarketSpec::from_economy(&economy).to_toml())
}
