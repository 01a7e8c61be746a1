use std::path::{Path, PathBuf};

use serde_json::Value;

use exchange_cli::{run, EXIT_PARSE, EXIT_PASS, EXIT_RESIDUAL, EXIT_VALIDATION};
use exchange_core::market_file::MarketSpec;

const REFERENCE: &str = r#"
format = 1
market_kind = "cobb_douglas"
commodities = 3

[[agents]]
endowment = [0.99, 0.01, 0.01]
alpha = [0.2, 0.3, 0.5]

[[agents]]
endowment = [0.01, 0.99, 0.99]
alpha = [0.4, 0.6, 0.0]
"#;

const SYMMETRIC: &str = r#"
format = 1
market_kind = "cobb_douglas"
commodities = 2

[[agents]]
endowment = [0.7, 0.3]
alpha = [0.6, 0.4]

[[agents]]
endowment = [0.3, 0.7]
alpha = [0.4, 0.6]
"#;

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn exec(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["exchange"];
    full.extend_from_slice(args);
    let out = run(full);
    let doc = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, doc)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_reference_market() {
    let d = Dir::new();
    let f = d.write("ref.toml", REFERENCE);
    let (code, doc) = exec(&["solve", path(&f)]);
    assert_eq!(code, EXIT_PASS);
    let eq = &doc["data"]["truthful"]["equilibria"][0];
    assert!((eq["price_ratios"][1].as_f64().unwrap() - 1.5).abs() < 1e-6);
    assert!((eq["true_utilities"][0].as_f64().unwrap() - 0.4495).abs() < 5e-4);
    let simplex: f64 = eq["simplex_prices"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((simplex - 1.0).abs() < 1e-12);
}

#[test]
fn solve_symmetric_market() {
    let d = Dir::new();
    let f = d.write("sym.toml", SYMMETRIC);
    let (code, doc) = exec(&["solve", path(&f)]);
    assert_eq!(code, EXIT_PASS);
    let r = doc["data"]["truthful"]["equilibria"][0]["price_ratios"][1].as_f64().unwrap();
    assert!((r - 1.0).abs() < 1e-12);
}

#[test]
fn renormalization_warning() {
    let d = Dir::new();
    let f = d.write("bad.toml", &REFERENCE.replace("[0.99, 0.01, 0.01]", "[0.89, 0.01, 0.01]"));
    let (code, doc) = exec(&["solve", path(&f)]);
    assert_eq!(code, EXIT_PASS);
    let warnings = doc["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].as_str().unwrap().contains("renormalized"));
}

#[test]
fn echoed_market_reloads_identically() {
    let d = Dir::new();
    let f = d.write("ref.toml", REFERENCE);
    let (_, doc) = exec(&["solve", path(&f)]);
    let echoed: MarketSpec = serde_json::from_value(doc["market"].clone()).unwrap();
    let original = MarketSpec::parse(REFERENCE).unwrap().load().unwrap().economy;
    let g = d.write("echo.json", &serde_json::to_string(&echoed).unwrap());
    let reloaded = MarketSpec::read(&g).unwrap().load().unwrap().economy;
    assert_eq!(original, reloaded);
}

#[test]
fn ratio_search_and_fixed_reports() {
    let d = Dir::new();
    let f = d.write("ref.toml", REFERENCE);
    let (code, doc) = exec(&["ratio", path(&f), "--agent", "1"]);
    assert_eq!(code, EXIT_PASS);
    assert!(doc["data"]["ratio"].as_f64().unwrap() >= 1.497);

    let (code, doc) = exec(&["ratio", path(&f), "--truthful"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(doc["data"]["ratio"].as_f64().unwrap(), 1.0);

    let (code, doc) = exec(&["ratio", path(&f), "--deviation", "0.85,0.1,0.05"]);
    assert_eq!(code, EXIT_PASS);
    assert!((doc["data"]["ratio"].as_f64().unwrap() - 1.4976).abs() < 1e-3);
}

#[test]
fn ratio_on_random_two_commodity_markets() {
    let d = Dir::new();
    for seed in 0..5 {
        let out = run(["exchange", "generate", "--commodities", "2", "--seed", &seed.to_string()]);
        assert_eq!(out.code, EXIT_PASS);
        let f = d.write(&format!("m{seed}.toml"), &out.stdout);
        let (code, doc) = exec(&["ratio", path(&f), "--seed", "3"]);
        assert_eq!(code, EXIT_PASS);
        assert!(doc["data"]["ratio"].as_f64().unwrap() <= 1.4447);
    }
}

#[test]
fn ratio_rejects_bad_input() {
    let d = Dir::new();
    let f = d.write("ref.toml", REFERENCE);
    assert_eq!(exec(&["ratio", path(&f), "--agent", "3"]).0, EXIT_VALIDATION);
    assert_eq!(exec(&["ratio", path(&f), "--deviation", "0.5,0.5"]).0, EXIT_VALIDATION);
    let lin = d.write("lin.toml", &REFERENCE.replace("cobb_douglas", "linear"));
    assert_eq!(exec(&["ratio", path(&lin)]).0, EXIT_VALIDATION);
    let broken = d.write("broken.toml", "format = 1\nmarket_kind = ");
    assert_eq!(exec(&["ratio", path(&broken)]).0, EXIT_PARSE);
    assert_eq!(exec(&["ratio"]).0, EXIT_PARSE);
    assert_eq!(exec(&["frobnicate"]).0, EXIT_PARSE);
}

#[test]
fn solve_without_equilibrium_is_a_residual_failure() {
    let d = Dir::new();
    let f = d.write(
        "leo.toml",
        r#"
format = 1
market_kind = "leontief"
commodities = 2
[[agents]]
endowment = [0.9, 0.0]
alpha = [1.0, 3.0]
[[agents]]
endowment = [0.1, 1.0]
alpha = [1.0, 2.0]
"#,
    );
    assert_eq!(exec(&["solve", path(&f)]).0, EXIT_RESIDUAL);
}

#[test]
fn witness_values_and_csv() {
    let (code, doc) = exec(&["witness", "cobb_douglas", "--epsilon", "0.02"]);
    assert_eq!(code, EXIT_PASS);
    assert!((doc["data"]["witnesses"][0]["ratio"].as_f64().unwrap() - 10.0).abs() < 1e-12);

    let (_, doc) = exec(&["witness", "leontief", "--epsilon", "0.001", "--delta", "0.001"]);
    assert!((doc["data"]["witnesses"][0]["ratio"].as_f64().unwrap() - 250.375).abs() < 1e-3);

    let (_, doc) = exec(&["witness", "linear", "--epsilon", "0.01"]);
    assert!((doc["data"]["witnesses"][0]["ratio"].as_f64().unwrap() - 100.0).abs() < 1e-9);

    let out = run(["exchange", "witness", "linear", "--sweep", "0.01,0.5,0.1", "--csv"]);
    assert_eq!(out.code, EXIT_PASS);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "family,epsilon,delta,ratio,utility_ratio,truthful_verified,deviant_verified");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("linear,0.5,"));

    assert_eq!(exec(&["witness", "cobb_douglas", "--epsilon", "1.5"]).0, EXIT_VALIDATION);
}

#[test]
fn verify_is_deterministic() {
    let a = run(["exchange", "verify", "oracle", "--seed", "5", "--samples", "20"]);
    let b = run(["exchange", "verify", "oracle", "--seed", "5", "--samples", "20"]);
    assert_eq!(a.code, EXIT_PASS);
    assert_eq!(a.stdout, b.stdout);
    let (code, doc) = exec(&["verify", "budget", "--samples", "200"]);
    assert_eq!(code, EXIT_PASS);
    assert!(doc["data"]["budget"]["worst_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn reproduce_reports_the_reference_values() {
    let (code, doc) = exec(&["reproduce"]);
    assert_eq!(code, EXIT_PASS);
    assert!((doc["data"]["ratio"].as_f64().unwrap() - 1.4976).abs() < 1e-3);
    assert!(doc["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("[0.4, 0.6, 0.0]")));
}
