use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use exchange_core::incentive::{incentive_ratio_cd, witness_leontief, RatioQuery};
use exchange_core::market::UtilityFunction;
use exchange_core::reference::{reference_economy, reference_misreport};
use exchange_core::sampling::{sample_cd_economy, sample_rng};
use exchange_core::solvers::{cd_prices, solve_leontief, solve_linear_smallscale, CdMethod};
use exchange_core::{Economy, SolverConfig};

fn cd_price_methods(c: &mut Criterion) {
    let mut group = c.benchmark_group("cd_prices");
    for m in [3, 6, 10] {
        let e = sample_cd_economy(&mut sample_rng(1, 0), 5, m, 1.0, 1e-3);
        let r = e.truthful();
        for (name, method) in [
            ("direct", CdMethod::Direct),
            ("adjugate", CdMethod::Adjugate),
            ("fixed_point", CdMethod::FixedPoint),
        ] {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |b, _| {
                b.iter(|| cd_prices(black_box(&e), &r, method, 100_000).unwrap())
            });
        }
    }
    group.finish();
}

fn ratio_search(c: &mut Criterion) {
    let q = RatioQuery::new(reference_economy(), 0).unwrap();
    c.bench_function("incentive_ratio_reference", |b| {
        b.iter(|| incentive_ratio_cd(black_box(&q)).unwrap().ratio)
    });
    let e = reference_economy();
    let dev = e.deviation(0, reference_misreport()).unwrap();
    c.bench_function("cd_prices_reference_misreport", |b| {
        b.iter(|| cd_prices(black_box(&e), &dev, CdMethod::Direct, 0).unwrap())
    });
}

fn search_solvers(c: &mut Criterion) {
    let w = witness_leontief(0.1, 0.1).unwrap();
    let config = SolverConfig::default();
    c.bench_function("leontief_witness", |b| {
        b.iter(|| solve_leontief(black_box(&w.economy), &w.truthful_reports, &config).unwrap())
    });
    let lin = |a: &[f64]| UtilityFunction::linear(a.to_vec()).unwrap();
    let e = Economy::new(
        vec![vec![1.0, 0.0, 0.2], vec![0.0, 1.0, 0.8]],
        vec![lin(&[1.0, 3.0, 2.0]), lin(&[1.0, 2.0, 1.0])],
    )
    .unwrap();
    c.bench_function("linear_3_goods", |b| {
        b.iter(|| solve_linear_smallscale(black_box(&e), &e.truthful(), &config))
    });
}

criterion_group!(benches, cd_price_methods, ratio_search, search_solvers);
criterion_main!(benches);
