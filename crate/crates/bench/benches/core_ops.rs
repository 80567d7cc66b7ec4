//! Benchmarks for the hot paths: exact series solutions, pair construction
//! from a developing map, the obstruction by both methods, and the full
//! reconstruction pipeline.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use so3oper_core::{
    build_pair, build_sl2_model, phi_obstruction, reconstruct_oper, solve_flat_sections,
    varpi, delta0, PhiMethod, Poly, Scalar,
};

fn two_branch_sigma() -> Poly {
    // σ = z² + z³: two rational branch points.
    Poly::from_ints(&[0, 0, 1, 1])
}

fn bench_series_solver(c: &mut Criterion) {
    let d = varpi(&delta0());
    let p = Scalar::int(1);
    let init = [Scalar::int(1), Scalar::int(2), Scalar::int(2)];
    c.bench_function("flat_sections_order_32", |b| {
        b.iter(|| solve_flat_sections(black_box(&d.a), &p, &init, 32).unwrap())
    });
}

fn bench_build_pair(c: &mut Criterion) {
    let sigma = two_branch_sigma();
    c.bench_function("build_pair_two_branch_points", |b| {
        b.iter(|| {
            let oper = build_sl2_model(black_box(&sigma)).unwrap();
            build_pair(&oper).unwrap()
        })
    });
}

fn bench_obstruction(c: &mut Criterion) {
    let oper = build_sl2_model(&two_branch_sigma()).unwrap();
    let pair = build_pair(&oper).unwrap();
    let x = Scalar::int(0);
    c.bench_function("obstruction_ledger", |b| {
        b.iter(|| phi_obstruction(black_box(&pair), &x, PhiMethod::Ledger).unwrap())
    });
    c.bench_function("obstruction_residue", |b| {
        b.iter(|| phi_obstruction(black_box(&pair), &x, PhiMethod::Residue).unwrap())
    });
}

fn bench_reconstruct(c: &mut Criterion) {
    let oper = build_sl2_model(&two_branch_sigma()).unwrap();
    let pair = build_pair(&oper).unwrap();
    c.bench_function("reconstruct_two_branch_points", |b| {
        b.iter(|| reconstruct_oper(black_box(&pair)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_series_solver,
    bench_build_pair,
    bench_obstruction,
    bench_reconstruct
);
criterion_main!(benches);
