use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use detfactor::arith::build_m;
use detfactor::phi_chain::phi_chain_factor;
use detfactor::phi_reduce::{factor_from_phi, PhiOracle, PhiStrategy};
use detfactor::pm1::pm1_factor;
use detfactor::poly::base_a_split;
use detfactor::quad::{split2, Split2Config};
use detfactor_bench::{totient, BASE_A_CASES, SMOOTH_SEMIPRIMES};

fn pm1(c: &mut Criterion) {
    let mut g = c.benchmark_group("pm1_factor");
    for &(n, _, _) in &SMOOTH_SEMIPRIMES {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| pm1_factor(black_box(n), 13)));
    }
    g.finish();
}

fn pp1(c: &mut Criterion) {
    // 29 * 71: both p + 1 are 11-smooth
    let n = 29 * 71;
    let m = build_m(n + 1, 11).unwrap();
    let cfg = Split2Config { h: None, trial_bound: 0 };
    c.bench_function("split2/2059", |b| b.iter(|| split2(black_box(n), 2, &m, &cfg)));
}

fn phi(c: &mut Criterion) {
    let mut g = c.benchmark_group("factor_from_phi");
    for &(n, p, q) in &SMOOTH_SEMIPRIMES {
        let phi = totient(p, q);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| factor_from_phi(black_box(n), phi, PhiStrategy::SmallBase)));
    }
    g.finish();
}

fn chain(c: &mut Criterion) {
    let mut g = c.benchmark_group("phi_chain");
    for n in [3_599u64, 1_000_007 * 3, 99_999_989] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| phi_chain_factor(black_box(n), &PhiOracle::computed())));
    }
    g.finish();
}

fn base_a(c: &mut Criterion) {
    let mut g = c.benchmark_group("base_a_split");
    for &(d, a, k) in &BASE_A_CASES {
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| b.iter(|| base_a_split(black_box(d), a, k)));
    }
    g.finish();
}

criterion_group!(benches, pm1, pp1, phi, chain, base_a);
criterion_main!(benches);
