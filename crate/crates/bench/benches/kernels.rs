use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gracecode::*;
use gracecode_bench::ldmc_instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn polynomials(c: &mut Criterion) {
    let mut g = c.benchmark_group("error_poly");
    for (name, fam) in [("ldmc3", AlphabetFamily::Ldmc3Bec), ("ldmc5", AlphabetFamily::Ldmc5Bec)] {
        let a = f_alphabet(fam).unwrap();
        for d in [6usize, 10, 14] {
            g.bench_with_input(BenchmarkId::new(name, d), &d, |b, &d| {
                b.iter(|| error_bernstein(&a, black_box(d), Payoff::Error).unwrap())
            });
        }
    }
    g.finish();
}

fn belief_propagation(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_bp");
    g.sample_size(20);
    for arity in [3usize, 5] {
        let (graph, rx) = ldmc_instance(20_000, arity, 0.5, 1);
        g.bench_function(BenchmarkId::new("ldmc", arity), |b| b.iter(|| run_bp(&graph, black_box(&rx), 10).unwrap()));
    }
    g.finish();
}

fn elimination(c: &mut Criterion) {
    let mut g = c.benchmark_group("rank_hrank");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in [256usize, 1024] {
        let m = BitMatrix::random(k, 2 * k, 3.0 / k as f64, &mut rng);
        g.bench_with_input(BenchmarkId::from_parameter(k), &m, |b, m| b.iter(|| rank_hrank(black_box(m))));
    }
    g.finish();
}

fn density_evolution(c: &mut Criterion) {
    let f = EFunctionFamily::ldmc(5, Surrogate::Bec, Payoff::Error, 14).unwrap();
    c.bench_function("iterate/ldmc5/50", |b| {
        b.iter(|| iterate(&f, black_box(1.2), 0.0, 50, Surrogate::Bec, DeQuantity::Error).unwrap())
    });
}

criterion_group!(benches, polynomials, belief_propagation, elimination, density_evolution);
criterion_main!(benches);
