use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dpow_core::doldkan::{derived_functor_graded, EngineConfig};
use dpow_core::exactlin::smith_normal_form_with;
use dpow_core::polyfunc::{eval_morphism_with, FunctorExpr};
use dpow_core::{Exec, IntMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn derived(c: &mut Criterion) {
    let mut group = c.benchmark_group("derived_functor");
    group.sample_size(10);
    for (f, r, n) in [(FunctorExpr::Gamma(4), 1, 2), (FunctorExpr::Gamma(3), 2, 2)] {
        for (label, exec) in MODES {
            let cfg = EngineConfig { exec, ..EngineConfig::default() };
            group.bench_with_input(BenchmarkId::new(label, format!("{f:?} r={r} n={n}")), &cfg, |b, cfg| {
                b.iter(|| derived_functor_graded(&f, r, n, cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn morphism(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = IntMatrix::from_dense(&(0..6).map(|_| (0..6).map(|_| rng.gen_range(-2..=2)).collect()).collect::<Vec<_>>());
    let mut group = c.benchmark_group("eval_morphism");
    group.sample_size(20);
    for (label, exec) in MODES {
        group.bench_function(BenchmarkId::new(label, "G4 on 6x6"), |b| {
            b.iter(|| eval_morphism_with(&FunctorExpr::Gamma(4), &m, exec).unwrap())
        });
    }
    group.finish();
}

fn smith(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dense: Vec<Vec<i64>> =
        (0..160).map(|_| (0..160).map(|_| if rng.gen_bool(0.02) { rng.gen_range(-3..=3) } else { 0 }).collect()).collect();
    let m = IntMatrix::from_dense(&dense);
    let mut group = c.benchmark_group("smith_normal_form");
    group.sample_size(10);
    for (label, exec) in MODES {
        group.bench_function(BenchmarkId::new(label, "160x160 sparse"), |b| {
            b.iter(|| smith_normal_form_with(&m, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, derived, morphism, smith);
criterion_main!(benches);
