use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;
use ssggm::conditional::{log_model_weight, ColumnContext, ModelCache};
use ssggm::linalg::{chol_append, chol_factor, chol_remove};
use ssggm::{Algorithm, Chain, ColumnModel, Init, PrecisionState, SamplerConfig};
use ssggm_bench::fixture;

/// Entries of the SPD matrix `1/(1 + |i - j|) + k δ_ij`.
fn spd_entry(k: usize) -> impl Fn(usize, usize) -> f64 {
    move |i, j| 1.0 / (1.0 + i.abs_diff(j) as f64) + if i == j { k as f64 } else { 0.0 }
}

fn log_weight(c: &mut Criterion) {
    let (data, hyper) = fixture(60, 120, 1);
    let state = PrecisionState::identity(60, 59);
    let ctx = ColumnContext::from_state(&state, &data, &hyper, 0).unwrap();
    let mut group = c.benchmark_group("log_weight");
    for k in [2usize, 8, 16] {
        let z = ColumnModel::from_indices(59, &(0..k).collect::<Vec<_>>()).unwrap();
        let hint = ColumnModel::from_indices(59, &(0..k - 1).collect::<Vec<_>>()).unwrap();
        group.bench_with_input(BenchmarkId::new("fresh", k), &z, |b, z| {
            b.iter(|| log_model_weight(&ctx, black_box(z), &mut ModelCache::new(), None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("from_neighbour", k), &z, |b, z| {
            b.iter_batched_ref(
                || {
                    let mut cache = ModelCache::new();
                    log_model_weight(&ctx, &hint, &mut cache, None).unwrap();
                    cache
                },
                |cache| log_model_weight(&ctx, black_box(z), cache, Some(&hint)).unwrap(),
                criterion::BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn cholesky_updates(c: &mut Criterion) {
    let mut group = c.benchmark_group("cholesky");
    for k in [8usize, 32] {
        let a = DMatrix::from_fn(k, k, spd_entry(k));
        let l = chol_factor(&a).unwrap();
        let col: Vec<f64> = (0..k).map(|i| spd_entry(k)(i, k)).collect();
        group.bench_with_input(BenchmarkId::new("append", k), &l, |b, l| {
            b.iter(|| chol_append(l, black_box(&col), k as f64 + 1.0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("remove_first", k), &l, |b, l| {
            b.iter(|| chol_remove(l, 0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("factor", k), &a, |b, a| {
            b.iter(|| chol_factor(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for p in [50usize, 100] {
        let (data, hyper) = fixture(p, 2 * p, 2);
        for alg in [Algorithm::Gibbs, Algorithm::Bdmh] {
            let mut cfg = SamplerConfig::new(alg, usize::MAX, 0, 3);
            cfg.store_draws = false;
            let mut chain = Chain::new(&data, hyper.clone(), cfg, Init::Identity).unwrap();
            for _ in 0..10 {
                chain.sweep().unwrap();
            }
            group.bench_function(BenchmarkId::new(alg.to_string(), p), |b| {
                b.iter(|| chain.sweep().unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, log_weight, cholesky_updates, sweeps);
criterion_main!(benches);
