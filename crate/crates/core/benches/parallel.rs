//! Benchmarks of the data-parallel inner loops against the sequential path.
//!
//! With the default `parallel` feature, the rayon arms run under pools of 1
//! and all threads; `cargo bench --no-default-features` measures the
//! sequential fallback build of the same entry points.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use tvar_sieve::basis::{basis_matrices, BasisSpec};
use tvar_sieve::simgen::{self, McTestConfig, ModelId, ModelSpec};
use tvar_sieve::stability_test::TestConfig;
use tvar_sieve::{run_test, TimeSeries};

fn fixture(n: usize) -> TimeSeries {
    let model = ModelSpec::null(ModelId::TvAr2, n).unwrap();
    simgen::simulate(&model, 99)
}

fn test_config() -> TestConfig {
    TestConfig {
        b_star: 2,
        m: 4,
        replicates: 400,
        basis: BasisSpec::fourier(4).unwrap(),
        seed: 7,
        include_intercept: false,
    }
}

fn bench_bootstrap(c: &mut Criterion) {
    let x = fixture(512);
    let config = test_config();
    let mut group = c.benchmark_group("bootstrap_run_test");
    group.sample_size(20);

    #[cfg(feature = "parallel")]
    {
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("rayon_threads_1", |b| {
            b.iter(|| pool1.install(|| run_test(black_box(&x), black_box(&config)).unwrap()))
        });
        group.bench_function("rayon_threads_all", |b| {
            b.iter(|| run_test(black_box(&x), black_box(&config)).unwrap())
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential_fallback", |b| {
        b.iter(|| run_test(black_box(&x), black_box(&config)).unwrap())
    });

    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let model = ModelSpec::null(ModelId::TvAr2, 256).unwrap();
    let mc = McTestConfig {
        basis: tvar_sieve::BasisFamily::Fourier,
        wavelet_order: 9,
        b_star: Some(2),
        c: Some(4),
        m: Some(4),
        replicates: 100,
        include_intercept: false,
    };
    let mut group = c.benchmark_group("monte_carlo_50_reps");
    group.sample_size(10);

    #[cfg(feature = "parallel")]
    {
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("rayon_threads_1", |b| {
            b.iter(|| {
                pool1.install(|| {
                    simgen::monte_carlo_size_power(
                        black_box(&model),
                        black_box(&mc),
                        50,
                        &[0.1],
                        5,
                    )
                    .unwrap()
                })
            })
        });
        group.bench_function("rayon_threads_all", |b| {
            b.iter(|| {
                simgen::monte_carlo_size_power(black_box(&model), black_box(&mc), 50, &[0.1], 5)
                    .unwrap()
            })
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential_fallback", |b| {
        b.iter(|| {
            simgen::monte_carlo_size_power(black_box(&model), black_box(&mc), 50, &[0.1], 5)
                .unwrap()
        })
    });

    group.finish();
}

fn bench_basis_matrices(c: &mut Criterion) {
    let spec = BasisSpec::daubechies(9, 8).unwrap();
    c.bench_function("basis_matrices_daub9_c8_grid8192", |b| {
        b.iter(|| basis_matrices(black_box(&spec), 8192).unwrap())
    });
}

criterion_group!(benches, bench_bootstrap, bench_monte_carlo, bench_basis_matrices);
criterion_main!(benches);
