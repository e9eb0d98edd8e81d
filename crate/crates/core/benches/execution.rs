//! Sequential against data-parallel execution on the heavy workloads.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twoway_core::capacity::{
    dbc_boundary, dbc_brute_force_oracle, DbcBoundary, DbcSettings, OracleSettings,
};
use twoway_core::channels::TwoWayChannel;
use twoway_core::coding::{random_coset_code, Corruption};
use twoway_core::noise::{DelayedCopyPair, NoiseModel, TwoWayNoise};
use twoway_core::seeds::rng;
use twoway_core::verification::{coupled_equivalence, exhaustive_code_search, DEFAULT_SEARCH_CAP};
use twoway_core::{Alphabet, Execution, Pmf};

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn coupled(c: &mut Criterion) {
    let q = Alphabet::binary();
    let z = NoiseModel::iid(Pmf::bernoulli(0.1).unwrap());
    let channel = TwoWayChannel::new(TwoWayNoise::independent(z.clone(), z.clone()).unwrap());
    let mut r = rng(1);
    let code1 = Arc::new(random_coset_code(q, 8, 16, z.clone(), &mut r).unwrap());
    let code2 = Arc::new(random_coset_code(q, 8, 16, z, &mut r).unwrap());
    let mut group = c.benchmark_group("coupled_equivalence_20k");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                coupled_equivalence(
                    code1.clone(),
                    code2.clone(),
                    &channel,
                    black_box(20_000),
                    7,
                    Corruption::None,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn boundary(c: &mut Criterion) {
    let z = Pmf::bernoulli(0.1).unwrap();
    let lambdas = DbcBoundary::lambda_grid(11);
    let settings = DbcSettings {
        starts: 8,
        ..Default::default()
    };
    let mut group = c.benchmark_group("dbc_boundary");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| dbc_boundary(&z, &z, black_box(&lambdas), &settings, exec).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let z = Pmf::bernoulli(0.1).unwrap();
    let settings = OracleSettings {
        step: 0.05,
        ..Default::default()
    };
    let mut group = c.benchmark_group("grid_oracle");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| dbc_brute_force_oracle(&z, &z, black_box(&settings), exec).unwrap())
        });
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let noise = TwoWayNoise::DelayedCopy(DelayedCopyPair);
    let mut group = c.benchmark_group("exhaustive_search");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exhaustive_code_search(&noise, 2, 2, 2, black_box(DEFAULT_SEARCH_CAP), exec)
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, coupled, boundary, oracle, search);
criterion_main!(benches);
