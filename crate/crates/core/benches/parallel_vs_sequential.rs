//! Compares the sequential and rayon-backed paths of the data-parallel
//! entry points: the quasi-isolated class sweep and the ledger run.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use exceptional_core::ledger::{self, RunOptions};
use exceptional_core::par::Parallelism;
use exceptional_core::rootsys::{build_root_datum, CartanType};
use exceptional_core::torsion::enumerate_quasi_isolated;

fn modes() -> Vec<(&'static str, Parallelism)> {
    let mut m = vec![("sequential", Parallelism::Sequential)];
    #[cfg(feature = "parallel")]
    m.push(("rayon", Parallelism::Rayon));
    m
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("quasi_isolated_sweep");
    group.sample_size(10);
    for label in [CartanType::F4, CartanType::E6, CartanType::E7] {
        let datum = build_root_datum(label).unwrap();
        for (name, par) in modes() {
            group.bench_with_input(
                BenchmarkId::new(label.to_string(), name),
                &par,
                |b, &par| b.iter(|| enumerate_quasi_isolated(&datum, 6, par).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_ledger(c: &mut Criterion) {
    let mut group = c.benchmark_group("ledger_run");
    for (name, par) in modes() {
        group.bench_with_input(BenchmarkId::new("builtin", name), &par, |b, &par| {
            let options = RunOptions { parallelism: par, ..RunOptions::default() };
            b.iter(|| ledger::run_ledger(ledger::BUILTIN_LEDGER, &options).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_ledger);
criterion_main!(benches);
