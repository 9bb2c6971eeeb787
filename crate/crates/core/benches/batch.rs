use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gaussmode::batch::{self, Execution};
use gaussmode::states::{random_bipartition, random_pure_cm};
use gaussmode::Tolerances;

fn corpus(len: u64, modes: usize) -> Vec<(gaussmode::CovarianceMatrix, gaussmode::Bipartition)> {
    (0..len)
        .map(|seed| {
            let m = random_pure_cm(modes, seed, 1.0);
            let part = random_bipartition(modes, modes / 2, seed ^ 0x5eed).unwrap();
            (m, part)
        })
        .collect()
}

fn modes() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Execution::Parallel));
    }
    v
}

fn bench_decompose(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("modewise_batch");
    for k in [4usize, 8] {
        let cases = corpus(64, k);
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, k), &cases, |b, cases| {
                b.iter(|| batch::decompose_all(exec, black_box(cases), &tol))
            });
        }
    }
    group.finish();
}

fn bench_spectra(c: &mut Criterion) {
    let tol = Tolerances::default();
    let states: Vec<_> = (0..128).map(|s| random_pure_cm(10, s, 1.0)).collect();
    let mut group = c.benchmark_group("spectrum_batch");
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| batch::spectra(exec, black_box(&states), &tol))
        });
    }
    group.finish();
}

fn bench_ppt(c: &mut Criterion) {
    let mut group = c.benchmark_group("ppt_grid");
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| batch::ppt_grid(exec, (0.5, 2.0), 3.0, black_box(50)))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_decompose, bench_spectra, bench_ppt);
criterion_main!(benches);
