use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use redeilab::charsum;
use redeilab::classify::{self, SearchOptions, Strategy};
use redeilab::{fourier, geometry, par, PrimeCtx};

fn both<F: Fn() -> R, R>(c: &mut Criterion, group: &str, label: u64, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_with_input(BenchmarkId::new("parallel", label), &label, |b, _| b.iter(|| black_box(f())));
    g.bench_with_input(BenchmarkId::new("sequential", label), &label, |b, _| {
        b.iter(|| par::sequential(|| black_box(f())))
    });
    g.finish();
}

fn search(c: &mut Criterion) {
    let f13 = PrimeCtx::new(13).unwrap();
    both(c, "naive", 13, || classify::classify(&f13, Strategy::Naive, &SearchOptions::default()).unwrap());
    let f19 = PrimeCtx::new(19).unwrap();
    both(c, "rootsets", 19, || classify::classify(&f19, Strategy::Rootsets, &SearchOptions::default()).unwrap());
}

fn sums(c: &mut Criterion) {
    let f = PrimeCtx::new(10007).unwrap();
    let q = f.residues();
    both(c, "shift_profile", 10007, || charsum::shift_profile(&f, &q).unwrap());
}

fn plane(c: &mut Criterion) {
    let f = PrimeCtx::new(61).unwrap();
    let l = geometry::ls_set(&f);
    both(c, "spectrum", 61, || fourier::spectrum(&l));
    both(c, "census", 61, || geometry::ls_profile_census(&f));
}

criterion_group!(benches, search, sums, plane);
criterion_main!(benches);
