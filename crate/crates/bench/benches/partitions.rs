//! Partition-layer benchmarks: coarsening enumeration and meets.

use criterion::{criterion_group, criterion_main, Criterion};
use dsplab_core::partition::{meet, Partition};
use std::hint::black_box;

fn bench_coarsenings(c: &mut Criterion) {
    let mut group = c.benchmark_group("coarsenings");
    for n in [5usize, 7, 8] {
        let base = Partition::singletons(n);
        group.bench_function(format!("singletons/{n}"), |b| {
            b.iter(|| black_box(&base).coarsenings(16).unwrap())
        });
    }
    group.finish();
}

fn bench_meet(c: &mut Criterion) {
    let n = 24;
    let stripes = Partition::from_assignment(n, &(0..n).map(|j| j % 4).collect::<Vec<_>>());
    let blocks = Partition::from_assignment(n, &(0..n).map(|j| j / 6).collect::<Vec<_>>());
    let parity = Partition::from_assignment(n, &(0..n).map(|j| j % 2).collect::<Vec<_>>());
    c.bench_function("meet/three-way/24", |b| {
        b.iter(|| meet([&stripes, &blocks, &parity].into_iter().map(black_box)).unwrap())
    });
}

criterion_group!(benches, bench_coarsenings, bench_meet);
criterion_main!(benches);
