//! Graph assembly on one thread against the rayon pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hecke_core::hecke::{build_graph_with, ExecMode, Operator};
use hecke_core::{Curve, Place};

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_graph");
    group.sample_size(10);
    for (name, rank, lo, hi) in [("E2", 3, -4, 4), ("E3a", 3, -3, 3), ("E4", 2, -6, 6)] {
        let curve = Curve::named(name).unwrap();
        let x = Place::rational(curve.points(1).unwrap()[0]);
        let op = Operator::new(x, 1, rank);
        let id = format!("{name} rank {rank} {lo}..{hi}");
        // warm the point and place caches before timing
        build_graph_with(&curve, &op, lo, hi, ExecMode::Sequential).unwrap();
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), &id), &mode, |b, &m| {
                b.iter(|| build_graph_with(&curve, &op, lo, hi, m).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, assembly);
criterion_main!(benches);
