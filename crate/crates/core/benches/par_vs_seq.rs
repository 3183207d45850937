//! Data-parallel volume kernels against their sequential baselines.
//!
//! The work unit is embarrassingly parallel (one volume or grad/Hessian
//! evaluation per tetrahedron), so this mostly measures where the rayon
//! dispatch overhead stops paying for itself.  Build with
//! `--no-default-features` to time the sequential dispatch of the default
//! entry points instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use hypervol::angles::AngleAssignment;
use hypervol::complex::{build_complex, GluingData};
use hypervol::loba::TetAngles;
use hypervol::solver::{
    total_volume, total_volume_serial, volume_grad_hess, volume_grad_hess_serial,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Disjoint union of n tets with reproducible random angle triples.
fn assignment(n: usize) -> AngleAssignment {
    let cx = build_complex(GluingData::unglued(n)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let tets = (0..n)
        .map(|_| {
            let a = rng.gen_range(0.2..PI - 0.4);
            let b = rng.gen_range(0.1..PI - a - 0.1);
            TetAngles::new(a, b, PI - a - b).unwrap()
        })
        .collect();
    AngleAssignment::new(&cx, tets).unwrap()
}

fn bench_total_volume(c: &mut Criterion) {
    let mut group = c.benchmark_group("total_volume");
    for &n in &[1_000usize, 10_000, 100_000] {
        let asg = assignment(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("default", n), &asg, |b, a| {
            b.iter(|| total_volume(a))
        });
        group.bench_with_input(BenchmarkId::new("serial", n), &asg, |b, a| {
            b.iter(|| total_volume_serial(a))
        });
    }
    group.finish();
}

fn bench_grad_hess(c: &mut Criterion) {
    let mut group = c.benchmark_group("volume_grad_hess");
    for &n in &[1_000usize, 10_000, 100_000] {
        let asg = assignment(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("default", n), &asg, |b, a| {
            b.iter(|| volume_grad_hess(a).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("serial", n), &asg, |b, a| {
            b.iter(|| volume_grad_hess_serial(a).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_total_volume, bench_grad_hess);
criterion_main!(benches);
