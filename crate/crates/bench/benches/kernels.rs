//! Benchmarks for the numerical kernels behind certification and simulation.
//!
//! Run with: cargo bench -p switched-consensus-bench

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use switched_consensus::graph::build_laplacian;
use switched_consensus::linalg::expm;
use switched_consensus::{
    certify, random_schedule, random_state, simulate, ProtocolSpec, Regime,
    Topologies,
};
use switched_consensus_bench::{directed_ring, mixed_schedule, ring_with_chords};

fn bench_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    for &n in &[8usize, 32, 128] {
        let sym = build_laplacian(&ring_with_chords(n));
        let dir = build_laplacian(&directed_ring(n));
        group.bench_with_input(BenchmarkId::new("undirected", n), &sym, |b, l| {
            b.iter(|| switched_consensus::graph::spectrum(black_box(l)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("directed", n), &dir, |b, l| {
            b.iter(|| switched_consensus::graph::spectrum(black_box(l)).unwrap())
        });
    }
    group.finish();
}

fn bench_expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    for &n in &[8usize, 32, 128] {
        let l = build_laplacian(&directed_ring(n));
        let a = l.matrix() * -2.5;
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| expm(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn bench_certify(c: &mut Criterion) {
    let graphs = vec![ring_with_chords(24), ring_with_chords(24)];
    c.bench_function("certify/switching-24", |b| {
        b.iter(|| certify(black_box(&graphs), Regime::UndirectedSwitching, None).unwrap())
    });
}

fn bench_simulate(c: &mut Criterion) {
    let n = 16;
    let topologies = Topologies::single("g", ring_with_chords(n));
    let schedule = random_schedule(11, &mixed_schedule(20)).unwrap();
    let x0 = random_state(11, n, -5.0, 5.0).unwrap();
    let protocol = ProtocolSpec::linear(0.1).unwrap();
    c.bench_function("simulate/linear-16x20", |b| {
        b.iter(|| simulate(black_box(&x0), &schedule, &topologies, &protocol, 0.01).unwrap())
    });
}

criterion_group!(benches, bench_spectrum, bench_expm, bench_certify, bench_simulate);
criterion_main!(benches);
