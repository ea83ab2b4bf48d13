//! Rayon chunks against the sequential fallback across sample budgets.
//! Both paths produce bit-identical estimates; this measures what the
//! parallelism buys on count-only and position-resolved workloads.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use num_complex::Complex64;
use tubescatter::montecarlo::{estimate, estimate_sequential, McConfig};
use tubescatter::scenarios::{Cascade, CascadeKind};
use tubescatter::statistics::{BeamProfile, Ensemble, ProfileShape};

fn mid_stage() -> (Ensemble, Vec<Complex64>) {
    let cascade = Cascade::build(CascadeKind::Tetramer13, 4.0).unwrap();
    let weights = cascade.minimum_weights().unwrap();
    let ensemble = cascade.stages()[2].1.clone();
    (ensemble, weights)
}

fn bench_counts(c: &mut Criterion) {
    let (ensemble, weights) = mid_stage();
    let mut group = c.benchmark_group("counts");
    for &samples in &[10_000u64, 100_000, 1_000_000] {
        group.throughput(Throughput::Elements(samples));
        group.bench_with_input(BenchmarkId::new("parallel", samples), &samples, |b, &s| {
            let cfg = McConfig::counts(s, 42);
            b.iter(|| estimate(&ensemble, &weights, &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", samples), &samples, |b, &s| {
            let cfg = McConfig::counts(s, 42);
            b.iter(|| estimate_sequential(&ensemble, &weights, &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_positions(c: &mut Criterion) {
    let (ensemble, weights) = mid_stage();
    let profile = BeamProfile::new(ProfileShape::Gaussian, 2.0, 10.0).unwrap();
    let mut group = c.benchmark_group("position_resolved");
    for &samples in &[10_000u64, 100_000] {
        group.throughput(Throughput::Elements(samples));
        group.bench_with_input(BenchmarkId::new("parallel", samples), &samples, |b, &s| {
            let cfg = McConfig::with_positions(s, 42, profile);
            b.iter(|| estimate(&ensemble, &weights, &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", samples), &samples, |b, &s| {
            let cfg = McConfig::with_positions(s, 42, profile);
            b.iter(|| estimate_sequential(&ensemble, &weights, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_counts, bench_positions);
criterion_main!(benches);
