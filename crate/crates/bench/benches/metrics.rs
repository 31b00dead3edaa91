use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use linkdens_bench::workload;
use linkdens_core::metrics::{delta_density_profile, inter_thread_delta_densities, PairSampler};
use linkdens_core::relations::{node_overlap_graph, quotient_stream, temporal_overlap_graph, NodeOverlapOptions};
use linkdens_core::validation::generate_synthetic;
use linkdens_core::{Delta, PartId};

fn deltas() -> Vec<Delta> {
    Delta::parse_list("1m,1h,1d,1w,30d,1y,20y").unwrap()
}

fn bench_density(c: &mut Criterion) {
    let mut group = c.benchmark_group("delta_density_profile");
    for threads in [1_000, 4_000] {
        let data = generate_synthetic(&workload(threads, 1)).unwrap();
        let ds = deltas();
        group.bench_with_input(BenchmarkId::from_parameter(threads), &data, |b, data| {
            b.iter(|| delta_density_profile(black_box(&data.stream), &ds))
        });
    }
    group.finish();
}

fn bench_relations(c: &mut Criterion) {
    let mut group = c.benchmark_group("relations");
    group.sample_size(20);
    for threads in [1_000, 4_000] {
        let data = generate_synthetic(&workload(threads, 2)).unwrap();
        let p = &data.partition;
        group.bench_with_input(BenchmarkId::new("temporal_overlap", threads), p, |b, p| {
            b.iter(|| temporal_overlap_graph(black_box(p)))
        });
        group.bench_with_input(BenchmarkId::new("node_overlap", threads), p, |b, p| {
            b.iter(|| node_overlap_graph(black_box(p), NodeOverlapOptions::default()))
        });
        group.bench_with_input(BenchmarkId::new("quotient_stream", threads), p, |b, p| {
            b.iter(|| quotient_stream(black_box(p)))
        });
    }
    group.finish();
}

fn bench_inter(c: &mut Criterion) {
    let mut group = c.benchmark_group("inter_thread");
    group.sample_size(20);
    let data = generate_synthetic(&workload(2_000, 3)).unwrap();
    let ds = deltas();
    for size in [10, 100] {
        let sampler = PairSampler::Uniform { size, seed: 7 };
        group.bench_with_input(BenchmarkId::new("sampled", size), &sampler, |b, &sampler| {
            b.iter(|| inter_thread_delta_densities(&data.partition, black_box(PartId(0)), &ds, sampler))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_density, bench_relations, bench_inter);
criterion_main!(benches);
