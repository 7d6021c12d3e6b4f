use anl_core::protocols::{run_mss, run_qkd_leakage, AdversaryModel, Grouping, LeakPolicy};
use anl_core::{ghz_behavior, Sampler};
use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn sampling(c: &mut Criterion) {
    let sampler = Sampler::new(&ghz_behavior(6).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("sample/ghz6", |b| {
        b.iter(|| sampler.sample(black_box(0b101101), &mut rng))
    });
}

fn rounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("protocol_rounds");
    group.sample_size(10);
    group.throughput(Throughput::Elements(10_000));
    group.bench_function("mss/5", |b| {
        b.iter(|| run_mss(5, 10_000, 3, Grouping::Random, AdversaryModel::None).unwrap())
    });
    group.bench_function("qkd_leakage/5", |b| {
        b.iter(|| run_qkd_leakage(5, 10_000, 3, LeakPolicy::AllButOnePerSide).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sampling, rounds);
criterion_main!(benches);
