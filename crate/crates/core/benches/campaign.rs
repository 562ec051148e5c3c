//! Benchmarks for the hot paths: fitness evaluation, census, a single
//! evolution run, and the campaign seed fan-out compared between the
//! sequential path (`parallel = 1`) and the rayon pool (`parallel = 0`).
//!
//! Build without the default `parallel` feature to measure the pure
//! sequential fallback.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use fsm_evo::evolution::{evolve, fitness, EvolveConfig, MutationFlip};
use fsm_evo::harness::{run_trajectories, ExperimentConfig};
use fsm_evo::rng::RandomSource;
use fsm_evo::sampling::{generate_bss, SampleMethod};
use fsm_evo::witness::{build_witness, census, WitnessSpec};

fn u3() -> fsm_evo::fsm::Fsm {
    build_witness(WitnessSpec::new(3).unwrap())
}

fn bench_fitness(c: &mut Criterion) {
    let witness = u3();
    let samples = generate_bss(&witness, 1000).unwrap();
    c.bench_function("fitness/u3_bss_1000", |b| {
        b.iter(|| fitness(black_box(&witness), &samples))
    });
}

fn bench_census(c: &mut Criterion) {
    let witness = build_witness(WitnessSpec::new(5).unwrap());
    c.bench_function("census/u5_len16", |b| {
        b.iter(|| census(black_box(&witness), 16))
    });
}

fn bench_evolve(c: &mut Criterion) {
    let samples = generate_bss(&u3(), 1000).unwrap();
    let config = EvolveConfig {
        generations: 10_000,
        checkpoints: vec![10_000],
        flip: MutationFlip::Random,
    };
    let mut group = c.benchmark_group("evolve");
    group.sample_size(10);
    group.bench_function("u3_bss_10k_generations", |b| {
        b.iter(|| {
            let mut rng = RandomSource::from_seed(1);
            evolve(black_box(&samples), &config, &mut rng, |_| {})
        })
    });
    group.finish();
}

fn campaign_cfg(parallel: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(WitnessSpec::new(3).unwrap(), SampleMethod::Bss, 5_000);
    cfg.seeds = 8;
    cfg.checkpoints = vec![5_000];
    cfg.parallel = parallel;
    cfg
}

/// Seed fan-out: 8 runs of 5k generations each, sequential vs rayon.
fn bench_campaign_fanout(c: &mut Criterion) {
    let mut group = c.benchmark_group("campaign/u3_bss_8_seeds_5k");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        let cfg = campaign_cfg(1);
        b.iter(|| run_trajectories(black_box(&cfg)).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        let cfg = campaign_cfg(0);
        b.iter(|| run_trajectories(black_box(&cfg)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_fitness,
    bench_census,
    bench_evolve,
    bench_campaign_fanout
);
criterion_main!(benches);
