use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcluster_core::clustering::{dbscan, kmedoids, kmedoids_pam, PointSet};
use qcluster_core::pipeline::experiment::sample_truth;
use qcluster_core::pipeline::{run_sample, RecordGroup, SampleJob};
use qcluster_core::{ErrorPair, ExperimentConfig, Pixel, ScenarioKind};

fn scattered(n: usize, side: u32, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Pixel> = Vec::new();
    while points.len() < n {
        let p = Pixel::new(rng.gen_range(0..side), rng.gen_range(0..side));
        if !points.contains(&p) {
            points.push(p);
        }
    }
    PointSet::new(points).unwrap()
}

fn clustering(c: &mut Criterion) {
    let sparse = scattered(60, 20, 1);
    c.bench_function("kmedoids_exhaustive_60", |b| b.iter(|| kmedoids(&sparse, 2).unwrap()));
    c.bench_function("kmedoids_pam_60", |b| b.iter(|| kmedoids_pam(&sparse, 2).unwrap()));

    let dense = scattered(400, 50, 2);
    c.bench_function("dbscan_400", |b| {
        b.iter(|| dbscan(&dense, std::f64::consts::SQRT_2, 4).unwrap())
    });
}

fn samples(c: &mut Criterion) {
    let errors = ErrorPair::new(0.025, 0.2).unwrap();
    for (kind, group) in [
        (ScenarioKind::Particles, RecordGroup::Stratified),
        (ScenarioKind::Attractors, RecordGroup::Random),
    ] {
        let config = ExperimentConfig::desk_scale(kind);
        let jobs: Vec<SampleJob> = (0..64)
            .map(|i| SampleJob {
                group,
                index: i,
                stream_index: i,
                truth: sample_truth(&config, group, i).unwrap(),
            })
            .collect();
        c.bench_function(&format!("run_sample_{kind:?}").to_lowercase(), |b| {
            b.iter(|| {
                for job in &jobs {
                    run_sample(&config, errors, job).unwrap();
                }
            })
        });
    }
}

criterion_group!(benches, clustering, samples);
criterion_main!(benches);
