//! One Monte Carlo experiment: many samples of `A -> B -> C -> D` at a fixed
//! error pair, reduced to a mutual information estimate.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Scenario};
use super::seed::{seed_stream, stage_tag, Stage};
use crate::channel::{apply_measurement_noise, ErrorPair};
use crate::clustering::{count_clusters, dbscan, kmedoids, PointSet};
use crate::error::{Error, Result};
use crate::infotheory::{
    mi_fixed_a_scheme, mi_plugin, CategoricalHistogram, MiEstimate, SampleCheck,
};
use crate::scene::{
    attractor_occupancy, place_particles, sample_attractor_truth, sample_pattern_from_probs,
    AttractorTruth, ChannelPattern, GridSpec, ParticleTruth, Pixel,
};

pub const DBSCAN_EPS: f64 = std::f64::consts::SQRT_2;
pub const DBSCAN_MIN_PTS: usize = 4;
/// Placement attempts per sample before giving up.
pub const MAX_ATTEMPTS: u8 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    Particles(ParticleTruth),
    Attractors(AttractorTruth),
}

/// Which histogram a sample feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecordGroup {
    /// Particle scenario, `A` stratified by sample index.
    Stratified,
    /// Attractor scenario, random `A`.
    Random,
    /// Attractor scenario, `A` held at the given fixed truth.
    Fixed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleJob {
    pub group: RecordGroup,
    /// Position within the group.
    pub index: u64,
    /// Index used for the random substreams, unique over the experiment.
    pub stream_index: u64,
    pub truth: Truth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleOutcome {
    pub d: u64,
    /// Placement attempts that had to be discarded.
    pub retries: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Record {
    #[serde(skip)]
    pub group: RecordGroup,
    #[serde(skip)]
    pub index: u64,
    pub a: u64,
    pub d: u64,
}

impl Record {
    /// `<i>` for stratified samples, `r<i>` for random-truth samples and
    /// `f<j>_<i>` for samples at fixed truth `j`.
    pub fn sample_id(&self) -> String {
        match self.group {
            RecordGroup::Stratified => self.index.to_string(),
            RecordGroup::Random => format!("r{}", self.index),
            RecordGroup::Fixed(j) => format!("f{j}_{}", self.index),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub mi: MiEstimate,
    pub records: Vec<Record>,
    pub retries: u64,
    /// False when an attractor histogram had fewer than ten samples per
    /// possible outcome.
    pub sample_ratio_ok: bool,
}

/// Dense index of the pair `p < q` among all pairs of `0..n`.
pub fn pair_rank(p: u64, q: u64, n: u64) -> u64 {
    debug_assert!(p < q && q < n);
    p * (2 * n - p - 1) / 2 + (q - p - 1)
}

fn linear(pixel: Pixel, grid: GridSpec) -> u64 {
    pixel.row as u64 * grid.side() as u64 + pixel.col as u64
}

/// Number of unordered pixel pairs; also the code of the degenerate
/// clustering outcome.
pub fn pair_count(grid: GridSpec) -> u64 {
    let n = grid.pixels() as u64;
    n * (n - 1) / 2
}

fn encode_pair(a: Pixel, b: Pixel, grid: GridSpec) -> u64 {
    let (p, q) = (linear(a, grid), linear(b, grid));
    let (p, q) = if p < q { (p, q) } else { (q, p) };
    pair_rank(p, q, grid.pixels() as u64)
}

/// Canonical integer encoding of a truth.
pub fn encode_truth(truth: &Truth, grid: GridSpec) -> u64 {
    match truth {
        Truth::Particles(t) => t.count as u64,
        Truth::Attractors(t) => {
            let [a, b] = t.coords();
            encode_pair(a, b, grid)
        }
    }
}

/// The estimate `D`, computed from the measurement result alone.
pub fn estimate(scenario: &Scenario, measured: &ChannelPattern) -> Result<u64> {
    let points = PointSet::from_pattern(measured);
    match scenario {
        Scenario::Particles(p) => {
            let clusters = dbscan(&points, DBSCAN_EPS, DBSCAN_MIN_PTS)?;
            Ok(count_clusters(&clusters, p.max_particles) as u64)
        }
        Scenario::Attractors(_) => {
            let grid = measured.grid();
            let r = kmedoids(&points, 2)?;
            if r.degenerate {
                return Ok(pair_count(grid));
            }
            Ok(encode_pair(r.medoids[0], r.medoids[1], grid))
        }
    }
}

/// Truth for one sample of a group.
pub fn sample_truth(config: &ExperimentConfig, group: RecordGroup, index: u64) -> Result<Truth> {
    let grid = config.grid()?;
    match (&config.scenario, group) {
        (Scenario::Particles(p), RecordGroup::Stratified) => Ok(Truth::Particles(ParticleTruth {
            count: (index % (p.max_particles as u64 + 1)) as u32,
        })),
        (Scenario::Attractors(p), RecordGroup::Random) => {
            let mut rng = seed_stream(config.master_seed, index, stage_tag(Stage::Truth, 0))?;
            Ok(Truth::Attractors(sample_attractor_truth(&mut rng, grid, p)?))
        }
        (Scenario::Attractors(p), RecordGroup::Fixed(j)) => {
            let mut rng = seed_stream(config.master_seed, j as u64, stage_tag(Stage::FixedTruth, 0))?;
            Ok(Truth::Attractors(sample_attractor_truth(&mut rng, grid, p)?))
        }
        (_, group) => Err(Error::Config(format!(
            "record group {group:?} does not belong to the {:?} scenario",
            config.scenario.kind()
        ))),
    }
}

/// Groups and their sizes for one experiment.
pub fn experiment_groups(config: &ExperimentConfig) -> Vec<RecordGroup> {
    match config.scenario {
        Scenario::Particles(_) => vec![RecordGroup::Stratified],
        Scenario::Attractors(_) => std::iter::once(RecordGroup::Random)
            .chain((0..config.fixed_truths as u32).map(RecordGroup::Fixed))
            .collect(),
    }
}

/// Generates `B` from the truth, applies the channel and estimates `D`.
pub fn run_sample(config: &ExperimentConfig, errors: ErrorPair, job: &SampleJob) -> Result<SampleOutcome> {
    let grid = config.grid()?;
    let seed = config.master_seed;
    let noise_stream = || seed_stream(seed, job.stream_index, stage_tag(Stage::Noise, 0));
    match (&config.scenario, &job.truth) {
        (Scenario::Attractors(params), Truth::Attractors(truth)) => {
            let occupancy = attractor_occupancy(truth, grid, params);
            let mut rng = seed_stream(seed, job.stream_index, stage_tag(Stage::Pattern, 0))?;
            let pattern = sample_pattern_from_probs(&mut rng, &occupancy);
            let measured = apply_measurement_noise(&mut noise_stream()?, &pattern, errors);
            Ok(SampleOutcome {
                d: estimate(&config.scenario, &measured)?,
                retries: 0,
            })
        }
        (Scenario::Particles(params), Truth::Particles(truth)) => {
            for attempt in 0..MAX_ATTEMPTS {
                let mut rng = seed_stream(seed, job.stream_index, stage_tag(Stage::Pattern, attempt))?;
                match place_particles(&mut rng, grid, *truth, params) {
                    Ok(pattern) => {
                        let measured = apply_measurement_noise(&mut noise_stream()?, &pattern, errors);
                        return Ok(SampleOutcome {
                            d: estimate(&config.scenario, &measured)?,
                            retries: attempt as u32,
                        });
                    }
                    Err(Error::Placement(msg)) => {
                        log::debug!("sample {}: attempt {attempt} failed: {msg}", job.stream_index);
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(Error::Placement(format!(
                "sample {}: {MAX_ATTEMPTS} placement attempts failed",
                job.stream_index
            )))
        }
        _ => Err(Error::Consistency("truth does not match the scenario".into())),
    }
}

/// Runs every sample of the experiment through `sampler` and reduces the
/// records to a mutual information estimate.
///
/// Samples run in parallel on `config.threads` workers; results are collected
/// in sample order, so the estimate does not depend on the thread count.
pub fn run_experiment_with<F>(config: &ExperimentConfig, sampler: F) -> Result<ExperimentResult>
where
    F: Fn(&SampleJob) -> Result<SampleOutcome> + Sync,
{
    config.validate()?;
    let grid = config.grid()?;
    let n = config.samples_per_point;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let groups = experiment_groups(config);
    let mut records = Vec::with_capacity(groups.len() * n as usize);
    let mut retries = 0u64;
    for (g, &group) in groups.iter().enumerate() {
        let fixed = match group {
            RecordGroup::Fixed(_) => Some(sample_truth(config, group, 0)?),
            _ => None,
        };
        let outcomes: Vec<(Truth, SampleOutcome)> = pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(|index| {
                    let truth = match fixed {
                        Some(t) => t,
                        None => sample_truth(config, group, index)?,
                    };
                    let job = SampleJob {
                        group,
                        index,
                        stream_index: g as u64 * n + index,
                        truth,
                    };
                    sampler(&job).map(|o| (truth, o))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for (index, (truth, outcome)) in outcomes.into_iter().enumerate() {
            retries += outcome.retries as u64;
            records.push(Record {
                group,
                index: index as u64,
                a: encode_truth(&truth, grid),
                d: outcome.d,
            });
        }
    }
    if retries > 0 {
        log::info!("{retries} placement retries");
    }

    match config.scenario {
        Scenario::Particles(p) => {
            let pairs: Vec<(u64, u64)> = records.iter().map(|r| (r.a, r.d)).collect();
            Ok(ExperimentResult {
                mi: mi_plugin(&pairs, p.max_particles as u64)?,
                records,
                retries,
                sample_ratio_ok: true,
            })
        }
        Scenario::Attractors(_) => {
            let outcomes = pair_count(grid) + 1;
            let sample_ratio_ok = outcomes.saturating_mul(10) <= n;
            let check = if config.enforce_sample_ratio {
                SampleCheck::Enforce { outcomes }
            } else {
                if !sample_ratio_ok {
                    log::warn!(
                        "{n} samples per histogram for {outcomes} outcomes is outside the P/N < 1/10 regime"
                    );
                }
                SampleCheck::Skip
            };
            let hist = |group: RecordGroup| -> CategoricalHistogram {
                records.iter().filter(|r| r.group == group).map(|r| r.d).collect()
            };
            let h_d = hist(RecordGroup::Random);
            let conditional: Vec<CategoricalHistogram> = (0..config.fixed_truths as u32)
                .map(|j| hist(RecordGroup::Fixed(j)))
                .collect();
            Ok(ExperimentResult {
                mi: mi_fixed_a_scheme(&h_d, &conditional, check)?,
                records,
                retries,
                sample_ratio_ok,
            })
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig, errors: ErrorPair) -> Result<ExperimentResult> {
    run_experiment_with(config, |job| run_sample(config, errors, job))
}
