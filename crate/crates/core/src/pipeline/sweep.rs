//! Type-1 error sweeps over both probe families, with crash-safe output.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, RocSource, Scenario};
use super::experiment::{run_experiment, ExperimentResult, Record};
use super::output::{format_float, LineWriter};
use super::seed::PRNG_ID;
use crate::channel::ErrorPair;
use crate::error::{Error, Result};
use crate::infotheory::{joint_plugin_bias, MiEstimate, MiMethod};
use crate::roc::{classical_roc_at, quantum_roc, CurveKind, LossChannelPair, RocCurve, RocGrid};

pub const SWEEP_HEADER: [&str; 7] = [
    "type1",
    "type2_classical",
    "type2_quantum",
    "mi_classical",
    "var_classical",
    "mi_quantum",
    "var_quantum",
];
pub const ROC_HEADER: [&str; 3] = ["alpha", "beta_classical", "beta_quantum"];

/// Lower end of the type-1 range covered by computed curves.
const MIN_ALPHA_MAX: f64 = 0.05;
/// Evenly spaced points of a computed classical curve.
const CLASSICAL_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Classical,
    Quantum,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Classical => "classical",
            Family::Quantum => "quantum",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurves {
    pub classical: RocCurve,
    pub quantum: RocCurve,
}

impl RocCurves {
    pub fn curve(&self, family: Family) -> &RocCurve {
        match family {
            Family::Classical => &self.classical,
            Family::Quantum => &self.quantum,
        }
    }

    /// Computes both curves on `[0, alpha_max]`, the classical one sampled
    /// densely and additionally at `extra_alphas`.
    pub fn compute(
        pair: &LossChannelPair,
        grid: RocGrid,
        alpha_max: f64,
        extra_alphas: &[f64],
    ) -> Result<Self> {
        let mut alphas: Vec<f64> = (0..CLASSICAL_POINTS)
            .map(|i| alpha_max * i as f64 / (CLASSICAL_POINTS - 1) as f64)
            .collect();
        alphas.extend(extra_alphas.iter().filter(|&&a| a <= alpha_max));
        Ok(Self {
            classical: classical_roc_at(pair, &alphas)?,
            quantum: quantum_roc(pair, grid, alpha_max)?,
        })
    }

    pub fn for_config(config: &ExperimentConfig) -> Result<Self> {
        match &config.roc_source {
            RocSource::Computed(grid) => {
                let alpha_max = config
                    .type1_grid
                    .iter()
                    .copied()
                    .fold(MIN_ALPHA_MAX, f64::max);
                Self::compute(&config.probe, *grid, alpha_max, &config.type1_grid)
            }
            RocSource::File(path) => Self::read_csv(path),
        }
    }

    /// Reads a table with columns `alpha,beta_classical,beta_quantum`.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| Error::Config(format!("cannot read ROC table {}: {e}", path.display())))?;
        if reader.headers()?.iter().ne(ROC_HEADER) {
            return Err(Error::Config(format!(
                "ROC table {} must have header {}",
                path.display(),
                ROC_HEADER.join(",")
            )));
        }
        let (mut classical, mut quantum) = (Vec::new(), Vec::new());
        for row in reader.deserialize::<(f64, f64, f64)>() {
            let (a, bc, bq) = row?;
            classical.push((a, bc));
            quantum.push((a, bq));
        }
        Ok(Self {
            classical: RocCurve::new(classical, CurveKind::ClassicalOptimalLowerBound)?,
            quantum: RocCurve::new(quantum, CurveKind::QuantumAchievableUpperBound)?,
        })
    }

    /// Both curves at `points` evenly spaced type-1 errors on
    /// `[0, alpha_max]`.
    pub fn table(&self, alpha_max: f64, points: usize) -> Result<Vec<(f64, f64, f64)>> {
        (0..points)
            .map(|i| {
                let a = alpha_max * i as f64 / (points.max(2) - 1) as f64;
                Ok((a, self.classical.lookup(a)?, self.quantum.lookup(a)?))
            })
            .collect()
    }
}

pub fn write_roc_csv(path: &Path, table: &[(f64, f64, f64)]) -> Result<()> {
    let mut w = LineWriter::create(path)?;
    w.line(&ROC_HEADER.map(String::from))?;
    for &(a, bc, bq) in table {
        w.line(&[format_float(a), format_float(bc), format_float(bq)])?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub type1: f64,
    pub type2_classical: f64,
    pub type2_quantum: f64,
    pub mi_classical: MiEstimate,
    pub mi_quantum: MiEstimate,
}

impl SweepRow {
    pub fn type2(&self, family: Family) -> f64 {
        match family {
            Family::Classical => self.type2_classical,
            Family::Quantum => self.type2_quantum,
        }
    }

    pub fn mi(&self, family: Family) -> &MiEstimate {
        match family {
            Family::Classical => &self.mi_classical,
            Family::Quantum => &self.mi_quantum,
        }
    }

    fn fields(&self) -> Vec<String> {
        [
            self.type1,
            self.type2_classical,
            self.type2_quantum,
            self.mi_classical.value,
            self.mi_classical.variance_bound,
            self.mi_quantum.value,
            self.mi_quantum.variance_bound,
        ]
        .iter()
        .map(|&x| format_float(x))
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Rows read back from an earlier, interrupted run.
    pub resumed_rows: usize,
    pub placement_retries: u64,
    pub sample_ratio_ok: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    config: ExperimentConfig,
    master_seed: u64,
    prng: String,
    code_version: String,
    complete: bool,
    rows: usize,
    resumed_rows: usize,
    placement_retries: u64,
    sample_ratio_ok: bool,
    wall_time_seconds: f64,
}

/// Error pair for the given family at type-1 error `alpha`.
pub fn errors_at(curves: &RocCurves, family: Family, alpha: f64) -> Result<(f64, ErrorPair)> {
    let beta = curves.curve(family).lookup(alpha)?;
    Ok((beta, ErrorPair::new(alpha, beta)?))
}

/// Runs both families at every type-1 error of the config.
///
/// With `out_dir`, each row is appended to `sweep.csv` as soon as it is done
/// and an existing `sweep.csv` from the same config is resumed after its last
/// complete row.
pub fn run_sweep(
    config: &ExperimentConfig,
    curves: &RocCurves,
    out_dir: Option<&Path>,
) -> Result<SweepReport> {
    config.validate()?;
    let started = Instant::now();
    for &alpha in &config.type1_grid {
        for family in [Family::Classical, Family::Quantum] {
            errors_at(curves, family, alpha)?;
        }
    }

    let mut rows = match out_dir {
        Some(dir) => prepare_output(config, dir)?,
        None => Vec::new(),
    };
    let resumed_rows = rows.len();
    let mut writer = match out_dir {
        Some(dir) => {
            let path = dir.join("sweep.csv");
            let fresh = fs::metadata(&path).map_or(true, |m| m.len() == 0);
            let mut w = LineWriter::append(&path)?;
            if fresh {
                w.line(&SWEEP_HEADER.map(String::from))?;
            }
            Some(w)
        }
        None => None,
    };

    let mut retries = 0;
    let mut sample_ratio_ok = true;
    for &alpha in &config.type1_grid[resumed_rows..] {
        let mut run = |family: Family| -> Result<(f64, ExperimentResult)> {
            let (beta, errors) = errors_at(curves, family, alpha)?;
            let result = run_experiment(config, errors)?;
            retries += result.retries;
            sample_ratio_ok &= result.sample_ratio_ok;
            if let (Some(dir), true) = (out_dir, config.write_records) {
                write_records_csv(&dir.join(records_file_name(alpha, family)), &result.records)?;
            }
            log::info!(
                "type1 {} {}: type2 {}, MI {} (variance bound {})",
                format_float(alpha),
                family.name(),
                format_float(beta),
                format_float(result.mi.value),
                format_float(result.mi.variance_bound)
            );
            Ok((beta, result))
        };
        let (type2_classical, classical) = run(Family::Classical)?;
        let (type2_quantum, quantum) = run(Family::Quantum)?;
        let row = SweepRow {
            type1: alpha,
            type2_classical,
            type2_quantum,
            mi_classical: classical.mi,
            mi_quantum: quantum.mi,
        };
        if let Some(w) = writer.as_mut() {
            w.line(&row.fields())?;
        }
        rows.push(row);
    }

    let report = SweepReport {
        rows,
        resumed_rows,
        placement_retries: retries,
        sample_ratio_ok,
    };
    if let Some(dir) = out_dir {
        write_meta(dir, config, &report, true, started.elapsed().as_secs_f64())?;
    }
    Ok(report)
}

/// Creates the output directory, checks an earlier run for compatibility
/// and returns its completed rows.
fn prepare_output(config: &ExperimentConfig, dir: &Path) -> Result<Vec<SweepRow>> {
    fs::create_dir_all(dir)?;
    let meta_path = dir.join("meta.json");
    let sweep_path = dir.join("sweep.csv");
    if meta_path.exists() && sweep_path.exists() {
        let meta: Meta = serde_json::from_str(&fs::read_to_string(&meta_path)?)?;
        let mut earlier = meta.config.clone();
        earlier.threads = config.threads;
        if earlier != *config {
            return Err(Error::Config(format!(
                "{} holds a sweep with a different config; use another output directory",
                dir.display()
            )));
        }
    } else if sweep_path.exists() {
        return Err(Error::Config(format!(
            "{} exists without meta.json; remove it or use another output directory",
            sweep_path.display()
        )));
    }
    let rows = if sweep_path.exists() {
        read_sweep_rows(config, &sweep_path)?
    } else {
        Vec::new()
    };
    let pending = SweepReport {
        rows: rows.clone(),
        resumed_rows: rows.len(),
        placement_retries: 0,
        sample_ratio_ok: true,
    };
    write_meta(dir, config, &pending, false, 0.0)?;
    if !rows.is_empty() {
        log::info!("resuming after {} completed rows", rows.len());
    }
    Ok(rows)
}

fn read_sweep_rows(config: &ExperimentConfig, path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    if reader.headers()?.iter().ne(SWEEP_HEADER) {
        return Err(Error::Config(format!("{} has an unexpected header", path.display())));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<[f64; 7]>().enumerate() {
        let f = record.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        match config.type1_grid.get(i) {
            Some(&alpha) if format_float(alpha) == format_float(f[0]) => {}
            _ => {
                return Err(Error::Config(format!(
                    "{} row {} does not match the configured type-1 grid",
                    path.display(),
                    i + 1
                )))
            }
        }
        let mi = |value, variance_bound| resumed_estimate(config, value, variance_bound);
        rows.push(SweepRow {
            type1: config.type1_grid[i],
            type2_classical: f[1],
            type2_quantum: f[2],
            mi_classical: mi(f[3], f[4]),
            mi_quantum: mi(f[5], f[6]),
        });
    }
    Ok(rows)
}

fn resumed_estimate(config: &ExperimentConfig, value: f64, variance_bound: f64) -> MiEstimate {
    match config.scenario {
        Scenario::Particles(p) => MiEstimate {
            value,
            variance_bound,
            bias: joint_plugin_bias(config.samples_per_point, p.max_particles as u64),
            method: MiMethod::JointPlugin,
        },
        Scenario::Attractors(_) => MiEstimate {
            value,
            variance_bound,
            bias: 0.0,
            method: MiMethod::FixedAScheme,
        },
    }
}

pub fn records_file_name(alpha: f64, family: Family) -> String {
    format!("records_{}_{}.csv", format_float(alpha), family.name())
}

/// Writes `sample_id,a,d` rows.
pub fn write_records_csv(path: &Path, records: &[Record]) -> Result<()> {
    let mut w = LineWriter::create(path)?;
    w.line(&["sample_id".into(), "a".into(), "d".into()])?;
    for r in records {
        w.line(&[r.sample_id(), r.a.to_string(), r.d.to_string()])?;
    }
    Ok(())
}

fn write_meta(
    dir: &Path,
    config: &ExperimentConfig,
    report: &SweepReport,
    complete: bool,
    wall_time_seconds: f64,
) -> Result<()> {
    let meta = Meta {
        config: config.clone(),
        master_seed: config.master_seed,
        prng: PRNG_ID.into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        complete,
        rows: report.rows.len(),
        resumed_rows: report.resumed_rows,
        placement_retries: report.placement_retries,
        sample_ratio_ok: report.sample_ratio_ok,
        wall_time_seconds,
    };
    let tmp = dir.join("meta.json.tmp");
    fs::write(&tmp, serde_json::to_string_pretty(&meta)? + "\n")?;
    fs::rename(tmp, dir.join("meta.json"))?;
    Ok(())
}
