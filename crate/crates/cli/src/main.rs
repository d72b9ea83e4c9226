//! `qcluster`: ROC curves, single experiments, sweeps and estimator tools.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qcluster_core::clustering::{dbscan, kmedoids, Label, PointSet};
use qcluster_core::infotheory::{mi_fixed_a_scheme, mi_plugin, CategoricalHistogram, SampleCheck};
use qcluster_core::pipeline::{
    format_float, run_experiment, run_sweep, write_records_csv, write_roc_csv, ExperimentConfig,
    Family, RocCurves, ScenarioKind,
};
use qcluster_core::roc::RocGrid;
use qcluster_core::{ChannelPattern, Error, ErrorPair, LossChannelPair, Result};

#[derive(Parser)]
#[command(name = "qcluster", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the classical and quantum ROC curves.
    Roc(RocArgs),
    /// Print a default experiment config as JSON.
    Config {
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
        #[arg(long)]
        paper_scale: bool,
    },
    /// Run one experiment at a single operating point.
    Simulate(SimulateArgs),
    /// Sweep the type-1 error for both probe families.
    Sweep(SweepArgs),
    /// Estimate mutual information from a `sample_id,a,d` CSV.
    Mi(MiArgs),
    /// Cluster a 0/1 grid read from a text file.
    Cluster(ClusterArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Attractors,
    Particles,
}

impl From<ScenarioArg> for ScenarioKind {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Attractors => ScenarioKind::Attractors,
            ScenarioArg::Particles => ScenarioKind::Particles,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Classical,
    Quantum,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Classical => Family::Classical,
            FamilyArg::Quantum => Family::Quantum,
        }
    }
}

#[derive(clap::Args)]
struct RocArgs {
    #[arg(long, default_value_t = 0.95)]
    tau0: f64,
    #[arg(long, default_value_t = 0.4)]
    tau1: f64,
    /// Mean photon number per pixel.
    #[arg(long, default_value_t = 8.0)]
    photons: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha_max: f64,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long, default_value_t = 512)]
    a_grid: usize,
    #[arg(long, default_value_t = 512)]
    b_grid: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON config; defaults for `--scenario` when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    scenario: Option<ScenarioArg>,
    /// Use the sample counts of the published figures.
    #[arg(long)]
    paper_scale: bool,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match (&self.config, self.scenario) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(s)) if self.paper_scale => ExperimentConfig::paper_scale(s.into()),
            (None, Some(s)) => ExperimentConfig::desk_scale(s.into()),
            (None, None) => return Err(Error::Config("either --config or --scenario is required".into())),
        };
        if self.config.is_some() && self.paper_scale {
            let paper = ExperimentConfig::paper_scale(config.scenario.kind());
            config.samples_per_point = paper.samples_per_point;
            config.enforce_sample_ratio = paper.enforce_sample_ratio;
        }
        if let Some(n) = self.samples {
            config.samples_per_point = n;
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if self.threads.is_some() {
            config.threads = self.threads;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    type1: f64,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Use this type-2 error instead of the family's ROC curve.
    #[arg(long)]
    type2: Option<f64>,
    /// Write the `(sample_id, a, d)` records here.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Output directory for sweep.csv and meta.json.
    #[arg(long)]
    out: PathBuf,
    /// Also write per-point record files.
    #[arg(long)]
    records: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Joint,
    FixedA,
}

#[derive(clap::Args)]
struct MiArgs {
    /// CSV with header `sample_id,a,d`.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "joint")]
    scheme: Scheme,
    /// Largest value of `a` (joint scheme); the largest observed when absent.
    #[arg(long)]
    max_a: Option<u64>,
    /// Number of possible `d` outcomes; enforces the P/N < 1/10 rule
    /// (fixed-a scheme).
    #[arg(long)]
    outcomes: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Kmedoids,
    Dbscan,
}

#[derive(clap::Args)]
struct ClusterArgs {
    /// Text file with one row of `0`/`1` characters per grid row.
    input: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    eps: f64,
    #[arg(long, default_value_t = 4)]
    min_pts: usize,
    #[arg(long, default_value_t = 10)]
    cap: u32,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Roc(args) => roc(args),
        Command::Config {
            scenario,
            paper_scale,
        } => default_config(scenario, paper_scale),
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
        Command::Mi(args) => mi(args),
        Command::Cluster(args) => cluster(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn default_config(scenario: ScenarioArg, paper_scale: bool) -> Result<()> {
    let config = if paper_scale {
        ExperimentConfig::paper_scale(scenario.into())
    } else {
        ExperimentConfig::desk_scale(scenario.into())
    };
    print_json(&serde_json::to_value(config)?)
}

fn roc(args: RocArgs) -> Result<()> {
    let pair = LossChannelPair::new(args.tau0, args.tau1, args.photons)?;
    if args.points < 2 {
        return Err(Error::Domain("--points must be at least 2".into()));
    }
    let grid = RocGrid {
        a_grid: args.a_grid,
        b_grid: args.b_grid,
    };
    let alphas: Vec<f64> = (0..args.points)
        .map(|i| args.alpha_max * i as f64 / (args.points - 1) as f64)
        .collect();
    let curves = RocCurves::compute(&pair, grid, args.alpha_max, &alphas)?;
    let table = curves.table(args.alpha_max, args.points)?;
    match args.out {
        Some(path) => write_roc_csv(&path, &table),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "alpha,beta_classical,beta_quantum")?;
            for (a, bc, bq) in table {
                writeln!(out, "{},{},{}", format_float(a), format_float(bc), format_float(bq))?;
            }
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut config = args.run.resolve()?;
    config.type1_grid = vec![args.type1];
    let family: Family = args.family.into();
    let type2 = match args.type2 {
        Some(b) => b,
        None => RocCurves::for_config(&config)?.curve(family).lookup(args.type1)?,
    };
    let result = run_experiment(&config, ErrorPair::new(args.type1, type2)?)?;
    if let Some(path) = &args.records {
        write_records_csv(path, &result.records)?;
    }
    print_json(&json!({
        "scenario": config.scenario.kind(),
        "family": family,
        "type1": args.type1,
        "type2": type2,
        "samples_per_point": config.samples_per_point,
        "master_seed": config.master_seed,
        "mi": result.mi,
        "placement_retries": result.retries,
        "sample_ratio_ok": result.sample_ratio_ok,
    }))
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut config = args.run.resolve()?;
    config.write_records |= args.records;
    let curves = RocCurves::for_config(&config)?;
    let report = run_sweep(&config, &curves, Some(&args.out))?;
    log::info!(
        "{} rows ({} resumed) written to {}",
        report.rows.len(),
        report.resumed_rows,
        args.out.join("sweep.csv").display()
    );
    Ok(())
}

#[derive(serde::Deserialize)]
struct RecordRow {
    sample_id: String,
    a: u64,
    d: u64,
}

fn read_records(path: &Path) -> Result<Vec<RecordRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let rows = reader.deserialize().collect::<std::result::Result<Vec<RecordRow>, _>>()?;
    if rows.is_empty() {
        return Err(Error::InsufficientSamples(format!("{} has no records", path.display())));
    }
    Ok(rows)
}

fn mi(args: MiArgs) -> Result<()> {
    let rows = read_records(&args.input)?;
    let estimate = match args.scheme {
        Scheme::Joint => {
            let max_a = args
                .max_a
                .unwrap_or_else(|| rows.iter().map(|r| r.a).max().unwrap_or(0));
            let pairs: Vec<(u64, u64)> = rows.iter().map(|r| (r.a, r.d)).collect();
            mi_plugin(&pairs, max_a)?
        }
        Scheme::FixedA => {
            let mut marginal = CategoricalHistogram::new();
            let mut fixed: BTreeMap<u64, CategoricalHistogram> = BTreeMap::new();
            for r in &rows {
                match parse_group(&r.sample_id)? {
                    None => marginal.add(r.d),
                    Some(j) => fixed.entry(j).or_default().add(r.d),
                }
            }
            let conditional: Vec<CategoricalHistogram> = fixed.into_values().collect();
            let check = match args.outcomes {
                Some(outcomes) => SampleCheck::Enforce { outcomes },
                None => SampleCheck::Skip,
            };
            mi_fixed_a_scheme(&marginal, &conditional, check)?
        }
    };
    print_json(&serde_json::to_value(estimate)?)
}

/// `r<i>` belongs to the random-truth run, `f<j>_<i>` to fixed truth `j`.
fn parse_group(sample_id: &str) -> Result<Option<u64>> {
    let bad = || Error::Domain(format!("sample id {sample_id:?} is neither r<i> nor f<j>_<i>"));
    if let Some(rest) = sample_id.strip_prefix('r') {
        rest.parse::<u64>().map_err(|_| bad())?;
        return Ok(None);
    }
    let rest = sample_id.strip_prefix('f').ok_or_else(bad)?;
    let (j, i) = rest.split_once('_').ok_or_else(bad)?;
    i.parse::<u64>().map_err(|_| bad())?;
    j.parse::<u64>().map(Some).map_err(|_| bad())
}

fn cluster(args: ClusterArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.input.display())))?;
    let pattern = ChannelPattern::from_text(&text)?;
    let points = PointSet::from_pattern(&pattern);
    let value = match args.algo {
        Algo::Kmedoids => serde_json::to_value(kmedoids(&points, args.k)?)?,
        Algo::Dbscan => {
            let result = dbscan(&points, args.eps, args.min_pts)?;
            let labels: Vec<serde_json::Value> = points
                .points()
                .iter()
                .zip(&result.labels)
                .map(|(p, l)| {
                    let label = match l {
                        Label::Noise => 0,
                        Label::Cluster(c) => *c,
                    };
                    json!([p.row, p.col, label])
                })
                .collect();
            json!({
                "cluster_count": result.cluster_count,
                "capped_count": result.cluster_count.min(args.cap),
                "labels": labels,
            })
        }
    };
    print_json(&value)
}
