//! Exit criteria. Each test prints one `[PASS]`/`[FAIL]` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` shows the
//! whole table.

use std::collections::HashSet;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcluster_core::clustering::{dbscan, kmedoids, kmedoids_pam, Label, PointSet};
use qcluster_core::infotheory::{entropy_bias, entropy_variance_bound, plugin_entropy};
use qcluster_core::linalg::{congruence, max_abs_diff, trace, Matrix, SymmetricEigen};
use qcluster_core::pipeline::{run_sweep, RocCurves, SweepRow};
use qcluster_core::roc::gaussian::{thermal_vacuum, two_mode_squeezer};
use qcluster_core::roc::{
    build_output_states, classical_beta, classical_fidelity, classical_roc_at,
    diagonalizing_params, mixture_fidelity_candidate, quantum_roc, tmsv_output_covariance,
    RocGrid,
};
use qcluster_core::scene::{place_particles, ParticleParams, ParticleTruth};
use qcluster_core::{
    CategoricalHistogram, ExperimentConfig, GridSpec, LossChannelPair, Pixel, ScenarioKind,
};

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("[{}] {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// Error bar drawn for one estimate: the reported variance.
fn bar(v: f64) -> f64 {
    v
}

fn type1_grid(points: usize, alpha_max: f64) -> Vec<f64> {
    (0..points)
        .map(|i| alpha_max * i as f64 / (points - 1) as f64)
        .collect()
}

#[test]
fn c01_classical_roc_endpoints() {
    let start = Instant::now();
    let f = classical_fidelity(&LossChannelPair::reference());
    let b0 = classical_beta(0.0, f).unwrap();
    let b5 = classical_beta(0.05, f).unwrap();
    let elapsed = start.elapsed();
    let pass = (0.3913..=0.3923).contains(&b0) && (0.1889..=0.1909).contains(&b5) && within(elapsed, 1.0);
    report(
        1,
        "classical ROC endpoints",
        pass,
        format!("beta(0)={b0:.6} beta(0.05)={b5:.6} in {elapsed:.2?}"),
    );
}

#[test]
fn c02_classical_optimality() {
    let start = Instant::now();
    let pair = LossChannelPair::reference();
    let f = classical_fidelity(&pair);
    let m = pair.mean_photons();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let n0 = rng.gen_range(0.0..=m);
        let p0 = rng.gen_range(0.0..1.0);
        let candidate = mixture_fidelity_candidate(n0, p0, &pair).unwrap();
        worst = worst.min(candidate - f);
    }
    let elapsed = start.elapsed();
    let pass = worst >= -1e-12 && within(elapsed, 1.0);
    report(
        2,
        "classical optimality",
        pass,
        format!("min(candidate - F) = {worst:.3e} over 1e4 draws in {elapsed:.2?}"),
    );
}

fn quantum_and_classical() -> (Vec<(f64, f64, f64)>, Duration) {
    let pair = LossChannelPair::reference();
    let start = Instant::now();
    let quantum = quantum_roc(&pair, RocGrid::default(), 0.05).unwrap();
    let elapsed = start.elapsed();
    let alphas = type1_grid(101, 0.05);
    let classical = classical_roc_at(&pair, &alphas).unwrap();
    let table = alphas
        .iter()
        .map(|&a| (a, classical.lookup(a).unwrap(), quantum.lookup(a).unwrap()))
        .collect();
    (table, elapsed)
}

#[test]
fn c03_quantum_roc_endpoints() {
    let (table, elapsed) = quantum_and_classical();
    let q0 = table[0].2;
    let q5 = table[100].2;
    let pass = (0.138..=0.146).contains(&q0) && (0.105..=0.116).contains(&q5) && within(elapsed, 120.0);
    report(
        3,
        "quantum ROC endpoints",
        pass,
        format!("beta(0)={q0:.6} beta(0.05)={q5:.6} in {elapsed:.2?}"),
    );
}

#[test]
fn c04_quantum_dominance() {
    let (table, _) = quantum_and_classical();
    let violations: Vec<f64> = table.iter().filter(|(_, c, q)| q >= c).map(|t| t.0).collect();
    let min_gap = table.iter().map(|(_, c, q)| c - q).fold(f64::INFINITY, f64::min);
    report(
        4,
        "quantum dominance",
        violations.is_empty(),
        format!("{} of 101 points violate; min(classical - quantum) = {min_gap:.6}", violations.len()),
    );
}

/// Largest entry of `|V E V^T - rho|`.
fn eigen_residual(rho: &Matrix<8>) -> (f64, f64) {
    let eig = SymmetricEigen::new(rho).unwrap();
    let mut worst = 0.0f64;
    for i in 0..8 {
        for j in 0..8 {
            let rebuilt: f64 = (0..8).map(|k| eig.vectors[k][i] * eig.values[k] * eig.vectors[k][j]).sum();
            worst = worst.max((rebuilt - rho[i][j]).abs());
        }
    }
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    (worst, min)
}

/// Largest mismatch between each channel output and its two-mode-squeezed
/// thermal-vacuum form, including the relative frame.
fn frame_residual(pair: &LossChannelPair) -> f64 {
    let p = diagonalizing_params(pair).unwrap();
    let v0 = tmsv_output_covariance(pair.tau0(), pair.mean_photons()).unwrap();
    let v1 = tmsv_output_covariance(pair.tau1(), pair.mean_photons()).unwrap();
    let r0 = max_abs_diff(&congruence(&two_mode_squeezer(p.r0), &thermal_vacuum(p.nbar0)), v0.entries());
    let r1 = max_abs_diff(&congruence(&two_mode_squeezer(p.r1), &thermal_vacuum(p.nbar1)), v1.entries());
    let relative = max_abs_diff(
        &congruence(&two_mode_squeezer(p.r), &thermal_vacuum(p.nbar1)),
        &v1.transformed(&two_mode_squeezer(-p.r0)),
    );
    r0.max(r1).max(relative)
}

#[test]
fn c05_three_qubit_states() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut trace_err, mut min_eig, mut residual) = (0.0f64, f64::INFINITY, 0.0f64);
    for _ in 0..100 {
        let pair = LossChannelPair::new(
            rng.gen_range(0.05..=1.0),
            rng.gen_range(0.05..=1.0),
            rng.gen_range(0.1..=20.0),
        )
        .unwrap();
        let a = rng.gen_range(0.0..=1.0);
        let (rho0, rho1) = build_output_states(&pair, a).unwrap();
        for rho in [&rho0, &rho1] {
            trace_err = trace_err.max((trace(rho.entries()) - 1.0).abs());
            let (res, min) = eigen_residual(rho.entries());
            min_eig = min_eig.min(min);
            residual = residual.max(res);
        }
        residual = residual.max(frame_residual(&pair));
    }
    let elapsed = start.elapsed();
    let pass = trace_err < 1e-12 && min_eig > -1e-10 && residual < 1e-9 && within(elapsed, 5.0);
    report(
        5,
        "three-qubit state validity",
        pass,
        format!(
            "max trace error {trace_err:.2e}, min eigenvalue {min_eig:.2e}, max residual {residual:.2e} in {elapsed:.2?}"
        ),
    );
}

fn random_points(rng: &mut ChaCha8Rng, max_len: usize, side: u32) -> PointSet {
    let len = rng.gen_range(0..=max_len);
    let mut seen = HashSet::new();
    while seen.len() < len {
        seen.insert(Pixel::new(rng.gen_range(0..side), rng.gen_range(0..side)));
    }
    PointSet::new(seen.into_iter().collect()).unwrap()
}

fn brute_force_cost(points: &[Pixel], k: usize) -> i64 {
    fn walk(points: &[Pixel], k: usize, start: usize, chosen: &mut Vec<usize>, best: &mut i64) {
        if chosen.len() == k {
            let cost = points
                .iter()
                .map(|p| chosen.iter().map(|&m| p.dist2(&points[m])).min().unwrap())
                .sum();
            *best = (*best).min(cost);
            return;
        }
        for i in start..points.len() {
            chosen.push(i);
            walk(points, k, i + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = i64::MAX;
    walk(points, k, 0, &mut Vec::new(), &mut best);
    best
}

/// Clusters are the connected components of core points under the
/// `eps`-neighbor relation.
fn component_count(points: &[Pixel], eps2: i64, min_pts: usize) -> u32 {
    let n = points.len();
    let near = |i: usize, j: usize| points[i].dist2(&points[j]) <= eps2;
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_pts).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if core[i] && core[j] && near(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: HashSet<usize> = (0..n).filter(|&i| core[i]).map(|i| find(&mut parent, i)).collect();
    roots.len() as u32
}

#[test]
fn c06_clustering_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    let (mut km_mismatch, mut pam_mismatch) = (0, 0);
    for _ in 0..1000 {
        let points = random_points(&mut rng, 18, 12);
        let k = rng.gen_range(1..=3);
        if points.len() < k {
            continue;
        }
        let best = brute_force_cost(points.points(), k);
        if kmedoids(&points, k).unwrap().cost != best {
            km_mismatch += 1;
        }
        if kmedoids_pam(&points, k).unwrap().cost != best {
            pam_mismatch += 1;
        }
    }

    let mut db_mismatch = 0;
    for _ in 0..1000 {
        let side = rng.gen_range(8..=30);
        let points = random_points(&mut rng, 200.min((side * side) as usize), side);
        let got = dbscan(&points, std::f64::consts::SQRT_2, 4).unwrap();
        if got.cluster_count != component_count(points.points(), 2, 4) {
            db_mismatch += 1;
        }
    }

    let grid = GridSpec::new(50).unwrap();
    let pattern = place_particles(&mut rng, grid, ParticleTruth { count: 1 }, &ParticleParams::default()).unwrap();
    let single = dbscan(&PointSet::from_pattern(&pattern), std::f64::consts::SQRT_2, 4).unwrap();
    let all_clustered = single.labels.iter().all(|l| *l != Label::Noise);

    let elapsed = start.elapsed();
    let pass = km_mismatch == 0
        && db_mismatch == 0
        && single.cluster_count == 1
        && all_clustered
        && within(elapsed, 30.0);
    report(
        6,
        "clustering oracles",
        pass,
        format!(
            "k-medoids mismatches {km_mismatch}/1000 (PAM alone {pam_mismatch}), DBSCAN mismatches {db_mismatch}/1000, \
             single particle -> {} cluster(s) in {elapsed:.2?}",
            single.cluster_count
        ),
    );
}

#[test]
fn c07_entropy_bias_and_variance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let runs = 10_000;
    let estimates: Vec<f64> = (0..runs)
        .map(|_| {
            let hist: CategoricalHistogram = (0..100).map(|_| rng.gen_range(0..8u64)).collect();
            plugin_entropy(&hist).unwrap()
        })
        .collect();
    let mean = estimates.iter().sum::<f64>() / runs as f64;
    let var = estimates.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
    let deficit = 3.0 - mean;
    let expected = entropy_bias(8, 100);
    let elapsed = start.elapsed();
    let pass = (deficit - 0.0505).abs() <= 0.01 && var <= entropy_variance_bound(100) && within(elapsed, 10.0);
    report(
        7,
        "entropy bias and variance",
        pass,
        format!(
            "mean deficit {deficit:.4} (formula {expected:.4}), sample variance {var:.4} <= {:.4} in {elapsed:.2?}",
            entropy_variance_bound(100)
        ),
    );
}

fn sweep(config: &ExperimentConfig, out_dir: Option<&Path>) -> Vec<SweepRow> {
    let curves = RocCurves::for_config(config).unwrap();
    run_sweep(config, &curves, out_dir).unwrap().rows
}

#[test]
fn c08_dbscan_mi_advantage() {
    let start = Instant::now();
    let config = ExperimentConfig::desk_scale(ScenarioKind::Particles);
    let rows = sweep(&config, None);
    let elapsed = start.elapsed();

    let ordered = rows.iter().all(|r| r.mi_quantum.value > r.mi_classical.value);
    let first = &rows[0];
    let gap0 = first.mi_quantum.value - first.mi_classical.value;
    let bars0 = bar(first.mi_quantum.variance_bound) + bar(first.mi_classical.variance_bound);
    let gap_beyond_bars = gap0 - 3.0 * bars0 > 1.0;

    let classical: Vec<f64> = rows.iter().map(|r| r.mi_classical.value).collect();
    let peak = classical
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let interior_max = peak > 0 && peak + 1 < classical.len();

    for r in &rows {
        println!(
            "     alpha={:<6} classical {:.4} quantum {:.4} (variance bounds {:.4}, {:.4})",
            r.type1, r.mi_classical.value, r.mi_quantum.value, r.mi_classical.variance_bound, r.mi_quantum.variance_bound
        );
    }
    report(
        8,
        "DBSCAN-scenario MI advantage",
        ordered && gap_beyond_bars && interior_max,
        format!(
            "quantum > classical at all {} points: {ordered}; alpha=0 gap {gap0:.4} - 3 x {bars0:.4} = {:.4} (needs > 1); \
             classical peak at alpha={} (interior: {interior_max}); N={} in {elapsed:.1?}",
            rows.len(),
            gap0 - 3.0 * bars0,
            rows[peak].type1,
            config.samples_per_point
        ),
    );
}

#[test]
fn c09_kmedoids_mi_ordering() {
    let start = Instant::now();
    let mut config = ExperimentConfig::desk_scale(ScenarioKind::Attractors);
    config.type1_grid = vec![0.0, 0.025, 0.05];
    let rows = sweep(&config, None);
    let elapsed = start.elapsed();

    let mut failures = Vec::new();
    for r in &rows {
        let gap = r.mi_quantum.value - r.mi_classical.value;
        let bars = bar(r.mi_quantum.variance_bound) + bar(r.mi_classical.variance_bound);
        println!(
            "     alpha={:<6} classical {:.4} (var {:.4}) quantum {:.4} (var {:.4})",
            r.type1, r.mi_classical.value, r.mi_classical.variance_bound, r.mi_quantum.value, r.mi_quantum.variance_bound
        );
        if gap <= bars {
            failures.push(format!("quantum-classical at alpha={}: {gap:.4} <= {bars:.4}", r.type1));
        }
    }
    for pair in rows.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        for (name, a, b) in [
            ("classical", &lo.mi_classical, &hi.mi_classical),
            ("quantum", &lo.mi_quantum, &hi.mi_quantum),
        ] {
            let drop = a.value - b.value;
            let bars = bar(a.variance_bound) + bar(b.variance_bound);
            if drop <= bars {
                failures.push(format!(
                    "{name} drop {}->{}: {drop:.4} <= {bars:.4}",
                    lo.type1, hi.type1
                ));
            }
        }
    }
    report(
        9,
        "k-medoids-scenario MI ordering",
        failures.is_empty(),
        format!(
            "{} orderings fail beyond error bars [{}]; N={} per histogram, {} fixed truths, in {elapsed:.1?}",
            failures.len(),
            failures.join("; "),
            config.samples_per_point,
            config.fixed_truths
        ),
    );
}

fn csv_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn c10_determinism_across_threads() {
    let mut outputs = Vec::new();
    for threads in [1, 8] {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::desk_scale(ScenarioKind::Particles);
        config.type1_grid = vec![0.0];
        config.threads = Some(threads);
        config.write_records = true;
        sweep(&config, Some(dir.path()));
        outputs.push(csv_outputs(dir.path()));
    }
    let names: Vec<&str> = outputs[0].iter().map(|f| f.0.as_str()).collect();
    let pass = outputs[0].len() == 3 && outputs[0] == outputs[1];
    report(
        10,
        "determinism across thread counts",
        pass,
        format!("1 vs 8 threads, files {names:?} identical: {}", outputs[0] == outputs[1]),
    );
}
