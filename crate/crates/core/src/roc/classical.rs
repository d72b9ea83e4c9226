//! Optimal ROC for classical probes.
//!
//! The fidelity between the two channel outputs is minimized by a single
//! coherent state carrying the whole energy budget, `F = chi^m`. The ROC is
//! then the pure-state trade-off between the two error types at fidelity `F`.

use super::curve::{CurveKind, RocCurve};
use super::LossChannelPair;
use crate::error::{domain, Result};

const BRANCH_SLACK: f64 = 1e-12;
const BISECTION_TOL: f64 = 1e-12;

/// Output fidelity for the optimal classical probe, `chi^m`.
pub fn classical_fidelity(pair: &LossChannelPair) -> f64 {
    pair.chi().powf(pair.mean_photons())
}

/// Minimum type-1 error achievable at type-2 error `beta` when the two output
/// states are pure with fidelity `fidelity`.
///
/// Only the monotone branch `beta ∈ [0, F^2]` is accepted.
pub fn classical_alpha(beta: f64, fidelity: f64) -> Result<f64> {
    check_fidelity(fidelity)?;
    let f2 = fidelity * fidelity;
    if !(-BRANCH_SLACK..=f2 + BRANCH_SLACK).contains(&beta) {
        return domain(format!("beta={beta} outside the operating branch [0, {f2}]"));
    }
    let beta = beta.clamp(0.0, f2);
    let radical = ((1.0 - beta) * beta * (1.0 - f2)).max(0.0).sqrt();
    let alpha = beta - 2.0 * beta * f2 + fidelity * (fidelity - 2.0 * radical);
    Ok(alpha.clamp(0.0, f2))
}

/// Inverse of [`classical_alpha`] on `[0, F^2]`, by bisection.
pub fn classical_beta(alpha: f64, fidelity: f64) -> Result<f64> {
    check_fidelity(fidelity)?;
    let f2 = fidelity * fidelity;
    if !(-BRANCH_SLACK..=f2 + BRANCH_SLACK).contains(&alpha) {
        return domain(format!("alpha={alpha} outside [0, {f2}]"));
    }
    let alpha = alpha.clamp(0.0, f2);
    // alpha(beta) decreases from F^2 at beta = 0 to 0 at beta = F^2.
    let (mut lo, mut hi) = (0.0, f2);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if classical_alpha(mid, fidelity)? > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fidelity lower bound for the two-point photon-number mixture putting
/// weight `p0` on `n0` photons and the rest on the level that exhausts the
/// energy budget.
pub fn mixture_fidelity_candidate(n0: f64, p0: f64, pair: &LossChannelPair) -> Result<f64> {
    let m = pair.mean_photons();
    if !(0.0..=m).contains(&n0) {
        return domain(format!("n0={n0} outside [0, {m}]"));
    }
    if !(0.0..1.0).contains(&p0) {
        return domain(format!("p0={p0} outside [0, 1)"));
    }
    let chi = pair.chi();
    let delta = (m - n0) / (1.0 - p0);
    Ok(chi.powf(n0) * (p0 + (1.0 - p0) * chi.powf(delta)))
}

/// Classical ROC sampled at `points` evenly spaced type-1 errors on
/// `[0, alpha_max]`.
pub fn classical_roc(pair: &LossChannelPair, alpha_max: f64, points: usize) -> Result<RocCurve> {
    if points < 2 {
        return domain("classical ROC needs at least two sample points");
    }
    let alphas: Vec<f64> = (0..points)
        .map(|i| alpha_max * i as f64 / (points - 1) as f64)
        .collect();
    classical_roc_at(pair, &alphas)
}

/// Classical ROC sampled at the given type-1 errors, sorted and deduplicated.
pub fn classical_roc_at(pair: &LossChannelPair, alphas: &[f64]) -> Result<RocCurve> {
    let f = classical_fidelity(pair);
    let f2 = f * f;
    let mut alphas = alphas.to_vec();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    match alphas.last() {
        None => return domain("classical ROC needs at least one sample point"),
        Some(&a) if !(a <= f2) => return domain(format!("alpha={a} outside [0, F^2={f2}]")),
        _ => {}
    }
    let pts = alphas
        .into_iter()
        .map(|alpha| classical_beta(alpha, f).map(|beta| (alpha, beta)))
        .collect::<Result<Vec<_>>>()?;
    RocCurve::new(pts, CurveKind::ClassicalOptimalLowerBound)
}

fn check_fidelity(fidelity: f64) -> Result<()> {
    if fidelity > 0.0 && fidelity <= 1.0 {
        Ok(())
    } else {
        domain(format!("fidelity={fidelity} outside (0, 1]"))
    }
}
