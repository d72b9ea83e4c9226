use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gaussian::diagonalizing_params;
use super::qubit::{build_output_states_with, helstrom_errors};
use super::LossChannelPair;
use crate::error::{domain, Error, Result};

/// Slack allowed when looking up type-1 errors at the ends of a curve.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    ClassicalOptimalLowerBound,
    QuantumAchievableUpperBound,
}

/// Achievable `(alpha, beta)` pairs, `alpha` strictly increasing and `beta`
/// non-increasing, interpolated linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<(f64, f64)>,
    kind: CurveKind,
}

impl RocCurve {
    pub fn new(points: Vec<(f64, f64)>, kind: CurveKind) -> Result<Self> {
        if points.is_empty() {
            return domain("ROC curve needs at least one point");
        }
        for &(alpha, beta) in &points {
            if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
                return domain(format!("ROC point ({alpha}, {beta}) outside [0, 1]^2"));
            }
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return domain("ROC type-1 errors must be strictly increasing");
            }
            if w[1].1 > w[0].1 {
                return domain("ROC type-2 errors must be non-increasing");
            }
        }
        Ok(Self { points, kind })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// Closed type-1 error interval covered by the curve.
    pub fn domain(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    pub fn lookup(&self, alpha: f64) -> Result<f64> {
        roc_lookup(self, alpha)
    }
}

/// Type-2 error at `alpha` by linear interpolation between bracketing points.
pub fn roc_lookup(curve: &RocCurve, alpha: f64) -> Result<f64> {
    let (lo, hi) = curve.domain();
    if !(alpha >= lo - DOMAIN_SLACK && alpha <= hi + DOMAIN_SLACK) {
        return domain(format!("alpha={alpha} outside curve domain [{lo}, {hi}]"));
    }
    let alpha = alpha.clamp(lo, hi);
    let pts = &curve.points;
    let idx = pts.partition_point(|p| p.0 < alpha);
    if idx < pts.len() && pts[idx].0 == alpha {
        return Ok(pts[idx].1);
    }
    let (a0, b0) = pts[idx - 1];
    let (a1, b1) = pts[idx];
    let t = (alpha - a0) / (a1 - a0);
    Ok(b0 + t * (b1 - b0))
}

/// Grid sizes for the quantum ROC sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RocGrid {
    pub a_grid: usize,
    pub b_grid: usize,
}

impl Default for RocGrid {
    fn default() -> Self {
        Self {
            a_grid: 512,
            b_grid: 512,
        }
    }
}

/// Number of logarithmically spaced extra `b` values added at each end of
/// the uniform grid.
const LOG_POINTS_PER_END: usize = 48;

/// Uniform grid on `[0, 1]` refined with points `10^-k` and `1 - 10^-k`,
/// `k` in `[1, 12]`.
pub fn b_values(uniform: usize) -> Vec<f64> {
    let mut values = uniform_grid(uniform);
    for i in 0..LOG_POINTS_PER_END {
        let k = 1.0 + 11.0 * i as f64 / (LOG_POINTS_PER_END - 1) as f64;
        let eps = 10f64.powf(-k);
        values.push(eps);
        values.push(1.0 - eps);
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Evaluates the Helstrom errors on the `(a, b)` grid.
pub fn quantum_point_cloud(pair: &LossChannelPair, grid: RocGrid) -> Result<Vec<(f64, f64)>> {
    if grid.a_grid < 2 || grid.b_grid < 2 {
        return domain("quantum ROC grids need at least two points each");
    }
    let params = diagonalizing_params(pair)?;
    let bs = b_values(grid.b_grid);
    let per_a = uniform_grid(grid.a_grid)
        .into_par_iter()
        .map(|a| {
            let (rho0, rho1) = build_output_states_with(&params, a)?;
            bs.iter()
                .map(|&b| helstrom_errors(&rho0, &rho1, b))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_a.into_iter().flatten().collect())
}

/// Achievable quantum ROC: the lower convex hull of the Helstrom error
/// cloud over the `(a, b)` grid, from the smallest type-1 error down to the
/// smallest type-2 error and cut at `alpha_max`.
///
/// Convex combinations are achievable by randomizing between measurement
/// settings, so the hull is itself achievable.
pub fn quantum_roc(pair: &LossChannelPair, grid: RocGrid, alpha_max: f64) -> Result<RocCurve> {
    let cloud = quantum_point_cloud(pair, grid)?;
    let hull = lower_left_hull(cloud)?;
    let clipped = clip(&hull, alpha_max);
    RocCurve::new(clipped, CurveKind::QuantumAchievableUpperBound)
}

/// Lower convex hull of `points`, truncated after its minimum-`beta` vertex.
/// Input order does not matter.
pub fn lower_left_hull(mut points: Vec<(f64, f64)>) -> Result<Vec<(f64, f64)>> {
    if points.is_empty() {
        return Err(Error::Consistency("empty ROC point cloud".into()));
    }
    points.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    // Keep the lowest beta for each alpha.
    points.dedup_by(|later, earlier| later.0 == earlier.0);

    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(64);
    for p in points {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let min_idx = hull
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1).then(x.0.cmp(&y.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    hull.truncate(min_idx + 1);
    Ok(hull)
}

fn clip(hull: &[(f64, f64)], alpha_max: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(hull.len());
    for (i, &p) in hull.iter().enumerate() {
        if p.0 <= alpha_max {
            out.push(p);
            continue;
        }
        if let Some(&prev) = i.checked_sub(1).map(|j| &hull[j]) {
            let t = (alpha_max - prev.0) / (p.0 - prev.0);
            out.push((alpha_max, prev.1 + t * (p.1 - prev.1)));
        }
        break;
    }
    if out.is_empty() {
        out.push(hull[0]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy() -> RocCurve {
        RocCurve::new(
            vec![(0.0, 0.4), (0.1, 0.2), (0.3, 0.1)],
            CurveKind::ClassicalOptimalLowerBound,
        )
        .unwrap()
    }

    #[test]
    fn lookup_at_stored_points() {
        let c = toy();
        for &(a, b) in c.points() {
            assert_eq!(c.lookup(a).unwrap(), b);
        }
    }

    #[test]
    fn lookup_interpolates() {
        assert!((toy().lookup(0.05).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn lookup_outside_domain_fails() {
        assert!(matches!(toy().lookup(0.31), Err(Error::Domain(_))));
        assert!(toy().lookup(-0.01).is_err());
        assert!(toy().lookup(0.3 + 1e-13).is_ok());
    }

    #[test]
    fn curve_invariants_enforced() {
        let k = CurveKind::ClassicalOptimalLowerBound;
        assert!(RocCurve::new(vec![(0.0, 0.4), (0.0, 0.3)], k).is_err());
        assert!(RocCurve::new(vec![(0.0, 0.4), (0.1, 0.5)], k).is_err());
        assert!(RocCurve::new(vec![(0.0, 1.4)], k).is_err());
        assert!(RocCurve::new(vec![], k).is_err());
    }

    #[test]
    fn hull_of_simple_cloud() {
        let cloud = vec![
            (0.0, 1.0),
            (0.0, 0.5),
            (0.2, 0.45),
            (0.1, 0.2),
            (0.5, 0.1),
            (0.6, 0.3),
            (0.3, 0.3),
        ];
        let hull = lower_left_hull(cloud).unwrap();
        assert_eq!(hull, vec![(0.0, 0.5), (0.1, 0.2), (0.5, 0.1)]);
    }

    #[test]
    fn hull_rejects_empty_cloud() {
        assert!(matches!(lower_left_hull(vec![]), Err(Error::Consistency(_))));
    }

    #[test]
    fn clipping_interpolates_at_alpha_max() {
        let hull = vec![(0.0, 0.5), (0.1, 0.2), (0.5, 0.1)];
        let c = clip(&hull, 0.3);
        assert_eq!(c.len(), 3);
        assert!((c[2].0 - 0.3).abs() < 1e-15 && (c[2].1 - 0.15).abs() < 1e-15);
        assert_eq!(clip(&hull, 0.9), hull);
    }

    proptest! {
        #[test]
        fn hull_is_order_independent_and_dominates(
            mut pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..60),
            seed in any::<u64>(),
        ) {
            let hull = lower_left_hull(pts.clone()).unwrap();
            use rand::{seq::SliceRandom, SeedableRng};
            pts.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(&hull, &lower_left_hull(pts.clone()).unwrap());
            let curve = RocCurve::new(hull, CurveKind::QuantumAchievableUpperBound).unwrap();
            let (lo, hi) = curve.domain();
            for &(a, b) in &pts {
                if a >= lo && a <= hi {
                    prop_assert!(curve.lookup(a).unwrap() <= b + 1e-12);
                }
            }
        }
    }
}
