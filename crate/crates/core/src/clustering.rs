//! k-medoids (PAM) and DBSCAN on the 1-pixels of a measurement result.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::scene::{ChannelPattern, Pixel};

/// Distinct pixel coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Pixel>,
}

impl PointSet {
    pub fn new(points: Vec<Pixel>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !seen.insert(*p) {
                return domain(format!("duplicate point {p}"));
            }
        }
        Ok(Self { points })
    }

    /// The 1-pixels of `pattern` in row-major order.
    pub fn from_pattern(pattern: &ChannelPattern) -> Self {
        Self {
            points: pattern.ones(),
        }
    }

    pub fn points(&self) -> &[Pixel] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KMedoidsResult {
    /// Sorted lexicographically.
    pub medoids: Vec<Pixel>,
    /// Set when there were fewer points than clusters; `medoids` then holds
    /// every input point.
    pub degenerate: bool,
    /// Total squared distance from each point to its nearest medoid.
    pub cost: i64,
}

/// Largest `C(n, k) * n` for which [`kmedoids`] searches every medoid set.
pub const EXHAUSTIVE_BUDGET: u64 = 50_000_000;

/// k-medoids with squared Euclidean distance.
///
/// Returns the medoid set of minimum cost, ties going to the
/// lexicographically smallest set. Inputs small enough for
/// [`EXHAUSTIVE_BUDGET`] are searched exhaustively; larger ones fall back to
/// [`kmedoids_pam`], which can stop at a local optimum.
pub fn kmedoids(points: &PointSet, k: usize) -> Result<KMedoidsResult> {
    if k == 0 {
        return domain("k-medoids needs k >= 1");
    }
    let n = points.len();
    match binomial(n as u64, k as u64).checked_mul(n as u64) {
        Some(work) if n >= k && work <= EXHAUSTIVE_BUDGET => {
            let (pts, dist) = sorted_with_distances(points);
            let (medoids, cost) = exhaustive(&dist, n, k);
            Ok(KMedoidsResult {
                medoids: medoids.into_iter().map(|i| pts[i]).collect(),
                degenerate: false,
                cost,
            })
        }
        _ => kmedoids_pam(points, k),
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    acc
}

fn sorted_with_distances(points: &PointSet) -> (Vec<Pixel>, Vec<i64>) {
    let mut pts = points.points.clone();
    pts.sort_unstable();
    let n = pts.len();
    let dist = (0..n * n).map(|ij| pts[ij / n].dist2(&pts[ij % n])).collect();
    (pts, dist)
}

/// Visits index sets in lexicographic order and keeps the first minimum.
fn exhaustive(dist: &[i64], n: usize, k: usize) -> (Vec<usize>, i64) {
    if k == 2 {
        let mut best = (i64::MAX, 0, 1);
        for a in 0..n {
            let row_a = &dist[a * n..(a + 1) * n];
            for b in a + 1..n {
                let row_b = &dist[b * n..(b + 1) * n];
                let cost: i64 = row_a.iter().zip(row_b).map(|(&x, &y)| x.min(y)).sum();
                if cost < best.0 {
                    best = (cost, a, b);
                }
            }
        }
        return (vec![best.1, best.2], best.0);
    }
    let mut set: Vec<usize> = (0..k).collect();
    let mut best = (i64::MAX, set.clone());
    loop {
        let cost: i64 = (0..n)
            .map(|j| set.iter().map(|&m| dist[m * n + j]).min().unwrap_or(0))
            .sum();
        if cost < best.0 {
            best = (cost, set.clone());
        }
        // Advance to the next combination.
        let Some(i) = (0..k).rev().find(|&i| set[i] < n - k + i) else {
            break;
        };
        set[i] += 1;
        for j in i + 1..k {
            set[j] = set[j - 1] + 1;
        }
    }
    (best.1, best.0)
}

/// Partitioning around medoids.
///
/// BUILD adds medoids greedily, each time taking the point that lowers the
/// cost most. SWAP then repeatedly applies the best (medoid, non-medoid)
/// exchange while it strictly lowers the cost. Ties go to the
/// lexicographically smallest medoid set, so the result depends only on the
/// set of points. The result is a local optimum of the swap neighborhood.
pub fn kmedoids_pam(points: &PointSet, k: usize) -> Result<KMedoidsResult> {
    if k == 0 {
        return domain("k-medoids needs k >= 1");
    }
    let n = points.len();
    if n < k {
        let mut pts = points.points.clone();
        pts.sort_unstable();
        return Ok(KMedoidsResult {
            medoids: pts,
            degenerate: true,
            cost: 0,
        });
    }
    let (pts, dist) = sorted_with_distances(points);
    let d = |i: usize, j: usize| dist[i * n + j];

    // BUILD
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut nearest = vec![i64::MAX; n];
    for _ in 0..k {
        let mut best: Option<(i64, usize)> = None;
        for c in (0..n).filter(|c| !medoids.contains(c)) {
            let cost: i64 = (0..n).map(|j| nearest[j].min(d(c, j))).sum();
            if best.map_or(true, |(b, _)| cost < b) {
                best = Some((cost, c));
            }
        }
        let (_, c) = best.expect("n >= k leaves a candidate");
        medoids.push(c);
        for j in 0..n {
            nearest[j] = nearest[j].min(d(c, j));
        }
    }
    medoids.sort_unstable();

    // SWAP
    let mut cost: i64 = nearest.iter().sum();
    loop {
        let (near_slot, first, second) = assignments(&medoids, n, &d);
        let mut best: Option<(i64, Vec<usize>)> = None;
        for slot in 0..k {
            for h in (0..n).filter(|h| !medoids.contains(h)) {
                let trial: i64 = (0..n)
                    .map(|j| {
                        let keep = if near_slot[j] == slot { second[j] } else { first[j] };
                        keep.min(d(h, j))
                    })
                    .sum();
                let better = match &best {
                    None => true,
                    Some((b, _)) => trial <= *b,
                };
                if !better {
                    continue;
                }
                let mut set = medoids.clone();
                set[slot] = h;
                set.sort_unstable();
                match &best {
                    Some((b, s)) if trial == *b && *s <= set => {}
                    _ => best = Some((trial, set)),
                }
            }
        }
        match best {
            Some((trial, set)) if trial < cost => {
                cost = trial;
                medoids = set;
            }
            _ => break,
        }
    }
    Ok(KMedoidsResult {
        medoids: medoids.into_iter().map(|i| pts[i]).collect(),
        degenerate: false,
        cost,
    })
}

/// For every point: slot of its nearest medoid, distance to it, and distance
/// to the second nearest (`i64::MAX` when k = 1).
fn assignments(
    medoids: &[usize],
    n: usize,
    d: &impl Fn(usize, usize) -> i64,
) -> (Vec<usize>, Vec<i64>, Vec<i64>) {
    let mut slot = vec![0; n];
    let mut first = vec![i64::MAX; n];
    let mut second = vec![i64::MAX; n];
    for j in 0..n {
        for (s, &m) in medoids.iter().enumerate() {
            let dj = d(m, j);
            if dj < first[j] {
                second[j] = first[j];
                first[j] = dj;
                slot[j] = s;
            } else if dj < second[j] {
                second[j] = dj;
            }
        }
    }
    (slot, first, second)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Noise,
    Cluster(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DbscanResult {
    /// One label per input point, in input order. Clusters are numbered from
    /// 1 in the row-major order of their first core point.
    pub labels: Vec<Label>,
    pub cluster_count: u32,
}

/// Density-based clustering with brute-force neighborhoods.
///
/// A point is core when at least `min_pts` points, itself included, lie
/// within `eps`. Border points join the cluster of their row-major first core
/// neighbor. Distances within `1e-9` of `eps` count as inside.
pub fn dbscan(points: &PointSet, eps: f64, min_pts: usize) -> Result<DbscanResult> {
    if !(eps > 0.0) || min_pts == 0 {
        return domain(format!("dbscan needs eps > 0 and min_pts >= 1, got ({eps}, {min_pts})"));
    }
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&i| points.points[i]);
    let pts: Vec<Pixel> = order.iter().map(|&i| points.points[i]).collect();
    let eps2 = eps * eps + 1e-9;

    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        neighbors[i].push(i);
        for j in i + 1..n {
            if (pts[i].dist2(&pts[j]) as f64) <= eps2 {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= min_pts).collect();

    let mut sorted_labels = vec![Label::Noise; n];
    let mut clusters = 0u32;
    let mut stack = Vec::new();
    for start in 0..n {
        if !core[start] || sorted_labels[start] != Label::Noise {
            continue;
        }
        clusters += 1;
        sorted_labels[start] = Label::Cluster(clusters);
        stack.push(start);
        while let Some(p) = stack.pop() {
            for &q in &neighbors[p] {
                if core[q] && sorted_labels[q] == Label::Noise {
                    sorted_labels[q] = Label::Cluster(clusters);
                    stack.push(q);
                }
            }
        }
    }
    for i in 0..n {
        if !core[i] {
            // Neighbor lists are built in increasing index order.
            if let Some(&c) = neighbors[i].iter().find(|&&q| core[q]) {
                sorted_labels[i] = sorted_labels[c];
            }
        }
    }

    let mut labels = vec![Label::Noise; n];
    for (sorted_idx, &orig) in order.iter().enumerate() {
        labels[orig] = sorted_labels[sorted_idx];
    }
    Ok(DbscanResult {
        labels,
        cluster_count: clusters,
    })
}

pub fn count_clusters(result: &DbscanResult, cap: u32) -> u32 {
    result.cluster_count.min(cap)
}
