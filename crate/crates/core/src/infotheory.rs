//! Plugin entropy and mutual information estimates, in bits, with first-order
//! bias and variance bounds.

use std::collections::BTreeMap;
use std::f64::consts::LOG2_E;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Outcome counts keyed by a canonical integer encoding.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoricalHistogram {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl CategoricalHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, outcome: u64) {
        self.add_count(outcome, 1);
    }

    pub fn add_count(&mut self, outcome: u64, count: u64) {
        if count > 0 {
            *self.counts.entry(outcome).or_insert(0) += count;
            self.total += count;
        }
    }

    /// Adds every count of `other`. Associative and commutative.
    pub fn merge(&mut self, other: &CategoricalHistogram) {
        for (&k, &c) in &other.counts {
            self.add_count(k, c);
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of outcomes seen at least once.
    pub fn support(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }
}

impl FromIterator<u64> for CategoricalHistogram {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut h = Self::new();
        for x in iter {
            h.add(x);
        }
        h
    }
}

pub fn plugin_entropy(hist: &CategoricalHistogram) -> Result<f64> {
    if hist.total == 0 {
        return domain("entropy of an empty histogram");
    }
    let n = hist.total as f64;
    let h: f64 = hist
        .counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    Ok(h.max(0.0))
}

/// First-order deficit of the plugin entropy, `(P - 1) / (2N) log2(e)`.
pub fn entropy_bias(outcomes: u64, samples: u64) -> f64 {
    outcomes.saturating_sub(1) as f64 / (2.0 * samples as f64) * LOG2_E
}

/// `log2(N)^2 / N`.
pub fn entropy_variance_bound(samples: u64) -> f64 {
    let n = samples as f64;
    n.log2().powi(2) / n
}

/// Mean of the per-outcome plugin entropies; the conditioning variable is
/// uniform by construction.
pub fn conditional_entropy_uniform(per_a: &[CategoricalHistogram]) -> Result<f64> {
    if per_a.is_empty() {
        return domain("no conditional histograms");
    }
    let mut sum = 0.0;
    for (a, h) in per_a.iter().enumerate() {
        if h.total == 0 {
            return Err(Error::InsufficientSamples(format!("no samples for A = {a}")));
        }
        sum += plugin_entropy(h)?;
    }
    Ok(sum / per_a.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MiMethod {
    JointPlugin,
    FixedAScheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    pub value: f64,
    pub variance_bound: f64,
    /// Expected upward bias of `value`; reported, never subtracted.
    pub bias: f64,
    pub method: MiMethod,
}

/// `H(D) - H(D|A)` from stratified `(a, d)` samples with `a` in `0..=max_a`.
pub fn mi_plugin(samples: &[(u64, u64)], max_a: u64) -> Result<MiEstimate> {
    let strata = max_a
        .checked_add(1)
        .ok_or_else(|| Error::Domain("max_a too large".into()))?;
    if samples.is_empty() {
        return Err(Error::InsufficientSamples("no samples".into()));
    }
    let mut h_d = CategoricalHistogram::new();
    let mut per_a = vec![CategoricalHistogram::new(); strata as usize];
    for &(a, d) in samples {
        if a > max_a {
            return domain(format!("A = {a} exceeds max_a = {max_a}"));
        }
        h_d.add(d);
        per_a[a as usize].add(d);
    }
    mi_plugin_from_histograms(&h_d, &per_a)
}

/// Same as [`mi_plugin`] from prebuilt marginal and per-A histograms.
pub fn mi_plugin_from_histograms(
    h_d: &CategoricalHistogram,
    per_a: &[CategoricalHistogram],
) -> Result<MiEstimate> {
    let strata = per_a.len() as u64;
    if strata == 0 {
        return domain("no strata");
    }
    let first = per_a[0].total;
    if per_a.iter().any(|h| h.total != first) || h_d.total != first * strata {
        return domain("strata have unequal sample counts; use the fixed-A scheme");
    }
    let n = h_d.total;
    let value = plugin_entropy(h_d)? - conditional_entropy_uniform(per_a)?;
    Ok(MiEstimate {
        value,
        variance_bound: joint_plugin_variance_bound(n, strata - 1),
        bias: joint_plugin_bias(n, strata - 1),
        method: MiMethod::JointPlugin,
    })
}

/// `(log2(N)^2 + (m + 1) log2(N / (m + 1))^2) / N` for `N` samples split
/// evenly over `m + 1` strata.
pub fn joint_plugin_variance_bound(samples: u64, max_a: u64) -> f64 {
    let n = samples as f64;
    let strata = (max_a + 1) as f64;
    (n.log2().powi(2) + strata * (n / strata).log2().powi(2)) / n
}

/// `m^2 / (2N) log2(e)`: the conditional term loses `m` times as much to
/// plugin bias as the marginal term when `D` has `m + 1` outcomes.
pub fn joint_plugin_bias(samples: u64, max_a: u64) -> f64 {
    (max_a * max_a) as f64 / (2.0 * samples as f64) * LOG2_E
}

/// Whether the fixed-A scheme enforces `P / N < 1/10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleCheck {
    /// `P` is the number of possible outcomes of `D`.
    Enforce { outcomes: u64 },
    Skip,
}

/// `H(D) - mean_j H(D | A = a_j)` with every histogram at the same sample
/// count, so the first-order biases of the two terms cancel. The variance is
/// the sample variance of the conditional entropies.
pub fn mi_fixed_a_scheme(
    h_d: &CategoricalHistogram,
    h_d_given_a: &[CategoricalHistogram],
    check: SampleCheck,
) -> Result<MiEstimate> {
    if h_d_given_a.len() < 2 {
        return domain("the fixed-A scheme needs at least two fixed truths");
    }
    let n = h_d.total;
    if n == 0 {
        return Err(Error::InsufficientSamples("empty marginal histogram".into()));
    }
    if h_d_given_a.iter().any(|h| h.total != n) {
        return domain("all fixed-A histograms need the same sample count");
    }
    if let SampleCheck::Enforce { outcomes } = check {
        if outcomes.saturating_mul(10) > n {
            return Err(Error::InsufficientSamples(format!(
                "{n} samples for {outcomes} outcomes violates P/N < 1/10"
            )));
        }
    }
    let conditional: Vec<f64> = h_d_given_a
        .iter()
        .map(plugin_entropy)
        .collect::<Result<_>>()?;
    let k = conditional.len() as f64;
    let mean = conditional.iter().sum::<f64>() / k;
    let var = conditional.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(MiEstimate {
        value: plugin_entropy(h_d)? - mean,
        variance_bound: var,
        bias: 0.0,
        method: MiMethod::FixedAScheme,
    })
}
