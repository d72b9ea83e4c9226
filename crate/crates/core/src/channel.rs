//! Per-pixel binary measurement noise: the channel pattern `B` becomes the
//! measurement result `C`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scene::ChannelPattern;

/// Type-1 (`xi1`, false positive) and type-2 (`xi2`, miss) error rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    xi1: f64,
    xi2: f64,
}

impl ErrorPair {
    pub fn new(xi1: f64, xi2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi1) || !(0.0..=1.0).contains(&xi2) {
            return domain(format!("error rates must lie in [0, 1], got ({xi1}, {xi2})"));
        }
        Ok(Self { xi1, xi2 })
    }

    pub fn xi1(&self) -> f64 {
        self.xi1
    }

    pub fn xi2(&self) -> f64 {
        self.xi2
    }
}

/// Flips 0-pixels with probability `xi1` and 1-pixels with probability `xi2`.
///
/// Exactly one uniform variate is drawn per pixel and compared with the
/// threshold for the true bit, so for a fixed random stream the set of
/// flipped pixels grows monotonically with each threshold.
pub fn apply_measurement_noise<R: Rng + ?Sized>(
    rng: &mut R,
    pattern: &ChannelPattern,
    errors: ErrorPair,
) -> ChannelPattern {
    let bits = pattern
        .bits()
        .iter()
        .map(|&b| {
            let u = rng.gen::<f64>();
            let threshold = if b == 0 { errors.xi1 } else { errors.xi2 };
            if u < threshold {
                b ^ 1
            } else {
                b
            }
        })
        .collect();
    ChannelPattern::from_bits(pattern.grid(), bits).expect("noise preserves the grid shape")
}
