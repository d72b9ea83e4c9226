//! Receiver operating characteristics for discriminating two pure-loss
//! channels under a per-pixel mean photon number constraint.
//!
//! Channel `C0` is the "empty pixel" hypothesis and `C1` the "particle
//! present" hypothesis. The type-1 error `alpha` is the probability of
//! deciding `C1` when `C0` is true, the type-2 error `beta` the probability
//! of deciding `C0` when `C1` is true.
//!
//! * [`classical`]: the exact optimum over probes with a positive
//!   P-representation (mixtures of coherent states).
//! * [`gaussian`] and [`qubit`]: an achievable curve for a two-mode squeezed
//!   vacuum probe, reduced to a pair of three-qubit states whose Helstrom
//!   measurements are swept over a grid.
//! * [`curve`]: the [`RocCurve`] container, lower-hull envelope and lookup.

pub mod classical;
pub mod curve;
pub mod gaussian;
pub mod qubit;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use classical::{
    classical_alpha, classical_beta, classical_fidelity, classical_roc, classical_roc_at,
    mixture_fidelity_candidate,
};
pub use curve::{quantum_roc, roc_lookup, CurveKind, RocCurve, RocGrid};
pub use gaussian::{diagonalizing_params, tmsv_output_covariance, CovarianceMatrix2Mode, DiagonalizationParams};
pub use qubit::{build_output_states, helstrom_errors, ThreeQubitState};

/// The pair of pure-loss channels to discriminate, with the per-pixel probe
/// energy budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", deny_unknown_fields)]
pub struct LossChannelPair {
    tau0: f64,
    tau1: f64,
    mean_photons: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    tau0: f64,
    tau1: f64,
    mean_photons: f64,
}

impl TryFrom<RawPair> for LossChannelPair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        LossChannelPair::new(raw.tau0, raw.tau1, raw.mean_photons)
    }
}

impl LossChannelPair {
    pub fn new(tau0: f64, tau1: f64, mean_photons: f64) -> Result<Self> {
        let in_unit = |t: f64| t > 0.0 && t <= 1.0;
        if !in_unit(tau0) || !in_unit(tau1) {
            return domain(format!(
                "transmissivities must lie in (0, 1], got tau0={tau0}, tau1={tau1}"
            ));
        }
        if !(mean_photons >= 0.0 && mean_photons.is_finite()) {
            return domain(format!("mean photon number must be >= 0, got {mean_photons}"));
        }
        Ok(Self {
            tau0,
            tau1,
            mean_photons,
        })
    }

    /// Transmissivities 0.95 / 0.4 with eight photons per pixel.
    pub fn reference() -> Self {
        Self {
            tau0: 0.95,
            tau1: 0.4,
            mean_photons: 8.0,
        }
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }

    /// Per-photon coherent-state overlap `exp(-|sqrt(tau0) - sqrt(tau1)|^2 / 2)`.
    pub fn chi(&self) -> f64 {
        let d = self.tau0.sqrt() - self.tau1.sqrt();
        (-0.5 * d * d).exp()
    }
}
