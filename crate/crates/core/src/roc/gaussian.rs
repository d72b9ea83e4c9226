//! Two-mode Gaussian description of the squeezed-vacuum probe.
//!
//! Covariance matrices use the `(x1, p1, x2, p2)` ordering with the vacuum
//! normalized to the identity. Mode 1 is the retained idler, mode 2 the
//! signal that passes through the channel.

use super::LossChannelPair;
use crate::error::{domain, Error, Result};
use crate::linalg::{
    congruence, is_symmetric, max_abs_diff, transpose, zeros, Matrix, SymmetricEigen,
};

const BONA_FIDE_TOL: f64 = 1e-9;
const DIAGONALIZATION_TOL: f64 = 1e-9;

/// Symplectic form for the `(x1, p1, x2, p2)` ordering.
pub const OMEGA: Matrix<4> = [
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
];

/// Covariance matrix of a two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix2Mode {
    entries: Matrix<4>,
}

impl CovarianceMatrix2Mode {
    /// Rejects matrices that are not symmetric or violate the uncertainty
    /// principle (a symplectic eigenvalue below one).
    pub fn new(entries: Matrix<4>) -> Result<Self> {
        if !is_symmetric(&entries, 1e-12) {
            return domain("covariance matrix is not symmetric");
        }
        let cm = Self { entries };
        let (minus, _) = cm.symplectic_eigenvalues();
        if !(minus >= 1.0 - BONA_FIDE_TOL) {
            return domain(format!(
                "covariance matrix is not bona fide: symplectic eigenvalue {minus} < 1"
            ));
        }
        Ok(cm)
    }

    /// Standard-form matrix with blocks `a I`, `b I` and off-diagonal `c Z`.
    pub fn standard_form(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new([
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, -c],
            [c, 0.0, b, 0.0],
            [0.0, -c, 0.0, b],
        ])
    }

    pub fn entries(&self) -> &Matrix<4> {
        &self.entries
    }

    /// `(nu_minus, nu_plus)`.
    ///
    /// The squared symplectic eigenvalues are the (doubly degenerate)
    /// eigenvalues of the symmetric matrix `V^1/2 Omega^T V Omega V^1/2`.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let v = &self.entries;
        let Ok(eig) = SymmetricEigen::new(v) else {
            return (f64::NAN, f64::NAN);
        };
        if eig.min_value() <= 0.0 {
            return (0.0, 0.0);
        }
        let mut root = zeros::<4>();
        for (lambda, vec) in eig.values.iter().zip(eig.vectors.iter()) {
            let s = lambda.sqrt();
            for i in 0..4 {
                for j in 0..4 {
                    root[i][j] += s * vec[i] * vec[j];
                }
            }
        }
        let inner = congruence(&transpose(&OMEGA), v);
        let k = congruence(&root, &inner);
        let Ok(eig) = SymmetricEigen::new(&k) else {
            return (f64::NAN, f64::NAN);
        };
        let mut sq = eig.values;
        sq.sort_by(f64::total_cmp);
        let minus = (0.5 * (sq[0] + sq[1])).max(0.0).sqrt();
        let plus = (0.5 * (sq[2] + sq[3])).max(0.0).sqrt();
        (minus, plus)
    }

    /// `S V S^T` for a symplectic `S`.
    pub fn transformed(&self, symplectic: &Matrix<4>) -> Matrix<4> {
        congruence(symplectic, &self.entries)
    }
}

/// Two-mode squeezing symplectic with parameter `r`:
/// `[[cosh r I, sinh r Z], [sinh r Z, cosh r I]]`.
pub fn two_mode_squeezer(r: f64) -> Matrix<4> {
    let (c, s) = (r.cosh(), r.sinh());
    [
        [c, 0.0, s, 0.0],
        [0.0, c, 0.0, -s],
        [s, 0.0, c, 0.0],
        [0.0, -s, 0.0, c],
    ]
}

/// Covariance matrix after the signal mode of a squeezed vacuum with `m`
/// photons per mode passes a pure-loss channel of transmissivity `tau`.
pub fn tmsv_output_covariance(tau: f64, m: f64) -> Result<CovarianceMatrix2Mode> {
    if !(tau > 0.0 && tau <= 1.0) || !(m >= 0.0) {
        return domain(format!("invalid channel tau={tau}, m={m}"));
    }
    CovarianceMatrix2Mode::standard_form(
        2.0 * m + 1.0,
        2.0 * m * tau + 1.0,
        2.0 * (tau * m * (m + 1.0)).sqrt(),
    )
}

/// Parameters of the two-mode-squeezing frames that bring each channel
/// output to (thermal idler) x (vacuum signal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalizationParams {
    pub nbar0: f64,
    pub nbar1: f64,
    pub r0: f64,
    pub r1: f64,
    /// Squeezing parameter of the relative unitary between the two frames.
    pub r: f64,
}

impl DiagonalizationParams {
    /// `x_i = 1 / (nbar_i + 1)`, the vacuum weight of the thermal mode.
    pub fn x0(&self) -> f64 {
        1.0 / (self.nbar0 + 1.0)
    }

    pub fn x1(&self) -> f64 {
        1.0 / (self.nbar1 + 1.0)
    }

    /// `y = 1 / cosh r`.
    pub fn y(&self) -> f64 {
        1.0 / self.r.cosh()
    }
}

/// Diagonal covariance matrix of a thermal idler with `nbar` photons and a
/// vacuum signal.
pub fn thermal_vacuum(nbar: f64) -> Matrix<4> {
    let t = 2.0 * nbar + 1.0;
    [
        [t, 0.0, 0.0, 0.0],
        [0.0, t, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn diagonalizing_params(pair: &LossChannelPair) -> Result<DiagonalizationParams> {
    let m = pair.mean_photons();
    let v0 = tmsv_output_covariance(pair.tau0(), m)?;
    let v1 = tmsv_output_covariance(pair.tau1(), m)?;
    let (nbar0, r0) = diagonalize(&v0)?;
    let (nbar1, r1) = diagonalize(&v1)?;

    // Expressed in the frame that diagonalizes channel 0, the channel-1
    // output must be a two-mode squeezing of its own diagonal form.
    let in_frame0 = v0_frame(&v1, r0);
    let target = thermal_vacuum(nbar1);
    let tol = DIAGONALIZATION_TOL * scale(&v1);
    for r in [r0 - r1, r1 - r0] {
        let candidate = congruence(&two_mode_squeezer(r), &target);
        if max_abs_diff(&candidate, &in_frame0) <= tol {
            return Ok(DiagonalizationParams {
                nbar0,
                nbar1,
                r0,
                r1,
                r,
            });
        }
    }
    Err(Error::Consistency(
        "relative squeezing parameter failed the frame check for both signs".into(),
    ))
}

fn v0_frame(v: &CovarianceMatrix2Mode, r0: f64) -> Matrix<4> {
    v.transformed(&two_mode_squeezer(-r0))
}

/// Returns `(nbar, r)` such that `S(-r) V S(-r)^T = diag(2 nbar + 1, 2 nbar + 1, 1, 1)`.
fn diagonalize(v: &CovarianceMatrix2Mode) -> Result<(f64, f64)> {
    let e = v.entries();
    let (a, b, c) = (e[0][0], e[2][2], e[0][2]);
    let r = 0.5 * (2.0 * c / (a + b)).atanh();
    let (_, nu_plus) = v.symplectic_eigenvalues();
    let nbar = ((nu_plus - 1.0) / 2.0).max(0.0);
    let residual = max_abs_diff(&v.transformed(&two_mode_squeezer(-r)), &thermal_vacuum(nbar));
    if residual > DIAGONALIZATION_TOL * scale(v) {
        return Err(Error::Consistency(format!(
            "diagonalization residual {residual:e} exceeds tolerance"
        )));
    }
    Ok((nbar, r))
}

fn scale(v: &CovarianceMatrix2Mode) -> f64 {
    v.entries().iter().flatten().fold(1.0f64, |acc, x| acc.max(x.abs()))
}
