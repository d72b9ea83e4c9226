//! Three-qubit reduction of the squeezed-vacuum return states and the
//! Helstrom measurement on them.
//!
//! A control qubit prepared in `sqrt(a)|0> + sqrt(1-a)|1>` selects between
//! counting photons directly (`|0>`) or after the relative squeezing unitary
//! (`|1>`). Both optical modes are then coarse-grained to vacuum / not vacuum.
//! Basis order: `|control, vacuum-frame mode, thermal-frame mode>`, i.e.
//! `|000>, |001>, ..., |111>`.

use super::gaussian::{diagonalizing_params, DiagonalizationParams};
use super::LossChannelPair;
use crate::error::{domain, Error, Result};
use crate::linalg::{is_symmetric, trace, zeros, Matrix, SymmetricEigen};

const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this count as part of the negative eigenspace.
pub const NEGATIVE_EIGENVALUE_THRESHOLD: f64 = -1e-12;

/// 8x8 real symmetric density matrix of three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeQubitState {
    entries: Matrix<8>,
}

impl ThreeQubitState {
    /// Checks symmetry, unit trace (1e-12) and positivity (eigenvalues >= -1e-10).
    pub fn new(entries: Matrix<8>) -> Result<Self> {
        if !is_symmetric(&entries, 1e-14) {
            return Err(Error::Consistency("state is not symmetric".into()));
        }
        let tr = trace(&entries);
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Consistency(format!("state trace {tr} != 1")));
        }
        let min = SymmetricEigen::new(&entries)?.min_value();
        if min < -PSD_TOL {
            return Err(Error::Consistency(format!(
                "state has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { entries })
    }

    /// Diagonal state, mostly for tests.
    pub fn diagonal(diag: [f64; 8]) -> Result<Self> {
        let mut e = zeros::<8>();
        for (i, d) in diag.into_iter().enumerate() {
            e[i][i] = d;
        }
        Self::new(e)
    }

    pub fn entries(&self) -> &Matrix<8> {
        &self.entries
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().flatten().filter(|x| **x != 0.0).count()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(SymmetricEigen::new(&self.entries)?.min_value())
    }

    fn expectation(&self, v: &[f64; 8]) -> f64 {
        let mut acc = 0.0;
        for i in 0..8 {
            if v[i] == 0.0 {
                continue;
            }
            let row: f64 = (0..8).map(|j| self.entries[i][j] * v[j]).sum();
            acc += v[i] * row;
        }
        acc
    }
}

/// Output states `(rho_0, rho_1)` for channels `C0` and `C1` at control
/// weight `a`.
pub fn build_output_states(
    pair: &LossChannelPair,
    a: f64,
) -> Result<(ThreeQubitState, ThreeQubitState)> {
    build_output_states_with(&diagonalizing_params(pair)?, a)
}

/// As [`build_output_states`] with precomputed frame parameters.
pub fn build_output_states_with(
    params: &DiagonalizationParams,
    a: f64,
) -> Result<(ThreeQubitState, ThreeQubitState)> {
    if !(0.0..=1.0).contains(&a) {
        return domain(format!("control weight a={a} outside [0, 1]"));
    }
    let y = params.y();
    let y2 = y * y;
    let coherence = (a * (1.0 - a)).sqrt();

    // Channel C0 sits in its own diagonal frame.
    let x = params.x0();
    let mut first = zeros::<8>();
    first[0][0] = a * x;
    first[1][1] = a * (1.0 - x);
    first[4][4] = (1.0 - a) * x * y2;
    first[5][5] = (1.0 - a) * (1.0 - x) * x * y2 * y2 / (1.0 - (1.0 - x) * y2);
    first[7][7] = (1.0 - a) * (1.0 - y2) / (1.0 - (1.0 - x) * y2);
    set_coherences(&mut first, coherence, x, y);

    // Channel C1 is squeezed relative to that frame; the control flips
    // which branch sees the diagonal form.
    let x = params.x1();
    let mut second = zeros::<8>();
    second[0][0] = a * x * y2;
    second[1][1] = a * (1.0 - x) * x * y2 * y2 / (1.0 - (1.0 - x) * y2);
    second[3][3] = a * (1.0 - y2) / (1.0 - (1.0 - x) * y2);
    second[4][4] = (1.0 - a) * x;
    second[5][5] = (1.0 - a) * (1.0 - x);
    set_coherences(&mut second, coherence, x, y);

    Ok((ThreeQubitState::new(first)?, ThreeQubitState::new(second)?))
}

fn set_coherences(m: &mut Matrix<8>, coherence: f64, x: f64, y: f64) {
    let w0 = coherence * x * y;
    let w1 = coherence * (1.0 - x) * x * y * y / (1.0 - (1.0 - x) * y);
    m[0][4] = w0;
    m[4][0] = w0;
    m[1][5] = w1;
    m[5][1] = w1;
}

/// Errors of the Helstrom test that decides `C1` on the negative eigenspace
/// of `(1 - b) rho_1 - b rho_0`.
///
/// Returns `(alpha, beta)` with `alpha = Tr[(1 - Pi) rho_0]` and
/// `beta = Tr[Pi rho_1]`, where `Pi` projects onto the eigenvectors with
/// eigenvalue below `-1e-12`. Naming follows the hypothesis test: `rho_0`
/// is the null hypothesis.
pub fn helstrom_errors(
    rho0: &ThreeQubitState,
    rho1: &ThreeQubitState,
    b: f64,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&b) {
        return domain(format!("weight b={b} outside [0, 1]"));
    }
    let mut diff = zeros::<8>();
    for i in 0..8 {
        for j in 0..8 {
            diff[i][j] = (1.0 - b) * rho1.entries[i][j] - b * rho0.entries[i][j];
        }
    }
    let eig = SymmetricEigen::new(&diff)?;
    // Sum over the complementary subspaces separately rather than via 1 - x
    // so that exact zeros survive.
    let mut alpha = 0.0;
    let mut beta = 0.0;
    for (value, vector) in eig.values.iter().zip(eig.vectors.iter()) {
        if *value < NEGATIVE_EIGENVALUE_THRESHOLD {
            beta += rho1.expectation(vector);
        } else {
            alpha += rho0.expectation(vector);
        }
    }
    Ok((alpha.clamp(0.0, 1.0), beta.clamp(0.0, 1.0)))
}
