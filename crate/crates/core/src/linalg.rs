//! Dense fixed-size helpers for the small real symmetric matrices used by the
//! ROC computations (4x4 covariance matrices, 8x8 three-qubit states).

use crate::error::{Error, Result};

pub type Matrix<const N: usize> = [[f64; N]; N];

const MAX_SWEEPS: usize = 64;
const OFF_DIAGONAL_TOL: f64 = 1e-13;

pub fn zeros<const N: usize>() -> Matrix<N> {
    [[0.0; N]; N]
}

pub fn identity<const N: usize>() -> Matrix<N> {
    let mut m = zeros::<N>();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn transpose<const N: usize>(a: &Matrix<N>) -> Matrix<N> {
    let mut t = zeros::<N>();
    for i in 0..N {
        for j in 0..N {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn matmul<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> Matrix<N> {
    let mut c = zeros::<N>();
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// `s * a * s^T`
pub fn congruence<const N: usize>(s: &Matrix<N>, a: &Matrix<N>) -> Matrix<N> {
    matmul(&matmul(s, a), &transpose(s))
}

pub fn trace<const N: usize>(a: &Matrix<N>) -> f64 {
    (0..N).map(|i| a[i][i]).sum()
}

pub fn max_abs_diff<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((a[i][j] - b[i][j]).abs());
        }
    }
    worst
}

pub fn is_symmetric<const N: usize>(a: &Matrix<N>, tol: f64) -> bool {
    (0..N).all(|i| (0..i).all(|j| (a[i][j] - a[j][i]).abs() <= tol))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut m = *a;
    let mut det = 1.0;
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..N {
            let factor = m[row][col] / m[col][col];
            for k in col..N {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    det
}

/// Eigen-decomposition of a real symmetric matrix.
///
/// `vectors[i]` is the unit eigenvector belonging to `values[i]`. Values are
/// not sorted.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: [[f64; N]; N],
}

impl<const N: usize> SymmetricEigen<N> {
    /// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
    /// below `1e-13` (relative to the matrix scale when that exceeds one).
    pub fn new(a: &Matrix<N>) -> Result<Self> {
        if a.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("matrix has non-finite entries".into()));
        }
        let mut m = *a;
        // Columns of `v` accumulate the rotations.
        let mut v = identity::<N>();
        let scale = frobenius(&m).max(1.0);

        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&m) < OFF_DIAGONAL_TOL * scale {
                converged = true;
                break;
            }
            for p in 0..N {
                for q in p + 1..N {
                    let apq = m[p][q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    rotate(&mut m, &mut v, p, q, c, s, t);
                }
            }
        }
        if !converged && off_diagonal_norm(&m) >= OFF_DIAGONAL_TOL * scale {
            return Err(Error::Numeric(format!(
                "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
            )));
        }

        let mut values = [0.0; N];
        let mut vectors = [[0.0; N]; N];
        for i in 0..N {
            values[i] = m[i][i];
            for k in 0..N {
                vectors[i][k] = v[k][i];
            }
        }
        Ok(Self { values, vectors })
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn rotate<const N: usize>(
    m: &mut Matrix<N>,
    v: &mut Matrix<N>,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    t: f64,
) {
    let apq = m[p][q];
    m[p][p] -= t * apq;
    m[q][q] += t * apq;
    m[p][q] = 0.0;
    m[q][p] = 0.0;
    for r in 0..N {
        if r != p && r != q {
            let arp = m[r][p];
            let arq = m[r][q];
            m[r][p] = c * arp - s * arq;
            m[p][r] = m[r][p];
            m[r][q] = s * arp + c * arq;
            m[q][r] = m[r][q];
        }
    }
    for row in v.iter_mut() {
        let vp = row[p];
        let vq = row[q];
        row[p] = c * vp - s * vq;
        row[q] = s * vp + c * vq;
    }
}

fn frobenius<const N: usize>(m: &Matrix<N>) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

fn off_diagonal_norm<const N: usize>(m: &Matrix<N>) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                sum += m[i][j] * m[i][j];
            }
        }
    }
    sum.sqrt()
}
