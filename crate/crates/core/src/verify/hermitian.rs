//! Smallest eigenpair of a 4×4 complex Hermitian matrix by cyclic Jacobi on
//! its 8×8 real symmetric embedding `[[Re A, −Im A], [Im A, Re A]]`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::C64;

/// Sweep limit for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 60;

/// Convergence threshold on the off-diagonal Frobenius mass, relative to
/// the Frobenius norm of the matrix.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Row-major 4×4 complex matrix.
pub type Herm4 = [C64; 16];

fn off_diagonal<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    let mut s = 0.0;
    for (p, row) in a.iter().enumerate() {
        for (q, v) in row.iter().enumerate() {
            if p != q {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a real symmetric matrix: eigenvalues and the
/// matrix whose columns are the matching eigenvectors.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_symmetric<const N: usize>(mut a: [[f64; N]; N]) -> Result<([f64; N], [[f64; N]; N])> {
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let norm = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let target = OFF_DIAGONAL_TOL * norm;
    let mut sweeps = 0;
    while off_diagonal(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps,
                off: off_diagonal(&a),
            });
        }
        sweeps += 1;
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Ok((std::array::from_fn(|i| a[i][i]), v))
}

/// Smallest eigenvalue and a unit eigenvector of a Hermitian 4×4 matrix.
/// The input is symmetrized as `(A + A†)/2` first.
pub fn hermitian4_min_eigenpair(a: &Herm4) -> Result<(f64, [C64; 4])> {
    let mut m = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let h = (a[4 * i + j] + a[4 * j + i].conj()) * 0.5;
            m[i][j] = h.re;
            m[i + 4][j + 4] = h.re;
            m[i][j + 4] = -h.im;
            m[i + 4][j] = h.im;
        }
    }
    let (values, vectors) = jacobi_symmetric(m)?;
    let (idx, &lambda) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("eight eigenvalues");
    let mut z: [C64; 4] = std::array::from_fn(|i| Complex::new(vectors[i][idx], vectors[i + 4][idx]));
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut z {
        *c /= norm;
    }
    Ok((lambda, z))
}

/// `A·v` for a row-major 4×4 matrix.
pub fn mat_vec(a: &Herm4, v: &[C64; 4]) -> [C64; 4] {
    std::array::from_fn(|i| (0..4).map(|j| a[4 * i + j] * v[j]).sum())
}
