//! Small dense reference routines: cyclic Jacobi eigendecomposition, an LU
//! solve with partial pivoting and Gram-Schmidt orthonormalization.
//!
//! These back the Rayleigh-Ritz extraction (r x r blocks), the penalty-shift
//! estimates and the test oracles. They are O(n^3) and meant for modest n.

use crate::error::SolverError;
use crate::linops::{dot, Mat};

/// Eigendecomposition of a symmetric matrix given row-major (equivalently,
/// since symmetric, column-major). Returns eigenvalues in ascending order and
/// the eigenvectors as columns of a col-major n x n buffer.
pub fn sym_eigen(n: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m[i * n + j] * m[i * n + j];
            }
        }
        s.sqrt()
    };
    let fro: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-15 * fro.max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        if off(&m) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // rows/cols p and q of m
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                // accumulate rotations; v columns are eigenvectors
                for k in 0..n {
                    let vkp = v[p * n + k];
                    let vkq = v[q * n + k];
                    v[p * n + k] = c * vkp - s * vkq;
                    v[q * n + k] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].partial_cmp(&m[j * n + j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (col, &i) in order.iter().enumerate() {
        vecs[col * n..(col + 1) * n].copy_from_slice(&v[i * n..(i + 1) * n]);
    }
    (vals, vecs)
}

/// Solves `a x = b` in place with partial pivoting; `a` is n x n row-major
/// and is destroyed. On return `b` holds the solution.
pub fn lu_solve(n: usize, a: &mut [f64], b: &mut [f64]) -> Result<(), SolverError> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].abs();
        for i in (k + 1)..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best < 1e-300 {
            return Err(SolverError::InvalidArgument(
                "singular matrix in lu_solve".into(),
            ));
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            b.swap(k, piv);
        }
        let pivot = a[k * n + k];
        for i in (k + 1)..n {
            let f = a[i * n + k] / pivot;
            if f == 0.0 {
                continue;
            }
            a[i * n + k] = 0.0;
            for j in (k + 1)..n {
                a[i * n + j] -= f * a[k * n + j];
            }
            b[i] -= f * b[k];
        }
    }
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc -= a[i * n + j] * b[j];
        }
        b[i] = acc / a[i * n + i];
    }
    Ok(())
}

/// Orthonormalizes the columns of `x` in place by modified Gram-Schmidt with
/// one reorthogonalization pass. Errors on (numerically) rank-deficient input.
pub fn orthonormalize(x: &mut Mat) -> Result<(), SolverError> {
    let (n, r) = (x.rows(), x.cols());
    if r > n {
        return Err(SolverError::InvalidArgument(format!(
            "cannot orthonormalize {r} columns in dimension {n}"
        )));
    }
    for j in 0..r {
        for _pass in 0..2 {
            for i in 0..j {
                let coeff = dot(x.col(i), x.col(j));
                let qi = x.col(i).to_vec();
                crate::linops::axpy(-coeff, &qi, x.col_mut(j));
            }
        }
        let norm = crate::linops::norm2(x.col(j));
        if norm < 1e-12 {
            return Err(SolverError::InvalidArgument(
                "rank-deficient block in orthonormalize".into(),
            ));
        }
        for v in x.col_mut(j) {
            *v /= norm;
        }
    }
    Ok(())
}
