use super::{AntisymMatrix, ComplexHermitian, Matrix, SymMatrix};
use crate::error::{Error, Result};

/// Sweep budget of the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Relative gap allowed between the two copies of an eigenvalue of a real
/// realization.
const PAIRING_TOL: f64 = 1e-8;

/// Eigen-decomposition of a symmetric matrix: `values` descending, `vectors`
/// holds the matching unit eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSym {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps until the off-diagonal mass drops to rounding level. Fails only if
/// the budget of [`MAX_SWEEPS`] is exhausted with the off-diagonal norm still
/// above `tol` times the largest entry. Ties keep the input order.
pub fn eigen_sym(m: &SymMatrix, tol: f64) -> Result<EigenSym> {
    let n = m.dim();
    let mut a = m.matrix().clone();
    let mut v = Matrix::identity(n);
    let scale = a.max_abs();
    if scale == 0.0 || n == 1 {
        return Ok(finish(a, v));
    }

    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += a[(i, j)] * a[(i, j)];
            }
        }
        (2.0 * s).sqrt()
    };
    let floor = f64::EPSILON * a.frobenius();

    for _ in 0..MAX_SWEEPS {
        if off(&a) <= floor {
            return Ok(finish(a, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                // Skip entries that are negligible against both diagonal terms.
                if apq.abs() < 1e-3 * f64::EPSILON * app.abs().min(aqq.abs()) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    let residual = off(&a);
    if residual <= tol * scale {
        Ok(finish(a, v))
    } else {
        Err(Error::NonConvergence {
            sweeps: MAX_SWEEPS,
            residual,
        })
    }
}

/// Applies the Jacobi rotation in the `(p, q)` plane: `a <- G^t a G`,
/// `v <- v G`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn finish(a: Matrix, v: Matrix) -> EigenSym {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort: equal eigenvalues keep their input order.
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    EigenSym { values, vectors }
}

/// Descending spectrum of a hermitian matrix.
///
/// The real realization has every eigenvalue twice; consecutive pairs of its
/// descending spectrum are merged.
pub fn eigen_hermitian(h: &ComplexHermitian, tol: f64) -> Result<Vec<f64>> {
    let real = h.real_realization();
    let scale = real.matrix().max_abs().max(f64::MIN_POSITIVE);
    let values = eigen_sym(&real, tol)?.values;
    merge_pairs(&values, scale)
}

fn merge_pairs(values: &[f64], scale: f64) -> Result<Vec<f64>> {
    values
        .chunks(2)
        .map(|pair| {
            let gap = (pair[0] - pair[1]).abs();
            if gap > PAIRING_TOL * scale {
                Err(Error::UnpairedSpectrum { gap })
            } else {
                Ok(0.5 * (pair[0] + pair[1]))
            }
        })
        .collect()
}

/// Moduli of the eigenvalues `±i v_k` of an antisymmetric matrix of even
/// dimension, descending, one per conjugate pair.
pub fn antisym_moduli(c: &AntisymMatrix, tol: f64) -> Result<Vec<f64>> {
    let m = c.matrix();
    let gram = SymMatrix::new(m.transpose().mul(m))?;
    let scale = gram.matrix().max_abs().max(f64::MIN_POSITIVE);
    let values = eigen_sym(&gram, tol)?.values;
    let squares = merge_pairs(&values, scale)?;
    Ok(squares.into_iter().map(|v| v.max(0.0).sqrt()).collect())
}

/// Numerical rank: number of singular values above `rel_tol` times the largest.
pub fn rank(m: &Matrix, rel_tol: f64) -> Result<usize> {
    let gram = SymMatrix::new(m.mul(&m.transpose()))?;
    let sv: Vec<f64> = eigen_sym(&gram, super::DEFAULT_TOL)?
        .values
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * top).count())
}
