use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Matrix, Rotation};
use crate::error::{Error, Result};

/// Haar-distributed rotation of `SO(dim)`, deterministic in `seed`.
pub fn haar_rotation(dim: usize, seed: u64) -> Result<Rotation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_rotation_with(dim, &mut rng)
}

/// Haar-distributed rotation drawn from `rng`.
///
/// Gaussian matrix, Gram-Schmidt on the columns (which yields the Haar
/// measure on `O(dim)`), then the first column is negated if the determinant
/// is `-1`.
pub fn haar_rotation_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Rotation> {
    if dim == 0 {
        return Err(Error::InvalidMatrix("of positive dimension"));
    }
    loop {
        let g = Matrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Some(q) = orthonormalize(&g) {
            let mut q = q;
            if q.det() < 0.0 {
                let col: Vec<f64> = q.column(0).iter().map(|v| -v).collect();
                q.set_column(0, &col);
            }
            return Ok(Rotation::from_matrix_unchecked(q));
        }
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. `None` when the
/// columns are numerically dependent.
fn orthonormalize(g: &Matrix) -> Option<Matrix> {
    let n = g.cols();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        let norm0 = dot(&cols[j], &cols[j]).sqrt();
        for _ in 0..2 {
            for k in 0..j {
                let proj = dot(&cols[k], &cols[j]);
                let (head, tail) = cols.split_at_mut(j);
                for (x, y) in tail[0].iter_mut().zip(&head[k]) {
                    *x -= proj * y;
                }
            }
        }
        let norm = dot(&cols[j], &cols[j]).sqrt();
        if norm.is_nan() || norm <= 1e-8 * norm0 {
            return None;
        }
        cols[j].iter_mut().for_each(|x| *x /= norm);
    }
    let mut q = Matrix::zeros(g.rows(), n);
    for (j, c) in cols.iter().enumerate() {
        q.set_column(j, c);
    }
    Some(q)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
