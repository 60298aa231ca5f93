use serde::Serialize;

use super::HermitianStructure;
use crate::error::{Error, Result};
use crate::matkit::{Matrix, Rotation};

/// Element `(eta, D'')` of the symmetry group acting on hermitian structures
/// by `R -> D' R D''` with `D' = diag(Id, eta Id)`.
///
/// `(eta, D'')` and `(eta, -D'')` act identically; the stored sign pattern is
/// normalized so that its first entry is `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GammaElement {
    eta: i8,
    signs: Vec<i8>,
}

impl GammaElement {
    /// Requires `eta^p * prod(signs) = +1` where `2p = signs.len()`.
    pub fn new(eta: i8, signs: Vec<i8>) -> Result<Self> {
        if eta.abs() != 1
            || signs.is_empty()
            || !signs.len().is_multiple_of(2)
            || signs.iter().any(|s| s.abs() != 1)
        {
            return Err(Error::InvalidGammaElement);
        }
        let p = signs.len() / 2;
        let det: i8 = signs.iter().product();
        if eta.pow(p as u32) * det != 1 {
            return Err(Error::InvalidGammaElement);
        }
        let signs = if signs[0] < 0 {
            signs.iter().map(|s| -s).collect()
        } else {
            signs
        };
        Ok(GammaElement { eta, signs })
    }

    pub fn identity(p: usize) -> Self {
        GammaElement {
            eta: 1,
            signs: vec![1; 2 * p],
        }
    }

    /// All `2^(2p-1)` elements for the given `p`.
    pub fn enumerate(p: usize) -> Vec<GammaElement> {
        let n = 2 * p;
        let mut out = Vec::with_capacity(1 << (n - 1));
        for eta in [1i8, -1] {
            // first sign fixed to +1
            for mask in 0u32..(1 << (n - 1)) {
                let signs: Vec<i8> = std::iter::once(1)
                    .chain((0..n - 1).map(|b| if mask >> b & 1 == 1 { -1 } else { 1 }))
                    .collect();
                if let Ok(g) = GammaElement::new(eta, signs) {
                    out.push(g);
                }
            }
        }
        out
    }

    pub fn eta(&self) -> i8 {
        self.eta
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn p(&self) -> usize {
        self.signs.len() / 2
    }

    fn d_prime(&self) -> Matrix {
        let p = self.p();
        Matrix::from_diag(
            &(0..2 * p)
                .map(|i| if i < p { 1.0 } else { self.eta as f64 })
                .collect::<Vec<_>>(),
        )
    }

    fn d_second(&self) -> Matrix {
        Matrix::from_diag(&self.signs.iter().map(|&s| s as f64).collect::<Vec<_>>())
    }

    /// Structure with representative `D' R D''`, whose complex structure is
    /// `eta D'' J D''`.
    pub fn act(&self, j: &HermitianStructure) -> Result<HermitianStructure> {
        if j.p() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.p(),
                found: 2 * j.p(),
            });
        }
        let r = self
            .d_prime()
            .mul(j.representative().matrix())
            .mul(&self.d_second());
        HermitianStructure::new(Rotation::new(r)?)
    }

    /// `eta D'' J D''` computed directly from `J`.
    pub fn transform_complex_structure(&self, j: &Matrix) -> Matrix {
        let d = self.d_second();
        d.mul(j).mul(&d).scale(self.eta as f64)
    }

    /// Whether the element fixes `j`, comparing complex structures entrywise.
    pub fn fixes(&self, j: &HermitianStructure, tol: f64) -> bool {
        let jm = j.complex_structure();
        self.transform_complex_structure(jm.matrix())
            .max_abs_diff(jm.matrix())
            <= tol
    }
}
