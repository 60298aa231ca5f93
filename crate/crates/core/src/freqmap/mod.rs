//! The frequency map of a fixed inertia matrix.
//!
//! With `S0 = diag(sigma_1, ..., sigma_2p)` fixed, every positive hermitian
//! structure `J = R^{-1} J0 R` on `R^{2p}` gives a relative equilibrium whose
//! angular momentum is `w (S0 J + J S0)`. Read in the complex structure `J0`
//! after conjugating by `R`, that matrix becomes the hermitian `p x p` matrix
//! `Sigma`; its descending spectrum `nu` is the frequency vector of `J`.

mod bifurcation;
mod gamma;
mod pairing;

pub use bifurcation::{
    bifurcation_frequencies, BalancedSplitting, BifurcationFrequencies, BlockAssignment,
};
pub use gamma::GammaElement;
pub use pairing::{
    adapted_structure, basic_frequencies, basic_structure, enumerate_pairings, fixing_involution,
    induced_pairing, Pairing, MAX_PAIRING_P,
};

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkit::{
    antisym_moduli, eigen_hermitian, haar_rotation_with, is_complex_structure, j0, AntisymMatrix,
    ComplexHermitian, Matrix, Rotation, SymMatrix, DEFAULT_TOL,
};

/// Descending, non-negative principal moments `sigma_1 >= ... >= sigma_2p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InertiaSpectrum {
    sigma: Vec<f64>,
    trace: f64,
}

impl InertiaSpectrum {
    pub fn new(sigma: Vec<f64>) -> Result<Self> {
        if sigma.is_empty() || !sigma.len().is_multiple_of(2) {
            return Err(Error::InvalidSpectrum(format!(
                "need an even, positive count, got {}",
                sigma.len()
            )));
        }
        if sigma.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidSpectrum(
                "entries must be finite and non-negative".into(),
            ));
        }
        if sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum("entries must be descending".into()));
        }
        let trace = sigma.iter().sum();
        Ok(InertiaSpectrum { sigma, trace })
    }

    /// Sorts descending first. Tiny negative values (rounding from an
    /// eigensolver) are clamped to zero.
    pub fn from_unsorted(mut sigma: Vec<f64>) -> Result<Self> {
        let scale = sigma.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        for s in sigma.iter_mut() {
            if *s < 0.0 && *s >= -1e-12 * scale {
                *s = 0.0;
            }
        }
        sigma.sort_by(|a, b| b.total_cmp(a));
        Self::new(sigma)
    }

    /// Principal moments of an inertia tensor; an odd dimension is padded
    /// with one zero moment, which embeds `R^d` in `R^{d+1}`.
    pub fn of_inertia_tensor(s: &SymMatrix) -> Result<Self> {
        let mut values = crate::matkit::eigen_sym(s, DEFAULT_TOL)?.values;
        if values.len() % 2 == 1 {
            values.push(0.0);
        }
        Self::from_unsorted(values)
    }

    pub fn p(&self) -> usize {
        self.sigma.len() / 2
    }

    pub fn values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn as_matrix(&self) -> SymMatrix {
        SymMatrix::from_diag(&self.sigma)
    }
}

/// Positive hermitian structure `J = R^{-1} J0 R`, stored through one
/// representative `R` of its `U(p)` coset.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianStructure {
    representative: Rotation,
}

impl HermitianStructure {
    pub fn new(representative: Rotation) -> Result<Self> {
        if !representative.dim().is_multiple_of(2) {
            return Err(Error::InvalidMatrix("of even dimension"));
        }
        Ok(HermitianStructure { representative })
    }

    pub fn standard(p: usize) -> Self {
        HermitianStructure {
            representative: Rotation::identity(2 * p),
        }
    }

    /// Haar-random structure: the image of a Haar rotation in `U(p)\SO(2p)`.
    pub fn random<R: rand::Rng + ?Sized>(p: usize, rng: &mut R) -> Result<Self> {
        Ok(HermitianStructure {
            representative: haar_rotation_with(2 * p, rng)?,
        })
    }

    pub fn p(&self) -> usize {
        self.representative.dim() / 2
    }

    pub fn representative(&self) -> &Rotation {
        &self.representative
    }

    /// `J = R^t J0 R`.
    pub fn complex_structure(&self) -> AntisymMatrix {
        let r = self.representative.matrix();
        AntisymMatrix::new(r.transpose().mul(&j0(self.p())).mul(r)).expect("finite square")
    }

    /// Same coset, decided by comparing the complex structures.
    pub fn same_structure(&self, other: &HermitianStructure, tol: f64) -> bool {
        self.p() == other.p()
            && self
                .complex_structure()
                .matrix()
                .max_abs_diff(other.complex_structure().matrix())
                <= tol
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        is_complex_structure(&self.complex_structure(), tol)
    }

    /// Structure with representative `U R`, for `U` a rotation commuting
    /// with `J0`.
    pub fn left_multiply(&self, u: &Rotation) -> Result<HermitianStructure> {
        if u.dim() != self.representative.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.representative.dim(),
                found: u.dim(),
            });
        }
        Ok(HermitianStructure {
            representative: u.compose(&self.representative),
        })
    }
}

/// Descending frequency vector, a point of the Weyl chamber.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FrequencyVector(Vec<f64>);

impl FrequencyVector {
    /// Sorts the values descending.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        FrequencyVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn p(&self) -> usize {
        self.0.len()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn distance(&self, other: &FrequencyVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &FrequencyVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

fn check_dims(j: &HermitianStructure, n: usize) -> Result<()> {
    if j.representative.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: j.representative.dim(),
        });
    }
    Ok(())
}

/// `Sigma` from its coefficients
/// `sigma_ij = <h_i + i k_i, conj(h_j + i k_j)>_{S0}`, where `h_i` and `k_i`
/// are rows `i` and `p + i` of the representative.
pub fn sigma_of(j: &HermitianStructure, s: &InertiaSpectrum) -> Result<ComplexHermitian> {
    sigma_of_diag(j, s.values())
}

/// [`sigma_of`] for an arbitrary (not necessarily ordered) diagonal `S0`.
pub fn sigma_of_diag(j: &HermitianStructure, diag: &[f64]) -> Result<ComplexHermitian> {
    check_dims(j, diag.len())?;
    let p = j.p();
    let r = j.representative.matrix();
    let ip = |a: usize, b: usize| -> f64 {
        r.row(a)
            .iter()
            .zip(r.row(b))
            .zip(diag)
            .map(|((x, y), s)| s * x * y)
            .sum()
    };
    let mut re = Matrix::zeros(p, p);
    let mut im = Matrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            re[(a, b)] = ip(a, b) + ip(p + a, p + b);
            re[(b, a)] = re[(a, b)];
            im[(a, b)] = ip(p + a, b) - ip(a, p + b);
            im[(b, a)] = -im[(a, b)];
        }
    }
    ComplexHermitian::new(re, im)
}

/// `Sigma = J0^{-1} (R S0 R^{-1}) J0 + R S0 R^{-1}`, read as a complex
/// matrix through `J0`.
pub fn sigma_of_matrix(j: &HermitianStructure, s: &InertiaSpectrum) -> Result<ComplexHermitian> {
    check_dims(j, s.values().len())?;
    let p = j.p();
    let r = j.representative.matrix();
    let gram = r.mul(s.as_matrix().matrix()).mul(&r.transpose());
    let jm = j0(p);
    let sigma = jm.transpose().mul(&gram).mul(&jm).add(&gram);
    // [[X, -Y], [Y, X]] is the real form of X + iY
    let re = Matrix::from_fn(p, p, |a, b| sigma[(a, b)]);
    let im = Matrix::from_fn(p, p, |a, b| sigma[(p + a, b)]);
    ComplexHermitian::new(re, im)
}

/// Ordered spectrum of [`sigma_of`].
pub fn frequency_map(j: &HermitianStructure, s: &InertiaSpectrum) -> Result<FrequencyVector> {
    frequency_map_diag(j, s.values())
}

/// [`frequency_map`] for an arbitrary diagonal `S0`.
pub fn frequency_map_diag(j: &HermitianStructure, diag: &[f64]) -> Result<FrequencyVector> {
    let sigma = sigma_of_diag(j, diag)?;
    Ok(FrequencyVector::new(eigen_hermitian(&sigma, DEFAULT_TOL)?))
}

/// Angular momentum `w (S0 J + J S0)` of the relative equilibrium with
/// angular velocity `w J`.
pub fn angular_momentum_matrix(
    j: &HermitianStructure,
    s_full: &SymMatrix,
    omega: f64,
) -> Result<AntisymMatrix> {
    check_dims(j, s_full.dim())?;
    let jm = j.complex_structure();
    let (jm, s) = (jm.matrix(), s_full.matrix());
    AntisymMatrix::new(s.mul(jm).add(&jm.mul(s)).scale(omega))
}

/// Frequencies recovered from the angular momentum matrix itself: moduli of
/// its eigenvalues divided by `omega`.
pub fn frequencies_from_momentum(c: &AntisymMatrix, omega: f64) -> Result<FrequencyVector> {
    let moduli = antisym_moduli(c, DEFAULT_TOL)?;
    Ok(FrequencyVector::new(
        moduli.into_iter().map(|m| m / omega.abs()).collect(),
    ))
}

/// Real form of the element `exp(K)` of `U(p)` for a skew-hermitian
/// `K = A + iB` given by `a` antisymmetric and `b` symmetric.
pub fn unitary_from_generator(a: &Matrix, b: &Matrix) -> Result<Rotation> {
    let p = a.rows();
    let k = Matrix::from_fn(2 * p, 2 * p, |i, j| match (i < p, j < p) {
        (true, true) => a[(i, j)],
        (true, false) => -b[(i, j - p)],
        (false, true) => b[(i - p, j)],
        (false, false) => a[(i - p, j - p)],
    });
    AntisymMatrix::checked(k, 1e-12)?.exp(1.0)
}
