//! Point-mass configurations under Newtonian attraction.
//!
//! A configuration of `N` bodies in `R^d` is stored as the `d x N` matrix `X`
//! whose columns are the positions. Gradients are taken for the mass scalar
//! product `x'.x'' = sum_k m_k <r'_k, r''_k>`, so that Newton's equations read
//! `x'' = grad U(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::{self, eigen_sym, AntisymMatrix, Matrix, SymMatrix, DEFAULT_TOL};

/// Default relative tolerance of [`certify`].
pub const DEFAULT_CERTIFY_TOL: f64 = 1e-8;

/// Positive masses of at least two bodies.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Masses(Vec<f64>);

impl Masses {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidConfiguration(
                "at least two bodies are required".into(),
            ));
        }
        if let Some(k) = values.iter().position(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::InvalidConfiguration(format!(
                "mass of body {} is not positive",
                k + 1
            )));
        }
        Ok(Masses(values))
    }

    pub fn equal(n: usize, m: f64) -> Result<Self> {
        Self::new(vec![m; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn diag(&self) -> Matrix {
        Matrix::from_diag(&self.0)
    }
}

/// Barycentric configuration. Positions are re-centered on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    positions: Matrix,
    masses: Masses,
}

/// On-disk configuration: one position per body.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigurationFile {
    pub masses: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub dim: usize,
}

impl Configuration {
    /// `positions` is `d x N`, one column per body.
    pub fn new(positions: Matrix, masses: Masses) -> Result<Self> {
        if positions.cols() != masses.len() {
            return Err(Error::DimensionMismatch {
                expected: masses.len(),
                found: positions.cols(),
            });
        }
        if positions.rows() == 0 {
            return Err(Error::InvalidConfiguration(
                "dimension must be positive".into(),
            ));
        }
        if !positions.is_finite() {
            return Err(Error::InvalidConfiguration("non-finite coordinate".into()));
        }
        let total = masses.total();
        let mut positions = positions;
        for i in 0..positions.rows() {
            let center: f64 = (0..masses.len())
                .map(|k| masses.0[k] * positions[(i, k)])
                .sum::<f64>()
                / total;
            for k in 0..masses.len() {
                positions[(i, k)] -= center;
            }
        }
        Ok(Configuration { positions, masses })
    }

    /// One slice of length `dim` per body.
    pub fn from_bodies<B: AsRef<[f64]>>(dim: usize, bodies: &[B], masses: Masses) -> Result<Self> {
        if let Some(k) = bodies.iter().position(|b| b.as_ref().len() != dim) {
            return Err(Error::InvalidConfiguration(format!(
                "body {} has {} coordinates, expected {dim}",
                k + 1,
                bodies[k].as_ref().len()
            )));
        }
        let x = Matrix::from_fn(dim, bodies.len(), |i, k| bodies[k].as_ref()[i]);
        Self::new(x, masses)
    }

    pub fn from_file(file: &ConfigurationFile) -> Result<Self> {
        if file.masses.len() != file.positions.len() {
            return Err(Error::InvalidConfiguration(format!(
                "{} masses but {} positions",
                file.masses.len(),
                file.positions.len()
            )));
        }
        Self::from_bodies(file.dim, &file.positions, Masses::new(file.masses.clone())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigurationFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> ConfigurationFile {
        ConfigurationFile {
            masses: self.masses.0.clone(),
            positions: (0..self.len()).map(|k| self.positions.column(k)).collect(),
            dim: self.dim(),
        }
    }

    pub fn dim(&self) -> usize {
        self.positions.rows()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn positions(&self) -> &Matrix {
        &self.positions
    }

    pub fn masses(&self) -> &Masses {
        &self.masses
    }

    pub fn body(&self, k: usize) -> Vec<f64> {
        self.positions.column(k)
    }

    /// Mass scalar product of two `d x N` matrices.
    pub fn mass_dot(&self, a: &Matrix, b: &Matrix) -> f64 {
        let mut s = 0.0;
        for k in 0..self.len() {
            let m = self.masses.0[k];
            for i in 0..self.dim() {
                s += m * a[(i, k)] * b[(i, k)];
            }
        }
        s
    }

    pub fn mass_norm(&self, a: &Matrix) -> f64 {
        self.mass_dot(a, a).sqrt()
    }

    /// `I(x) = |x|^2` in the mass metric.
    pub fn moment_of_inertia(&self) -> f64 {
        self.mass_dot(&self.positions, &self.positions)
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        (0..self.dim())
            .map(|r| (self.positions[(r, i)] - self.positions[(r, j)]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Mutual distances `|r_i - r_j|` for `i < j`, in lexicographic order.
    pub fn mutual_distances(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.distance(i, j));
            }
        }
        out
    }

    /// Matrix of `1/|r_i - r_j|^3`, failing on the first coincident pair.
    fn inverse_cubes(&self) -> Result<Matrix> {
        let n = self.len();
        let size = (0..n)
            .map(|k| {
                self.positions
                    .column(k)
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let r = self.distance(i, j);
                if r <= 1e-14 * size || r == 0.0 {
                    return Err(Error::Collision(i + 1, j + 1));
                }
                out[(i, j)] = 1.0 / (r * r * r);
                out[(j, i)] = out[(i, j)];
            }
        }
        Ok(out)
    }

    /// Newtonian force function `U = sum_{i<j} m_i m_j / |r_i - r_j|`.
    pub fn potential(&self) -> Result<f64> {
        self.inverse_cubes()?;
        let n = self.len();
        let m = &self.masses.0;
        let mut u = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                u += m[i] * m[j] / self.distance(i, j);
            }
        }
        Ok(u)
    }

    /// Mass-metric gradient of `U`; column `k` is the acceleration of body `k`.
    pub fn gradient(&self) -> Result<Matrix> {
        let inv3 = self.inverse_cubes()?;
        let (d, n) = (self.dim(), self.len());
        let m = &self.masses.0;
        let mut g = Matrix::zeros(d, n);
        for k in 0..n {
            for j in 0..n {
                if j == k {
                    continue;
                }
                let w = m[j] * inv3[(k, j)];
                for i in 0..d {
                    g[(i, k)] += w * (self.positions[(i, j)] - self.positions[(i, k)]);
                }
            }
        }
        Ok(g)
    }

    /// Wintner-Conley matrix `A`, with `grad U(x) = 2 X A`.
    ///
    /// Off the diagonal `A_ij = m_i / (2 |r_i - r_j|^3)`; each column sums to
    /// zero. `A M` is symmetric.
    pub fn wintner_conley(&self) -> Result<Matrix> {
        let inv3 = self.inverse_cubes()?;
        let n = self.len();
        let m = &self.masses.0;
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    a[(i, j)] = 0.5 * m[i] * inv3[(i, j)];
                }
            }
        }
        for j in 0..n {
            a[(j, j)] = -(0..n).filter(|&i| i != j).map(|i| a[(i, j)]).sum::<f64>();
        }
        Ok(a)
    }

    /// `S = X M X^t`.
    pub fn inertia_tensor(&self) -> SymMatrix {
        let x = &self.positions;
        SymMatrix::new(x.mul(&self.masses.diag()).mul(&x.transpose())).expect("finite square")
    }

    /// Intrinsic inertia `M X^t X`, the `N x N` counterpart of the inertia
    /// tensor. Balanced configurations are those whose Wintner-Conley matrix
    /// commutes with it.
    pub fn intrinsic_inertia(&self) -> Matrix {
        let x = &self.positions;
        self.masses.diag().mul(&x.transpose().mul(x))
    }

    /// Positions `exp(t omega) X`.
    pub fn rigid_motion(&self, omega: &AntisymMatrix, t: f64) -> Result<Configuration> {
        if omega.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: omega.dim(),
            });
        }
        let rot = omega.exp(t)?;
        Ok(Configuration {
            positions: rot.matrix().mul(&self.positions),
            masses: self.masses.clone(),
        })
    }

    /// Angular velocity `sqrt(U / I)` of the periodic relative equilibria of a
    /// central configuration.
    pub fn central_frequency(&self) -> Result<f64> {
        Ok((self.potential()? / self.moment_of_inertia()).sqrt())
    }

    /// Relative defect `|omega^2 X - grad U| / |grad U|` of Newton's equations
    /// along the rigid motion generated by `omega`.
    pub fn newton_defect(&self, omega: &AntisymMatrix) -> Result<f64> {
        if omega.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: omega.dim(),
            });
        }
        let g = self.gradient()?;
        let o = omega.matrix();
        let accel = o.mul(o).mul(&self.positions);
        Ok(self.mass_norm(&accel.sub(&g)) / self.mass_norm(&g))
    }

    /// Relative size of `[omega^2, S]`.
    pub fn commutation_defect(&self, omega: &AntisymMatrix) -> Result<f64> {
        if omega.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: omega.dim(),
            });
        }
        let o = omega.matrix();
        let sq = o.mul(o);
        let s = self.inertia_tensor();
        let c = sq.commutator(s.matrix());
        Ok(c.frobenius() / (sq.frobenius() * s.matrix().frobenius()).max(f64::MIN_POSITIVE))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BalanceStatus {
    Central,
    Balanced,
    Neither,
}

/// Outcome of [`certify`].
#[derive(Clone, Debug, Serialize)]
pub struct BalanceCertificate {
    pub status: BalanceStatus,
    /// `lambda` with `grad U = lambda x`, reported for central configurations.
    pub lambda: Option<f64>,
    /// Symmetric `Sigma` with `grad U = Sigma x`, reported whenever the
    /// configuration is balanced.
    pub sigma: Option<SymMatrix>,
    /// Best relative defect among the two tests.
    pub residual: f64,
    pub central_defect: f64,
    pub balance_defect: f64,
    pub tolerance: f64,
}

/// Classifies a configuration as central, balanced or neither.
///
/// Central: `|grad U - lambda x| <= tol |grad U|` with `lambda = -U/I`, the
/// only value compatible with homogeneity. Balanced: the Wintner-Conley matrix
/// commutes with the intrinsic inertia up to `tol` relative.
pub fn certify(c: &Configuration, tol: f64) -> Result<BalanceCertificate> {
    let u = c.potential()?;
    let g = c.gradient()?;
    let inertia = c.moment_of_inertia();
    let lambda = -u / inertia;
    let central_defect = c.mass_norm(&g.sub(&c.positions.scale(lambda))) / c.mass_norm(&g);

    let a = c.wintner_conley()?;
    let b = c.intrinsic_inertia();
    let balance_defect =
        a.commutator(&b).frobenius() / (a.frobenius() * b.frobenius()).max(f64::MIN_POSITIVE);

    let status = if central_defect <= tol {
        BalanceStatus::Central
    } else if balance_defect <= tol {
        BalanceStatus::Balanced
    } else {
        BalanceStatus::Neither
    };
    let (lambda, sigma, residual) = match status {
        BalanceStatus::Central => (
            Some(lambda),
            Some(SymMatrix::from_diag(&vec![lambda; c.dim()])),
            central_defect,
        ),
        BalanceStatus::Balanced => (None, Some(balanced_multiplier(c, &g)?), balance_defect),
        BalanceStatus::Neither => (None, None, central_defect.min(balance_defect)),
    };
    Ok(BalanceCertificate {
        status,
        lambda,
        sigma,
        residual,
        central_defect,
        balance_defect,
        tolerance: tol,
    })
}

/// Least-squares `Sigma = G X^t (X X^t)^+`, symmetrized.
fn balanced_multiplier(c: &Configuration, g: &Matrix) -> Result<SymMatrix> {
    let x = &c.positions;
    let gram = SymMatrix::new(x.mul(&x.transpose()))?;
    let eig = eigen_sym(&gram, DEFAULT_TOL)?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    let d = c.dim();
    let mut pinv = Matrix::zeros(d, d);
    for (k, &v) in eig.values.iter().enumerate() {
        if v > 1e-12 * top {
            let col = eig.vectors.column(k);
            for i in 0..d {
                for j in 0..d {
                    pinv[(i, j)] += col[i] * col[j] / v;
                }
            }
        }
    }
    SymMatrix::new(g.mul(&x.transpose()).mul(&pinv))
}

/// Positions and velocities, both barycentric.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    configuration: Configuration,
    velocities: Matrix,
}

/// Result of [`State::albouy_bounds`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AlbouyBounds {
    /// Half the rank of the angular momentum.
    pub k: usize,
    /// Dimension of the space spanned by positions and velocities.
    pub d_motion: usize,
    /// Whether `2k <= d_motion <= k + N - 1`.
    pub holds: bool,
}

impl State {
    /// Velocities are re-centered like positions.
    pub fn new(configuration: Configuration, velocities: Matrix) -> Result<Self> {
        let (d, n) = (configuration.dim(), configuration.len());
        if velocities.rows() != d || velocities.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: d * n,
                found: velocities.rows() * velocities.cols(),
            });
        }
        let v = Configuration::new(velocities, configuration.masses.clone())?.positions;
        Ok(State {
            configuration,
            velocities: v,
        })
    }

    /// Initial state `(X0, omega X0)` of the rigid motion `exp(t omega) X0`.
    pub fn relative_equilibrium(
        configuration: Configuration,
        omega: &AntisymMatrix,
    ) -> Result<Self> {
        if omega.dim() != configuration.dim() {
            return Err(Error::DimensionMismatch {
                expected: configuration.dim(),
                found: omega.dim(),
            });
        }
        let v = omega.matrix().mul(&configuration.positions);
        Ok(State {
            configuration,
            velocities: v,
        })
    }

    pub fn configuration(&self) -> &Configuration {
        &self.configuration
    }

    pub fn velocities(&self) -> &Matrix {
        &self.velocities
    }

    /// `C = -X M Y^t + Y M X^t`.
    pub fn angular_momentum(&self) -> AntisymMatrix {
        let x = &self.configuration.positions;
        let y = &self.velocities;
        let m = self.configuration.masses.diag();
        let c = y
            .mul(&m)
            .mul(&x.transpose())
            .sub(&x.mul(&m).mul(&y.transpose()));
        AntisymMatrix::new(c).expect("finite square")
    }

    pub fn albouy_bounds(&self) -> Result<AlbouyBounds> {
        let c = self.angular_momentum();
        let k = matkit::rank(c.matrix(), 1e-9)? / 2;
        let (d, n) = (self.configuration.dim(), self.configuration.len());
        let x = &self.configuration.positions;
        let stacked = Matrix::from_fn(d, 2 * n, |i, j| {
            if j < n {
                x[(i, j)]
            } else {
                self.velocities[(i, j - n)]
            }
        });
        let d_motion = matkit::rank(&stacked, 1e-9)?;
        Ok(AlbouyBounds {
            k,
            d_motion,
            holds: 2 * k <= d_motion && d_motion < k + n,
        })
    }
}

/// Standard fixtures used throughout the tests and the CLI examples.
pub mod fixtures {
    use super::*;

    /// Unit-side equilateral triangle of unit masses in the `(e1, e2)` plane
    /// of `R^dim`.
    pub fn equilateral_triangle(dim: usize) -> Configuration {
        let h = 3f64.sqrt() / 2.0;
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.5, h]];
        let bodies: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let mut v = vec![0.0; dim];
                v[..2].copy_from_slice(p);
                v
            })
            .collect();
        Configuration::from_bodies(dim, &bodies, Masses::equal(3, 1.0).unwrap()).unwrap()
    }

    /// Regular tetrahedron of unit masses at alternate cube vertices, in the
    /// first three axes of `R^4`. Its inertia tensor is `diag(4, 4, 4, 0)`.
    pub fn regular_tetrahedron() -> Configuration {
        let bodies = [
            [1.0, 1.0, 1.0, 0.0],
            [1.0, -1.0, -1.0, 0.0],
            [-1.0, 1.0, -1.0, 0.0],
            [-1.0, -1.0, 1.0, 0.0],
        ];
        Configuration::from_bodies(4, &bodies, Masses::equal(4, 1.0).unwrap()).unwrap()
    }

    /// Four unit masses at `(+-a, 0)` and `(0, +-b)` in the first two axes of
    /// `R^dim`: balanced by symmetry, central only when `a == b`.
    pub fn rhombus(a: f64, b: f64, dim: usize) -> Configuration {
        let pts = [[a, 0.0], [0.0, b], [-a, 0.0], [0.0, -b]];
        let bodies: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let mut v = vec![0.0; dim];
                v[..2].copy_from_slice(p);
                v
            })
            .collect();
        Configuration::from_bodies(dim, &bodies, Masses::equal(4, 1.0).unwrap()).unwrap()
    }
}
