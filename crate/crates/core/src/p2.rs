//! Closed forms for `p = 2`: structures on `R^4` up to `U(2)` form a
//! 2-sphere, and `f = det Sigma = nu_1 nu_2` is an explicit function on it.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freqmap::{frequency_map, HermitianStructure, InertiaSpectrum};
use crate::matkit::{Matrix, Rotation};

/// Point of the sphere in the chart `phi in [-pi/2, pi/2]`, `theta in [0, 2pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SphereCoords {
    phi: f64,
    theta: f64,
}

impl SphereCoords {
    /// Any real pair, folded into the chart. The folded point has the same
    /// complex structure.
    pub fn new(phi: f64, theta: f64) -> Self {
        let mut phi = (phi + PI).rem_euclid(TAU) - PI;
        let mut theta = theta;
        if phi > FRAC_PI_2 {
            phi = PI - phi;
            theta += PI;
        } else if phi < -FRAC_PI_2 {
            phi = -PI - phi;
            theta += PI;
        }
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        SphereCoords { phi, theta }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `R^{-1} e_2 = (sin phi, cos phi cos theta, -cos phi sin theta)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        [sp, cp * ct, -cp * st]
    }
}

/// Representative `R(phi, theta)` of the structure at `c`.
pub fn rotation_at(c: SphereCoords) -> Rotation {
    let (sp, cp) = c.phi.sin_cos();
    let (st, ct) = c.theta.sin_cos();
    let m = Matrix::from_rows(&[
        [cp, -sp * ct, sp * st, 0.0],
        [sp, cp * ct, -cp * st, 0.0],
        [0.0, st, ct, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);
    Rotation::new(m).expect("rotation in closed form")
}

pub fn structure_at(c: SphereCoords) -> HermitianStructure {
    HermitianStructure::new(rotation_at(c)).expect("even dimension")
}

fn require_p2(s: &InertiaSpectrum) -> Result<()> {
    if s.p() != 2 {
        return Err(Error::UnsupportedDimension {
            p: s.p(),
            allowed: "2",
        });
    }
    Ok(())
}

/// The `S0`-products of the rows `h_1, h_2, k_1, k_2` of `R(phi, theta)`.
struct Products {
    n1: f64,
    n2: f64,
    re12: f64,
    im12: f64,
}

fn products(c: SphereCoords, s: &InertiaSpectrum) -> Products {
    let r = rotation_at(c);
    let m = r.matrix();
    let sig = s.values();
    let ip = |a: usize, b: usize| (0..4).map(|i| sig[i] * m[(a, i)] * m[(b, i)]).sum::<f64>();
    let (h1, h2, k1, k2) = (0, 1, 2, 3);
    Products {
        n1: ip(h1, h1) + ip(k1, k1),
        n2: ip(h2, h2) + ip(k2, k2),
        re12: ip(h1, h2) + ip(k1, k2),
        im12: ip(k1, h2) - ip(h1, k2),
    }
}

/// `f(phi, theta) = det Sigma` from the `S0`-products of `h_i`, `k_i`.
pub fn f_value(c: SphereCoords, s: &InertiaSpectrum) -> Result<f64> {
    require_p2(s)?;
    let q = products(c, s);
    Ok(q.n1 * q.n2 - q.re12 * q.re12 - q.im12 * q.im12)
}

/// `delta = (n_1 - n_2)^2 + 4 |sigma_12|^2`, so that `nu = (I +- sqrt(delta)) / 2`.
pub fn delta(c: SphereCoords, s: &InertiaSpectrum) -> Result<f64> {
    require_p2(s)?;
    let q = products(c, s);
    Ok((q.n1 - q.n2).powi(2) + 4.0 * q.re12 * q.re12 + 4.0 * q.im12 * q.im12)
}

/// `(nu_1, nu_2) = ((I + sqrt(delta)) / 2, (I - sqrt(delta)) / 2)`.
pub fn nu_from_delta(c: SphereCoords, s: &InertiaSpectrum) -> Result<(f64, f64)> {
    let root = delta(c, s)?.sqrt();
    Ok(((s.trace() + root) / 2.0, (s.trace() - root) / 2.0))
}

/// `nu_1 = I/2 + sqrt(I^2/4 - f)` and `nu_2 = I - nu_1`; the radicand is
/// clamped at zero.
pub fn nu_from_f(f: f64, trace: f64) -> (f64, f64) {
    let nu1 = trace / 2.0 + (trace * trace / 4.0 - f).max(0.0).sqrt();
    (nu1, trace - nu1)
}

/// Closed-form partial derivatives `(df/dphi, df/dtheta)`.
pub fn f_gradient(c: SphereCoords, s: &InertiaSpectrum) -> Result<(f64, f64)> {
    require_p2(s)?;
    let v = s.values();
    let (s1, s2, s3, s4) = (v[0], v[1], v[2], v[3]);
    let (sp, cp) = c.phi.sin_cos();
    let (st, ct) = c.theta.sin_cos();
    let d_phi = (s1 - (s2 * ct * ct + s3 * st * st)) * (s2 * st * st + s3 * ct * ct - s4)
        + (s2 - s3).powi(2) * ct * ct * st * st;
    Ok((
        2.0 * sp * cp * d_phi,
        2.0 * (s2 - s3) * (s4 - s1) * ct * st * cp * cp,
    ))
}

/// One of the six critical structures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub label: &'static str,
    pub coords: SphereCoords,
    pub value: f64,
}

/// Critical structures of `f`, their values and the resulting range of `nu_1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalAnalysis {
    pub sigma: Vec<f64>,
    pub trace: f64,
    pub points: Vec<CriticalPoint>,
    pub fmin: f64,
    pub fmax: f64,
    /// `[nu_1 at fmax, nu_1 at fmin]`.
    pub nu1_interval: [f64; 2],
}

/// `J0`, `J1`, `J2` and their opposites, with values
/// `(s1+s3)(s2+s4)`, `(s1+s2)(s3+s4)`, `(s1+s4)(s2+s3)`.
pub fn critical_analysis(s: &InertiaSpectrum) -> Result<CriticalAnalysis> {
    require_p2(s)?;
    let v = s.values();
    let values = [
        (v[0] + v[2]) * (v[1] + v[3]),
        (v[0] + v[1]) * (v[2] + v[3]),
        (v[0] + v[3]) * (v[1] + v[2]),
    ];
    let spots: [(&'static str, f64, f64, usize); 6] = [
        ("+J0", 0.0, 0.0, 0),
        ("-J0", 0.0, PI, 0),
        ("+J1", 0.0, 3.0 * FRAC_PI_2, 1),
        ("-J1", 0.0, FRAC_PI_2, 1),
        ("+J2", FRAC_PI_2, 0.0, 2),
        ("-J2", -FRAC_PI_2, 0.0, 2),
    ];
    let points = spots
        .iter()
        .map(|&(label, phi, theta, k)| CriticalPoint {
            label,
            coords: SphereCoords::new(phi, theta),
            value: values[k],
        })
        .collect();
    let fmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let fmax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let trace = s.trace();
    Ok(CriticalAnalysis {
        sigma: v.to_vec(),
        trace,
        points,
        fmin,
        fmax,
        nu1_interval: [nu_from_f(fmax, trace).0, nu_from_f(fmin, trace).0],
    })
}

/// Largest deviation of the frequencies from `(2I/3, I/3)` for a spectrum
/// `(sigma, sigma, sigma, 0)`, over `trials` Haar-random structures and as
/// many uniformly random points of the sphere chart.
pub fn round_3d_check(s: &InertiaSpectrum, trials: usize, seed: u64) -> Result<f64> {
    require_p2(s)?;
    let v = s.values();
    let tol = 1e-9 * v[0].max(1.0);
    if (v[0] - v[2]).abs() > tol || v[3].abs() > tol {
        return Err(Error::InvalidSpectrum(
            "expected the shape (sigma, sigma, sigma, 0)".into(),
        ));
    }
    let trace = s.trace();
    let expect = [2.0 * trace / 3.0, trace / 3.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let haar = HermitianStructure::random(2, &mut rng)?;
        let z: f64 = rng.random_range(-1.0..=1.0);
        let chart = structure_at(SphereCoords::new(z.asin(), rng.random_range(0.0..TAU)));
        for j in [haar, chart] {
            let nu = frequency_map(&j, s)?;
            for (a, b) in nu.values().iter().zip(expect) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(worst)
}

/// Number of `phi` samples of the standard grid.
pub const GRID_PHI: usize = 30;
/// Number of `theta` samples of the standard grid.
pub const GRID_THETA: usize = 60;

/// Values of `f`, `nu_1`, `nu_2` on a `phi x theta` grid, endpoints included.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FGrid {
    pub phis: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Row-major, `f[i * thetas.len() + j]` at `(phis[i], thetas[j])`.
    pub f: Vec<f64>,
    pub nu1: Vec<f64>,
    pub nu2: Vec<f64>,
}

impl FGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.f[i * self.thetas.len() + j]
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `n_phi` values of `phi` over `[-pi/2, pi/2]` and `n_theta` of `theta` over
/// `[0, 2pi]`.
pub fn grid(s: &InertiaSpectrum, n_phi: usize, n_theta: usize) -> Result<FGrid> {
    require_p2(s)?;
    if n_phi < 2 || n_theta < 2 {
        return Err(Error::InvalidConfiguration(
            "grid needs at least 2 x 2 points".into(),
        ));
    }
    let phis = linspace(-FRAC_PI_2, FRAC_PI_2, n_phi);
    let thetas = linspace(0.0, TAU, n_theta);
    let mut f = Vec::with_capacity(n_phi * n_theta);
    for &phi in &phis {
        for &theta in &thetas {
            f.push(f_value(SphereCoords::new(phi, theta), s)?);
        }
    }
    let (nu1, nu2) = f.iter().map(|&v| nu_from_f(v, s.trace())).unzip();
    Ok(FGrid {
        phis,
        thetas,
        f,
        nu1,
        nu2,
    })
}

/// Segment of a level curve in `(phi, theta)` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub from: (f64, f64),
    pub to: (f64, f64),
}

/// Level set `f = level` on a grid by marching squares.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Contour {
    pub level: f64,
    pub segments: Vec<Segment>,
    /// Connected components, with the seam `theta = 0 ~ 2pi` glued.
    pub components: usize,
}

/// Grid edge identifier: `(kind, i, j)` with kind 0 for the edge from
/// `(i, j)` to `(i + 1, j)` and kind 1 for `(i, j)` to `(i, j + 1)`.
type EdgeId = (u8, usize, usize);

pub fn contour(g: &FGrid, level: f64) -> Contour {
    let (np, nt) = (g.phis.len(), g.thetas.len());
    let last = nt - 1;
    // the seam column theta = 2pi is the column theta = 0
    let canon = |e: EdgeId| -> EdgeId {
        if e.0 == 0 && e.2 == last {
            (0, e.1, 0)
        } else {
            e
        }
    };
    let point = |e: EdgeId| -> (f64, f64) {
        let (a, b) = match e.0 {
            0 => ((e.1, e.2), (e.1 + 1, e.2)),
            _ => ((e.1, e.2), (e.1, e.2 + 1)),
        };
        let (fa, fb) = (g.at(a.0, a.1), g.at(b.0, b.1));
        let t = (level - fa) / (fb - fa);
        let lerp = |x: f64, y: f64| x + t * (y - x);
        (
            lerp(g.phis[a.0], g.phis[b.0]),
            lerp(g.thetas[a.1], g.thetas[b.1]),
        )
    };
    let above = |i: usize, j: usize| g.at(i, j) > level;

    let mut segments = Vec::new();
    let mut links: Vec<(EdgeId, EdgeId)> = Vec::new();
    for i in 0..np - 1 {
        for j in 0..nt - 1 {
            // corners in cyclic order and the edge following each corner
            let corners = [(i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j)];
            let edges: [EdgeId; 4] = [(1, i, j), (0, i, j + 1), (1, i + 1, j), (0, i, j)];
            let crossing: Vec<usize> = (0..4)
                .filter(|&k| {
                    above(corners[k].0, corners[k].1)
                        != above(corners[(k + 1) % 4].0, corners[(k + 1) % 4].1)
                })
                .collect();
            let pairs: Vec<(usize, usize)> = match crossing.len() {
                2 => vec![(crossing[0], crossing[1])],
                4 => {
                    let center = corners.iter().map(|&(a, b)| g.at(a, b)).sum::<f64>() / 4.0;
                    // join the edges around the corners on the side the center is not
                    if (center > level) == above(corners[0].0, corners[0].1) {
                        vec![(0, 1), (2, 3)]
                    } else {
                        vec![(3, 0), (1, 2)]
                    }
                }
                _ => vec![],
            };
            for (a, b) in pairs {
                let (ea, eb) = (edges[a], edges[b]);
                segments.push(Segment {
                    from: point(ea),
                    to: point(eb),
                });
                links.push((canon(ea), canon(eb)));
            }
        }
    }
    Contour {
        level,
        segments,
        components: count_components(&links),
    }
}

fn count_components(links: &[(EdgeId, EdgeId)]) -> usize {
    let mut ids: Vec<EdgeId> = links.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort();
    ids.dedup();
    let index = |e: &EdgeId| ids.binary_search(e).expect("edge present");
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in links {
        let (ra, rb) = (find(&mut parent, index(a)), find(&mut parent, index(b)));
        parent[ra] = rb;
    }
    (0..ids.len())
        .filter(|&x| find(&mut parent, x) == x)
        .count()
}

/// `count` levels evenly spaced strictly inside `(fmin, fmax)` of the grid;
/// empty when `f` is numerically constant.
pub fn contour_levels(g: &FGrid, count: usize) -> Vec<f64> {
    let lo = g.f.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = g.f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Vec::new();
    }
    (1..=count)
        .map(|k| lo + (hi - lo) * k as f64 / (count + 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freqmap::sigma_of;
    use crate::matkit::j0;

    fn s4321() -> InertiaSpectrum {
        InertiaSpectrum::new(vec![4.0, 3.0, 2.0, 1.0]).unwrap()
    }

    fn j1() -> Matrix {
        Matrix::from_rows(&[
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
    }

    fn j2() -> Matrix {
        Matrix::from_rows(&[
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ])
    }

    fn displayed_j(phi: f64, theta: f64) -> Matrix {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        Matrix::from_rows(&[
            [0.0, -cp * st, -cp * ct, -sp],
            [cp * st, 0.0, sp, -cp * ct],
            [cp * ct, -sp, 0.0, cp * st],
            [sp, cp * ct, -cp * st, 0.0],
        ])
    }

    fn j_at(phi: f64, theta: f64) -> Matrix {
        structure_at(SphereCoords::new(phi, theta))
            .complex_structure()
            .into_matrix()
    }

    #[test]
    fn chart_normalization() {
        let c = SphereCoords::new(2.0, 0.5);
        assert!((c.phi() - (PI - 2.0)).abs() < 1e-15 && (c.theta() - (0.5 + PI)).abs() < 1e-15);
        let c = SphereCoords::new(0.1, -0.5);
        assert!((c.theta() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(SphereCoords::new(0.3, TAU).theta(), 0.0);
        assert!(j_at(2.0, 0.5).max_abs_diff(&displayed_j(2.0, 0.5)) < 1e-15);
    }

    #[test]
    fn rotation_at_origin_and_h2() {
        assert_eq!(
            rotation_at(SphereCoords::new(0.0, 0.0)).matrix(),
            &Matrix::identity(4)
        );
        let c = SphereCoords::new(0.4, 2.2);
        let r = rotation_at(c);
        let h2 = r.matrix().transpose().mul_vec(&[0.0, 1.0, 0.0, 0.0]);
        let u = c.unit_vector();
        assert!(h2
            .iter()
            .zip([u[0], u[1], u[2], 0.0])
            .all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn structure_matches_displayed_matrix() {
        for i in 0..10 {
            for k in 0..10 {
                let (phi, theta) = (-FRAC_PI_2 + PI * i as f64 / 9.0, TAU * k as f64 / 10.0);
                assert!(j_at(phi, theta).max_abs_diff(&displayed_j(phi, theta)) < 1e-12);
                assert!(
                    (rotation_at(SphereCoords::new(phi, theta)).matrix().det() - 1.0).abs() < 1e-12
                );
            }
        }
    }

    #[test]
    fn special_structures() {
        assert!(j_at(0.0, 0.0).max_abs_diff(&j0(2)) < 1e-15);
        assert!(j_at(0.0, PI).max_abs_diff(&j0(2).scale(-1.0)) < 1e-15);
        assert!(j_at(0.0, 3.0 * FRAC_PI_2).max_abs_diff(&j1()) < 1e-15);
        assert!(j_at(0.0, FRAC_PI_2).max_abs_diff(&j1().scale(-1.0)) < 1e-15);
        assert!(j_at(FRAC_PI_2, 1.234).max_abs_diff(&j2()) < 1e-15);
        assert!(j_at(-FRAC_PI_2, 1.234).max_abs_diff(&j2().scale(-1.0)) < 1e-15);
    }

    #[test]
    fn critical_values_on_4321() {
        let s = s4321();
        assert_eq!(f_value(SphereCoords::new(0.0, 0.0), &s).unwrap(), 24.0);
        assert!(
            (f_value(SphereCoords::new(0.0, 3.0 * FRAC_PI_2), &s).unwrap() - 21.0).abs() < 1e-13
        );
        assert!((f_value(SphereCoords::new(FRAC_PI_2, 0.7), &s).unwrap() - 25.0).abs() < 1e-13);
        let a = critical_analysis(&s).unwrap();
        assert_eq!((a.fmin, a.fmax), (21.0, 25.0));
        assert_eq!(a.nu1_interval, [5.0, 7.0]);
        for p in &a.points {
            assert!(
                (f_value(p.coords, &s).unwrap() - p.value).abs() < 1e-12,
                "{}",
                p.label
            );
        }
    }

    #[test]
    fn f_is_det_sigma() {
        let s = InertiaSpectrum::new(vec![5.0, 2.5, 1.5, 0.25]).unwrap();
        for (phi, theta) in [(0.3, 1.1), (-1.2, 4.0), (0.9, 5.9)] {
            let c = SphereCoords::new(phi, theta);
            let det = sigma_of(&structure_at(c), &s).unwrap().det().unwrap();
            assert!((f_value(c, &s).unwrap() - det).abs() < 1e-11);
        }
    }

    #[test]
    fn gradient_vanishes_at_origin_and_theta_part_for_equal_middle() {
        let s = s4321();
        assert_eq!(
            f_gradient(SphereCoords::new(0.0, 0.0), &s).unwrap(),
            (0.0, 0.0)
        );
        let t = InertiaSpectrum::new(vec![4.0, 2.0, 2.0, 1.0]).unwrap();
        for (phi, theta) in [(0.3, 1.1), (-1.2, 4.0)] {
            assert_eq!(
                f_gradient(SphereCoords::new(phi, theta), &t).unwrap().1,
                0.0
            );
        }
    }

    #[test]
    fn round_and_flat_cases() {
        let s = InertiaSpectrum::new(vec![1.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(round_3d_check(&s, 50, 0).unwrap() < 1e-12);
        assert!(round_3d_check(&s4321(), 5, 0).is_err());
        let flat = InertiaSpectrum::new(vec![2.0; 4]).unwrap();
        let a = critical_analysis(&flat).unwrap();
        assert_eq!((a.fmin, a.fmax), (16.0, 16.0));
        assert_eq!(a.nu1_interval, [4.0, 4.0]);
        assert!(contour_levels(&grid(&flat, GRID_PHI, GRID_THETA).unwrap(), 5).is_empty());
    }

    #[test]
    fn contour_of_a_single_hump() {
        // f near its max at the J2 poles: each pole gives one closed curve
        let s = s4321();
        let g = grid(&s, 61, 121).unwrap();
        let c = contour(&g, 24.8);
        assert_eq!(c.components, 2);
        assert!(!c.segments.is_empty());
    }

    #[test]
    fn requires_p2() {
        let s = InertiaSpectrum::new(vec![3.0, 2.0, 1.0, 1.0, 0.5, 0.0]).unwrap();
        assert!(f_value(SphereCoords::new(0.0, 0.0), &s).is_err());
        assert!(critical_analysis(&s).is_err());
    }
}
