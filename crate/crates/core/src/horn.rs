//! Horn polytopes of ordered spectra of sums, and the sampling check that
//! the frequency map lands in (and fills) the polytope of the odd/even split.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freqmap::{
    basic_frequencies, enumerate_pairings, frequency_map, FrequencyVector, HermitianStructure,
    InertiaSpectrum, Pairing,
};
use crate::matkit::Matrix;

/// Default slack tolerance; multiplied by `max(1, trace)` when applied.
pub const DEFAULT_HORN_TOL: f64 = 1e-9;

/// Samples drawn from one random stream in [`conjecture_verify_with`].
pub const SAMPLE_CHUNK: usize = 4096;

/// Two descending spectra `lambda`, `mu` of equal length `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumPair {
    lambda: Vec<f64>,
    mu: Vec<f64>,
}

impl SpectrumPair {
    pub fn new(lambda: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() || lambda.len() != mu.len() {
            return Err(Error::InvalidSpectrum(format!(
                "lengths {} and {}",
                lambda.len(),
                mu.len()
            )));
        }
        for v in [&lambda, &mu] {
            if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidSpectrum(
                    "halves must be finite and descending".into(),
                ));
            }
        }
        Ok(SpectrumPair { lambda, mu })
    }

    pub fn p(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn trace(&self) -> f64 {
        self.lambda.iter().chain(&self.mu).sum()
    }
}

/// Linear inequality `coeffs . nu <= bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inequality {
    pub coeffs: Vec<f64>,
    pub bound: f64,
    pub label: String,
}

impl Inequality {
    pub fn slack(&self, nu: &[f64]) -> f64 {
        self.bound - self.coeffs.iter().zip(nu).map(|(a, x)| a * x).sum::<f64>()
    }
}

/// Polytope in the Weyl chamber `nu_1 >= ... >= nu_p`, cut out by
/// `inequalities` on the hyperplane `sum nu = trace_value`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralPolytope {
    p: usize,
    trace_value: f64,
    inequalities: Vec<Inequality>,
}

/// Outcome of a membership test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Containment {
    pub inside: bool,
    /// Minimum over inequality slacks, chamber gaps `nu_i - nu_{i+1}` and
    /// `-|sum nu - trace|`.
    pub worst_slack: f64,
}

impl SpectralPolytope {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn trace_value(&self) -> f64 {
        self.trace_value
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    /// `tol * max(1, trace)`.
    pub fn scaled_tol(&self, tol: f64) -> f64 {
        tol * self.trace_value.abs().max(1.0)
    }

    pub fn worst_slack(&self, nu: &[f64]) -> f64 {
        let trace = -(nu.iter().sum::<f64>() - self.trace_value).abs();
        let chamber = nu
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min);
        self.inequalities
            .iter()
            .map(|q| q.slack(nu))
            .fold(trace.min(chamber), f64::min)
    }

    /// Membership with slack tolerance `tol` scaled by `max(1, trace)`.
    pub fn contains(&self, nu: &FrequencyVector, tol: f64) -> Result<Containment> {
        if nu.p() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: nu.p(),
            });
        }
        let worst_slack = self.worst_slack(nu.values());
        Ok(Containment {
            inside: worst_slack >= -self.scaled_tol(tol),
            worst_slack,
        })
    }

    /// Points where `p - 1` constraints (inequalities or chamber walls) are
    /// tight on the trace hyperplane and all others hold, de-duplicated.
    pub fn vertices(&self) -> Result<Vec<FrequencyVector>> {
        let p = self.p;
        if !(1..=3).contains(&p) {
            return Err(Error::UnsupportedDimension {
                p,
                allowed: "1..=3",
            });
        }
        let mut constraints: Vec<(Vec<f64>, f64)> = self
            .inequalities
            .iter()
            .map(|q| (q.coeffs.clone(), q.bound))
            .collect();
        for i in 0..p.saturating_sub(1) {
            let mut a = vec![0.0; p];
            a[i] = -1.0;
            a[i + 1] = 1.0;
            constraints.push((a, 0.0));
        }
        let tol = self.scaled_tol(DEFAULT_HORN_TOL);
        let merge = self.scaled_tol(1e-8);
        let mut out: Vec<FrequencyVector> = Vec::new();
        for subset in combinations(constraints.len(), p - 1) {
            let mut rows: Vec<Vec<f64>> =
                subset.iter().map(|&c| constraints[c].0.clone()).collect();
            let mut rhs: Vec<f64> = subset.iter().map(|&c| constraints[c].1).collect();
            rows.push(vec![1.0; p]);
            rhs.push(self.trace_value);
            let Some(x) = Matrix::from_rows(&rows).solve(&rhs, 1e-12) else {
                continue;
            };
            if self.worst_slack(&x) < -tol {
                continue;
            }
            let v = FrequencyVector::new(x);
            if !out.iter().any(|w| w.max_abs_diff(&v) <= merge) {
                out.push(v);
            }
        }
        out.sort_by(|a, b| {
            a.values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| y.total_cmp(x))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(out)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Odd-indexed and even-indexed halves `(sigma_1, sigma_3, ...)`,
/// `(sigma_2, sigma_4, ...)`.
pub fn fflp_split(s: &InertiaSpectrum) -> SpectrumPair {
    let v = s.values();
    SpectrumPair {
        lambda: v.iter().step_by(2).copied().collect(),
        mu: v.iter().skip(1).step_by(2).copied().collect(),
    }
}

/// All `C(2p, p) / 2` splits of `sigma` into two halves of size `p`, the
/// first half always containing `sigma_1`.
pub fn half_splits(s: &InertiaSpectrum) -> Vec<SpectrumPair> {
    let v = s.values();
    let n = v.len();
    combinations(n - 1, s.p() - 1)
        .into_iter()
        .map(|rest| {
            let mut first = vec![0];
            first.extend(rest.into_iter().map(|i| i + 1));
            let lambda = first.iter().map(|&i| v[i]).collect();
            let mu = (0..n)
                .filter(|i| !first.contains(i))
                .map(|i| v[i])
                .collect();
            SpectrumPair { lambda, mu }
        })
        .collect()
}

fn horn_inequality(pair: &SpectrumPair, nu: &[usize], lam: &[usize], mu: &[usize]) -> Inequality {
    let mut coeffs = vec![0.0; pair.p()];
    for &i in nu {
        coeffs[i - 1] = 1.0;
    }
    let bound = lam.iter().map(|&i| pair.lambda[i - 1]).sum::<f64>()
        + mu.iter().map(|&j| pair.mu[j - 1]).sum::<f64>();
    let join = |name: &str, idx: &[usize]| {
        idx.iter()
            .map(|i| format!("{name}{i}"))
            .collect::<Vec<_>>()
            .join("+")
    };
    let label = format!("{} <= {}+{}", join("nu", nu), join("l", lam), join("m", mu));
    Inequality {
        coeffs,
        bound,
        label,
    }
}

/// Spectra of `A + B` for hermitian `A`, `B` with spectra `lambda`, `mu`,
/// `p <= 3`: Weyl inequalities `nu_k <= lambda_i + mu_j` (`i + j = k + 1`),
/// and for `p = 3` five Lidskii-Wielandt inequalities plus one further
/// Horn inequality.
pub fn horn_polytope(pair: &SpectrumPair) -> Result<SpectralPolytope> {
    let p = pair.p();
    if !(1..=3).contains(&p) {
        return Err(Error::UnsupportedDimension {
            p,
            allowed: "1..=3",
        });
    }
    let mut inequalities = Vec::new();
    for k in 1..=p {
        for i in 1..=k {
            inequalities.push(horn_inequality(pair, &[k], &[i], &[k + 1 - i]));
        }
    }
    if p == 3 {
        let pairs: [([usize; 2], [usize; 2], [usize; 2]); 6] = [
            ([1, 2], [1, 2], [1, 2]),
            ([1, 3], [1, 3], [1, 2]),
            ([2, 3], [2, 3], [1, 2]),
            ([1, 3], [1, 2], [1, 3]),
            ([2, 3], [1, 2], [2, 3]),
            ([2, 3], [1, 3], [1, 3]),
        ];
        for (nu, lam, mu) in pairs {
            inequalities.push(horn_inequality(pair, &nu, &lam, &mu));
        }
    }
    Ok(SpectralPolytope {
        p,
        trace_value: pair.trace(),
        inequalities,
    })
}

/// `horn_polytope(fflp_split(s))`, the candidate image of the frequency map.
pub fn global_polytope(s: &InertiaSpectrum) -> Result<SpectralPolytope> {
    horn_polytope(&fflp_split(s))
}

/// Chamber part of the convex hull of all coordinate permutations of the
/// basic set: the vectors majorized by `(sigma_1 + sigma_2, sigma_3 + sigma_4, ...)`.
/// Valid for every `p`; contains the global polytope.
pub fn basic_hull_polytope(s: &InertiaSpectrum) -> SpectralPolytope {
    let p = s.p();
    let top: Vec<f64> = s.values().chunks(2).map(|c| c[0] + c[1]).collect();
    let inequalities = (1..p)
        .map(|k| Inequality {
            coeffs: (0..p).map(|i| if i < k { 1.0 } else { 0.0 }).collect(),
            bound: top[..k].iter().sum(),
            label: format!("nu1+..+nu{k} <= s1+..+s{}", 2 * k),
        })
        .collect();
    SpectralPolytope {
        p,
        trace_value: s.trace(),
        inequalities,
    }
}

/// Pair-sum frequencies of one basic structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasicPoint {
    pub pairing: Pairing,
    pub nu: FrequencyVector,
}

/// Pair sums of every pairing, in the order of [`enumerate_pairings`].
pub fn basic_set(s: &InertiaSpectrum) -> Result<Vec<BasicPoint>> {
    enumerate_pairings(s.p())?
        .into_iter()
        .map(|pairing| {
            Ok(BasicPoint {
                nu: basic_frequencies(&pairing, s)?,
                pairing,
            })
        })
        .collect()
}

/// The sums `sigma_a + sigma_b`, `a < b`, in lexicographic order of `(a, b)`
/// (0-based). For rapidly decreasing `sigma` this order is strictly
/// decreasing; see [`is_strict_chain`].
pub fn pair_sum_chain(s: &InertiaSpectrum) -> Vec<((usize, usize), f64)> {
    let v = s.values();
    let n = v.len();
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| ((a, b), v[a] + v[b])))
        .collect()
}

pub fn is_strict_chain(chain: &[((usize, usize), f64)]) -> bool {
    chain.windows(2).all(|w| w[0].1 > w[1].1)
}

/// Sampling options for [`conjecture_verify_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Test against [`basic_hull_polytope`] even when `p <= 3`.
    pub hull_only: bool,
    /// Spread chunks over threads; the report does not depend on this.
    pub parallel: bool,
}

/// Result of sampling the frequency map against a polytope.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub p: usize,
    pub sigma: Vec<f64>,
    pub trace: f64,
    pub samples: usize,
    pub seed: u64,
    /// Tolerance applied to `max_violation` for the verdict.
    pub tolerance: f64,
    /// Largest amount by which a sample leaves the polytope (0 if none does).
    pub max_violation: f64,
    pub worst_sample: FrequencyVector,
    /// Largest distance from a polytope vertex to the nearest sample.
    pub coverage_gap: Option<f64>,
    pub vertices: Vec<FrequencyVector>,
    pub basic_set: Vec<BasicPoint>,
    pub inequalities: Vec<Inequality>,
    /// Set when the check is against the basic hull rather than the exact
    /// polytope, so containment is only a necessary condition.
    pub partial_certificate: bool,
}

impl ConjectureReport {
    pub fn contained(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

/// [`conjecture_verify_with`] with default options.
pub fn conjecture_verify(
    s: &InertiaSpectrum,
    samples: usize,
    seed: u64,
) -> Result<ConjectureReport> {
    conjecture_verify_with(s, samples, seed, VerifyOptions::default())
}

struct ChunkResult {
    violation: f64,
    worst: FrequencyVector,
    nearest: Vec<f64>,
}

/// Draws `samples` Haar-random structures and compares their frequencies
/// with the global polytope (`p <= 3`) or the basic hull.
///
/// Chunk `c` of [`SAMPLE_CHUNK`] samples uses stream `c` of a ChaCha8
/// generator seeded with `seed`, so output is independent of threading.
pub fn conjecture_verify_with(
    s: &InertiaSpectrum,
    samples: usize,
    seed: u64,
    opts: VerifyOptions,
) -> Result<ConjectureReport> {
    if samples == 0 {
        return Err(Error::InvalidConfiguration(
            "at least one sample is required".into(),
        ));
    }
    let p = s.p();
    let partial = opts.hull_only || p > 3;
    let poly = if partial {
        basic_hull_polytope(s)
    } else {
        global_polytope(s)?
    };
    let vertices = if partial {
        Vec::new()
    } else {
        poly.vertices()?
    };
    let basic = if p <= 5 { basic_set(s)? } else { Vec::new() };

    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let run = |c: usize| -> Result<ChunkResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let n = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
        let mut res = ChunkResult {
            violation: f64::NEG_INFINITY,
            worst: FrequencyVector::new(vec![]),
            nearest: vec![f64::INFINITY; vertices.len()],
        };
        for _ in 0..n {
            let nu = frequency_map(&HermitianStructure::random(p, &mut rng)?, s)?;
            let v = -poly.worst_slack(nu.values());
            for (d, vert) in res.nearest.iter_mut().zip(&vertices) {
                *d = d.min(vert.distance(&nu));
            }
            if v > res.violation {
                res.violation = v;
                res.worst = nu;
            }
        }
        Ok(res)
    };
    let parts: Vec<ChunkResult> = if opts.parallel {
        (0..chunks)
            .into_par_iter()
            .map(run)
            .collect::<Result<_>>()?
    } else {
        (0..chunks).map(run).collect::<Result<_>>()?
    };

    let mut violation = f64::NEG_INFINITY;
    let mut worst = FrequencyVector::new(vec![]);
    let mut nearest = vec![f64::INFINITY; vertices.len()];
    for part in parts {
        if part.violation > violation {
            violation = part.violation;
            worst = part.worst;
        }
        for (d, x) in nearest.iter_mut().zip(part.nearest) {
            *d = d.min(x);
        }
    }
    let coverage_gap =
        (!vertices.is_empty()).then(|| nearest.iter().fold(0.0f64, |m, &d| m.max(d)));
    Ok(ConjectureReport {
        p,
        sigma: s.values().to_vec(),
        trace: s.trace(),
        samples,
        seed,
        tolerance: poly.scaled_tol(DEFAULT_HORN_TOL),
        max_violation: violation.max(0.0),
        worst_sample: worst,
        coverage_gap,
        vertices,
        basic_set: basic,
        inequalities: poly.inequalities.clone(),
        partial_certificate: partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(v: &[f64]) -> InertiaSpectrum {
        InertiaSpectrum::new(v.to_vec()).unwrap()
    }

    fn fv(v: &[f64]) -> FrequencyVector {
        FrequencyVector::new(v.to_vec())
    }

    #[test]
    fn fflp_split_examples() {
        let pair = fflp_split(&spectrum(&[4.0, 3.0, 2.0, 1.0]));
        assert_eq!(
            (pair.lambda(), pair.mu()),
            (&[4.0, 2.0][..], &[3.0, 1.0][..])
        );
        let pair = fflp_split(&spectrum(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]));
        assert_eq!(
            (pair.lambda(), pair.mu()),
            (&[6.0, 4.0, 2.0][..], &[5.0, 3.0, 1.0][..])
        );
        let pair = fflp_split(&spectrum(&[2.0; 4]));
        assert_eq!(pair.lambda(), pair.mu());
    }

    #[test]
    fn inequality_counts() {
        for (p, count) in [(1, 1), (2, 3), (3, 12)] {
            let s = spectrum(&(0..2 * p).rev().map(|i| i as f64 + 1.0).collect::<Vec<_>>());
            assert_eq!(global_polytope(&s).unwrap().inequalities().len(), count);
        }
        let s = spectrum(&[8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        assert_eq!(
            global_polytope(&s),
            Err(Error::UnsupportedDimension {
                p: 4,
                allowed: "1..=3"
            })
        );
    }

    #[test]
    fn p2_interval_and_membership() {
        let poly = global_polytope(&spectrum(&[4.0, 3.0, 2.0, 1.0])).unwrap();
        assert_eq!(
            poly.vertices().unwrap(),
            vec![fv(&[7.0, 3.0]), fv(&[5.0, 5.0])]
        );
        assert!(!poly.contains(&fv(&[8.0, 2.0]), 1e-9).unwrap().inside);
        assert!(poly.contains(&fv(&[6.0, 4.0]), 1e-9).unwrap().inside);
        assert!(!poly.contains(&fv(&[6.0, 4.5]), 1e-9).unwrap().inside);
        assert!(poly.contains(&fv(&[1.0, 2.0, 3.0]), 1e-9).is_err());
    }

    #[test]
    fn p1_is_a_point() {
        let poly = global_polytope(&spectrum(&[3.0, 1.0])).unwrap();
        assert_eq!(poly.vertices().unwrap(), vec![fv(&[4.0])]);
    }

    #[test]
    fn round_spectrum_has_one_vertex() {
        let poly = global_polytope(&spectrum(&[1.5; 4])).unwrap();
        assert_eq!(poly.vertices().unwrap(), vec![fv(&[3.0, 3.0])]);
    }

    #[test]
    fn basic_points_of_p3_fixture_are_inside() {
        let s = spectrum(&[21.0, 19.0, 16.0, 14.0, 12.0, 8.0]);
        let poly = global_polytope(&s).unwrap();
        let basic = basic_set(&s).unwrap();
        assert_eq!(basic.len(), 15);
        for b in &basic {
            assert!(poly.contains(&b.nu, 1e-9).unwrap().inside, "{}", b.pairing);
        }
    }

    #[test]
    fn half_split_count() {
        assert_eq!(half_splits(&spectrum(&[4.0, 3.0, 2.0, 1.0])).len(), 3);
        assert_eq!(
            half_splits(&spectrum(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0])).len(),
            10
        );
    }

    #[test]
    fn basic_hull_is_majorization() {
        let s = spectrum(&[4.0, 3.0, 2.0, 1.0]);
        let hull = basic_hull_polytope(&s);
        assert!(hull.contains(&fv(&[7.0, 3.0]), 1e-12).unwrap().inside);
        assert!(!hull.contains(&fv(&[7.5, 2.5]), 1e-12).unwrap().inside);
    }

    #[test]
    fn chain_for_rapidly_decreasing_sigma() {
        let chain = pair_sum_chain(&spectrum(&[100.0, 50.0, 25.0, 12.0, 6.0, 3.0]));
        assert_eq!(chain.len(), 15);
        assert!(is_strict_chain(&chain));
        assert!(!is_strict_chain(&pair_sum_chain(&spectrum(&[
            21.0, 19.0, 16.0, 14.0, 12.0, 8.0
        ]))));
    }

    #[test]
    fn verify_is_thread_independent() {
        let s = spectrum(&[5.0, 4.0, 2.5, 2.0, 1.0, 0.5]);
        let serial = conjecture_verify(&s, 5000, 3).unwrap();
        let parallel = conjecture_verify_with(
            &s,
            5000,
            3,
            VerifyOptions {
                parallel: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(serial, parallel);
        assert!(serial.contained());
        assert!(!serial.partial_certificate);
    }

    #[test]
    fn round_case_report() {
        let r = conjecture_verify(&spectrum(&[2.0; 4]), 200, 0).unwrap();
        assert!(r.max_violation < 1e-12);
        assert!(r.coverage_gap.unwrap() < 1e-12);
    }

    #[test]
    fn p4_falls_back_to_partial_certificate() {
        let s = spectrum(&[8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        let r = conjecture_verify(&s, 300, 1).unwrap();
        assert!(r.partial_certificate && r.contained());
        assert_eq!(r.basic_set.len(), 105);
        assert!(r.coverage_gap.is_none());
    }
}
