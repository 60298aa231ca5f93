use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::{FrequencyVector, GammaElement, HermitianStructure, InertiaSpectrum};
use crate::error::{Error, Result};
use crate::matkit::{Matrix, Rotation};

/// Largest `p` accepted by [`enumerate_pairings`]; `p = 8` already yields
/// two million pairings.
pub const MAX_PAIRING_P: usize = 8;

/// Partition of the axes `{0, ..., 2p-1}` into `p` pairs. Each pair is stored
/// `(min, max)` and pairs are sorted by first element. Displayed and parsed
/// with 1-based axes, e.g. `(1,3)(2,4)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    pairs: Vec<(usize, usize)>,
}

impl Pairing {
    /// Validates and normalizes 0-based pairs.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = 2 * pairs.len();
        if n == 0 {
            return Err(Error::InvalidPairing("empty".into()));
        }
        let mut seen = vec![false; n];
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        for &(a, b) in &pairs {
            if a == b || b >= n {
                return Err(Error::InvalidPairing(format!(
                    "bad pair ({}, {})",
                    a + 1,
                    b + 1
                )));
            }
            for x in [a, b] {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidPairing(format!("axis {} used twice", x + 1)));
                }
            }
        }
        pairs.sort();
        Ok(Pairing { pairs })
    }

    pub fn p(&self) -> usize {
        self.pairs.len()
    }

    /// 0-based pairs.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The pairing `(1, p+1)(2, p+2)...(p, 2p)` of the standard structure.
    pub fn standard(p: usize) -> Self {
        Pairing {
            pairs: (0..p).map(|i| (i, p + i)).collect(),
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.pairs {
            write!(f, "({},{})", a + 1, b + 1)?;
        }
        Ok(())
    }
}

impl Serialize for Pairing {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Pairing {
    type Err = Error;

    /// Accepts `(1,2)(3,4)` or `1-2,3-4`, 1-based.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s
            .chars()
            .map(|c| if c.is_ascii_digit() { c } else { ' ' })
            .collect();
        let nums: Vec<usize> = cleaned
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::InvalidPairing(e.to_string()))
            })
            .collect::<Result<_>>()?;
        if nums.is_empty() || !nums.len().is_multiple_of(2) || nums.contains(&0) {
            return Err(Error::InvalidPairing(format!(
                "cannot read pairs from {s:?}"
            )));
        }
        Pairing::new(nums.chunks(2).map(|c| (c[0] - 1, c[1] - 1)).collect())
    }
}

/// All `1 * 3 * 5 * ... * (2p-1)` pairings, in lexicographic order.
pub fn enumerate_pairings(p: usize) -> Result<Vec<Pairing>> {
    if p == 0 || p > MAX_PAIRING_P {
        return Err(Error::UnsupportedDimension {
            p,
            allowed: "1..=8",
        });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(p);
    let remaining: Vec<usize> = (0..2 * p).collect();
    extend_pairings(&remaining, &mut current, &mut out);
    Ok(out)
}

fn extend_pairings(remaining: &[usize], current: &mut Vec<(usize, usize)>, out: &mut Vec<Pairing>) {
    let Some((&first, rest)) = remaining.split_first() else {
        out.push(Pairing {
            pairs: current.clone(),
        });
        return;
    };
    for (idx, &partner) in rest.iter().enumerate() {
        let left: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, &v)| v)
            .collect();
        current.push((first, partner));
        extend_pairings(&left, current, out);
        current.pop();
    }
}

/// Basic structure of a pairing: its representative is the signed
/// permutation whose row `i` is `e_{a_i}` and row `p+i` is `e_{b_i}` for the
/// `i`-th pair `(a_i, b_i)`; the last row is negated if needed to land in
/// `SO(2p)`. The structure maps `e_{a_i}` to `+-e_{b_i}`.
pub fn basic_structure(pairing: &Pairing) -> HermitianStructure {
    let p = pairing.p();
    let mut perm = vec![0usize; 2 * p];
    for (i, &(a, b)) in pairing.pairs.iter().enumerate() {
        perm[i] = a;
        perm[p + i] = b;
    }
    let mut r = Matrix::from_fn(2 * p, 2 * p, |i, j| if perm[i] == j { 1.0 } else { 0.0 });
    if permutation_sign(&perm) < 0 {
        let last = 2 * p - 1;
        r[(last, perm[last])] = -1.0;
    }
    HermitianStructure::new(Rotation::from_matrix_unchecked(r)).expect("even dimension")
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Descending pair sums `sigma_a + sigma_b`, the frequencies of the basic
/// structure of `pairing`.
pub fn basic_frequencies(pairing: &Pairing, s: &InertiaSpectrum) -> Result<FrequencyVector> {
    if 2 * pairing.p() != s.values().len() {
        return Err(Error::DimensionMismatch {
            expected: s.values().len(),
            found: 2 * pairing.p(),
        });
    }
    let sig = s.values();
    Ok(FrequencyVector::new(
        pairing
            .pairs
            .iter()
            .map(|&(a, b)| sig[a] + sig[b])
            .collect(),
    ))
}

/// Decodes a signed permutation matrix into `(pi, eps)` with row `i` equal to
/// `eps_i e_{pi(i)}`.
fn decode_signed_permutation(p: &Matrix) -> Result<(Vec<usize>, Vec<f64>)> {
    let n = p.rows();
    if !p.is_square() || n == 0 {
        return Err(Error::NotSignedPermutation);
    }
    let mut perm = Vec::with_capacity(n);
    let mut eps = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for i in 0..n {
        let nz: Vec<usize> = (0..n).filter(|&j| p[(i, j)] != 0.0).collect();
        if nz.len() != 1 || p[(i, nz[0])].abs() != 1.0 || std::mem::replace(&mut used[nz[0]], true)
        {
            return Err(Error::NotSignedPermutation);
        }
        perm.push(nz[0]);
        eps.push(p[(i, nz[0])]);
    }
    let sign = permutation_sign(&perm) as f64 * eps.iter().product::<f64>();
    if sign != 1.0 {
        return Err(Error::NotSignedPermutation);
    }
    Ok((perm, eps))
}

/// Adapted structure `J_{rho,P}` with representative `diag(rho, Id) P`.
pub fn adapted_structure(rho: &Rotation, perm: &Matrix) -> Result<HermitianStructure> {
    decode_signed_permutation(perm)?;
    let p = rho.dim();
    if perm.rows() != 2 * p {
        return Err(Error::DimensionMismatch {
            expected: 2 * p,
            found: perm.rows(),
        });
    }
    let lift = Matrix::block_diag(&[rho.matrix(), &Matrix::identity(p)]);
    HermitianStructure::new(Rotation::new(lift.mul(perm))?)
}

/// Pairing `(pi(i), pi(p+i))` induced by a signed permutation; with
/// `rho = Id` the adapted structure is the basic structure of this pairing.
pub fn induced_pairing(perm: &Matrix) -> Result<Pairing> {
    let (pi, _) = decode_signed_permutation(perm)?;
    let p = pi.len() / 2;
    Pairing::new((0..p).map(|i| (pi[i], pi[p + i])).collect())
}

/// The involution `(-1, D''_P)` fixing every `J_{rho,P}`: `D''_P` is `+1` on
/// the axes `pi(1..p)` and `-1` on `pi(p+1..2p)`.
pub fn fixing_involution(perm: &Matrix) -> Result<GammaElement> {
    let (pi, _) = decode_signed_permutation(perm)?;
    let p = pi.len() / 2;
    let mut signs = vec![0i8; 2 * p];
    for (i, &axis) in pi.iter().enumerate() {
        signs[axis] = if i < p { 1 } else { -1 };
    }
    GammaElement::new(-1, signs)
}
