use serde::Serialize;

use super::{
    frequencies_from_momentum, frequency_map_diag, FrequencyVector, HermitianStructure,
    InertiaSpectrum,
};
use crate::error::{Error, Result};
use crate::matkit::{AntisymMatrix, Matrix};

/// Block frequencies `omega_1 > ... > omega_r > 0` with block dimensions
/// `2(k_i + 1)`, where `sum (k_i + 1) = p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalancedSplitting {
    omegas: Vec<f64>,
    ks: Vec<usize>,
}

impl BalancedSplitting {
    pub fn new(omegas: Vec<f64>, ks: Vec<usize>) -> Result<Self> {
        if omegas.is_empty() || omegas.len() != ks.len() {
            return Err(Error::InvalidSplitting(format!(
                "{} frequencies for {} blocks",
                omegas.len(),
                ks.len()
            )));
        }
        if omegas.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidSplitting(
                "frequencies must be positive".into(),
            ));
        }
        if omegas.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidSplitting(
                "frequencies must be strictly descending".into(),
            ));
        }
        Ok(BalancedSplitting { omegas, ks })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn ks(&self) -> &[usize] {
        &self.ks
    }

    /// `sum (k_i + 1)`.
    pub fn p(&self) -> usize {
        self.ks.iter().map(|k| k + 1).sum()
    }

    /// Real dimension `2(k_i + 1)` of each block.
    pub fn block_dims(&self) -> Vec<usize> {
        self.ks.iter().map(|k| 2 * (k + 1)).collect()
    }
}

/// Partition of the 0-based axes `0..2p` into the blocks of a splitting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockAssignment {
    blocks: Vec<Vec<usize>>,
}

impl BlockAssignment {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for &axis in blocks.iter().flatten() {
            if axis >= n || std::mem::replace(&mut seen[axis], true) {
                return Err(Error::InvalidSplitting(format!(
                    "blocks do not partition 0..{n}"
                )));
            }
        }
        Ok(BlockAssignment { blocks })
    }

    /// Consecutive blocks `{0..d_1}, {d_1..d_1+d_2}, ...`.
    pub fn consecutive(split: &BalancedSplitting) -> Self {
        let mut start = 0;
        let blocks = split
            .block_dims()
            .into_iter()
            .map(|d| {
                let b = (start..start + d).collect();
                start += d;
                b
            })
            .collect();
        BlockAssignment { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// Blockwise frequencies of a balanced relative equilibrium.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BifurcationFrequencies {
    /// `omega_m` times the frequency map of block `m`.
    pub per_block: Vec<FrequencyVector>,
    /// All blocks concatenated, sorted descending.
    pub nu: FrequencyVector,
    /// `|sum_m (1/omega_m) sum_j nu_m^j - trace S0|`.
    pub residual: f64,
    /// Largest gap between `nu` and the frequencies read off the full
    /// angular momentum `S0 Omega + Omega S0`.
    pub spectrum_residual: f64,
}

/// Frequencies of the relative equilibrium with
/// `Omega = diag(omega_1 J_1, ..., omega_r J_r)` on the assigned blocks.
///
/// `structures[m]` is the structure used on block `m`; `None` selects the
/// standard structure of that block.
pub fn bifurcation_frequencies(
    split: &BalancedSplitting,
    s: &InertiaSpectrum,
    assignment: &BlockAssignment,
    structures: Option<&[HermitianStructure]>,
) -> Result<BifurcationFrequencies> {
    let n = s.values().len();
    let dims = split.block_dims();
    if split.p() != s.p() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: 2 * split.p(),
        });
    }
    if assignment.blocks.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: assignment.blocks.len(),
        });
    }
    for (block, &d) in assignment.blocks.iter().zip(&dims) {
        if block.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: block.len(),
            });
        }
    }
    if let Some(js) = structures {
        if js.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                found: js.len(),
            });
        }
    }

    let mut per_block = Vec::with_capacity(dims.len());
    let mut omega_full = Matrix::zeros(n, n);
    let mut identity_sum = 0.0;
    for (m, (block, &w)) in assignment.blocks.iter().zip(split.omegas()).enumerate() {
        let j = match structures {
            Some(js) => js[m].clone(),
            None => HermitianStructure::standard(block.len() / 2),
        };
        let diag: Vec<f64> = block.iter().map(|&a| s.values()[a]).collect();
        let nu = frequency_map_diag(&j, &diag)?;
        let scaled = FrequencyVector::new(nu.values().iter().map(|v| w * v).collect());
        identity_sum += scaled.sum() / w;
        per_block.push(scaled);

        let jm = j.complex_structure();
        for (a, &ia) in block.iter().enumerate() {
            for (b, &ib) in block.iter().enumerate() {
                omega_full[(ia, ib)] = w * jm.matrix()[(a, b)];
            }
        }
    }

    let nu = FrequencyVector::new(
        per_block
            .iter()
            .flat_map(|v| v.values().iter().copied())
            .collect(),
    );
    let s0 = s.as_matrix();
    let c = AntisymMatrix::new(
        s0.matrix()
            .mul(&omega_full)
            .add(&omega_full.mul(s0.matrix())),
    )?;
    let spectrum_residual = frequencies_from_momentum(&c, 1.0)?.max_abs_diff(&nu);
    Ok(BifurcationFrequencies {
        per_block,
        nu,
        residual: (identity_sum - s.trace()).abs(),
        spectrum_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freqmap::frequency_map;
    use crate::matkit::haar_rotation;

    #[test]
    fn single_block_reduces_to_frequency_map() {
        let s = InertiaSpectrum::new(vec![5.0, 3.0, 2.0, 0.5]).unwrap();
        let split = BalancedSplitting::new(vec![1.0], vec![1]).unwrap();
        let j = HermitianStructure::new(haar_rotation(4, 11).unwrap()).unwrap();
        let out = bifurcation_frequencies(
            &split,
            &s,
            &BlockAssignment::consecutive(&split),
            Some(std::slice::from_ref(&j)),
        )
        .unwrap();
        assert!(out.nu.max_abs_diff(&frequency_map(&j, &s).unwrap()) < 1e-12);
        assert!(out.residual < 1e-12);
        assert!(out.spectrum_residual < 1e-9);
    }

    #[test]
    fn generic_split_on_4321() {
        let s = InertiaSpectrum::new(vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        let (w1, w2) = (2.5, 0.75);
        let split = BalancedSplitting::new(vec![w1, w2], vec![0, 0]).unwrap();
        let blocks = BlockAssignment::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let out = bifurcation_frequencies(&split, &s, &blocks, None).unwrap();
        assert_eq!(out.per_block[0].values(), &[7.0 * w1]);
        assert_eq!(out.per_block[1].values(), &[3.0 * w2]);
        assert!(out.residual < 1e-12);
        assert!(out.spectrum_residual < 1e-9);
    }

    #[test]
    fn validation() {
        assert!(BalancedSplitting::new(vec![1.0, 1.0], vec![0, 0]).is_err());
        assert!(BalancedSplitting::new(vec![1.0, -1.0], vec![0, 0]).is_err());
        assert!(BalancedSplitting::new(vec![1.0], vec![0, 0]).is_err());
        assert!(BlockAssignment::new(vec![vec![0, 1], vec![1, 3]]).is_err());

        let s = InertiaSpectrum::new(vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        let split = BalancedSplitting::new(vec![2.0, 1.0], vec![0, 0]).unwrap();
        let wrong = BlockAssignment::new(vec![vec![0, 1, 2], vec![3]]).unwrap();
        assert!(matches!(
            bifurcation_frequencies(&split, &s, &wrong, None),
            Err(Error::DimensionMismatch { .. })
        ));
        let too_big = BalancedSplitting::new(vec![2.0, 1.0], vec![1, 0]).unwrap();
        assert!(bifurcation_frequencies(
            &too_big,
            &s,
            &BlockAssignment::consecutive(&too_big),
            None
        )
        .is_err());
    }
}
