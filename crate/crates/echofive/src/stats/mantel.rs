//! Mantel permutation test for association between two correlation
//! matrices.
//!
//! The statistic is the Pearson correlation over the 10 upper-triangle
//! off-diagonal entries. The null distribution permutes the rows and
//! columns of the second matrix simultaneously; the one-sided upper-tail
//! p-value uses the (k+1)/(N+1) estimator so it never reaches zero.
//!
//! Each replicate draws its permutation from an independently seeded
//! substream derived from (seed, replicate index), so replicates could be
//! evaluated in any order — or in parallel — with bit-identical results.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{pearson, CorrMatrix, StatsError, TestMethod, TestResult};
use crate::personality::TraitId;

/// Comparisons of permuted statistics against the observed one use this
/// cushion so exact ties (e.g. the identity permutation reproduced by a
/// replicate) count as "at least as large" despite rounding noise.
pub const MANTEL_TIE_EPSILON: f64 = 1e-12;

/// The 10 upper-triangle off-diagonal entries in row-major order.
/// Errors if any entry is not applicable.
pub fn upper_triangle(matrix: &CorrMatrix) -> Result<Vec<f64>, StatsError> {
    if !matrix.is_symmetric() {
        return Err(StatsError::NotSymmetric);
    }
    let mut out = Vec::with_capacity(10);
    for i in 0..TraitId::COUNT {
        for j in (i + 1)..TraitId::COUNT {
            out.push(matrix.get(i, j).ok_or(StatsError::IncompleteMatrix)?);
        }
    }
    Ok(out)
}

/// Deterministic substream seed for one replicate: a SplitMix64 mix of the
/// run seed and the replicate index.
fn substream_seed(seed: u64, replicate: u32) -> u64 {
    let mut z = seed ^ (u64::from(replicate).wrapping_add(1)).wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn random_permutation(rng: &mut impl Rng) -> [usize; TraitId::COUNT] {
    let mut perm = [0usize; TraitId::COUNT];
    for (i, slot) in perm.iter_mut().enumerate() {
        *slot = i;
    }
    // Fisher-Yates.
    for i in (1..TraitId::COUNT).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Mantel test between two complete symmetric 5x5 correlation matrices.
///
/// Returns the observed triangle correlation r as the statistic and the
/// one-sided (positive association) Monte-Carlo p-value over `replicates`
/// simultaneous row/column permutations of `m2`.
pub fn mantel(
    m1: &CorrMatrix,
    m2: &CorrMatrix,
    replicates: u32,
    seed: u64,
) -> Result<TestResult, StatsError> {
    if replicates == 0 {
        return Err(StatsError::TooFewValues { needed: 1, got: 0 });
    }
    let tri1 = upper_triangle(m1)?;
    let r_observed = pearson(&tri1, &upper_triangle(m2)?)?;

    let mut at_least_as_large = 0u64;
    for replicate in 0..replicates {
        let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, replicate));
        let perm = random_permutation(&mut rng);
        let tri2 = upper_triangle(&m2.permuted(&perm))?;
        // A permutation cannot change the triangle's variance, so a
        // constant triangle would have failed on r_observed already.
        let r = pearson(&tri1, &tri2)?;
        if r >= r_observed - MANTEL_TIE_EPSILON {
            at_least_as_large += 1;
        }
    }

    let p_value = (at_least_as_large + 1) as f64 / (u64::from(replicates) + 1) as f64;
    Ok(TestResult {
        statistic: r_observed,
        p_value,
        method: TestMethod::Permutation { replicates, seed },
    })
}
