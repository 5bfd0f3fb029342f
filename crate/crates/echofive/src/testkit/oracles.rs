//! Brute-force oracles.
//!
//! These recompute the test statistics through deliberately different
//! routes than the main implementations — pair counting instead of rank
//! sums, full permutation enumeration instead of Monte Carlo — so the two
//! paths can check each other.

use super::SynthError;
use crate::personality::TraitId;
use crate::stats::{CorrMatrix, StatsError, TestMethod, TestResult, MANTEL_TIE_EPSILON};

/// Pooled-size bound for the enumeration oracle.
pub const ENUMERATION_LIMIT: usize = 14;

/// Exact two-sided Mann-Whitney p-value by enumerating every labeling of
/// the pooled sample. U is computed by pair counting: the number of
/// (a, b) pairs with a > b, counting ties as one half.
pub fn exact_mann_whitney(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = a.len() + b.len();
    if n > ENUMERATION_LIMIT {
        return Err(StatsError::ExactSizeExceeded {
            max: ENUMERATION_LIMIT,
            got: n,
        });
    }

    let pool: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let u_observed = pair_count_u(a, b);
    let mean = (a.len() * b.len()) as f64 / 2.0;
    let d = (u_observed - mean).abs();

    let mut extreme = 0u64;
    let mut total = 0u64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        total += 1;
        let mut side_a = Vec::with_capacity(a.len());
        let mut side_b = Vec::with_capacity(b.len());
        for (i, &v) in pool.iter().enumerate() {
            if mask & (1 << i) != 0 {
                side_a.push(v);
            } else {
                side_b.push(v);
            }
        }
        let u = pair_count_u(&side_a, &side_b);
        if (u - mean).abs() >= d {
            extreme += 1;
        }
    }

    Ok(TestResult {
        statistic: u_observed,
        p_value: extreme as f64 / total as f64,
        method: TestMethod::Exact,
    })
}

fn pair_count_u(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for &x in a {
        for &y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Exact one-sided Mantel p-value over all 5! = 120 simultaneous
/// row/column permutations of the second matrix, with the same statistic
/// definition as the Monte-Carlo test.
pub fn exhaustive_mantel(m1: &CorrMatrix, m2: &CorrMatrix) -> Result<TestResult, StatsError> {
    let tri1 = triangle(m1)?;
    let r_observed = triangle_pearson(&tri1, &triangle(m2)?)?;

    let mut at_least_as_large = 0u64;
    let mut total = 0u64;
    for perm in permutations_of_five() {
        let tri2 = triangle(&m2.permuted(&perm))?;
        let r = triangle_pearson(&tri1, &tri2)?;
        total += 1;
        if r >= r_observed - MANTEL_TIE_EPSILON {
            at_least_as_large += 1;
        }
    }

    Ok(TestResult {
        statistic: r_observed,
        p_value: at_least_as_large as f64 / total as f64,
        method: TestMethod::Exact,
    })
}

/// Upper triangle, reimplemented here so the oracle does not lean on the
/// main path's helper.
fn triangle(matrix: &CorrMatrix) -> Result<Vec<f64>, StatsError> {
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

/// Plain-sum Pearson, written independently of `stats::pearson`.
fn triangle_pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let n = x.len() as f64;
    if x.iter().all(|v| *v == x[0]) || y.iter().all(|v| *v == y[0]) {
        return Err(StatsError::ConstantInput);
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    if x == y {
        return Ok(1.0);
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// All 120 permutations of 0..5 in a fixed deterministic order
/// (lexicographic by construction).
pub fn permutations_of_five() -> Vec<[usize; 5]> {
    let mut out = Vec::with_capacity(120);
    let mut items = [0usize, 1, 2, 3, 4];
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut [usize; 5], k: usize, out: &mut Vec<[usize; 5]>) {
    if k == items.len() {
        out.push(*items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Guard used by the generator: there must be at least one exceedance set
/// under the matrix that realizes the planted model. Re-exported here so
/// oracle callers can assert reachability directly.
pub fn assert_reachable(
    matrix: &crate::personality::SignMatrix,
    model: &crate::personality::PersonalityModel,
) -> Result<(), SynthError> {
    super::find_exceedance_set(matrix, model).map(|_| ())
}
