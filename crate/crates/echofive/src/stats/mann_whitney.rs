//! Two-sided Mann-Whitney U test.
//!
//! Ranks are assigned over the pooled sample with average ranks for ties.
//! Small tie-free problems (n_a*n_b <= 400) get an exact two-sided p-value
//! from the null distribution of U; everything else uses the normal
//! approximation with tie-corrected variance and a continuity correction.

use super::{normal, StatsError, TestMethod, TestResult};

/// Pooled-size bound for the exact path: n_a * n_b must not exceed this.
pub const EXACT_PRODUCT_LIMIT: usize = 400;

/// Which p-value computation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MannWhitneyMethod {
    /// Exact when small and tie-free, otherwise the normal approximation.
    Auto,
    /// Exact enumeration of the U null distribution; errors on ties or
    /// over-large samples.
    Exact,
    /// Normal approximation regardless of size.
    NormalApprox,
}

/// Two-sided Mann-Whitney U with automatic method choice. The reported
/// statistic is U of the first sample; U_a + U_b = n_a * n_b.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    mann_whitney_u_with(a, b, MannWhitneyMethod::Auto)
}

/// Two-sided Mann-Whitney U with an explicit method choice.
pub fn mann_whitney_u_with(
    a: &[f64],
    b: &[f64],
    method: MannWhitneyMethod,
) -> Result<TestResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }

    let ranked = rank_pool(a, b);
    let u_a = ranked.rank_sum_a - (a.len() * (a.len() + 1)) as f64 / 2.0;

    let use_exact = match method {
        MannWhitneyMethod::Exact => {
            if ranked.has_ties {
                return Err(StatsError::TiesPresent);
            }
            if a.len() * b.len() > EXACT_PRODUCT_LIMIT {
                return Err(StatsError::ExactSizeExceeded {
                    max: EXACT_PRODUCT_LIMIT,
                    got: a.len() * b.len(),
                });
            }
            true
        }
        MannWhitneyMethod::Auto => {
            !ranked.has_ties && a.len() * b.len() <= EXACT_PRODUCT_LIMIT
        }
        MannWhitneyMethod::NormalApprox => false,
    };

    let p_value = if use_exact {
        // Tie-free U is an integer; round defends against rank-sum noise.
        exact_two_sided_p(a.len(), b.len(), u_a.round() as u64)
    } else {
        normal_approx_p(a.len(), b.len(), u_a, &ranked.tie_sizes)
    };

    Ok(TestResult {
        statistic: u_a,
        p_value,
        method: if use_exact {
            TestMethod::Exact
        } else {
            TestMethod::NormalApprox
        },
    })
}

struct RankedPool {
    rank_sum_a: f64,
    has_ties: bool,
    /// Sizes of tie groups (all groups, including singletons).
    tie_sizes: Vec<usize>,
}

/// Pool both samples, sort, assign average ranks and sum the ranks that
/// belong to the first sample.
fn rank_pool(a: &[f64], b: &[f64]) -> RankedPool {
    let mut pool: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pool.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("samples must not contain NaN"));

    let mut rank_sum_a = 0.0;
    let mut has_ties = false;
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < pool.len() {
        let mut j = i + 1;
        while j < pool.len() && pool[j].0 == pool[i].0 {
            j += 1;
        }
        let size = j - i;
        if size > 1 {
            has_ties = true;
        }
        tie_sizes.push(size);
        // Ranks are 1-based; tied values share the average rank.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for item in &pool[i..j] {
            if item.1 {
                rank_sum_a += avg_rank;
            }
        }
        i = j;
    }

    RankedPool {
        rank_sum_a,
        has_ties,
        tie_sizes,
    }
}

/// Exact two-sided p: the probability mass of U values at least as far
/// from the mean n_a*n_b/2 as the observed one, under the uniform null
/// over all C(n_a+n_b, n_a) rank assignments.
fn exact_two_sided_p(n_a: usize, n_b: usize, u_obs: u64) -> f64 {
    let counts = u_distribution(n_a, n_b);
    let total: f64 = counts.iter().map(|&c| c as f64).sum();
    // Work in doubled units so the mean is an integer even when n_a*n_b
    // is odd.
    let mean2 = (n_a * n_b) as i64;
    let d2 = (2 * u_obs as i64 - mean2).abs();
    let mass: f64 = counts
        .iter()
        .enumerate()
        .filter(|(u, _)| (2 * *u as i64 - mean2).abs() >= d2)
        .map(|(_, &c)| c as f64)
        .sum();
    mass / total
}

/// Null distribution of U for sample sizes (n_a, n_b): counts[u] is the
/// number of rank assignments with U = u. Classic lattice recurrence
/// N(a, b, u) = N(a-1, b, u-b) + N(a, b-1, u).
fn u_distribution(n_a: usize, n_b: usize) -> Vec<u64> {
    let max_u = n_a * n_b;
    // table[a][u] holds N(a, b, u) for the current b, built up from b = 0
    // where U is always zero.
    let mut table = vec![vec![0u64; max_u + 1]; n_a + 1];
    for row in table.iter_mut() {
        row[0] = 1;
    }
    for b in 1..=n_b {
        let mut next = vec![vec![0u64; max_u + 1]; n_a + 1];
        next[0][0] = 1;
        for a in 1..=n_a {
            for u in 0..=max_u {
                // Largest pooled value is from sample a (adds b to U) or
                // from sample b (adds nothing).
                let take_a = next[a - 1].get(u.wrapping_sub(b)).copied().unwrap_or(0);
                let take_b = table[a][u];
                next[a][u] = take_a + take_b;
            }
        }
        table = next;
    }
    table[n_a].clone()
}

/// Normal approximation with tie-corrected variance and continuity
/// correction. Degenerate variance (all values tied) yields p = 1.
fn normal_approx_p(n_a: usize, n_b: usize, u_a: f64, tie_sizes: &[usize]) -> f64 {
    let na = n_a as f64;
    let nb = n_b as f64;
    let n = na + nb;
    let mean = na * nb / 2.0;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let z = ((u_a - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    normal::two_sided_p(z)
}
