//! The comparative analysis battery: descriptive statistics, Mann-Whitney
//! U, Pearson trait-correlation matrices, the Mantel permutation test,
//! personality-model ranking and activity/trait correlations.
//!
//! Everything operates on immutable group data and is pure; the only
//! randomness is the seeded permutation stream inside [`mantel`].

mod mann_whitney;
mod mantel;
pub(crate) mod normal;

pub use mann_whitney::{mann_whitney_u, mann_whitney_u_with, MannWhitneyMethod};
pub use mantel::{mantel, upper_triangle, MANTEL_TIE_EPSILON};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Narrative;
use crate::personality::{to_labels, PersonalityModel, TraitId, TraitScores};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("inputs must have equal length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("correlation is undefined for a constant input")]
    ConstantInput,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix has not-applicable entries")]
    IncompleteMatrix,
    #[error("exact enumeration supports at most {max} pooled values, got {got}")]
    ExactSizeExceeded { max: usize, got: usize },
    #[error("exact method requires tie-free samples")]
    TiesPresent,
    #[error("group has no users")]
    EmptyGroup,
    #[error("duplicate user id {0:?} in group")]
    DuplicateUser(String),
}

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum TestMethod {
    Exact,
    NormalApprox,
    Permutation { replicates: u32, seed: u64 },
}

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    #[serde(flatten)]
    pub method: TestMethod,
}

/// Arithmetic mean and sample standard deviation (n-1 denominator).
pub fn descriptive(values: &[f64]) -> Result<(f64, f64), StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewValues {
            needed: 2,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((mean, (ss / (n - 1.0)).sqrt()))
}

/// Pearson correlation coefficient.
///
/// Errors on length mismatch, fewer than two points or a constant input.
/// Bitwise-identical inputs short-circuit to exactly 1.0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewValues {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    // An all-equal input is constant even when rounding keeps its summed
    // squared deviations from being exactly zero.
    if x.iter().all(|v| *v == x[0]) || y.iter().all(|v| *v == y[0]) {
        return Err(StatsError::ConstantInput);
    }
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    if x == y {
        return Ok(1.0);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Scored users of one echo chamber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserScore {
    pub user_id: String,
    pub scores: TraitScores,
    pub comment_count: u64,
}

/// A narrative label plus the per-user trait scores of its members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScores {
    pub narrative: Narrative,
    users: Vec<UserScore>,
}

impl GroupScores {
    /// Build a group; users must be non-empty and unique by id.
    pub fn new(narrative: Narrative, users: Vec<UserScore>) -> Result<GroupScores, StatsError> {
        if users.is_empty() {
            return Err(StatsError::EmptyGroup);
        }
        let mut seen = std::collections::BTreeSet::new();
        for u in &users {
            if !seen.insert(u.user_id.as_str()) {
                return Err(StatsError::DuplicateUser(u.user_id.clone()));
            }
        }
        Ok(GroupScores { narrative, users })
    }

    pub fn users(&self) -> &[UserScore] {
        &self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    /// One trait's scores across the group, as f64 for the test functions.
    pub fn trait_values(&self, t: TraitId) -> Vec<f64> {
        self.users
            .iter()
            .map(|u| f64::from(u.scores.get(t)))
            .collect()
    }
}

/// 5x5 Pearson matrix over the trait order E,S,A,C,O. Entries involving a
/// constant trait are `None` (not applicable); the diagonal is 1.0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrMatrix {
    entries: [[Option<f64>; TraitId::COUNT]; TraitId::COUNT],
}

impl CorrMatrix {
    pub fn from_entries(
        entries: [[Option<f64>; TraitId::COUNT]; TraitId::COUNT],
    ) -> Result<CorrMatrix, StatsError> {
        let m = CorrMatrix { entries };
        if !m.is_symmetric() {
            return Err(StatsError::NotSymmetric);
        }
        Ok(m)
    }

    /// Build from a complete symmetric array.
    pub fn from_complete(values: [[f64; TraitId::COUNT]; TraitId::COUNT]) -> Result<CorrMatrix, StatsError> {
        let mut entries = [[None; TraitId::COUNT]; TraitId::COUNT];
        for i in 0..TraitId::COUNT {
            for j in 0..TraitId::COUNT {
                entries[i][j] = Some(values[i][j]);
            }
        }
        CorrMatrix::from_entries(entries)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..TraitId::COUNT {
            for j in 0..i {
                if self.entries[i][j] != self.entries[j][i] {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().flatten().all(Option::is_some)
    }

    /// Apply one permutation to rows and columns simultaneously.
    pub fn permuted(&self, perm: &[usize; TraitId::COUNT]) -> CorrMatrix {
        let mut entries = [[None; TraitId::COUNT]; TraitId::COUNT];
        for i in 0..TraitId::COUNT {
            for j in 0..TraitId::COUNT {
                entries[i][j] = self.entries[perm[i]][perm[j]];
            }
        }
        CorrMatrix { entries }
    }
}

/// Pairwise Pearson over the users' five trait scores.
pub fn trait_correlation_matrix(group: &GroupScores) -> Result<CorrMatrix, StatsError> {
    if group.len() < 2 {
        return Err(StatsError::TooFewValues {
            needed: 2,
            got: group.len(),
        });
    }
    let columns: Vec<Vec<f64>> = TraitId::ALL
        .into_iter()
        .map(|t| group.trait_values(t))
        .collect();
    let mut entries = [[None; TraitId::COUNT]; TraitId::COUNT];
    for i in 0..TraitId::COUNT {
        entries[i][i] = Some(1.0);
        for j in 0..i {
            let r = match pearson(&columns[i], &columns[j]) {
                Ok(r) => Some(r),
                Err(StatsError::ConstantInput) => None,
                Err(other) => return Err(other),
            };
            entries[i][j] = r;
            entries[j][i] = r;
        }
    }
    Ok(CorrMatrix { entries })
}

/// One row of a personality-model ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmFrequency {
    pub model: PersonalityModel,
    pub count: u64,
    pub percent: f64,
}

/// Frequency of each observed personality model as a percentage of the
/// group, sorted descending with lexicographic tie-break on the model
/// string.
pub fn pm_ranking(group: &GroupScores) -> Vec<PmFrequency> {
    let mut counts: BTreeMap<String, (PersonalityModel, u64)> = BTreeMap::new();
    for user in group.users() {
        let model = to_labels(&user.scores);
        counts.entry(model.to_string()).or_insert((model, 0)).1 += 1;
    }
    let total = group.len() as f64;
    let mut rows: Vec<PmFrequency> = counts
        .into_iter()
        .map(|(_, (model, count))| PmFrequency {
            model,
            count,
            percent: count as f64 / total * 100.0,
        })
        .collect();
    // BTreeMap iteration already gives the lexicographic order, so the
    // stable sort by count keeps it as the tie-break.
    rows.sort_by_key(|row| std::cmp::Reverse(row.count));
    rows
}

/// Pearson between comment count and each trait score, in E,S,A,C,O order.
/// Constant traits (or constant activity) yield `None`.
pub fn activity_trait_correlation(
    group: &GroupScores,
) -> Result<[Option<f64>; TraitId::COUNT], StatsError> {
    if group.len() < 2 {
        return Err(StatsError::TooFewValues {
            needed: 2,
            got: group.len(),
        });
    }
    let counts: Vec<f64> = group
        .users()
        .iter()
        .map(|u| u.comment_count as f64)
        .collect();
    let mut out = [None; TraitId::COUNT];
    for t in TraitId::ALL {
        out[t.index()] = match pearson(&counts, &group.trait_values(t)) {
            Ok(r) => Some(r),
            Err(StatsError::ConstantInput) => None,
            Err(other) => return Err(other),
        };
    }
    Ok(out)
}
