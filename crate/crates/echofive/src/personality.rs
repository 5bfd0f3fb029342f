//! Trait scoring: corpus baseline, sign-matrix driven scores and the
//! discretization into five-letter personality models.
//!
//! Scoring follows a three-step strategy: per-user feature means are
//! compared against the corpus-wide average of each feature, and every
//! feature a user strictly exceeds contributes the sign of its matrix entry
//! to the corresponding trait score. Scores stay exact integers; no
//! floating point enters the scoring path.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexical::{FeatureId, FeatureVector};

/// One of the five personality dimensions. The enum order defines the
/// positions of a personality-model string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TraitId {
    Extraversion,
    EmotionalStability,
    Agreeableness,
    Conscientiousness,
    Openness,
}

impl TraitId {
    pub const ALL: [TraitId; 5] = [
        TraitId::Extraversion,
        TraitId::EmotionalStability,
        TraitId::Agreeableness,
        TraitId::Conscientiousness,
        TraitId::Openness,
    ];

    pub const COUNT: usize = 5;

    pub fn index(self) -> usize {
        self as usize
    }

    /// Single-letter code used in file columns: E, S, A, C, O.
    pub fn letter(self) -> char {
        match self {
            TraitId::Extraversion => 'E',
            TraitId::EmotionalStability => 'S',
            TraitId::Agreeableness => 'A',
            TraitId::Conscientiousness => 'C',
            TraitId::Openness => 'O',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TraitId::Extraversion => "extraversion",
            TraitId::EmotionalStability => "emotional stability",
            TraitId::Agreeableness => "agreeableness",
            TraitId::Conscientiousness => "conscientiousness",
            TraitId::Openness => "openness",
        }
    }

    pub fn from_letter(c: char) -> Option<TraitId> {
        TraitId::ALL.into_iter().find(|t| t.letter() == c)
    }
}

impl fmt::Display for TraitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// 18×5 table of feature → trait correlation signs, each entry in
/// {-1, 0, +1}. The shipped `signs_default.csv` is editable configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    entries: [[i8; TraitId::COUNT]; FeatureId::COUNT],
}

#[derive(Debug, Error)]
pub enum SignMatrixError {
    #[error("failed to read sign matrix {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("sign matrix header must be `feature,E,S,A,C,O`, got {found:?}")]
    BadHeader { found: String },
    #[error("sign matrix row {row}: unknown feature {code:?}")]
    UnknownFeature { row: usize, code: String },
    #[error("sign matrix row {row}: duplicate feature {code:?}")]
    DuplicateFeature { row: usize, code: String },
    #[error("sign matrix row {row} ({code}), column {column}: entry {value:?} is not -1, 0 or 1")]
    BadEntry {
        row: usize,
        code: String,
        column: char,
        value: String,
    },
    #[error("sign matrix row {row}: expected 6 cells, got {cells}")]
    BadRowShape { row: usize, cells: usize },
    #[error("sign matrix is missing a row for feature {code:?}")]
    MissingFeature { code: String },
}

const DEFAULT_SIGNS: &str = include_str!("../data/signs_default.csv");

impl SignMatrix {
    /// Build from explicit entries, rows in canonical feature order and
    /// columns in E,S,A,C,O order. Panics on entries outside {-1, 0, 1}.
    pub fn from_entries(entries: [[i8; TraitId::COUNT]; FeatureId::COUNT]) -> SignMatrix {
        for row in &entries {
            for &v in row {
                assert!((-1..=1).contains(&v), "sign entries must be -1, 0 or 1");
            }
        }
        SignMatrix { entries }
    }

    /// The compiled-in copy of `data/signs_default.csv`.
    pub fn builtin() -> SignMatrix {
        SignMatrix::parse(DEFAULT_SIGNS).expect("shipped default sign matrix is valid")
    }

    /// Load a sign matrix from a `feature,E,S,A,C,O` CSV file.
    pub fn load(path: &Path) -> Result<SignMatrix, SignMatrixError> {
        let text = std::fs::read_to_string(path).map_err(|source| SignMatrixError::Io {
            path: path.display().to_string(),
            source,
        })?;
        SignMatrix::parse(&text)
    }

    /// Parse sign-matrix CSV text; all 18 features must appear exactly once.
    pub fn parse(text: &str) -> Result<SignMatrix, SignMatrixError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| SignMatrixError::BadHeader {
            found: String::new(),
        })?;
        let normalized: Vec<&str> = header.split(',').map(str::trim).collect();
        if normalized != ["feature", "E", "S", "A", "C", "O"] {
            return Err(SignMatrixError::BadHeader {
                found: header.to_string(),
            });
        }

        let mut entries = [[0i8; TraitId::COUNT]; FeatureId::COUNT];
        let mut seen = [false; FeatureId::COUNT];
        for (line_no, line) in lines {
            let row = line_no + 1;
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 6 {
                return Err(SignMatrixError::BadRowShape {
                    row,
                    cells: cells.len(),
                });
            }
            let code = cells[0];
            let feature =
                FeatureId::from_code(code).ok_or_else(|| SignMatrixError::UnknownFeature {
                    row,
                    code: code.to_string(),
                })?;
            if seen[feature.index()] {
                return Err(SignMatrixError::DuplicateFeature {
                    row,
                    code: code.to_string(),
                });
            }
            seen[feature.index()] = true;
            for (t, cell) in TraitId::ALL.into_iter().zip(&cells[1..]) {
                let value: i8 = cell.parse().map_err(|_| SignMatrixError::BadEntry {
                    row,
                    code: code.to_string(),
                    column: t.letter(),
                    value: cell.to_string(),
                })?;
                if !(-1..=1).contains(&value) {
                    return Err(SignMatrixError::BadEntry {
                        row,
                        code: code.to_string(),
                        column: t.letter(),
                        value: cell.to_string(),
                    });
                }
                entries[feature.index()][t.index()] = value;
            }
        }

        for f in FeatureId::ALL {
            if !seen[f.index()] {
                return Err(SignMatrixError::MissingFeature {
                    code: f.code().to_string(),
                });
            }
        }
        Ok(SignMatrix { entries })
    }

    pub fn sign(&self, feature: FeatureId, trait_id: TraitId) -> i8 {
        self.entries[feature.index()][trait_id.index()]
    }

    /// Number of nonzero entries in a trait's column: the score bound.
    pub fn nonzero_in_column(&self, trait_id: TraitId) -> usize {
        FeatureId::ALL
            .into_iter()
            .filter(|f| self.sign(*f, trait_id) != 0)
            .count()
    }

    /// Traits whose column is all zeros; their label is always balanced.
    pub fn degenerate_traits(&self) -> Vec<TraitId> {
        TraitId::ALL
            .into_iter()
            .filter(|t| self.nonzero_in_column(*t) == 0)
            .collect()
    }

    /// Zero out one trait column (used by tests and experiments).
    pub fn with_zeroed_column(&self, trait_id: TraitId) -> SignMatrix {
        let mut entries = self.entries;
        for row in &mut entries {
            row[trait_id.index()] = 0;
        }
        SignMatrix { entries }
    }
}

/// Corpus-wide mean feature values and the number of users behind them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusBaseline {
    pub means: FeatureVector,
    pub population: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaselineError {
    #[error("cannot compute a baseline over zero users")]
    EmptyPopulation,
}

/// Component-wise mean of per-user mean vectors, each user weighted
/// equally. Inputs must already be restricted to eligible users.
pub fn corpus_baseline(user_means: &[FeatureVector]) -> Result<CorpusBaseline, BaselineError> {
    if user_means.is_empty() {
        return Err(BaselineError::EmptyPopulation);
    }
    // The mean of identical vectors is that vector; taking the shortcut
    // keeps it exact in floating point, so equal users never drift to
    // either side of their own baseline.
    if user_means.iter().all(|v| v == &user_means[0]) {
        return Ok(CorpusBaseline {
            means: user_means[0],
            population: user_means.len(),
        });
    }
    let n = user_means.len() as f64;
    let mut means = FeatureVector::default();
    for f in FeatureId::ALL {
        let sum: f64 = user_means.iter().map(|v| v.get(f)).sum();
        means.set(f, sum / n);
    }
    Ok(CorpusBaseline {
        means,
        population: user_means.len(),
    })
}

/// Signed integer score per trait.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TraitScores {
    values: [i32; TraitId::COUNT],
}

impl TraitScores {
    pub fn new(values: [i32; TraitId::COUNT]) -> TraitScores {
        TraitScores { values }
    }

    pub fn get(&self, t: TraitId) -> i32 {
        self.values[t.index()]
    }

    pub fn values(&self) -> [i32; TraitId::COUNT] {
        self.values
    }
}

/// Score each trait: every feature whose user mean strictly exceeds the
/// baseline mean contributes its matrix sign; features at or below the
/// baseline contribute nothing.
pub fn trait_scores(
    user_means: &FeatureVector,
    baseline: &CorpusBaseline,
    matrix: &SignMatrix,
) -> TraitScores {
    let mut values = [0i32; TraitId::COUNT];
    for f in FeatureId::ALL {
        if user_means.get(f) > baseline.means.get(f) {
            for t in TraitId::ALL {
                values[t.index()] += i32::from(matrix.sign(f, t));
            }
        }
    }
    TraitScores { values }
}

/// Discretized presence of one trait.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    /// `y` — positive score: the trait is present.
    Present,
    /// `n` — negative score: the reversed trait is present.
    Reversed,
    /// `o` — zero score: balanced between the two extremes.
    Balanced,
}

impl Label {
    pub fn of_score(score: i32) -> Label {
        match score.cmp(&0) {
            std::cmp::Ordering::Greater => Label::Present,
            std::cmp::Ordering::Less => Label::Reversed,
            std::cmp::Ordering::Equal => Label::Balanced,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Label::Present => 'y',
            Label::Reversed => 'n',
            Label::Balanced => 'o',
        }
    }

    pub fn from_letter(c: char) -> Option<Label> {
        match c {
            'y' => Some(Label::Present),
            'n' => Some(Label::Reversed),
            'o' => Some(Label::Balanced),
            _ => None,
        }
    }
}

/// Five labels in E,S,A,C,O order, rendered as strings like `"nynny"`.
/// There are 3^5 = 243 possible models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PersonalityModel {
    labels: [Label; TraitId::COUNT],
}

impl PersonalityModel {
    pub fn new(labels: [Label; TraitId::COUNT]) -> PersonalityModel {
        PersonalityModel { labels }
    }

    pub fn label(&self, t: TraitId) -> Label {
        self.labels[t.index()]
    }

    /// All 243 possible models.
    pub fn enumerate_all() -> Vec<PersonalityModel> {
        const LABELS: [Label; 3] = [Label::Present, Label::Reversed, Label::Balanced];
        let mut all = Vec::with_capacity(243);
        for a in LABELS {
            for b in LABELS {
                for c in LABELS {
                    for d in LABELS {
                        for e in LABELS {
                            all.push(PersonalityModel::new([a, b, c, d, e]));
                        }
                    }
                }
            }
        }
        all
    }
}

impl fmt::Display for PersonalityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for label in self.labels {
            write!(f, "{}", label.letter())?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("personality model must be 5 letters over y/n/o, got {0:?}")]
pub struct ParseModelError(String);

impl FromStr for PersonalityModel {
    type Err = ParseModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != TraitId::COUNT {
            return Err(ParseModelError(s.to_string()));
        }
        let mut labels = [Label::Balanced; TraitId::COUNT];
        for (i, c) in chars.into_iter().enumerate() {
            labels[i] = Label::from_letter(c).ok_or_else(|| ParseModelError(s.to_string()))?;
        }
        Ok(PersonalityModel { labels })
    }
}

impl Serialize for PersonalityModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PersonalityModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Turn scores into labels: positive → `y`, negative → `n`, zero → `o`.
pub fn to_labels(scores: &TraitScores) -> PersonalityModel {
    let mut labels = [Label::Balanced; TraitId::COUNT];
    for t in TraitId::ALL {
        labels[t.index()] = Label::of_score(scores.get(t));
    }
    PersonalityModel { labels }
}
