//! Feature counting and per-user aggregation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FeatureId, Lexicons, TokenKind, Tokenizer};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    /// Per-user means are only defined over a non-empty comment list; an
    /// empty list here means the eligibility filter upstream is broken.
    #[error("cannot take feature means over an empty comment list")]
    EmptyCommentList,
}

/// Integer feature counts of a single comment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureCounts {
    values: [u32; FeatureId::COUNT],
}

impl FeatureCounts {
    pub fn get(&self, f: FeatureId) -> u32 {
        self.values[f.index()]
    }

    pub fn set(&mut self, f: FeatureId, v: u32) {
        self.values[f.index()] = v;
    }

    fn bump(&mut self, f: FeatureId) {
        self.values[f.index()] += 1;
    }

    pub fn to_vector(self) -> FeatureVector {
        let mut values = [0.0; FeatureId::COUNT];
        for f in FeatureId::ALL {
            values[f.index()] = f64::from(self.get(f));
        }
        FeatureVector { values }
    }
}

/// Real-valued feature vector: per-user or corpus-wide means.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    values: [f64; FeatureId::COUNT],
}

impl FeatureVector {
    pub fn new(values: [f64; FeatureId::COUNT]) -> FeatureVector {
        FeatureVector { values }
    }

    pub fn get(&self, f: FeatureId) -> f64 {
        self.values[f.index()]
    }

    pub fn set(&mut self, f: FeatureId, v: f64) {
        self.values[f.index()] = v;
    }
}

/// Exact integer accumulator for feature counts. Summing in u64 and
/// dividing once keeps means deterministic no matter the comment order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeatureTotals {
    sums: [u64; FeatureId::COUNT],
    comments: u64,
}

impl FeatureTotals {
    pub fn add(&mut self, counts: &FeatureCounts) {
        for f in FeatureId::ALL {
            self.sums[f.index()] += u64::from(counts.get(f));
        }
        self.comments += 1;
    }

    pub fn merge(&mut self, other: &FeatureTotals) {
        for i in 0..FeatureId::COUNT {
            self.sums[i] += other.sums[i];
        }
        self.comments += other.comments;
    }

    pub fn comments(&self) -> u64 {
        self.comments
    }

    pub fn sum(&self, f: FeatureId) -> u64 {
        self.sums[f.index()]
    }

    /// Component-wise mean over the accumulated comments.
    pub fn mean(&self) -> Result<FeatureVector, FeatureError> {
        if self.comments == 0 {
            return Err(FeatureError::EmptyCommentList);
        }
        let mut values = [0.0; FeatureId::COUNT];
        for f in FeatureId::ALL {
            values[f.index()] = self.sums[f.index()] as f64 / self.comments as f64;
        }
        Ok(FeatureVector { values })
    }
}

/// Count the 18 linguistic features of one comment.
pub fn extract_features(text: &str, lexicons: &Lexicons) -> FeatureCounts {
    let tokens = Tokenizer::new(lexicons).tokenize(text);
    let mut counts = FeatureCounts::default();

    for token in &tokens {
        match token.kind {
            TokenKind::Punctuation => {
                counts.bump(FeatureId::AllPunctuation);
                match token.text.as_str() {
                    "," => counts.bump(FeatureId::Commas),
                    "!" => counts.bump(FeatureId::Exclamations),
                    "?" => counts.bump(FeatureId::QuestionMarks),
                    "(" | ")" => counts.bump(FeatureId::Parentheses),
                    _ => {}
                }
            }
            TokenKind::Url => counts.bump(FeatureId::ExternalLinks),
            TokenKind::Number => counts.bump(FeatureId::Numbers),
            TokenKind::Emoticon => {
                if lexicons.is_positive_emoticon(&token.text) {
                    counts.bump(FeatureId::PositiveEmoticons);
                } else {
                    counts.bump(FeatureId::NegativeEmoticons);
                }
            }
            TokenKind::Word => {
                counts.bump(FeatureId::WordCount);
                let word = token.text.as_str();
                if letter_count(word) > 6 {
                    counts.bump(FeatureId::LongWords);
                }
                if lexicons.is_first_singular(word) {
                    counts.bump(FeatureId::FirstSingular);
                }
                if lexicons.is_first_plural(word) {
                    counts.bump(FeatureId::FirstPlural);
                }
                if lexicons.is_second_singular(word) {
                    counts.bump(FeatureId::SecondSingular);
                }
                if lexicons.is_preposition(word) {
                    counts.bump(FeatureId::Prepositions);
                }
                if lexicons.is_negative_particle(word) {
                    counts.bump(FeatureId::NegativeParticles);
                }
                if lexicons.is_vulgar(word) {
                    counts.bump(FeatureId::VulgarWords);
                }
            }
        }
    }

    let self_refs =
        counts.get(FeatureId::FirstSingular) + counts.get(FeatureId::FirstPlural);
    counts.set(FeatureId::SelfReferences, self_refs);
    counts
}

/// Letters only: "words longer than 6 letters" ignores hyphens and
/// apostrophes inside the token.
fn letter_count(word: &str) -> usize {
    word.chars().filter(|c| c.is_alphabetic()).count()
}

/// Component-wise arithmetic mean over a user's per-comment counts.
pub fn user_feature_means(comments: &[FeatureCounts]) -> Result<FeatureVector, FeatureError> {
    let mut totals = FeatureTotals::default();
    for c in comments {
        totals.add(c);
    }
    totals.mean()
}
