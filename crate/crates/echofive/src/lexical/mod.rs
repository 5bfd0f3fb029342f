//! Lexical feature extraction.
//!
//! A comment is tokenized into words, numbers, emoticons, URLs and
//! punctuation, and reduced to a vector of 18 non-negative feature counts.
//! Per-user vectors are the component-wise means over the user's comments.

mod features;
mod lexicons;
mod tokenizer;

pub use features::{extract_features, user_feature_means, FeatureCounts, FeatureTotals, FeatureVector};
pub use lexicons::{Lexicons, LexiconsError, LEXICON_FILES};
pub use tokenizer::{Token, TokenKind, Tokenizer};

use serde::{Deserialize, Serialize};

/// Identifier of one of the 18 linguistic features.
///
/// The enum order is the canonical feature order; it is used for file
/// columns, vector layout and display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureId {
    /// `ap` — all punctuation tokens.
    AllPunctuation,
    /// `cm` — commas.
    Commas,
    /// `em` — exclamation marks.
    Exclamations,
    /// `el` — external links.
    ExternalLinks,
    /// `im` — first person singular pronouns.
    FirstSingular,
    /// `np` — negative particles.
    NegativeParticles,
    /// `ne` — negative emoticons.
    NegativeEmoticons,
    /// `nb` — numbers.
    Numbers,
    /// `pa` — parenthesis characters (both opening and closing).
    Parentheses,
    /// `pe` — positive emoticons.
    PositiveEmoticons,
    /// `pp` — prepositions.
    Prepositions,
    /// `qm` — question marks.
    QuestionMarks,
    /// `sl` — words longer than six letters.
    LongWords,
    /// `sr` — first person pronouns, singular and plural.
    SelfReferences,
    /// `sw` — vulgar words and expressions.
    VulgarWords,
    /// `wc` — words.
    WordCount,
    /// `we` — first person plural pronouns.
    FirstPlural,
    /// `yu` — second person singular pronouns.
    SecondSingular,
}

impl FeatureId {
    /// All features in canonical order.
    pub const ALL: [FeatureId; 18] = [
        FeatureId::AllPunctuation,
        FeatureId::Commas,
        FeatureId::Exclamations,
        FeatureId::ExternalLinks,
        FeatureId::FirstSingular,
        FeatureId::NegativeParticles,
        FeatureId::NegativeEmoticons,
        FeatureId::Numbers,
        FeatureId::Parentheses,
        FeatureId::PositiveEmoticons,
        FeatureId::Prepositions,
        FeatureId::QuestionMarks,
        FeatureId::LongWords,
        FeatureId::SelfReferences,
        FeatureId::VulgarWords,
        FeatureId::WordCount,
        FeatureId::FirstPlural,
        FeatureId::SecondSingular,
    ];

    /// Number of features.
    pub const COUNT: usize = 18;

    /// Position of this feature in the canonical order.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Two-letter code used in data files and reports.
    pub fn code(self) -> &'static str {
        match self {
            FeatureId::AllPunctuation => "ap",
            FeatureId::Commas => "cm",
            FeatureId::Exclamations => "em",
            FeatureId::ExternalLinks => "el",
            FeatureId::FirstSingular => "im",
            FeatureId::NegativeParticles => "np",
            FeatureId::NegativeEmoticons => "ne",
            FeatureId::Numbers => "nb",
            FeatureId::Parentheses => "pa",
            FeatureId::PositiveEmoticons => "pe",
            FeatureId::Prepositions => "pp",
            FeatureId::QuestionMarks => "qm",
            FeatureId::LongWords => "sl",
            FeatureId::SelfReferences => "sr",
            FeatureId::VulgarWords => "sw",
            FeatureId::WordCount => "wc",
            FeatureId::FirstPlural => "we",
            FeatureId::SecondSingular => "yu",
        }
    }

    /// Reverse of [`FeatureId::code`].
    pub fn from_code(code: &str) -> Option<FeatureId> {
        FeatureId::ALL.into_iter().find(|f| f.code() == code)
    }
}

impl std::fmt::Display for FeatureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}
