//! Word lists and pattern inventories backing feature extraction.
//!
//! Every list ships as an editable plain-text data file (one entry per
//! line, `#` comments allowed) and is also compiled into the binary as the
//! default, so the library works without any configuration.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

const DEFAULT_IM: &str = include_str!("../../data/lexicons/pronouns_im.txt");
const DEFAULT_WE: &str = include_str!("../../data/lexicons/pronouns_we.txt");
const DEFAULT_YU: &str = include_str!("../../data/lexicons/pronouns_yu.txt");
const DEFAULT_PP: &str = include_str!("../../data/lexicons/prepositions.txt");
const DEFAULT_NP: &str = include_str!("../../data/lexicons/negative_particles.txt");
const DEFAULT_SW: &str = include_str!("../../data/lexicons/vulgar.txt");
const DEFAULT_PE: &str = include_str!("../../data/lexicons/emoticons_pos.txt");
const DEFAULT_NE: &str = include_str!("../../data/lexicons/emoticons_neg.txt");
const DEFAULT_URL: &str = include_str!("../../data/lexicons/url_prefixes.txt");

/// File names expected by [`Lexicons::load_dir`].
pub const LEXICON_FILES: [&str; 9] = [
    "pronouns_im.txt",
    "pronouns_we.txt",
    "pronouns_yu.txt",
    "prepositions.txt",
    "negative_particles.txt",
    "vulgar.txt",
    "emoticons_pos.txt",
    "emoticons_neg.txt",
    "url_prefixes.txt",
];

#[derive(Debug, Error)]
pub enum LexiconsError {
    #[error("failed to read lexicon file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Loaded word lists (matched against case-folded word tokens) and the
/// emoticon/URL inventories used by the tokenizer.
#[derive(Debug, Clone)]
pub struct Lexicons {
    first_singular: HashSet<String>,
    first_plural: HashSet<String>,
    second_singular: HashSet<String>,
    prepositions: HashSet<String>,
    negative_particles: HashSet<String>,
    vulgar: HashSet<String>,
    /// Positive emoticons, longest first.
    positive_emoticons: Vec<String>,
    /// Negative emoticons, longest first.
    negative_emoticons: Vec<String>,
    /// Lowercase URL prefixes.
    url_prefixes: Vec<String>,
}

fn parse_word_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Emoticons keep their case; sorted longest first so that greedy matching
/// prefers `:-(` over `:-`.
fn parse_pattern_list(text: &str) -> Vec<String> {
    let mut set: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    set.sort();
    set.dedup();
    set.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    set
}

fn parse_prefix_list(text: &str) -> Vec<String> {
    let mut set: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect();
    set.sort();
    set.dedup();
    set.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    set
}

impl Lexicons {
    /// The compiled-in default inventories.
    pub fn builtin() -> Lexicons {
        Lexicons {
            first_singular: parse_word_list(DEFAULT_IM),
            first_plural: parse_word_list(DEFAULT_WE),
            second_singular: parse_word_list(DEFAULT_YU),
            prepositions: parse_word_list(DEFAULT_PP),
            negative_particles: parse_word_list(DEFAULT_NP),
            vulgar: parse_word_list(DEFAULT_SW),
            positive_emoticons: parse_pattern_list(DEFAULT_PE),
            negative_emoticons: parse_pattern_list(DEFAULT_NE),
            url_prefixes: parse_prefix_list(DEFAULT_URL),
        }
    }

    /// Load all nine lists from a directory of the standard file names
    /// (see [`LEXICON_FILES`]). Every file must exist.
    pub fn load_dir(dir: &Path) -> Result<Lexicons, LexiconsError> {
        let read = |name: &str| -> Result<String, LexiconsError> {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|source| LexiconsError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        Ok(Lexicons {
            first_singular: parse_word_list(&read("pronouns_im.txt")?),
            first_plural: parse_word_list(&read("pronouns_we.txt")?),
            second_singular: parse_word_list(&read("pronouns_yu.txt")?),
            prepositions: parse_word_list(&read("prepositions.txt")?),
            negative_particles: parse_word_list(&read("negative_particles.txt")?),
            vulgar: parse_word_list(&read("vulgar.txt")?),
            positive_emoticons: parse_pattern_list(&read("emoticons_pos.txt")?),
            negative_emoticons: parse_pattern_list(&read("emoticons_neg.txt")?),
            url_prefixes: parse_prefix_list(&read("url_prefixes.txt")?),
        })
    }

    pub fn is_first_singular(&self, word: &str) -> bool {
        self.first_singular.contains(word)
    }

    pub fn is_first_plural(&self, word: &str) -> bool {
        self.first_plural.contains(word)
    }

    pub fn is_second_singular(&self, word: &str) -> bool {
        self.second_singular.contains(word)
    }

    pub fn is_preposition(&self, word: &str) -> bool {
        self.prepositions.contains(word)
    }

    pub fn is_negative_particle(&self, word: &str) -> bool {
        self.negative_particles.contains(word)
    }

    pub fn is_vulgar(&self, word: &str) -> bool {
        self.vulgar.contains(word)
    }

    pub fn is_positive_emoticon(&self, text: &str) -> bool {
        self.positive_emoticons.iter().any(|e| e == text)
    }

    pub fn is_negative_emoticon(&self, text: &str) -> bool {
        self.negative_emoticons.iter().any(|e| e == text)
    }

    /// All emoticons, longest first, as needed for greedy matching.
    pub fn emoticons(&self) -> impl Iterator<Item = &str> {
        let mut all: Vec<&str> = self
            .positive_emoticons
            .iter()
            .chain(self.negative_emoticons.iter())
            .map(String::as_str)
            .collect();
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all.into_iter()
    }

    pub fn url_prefixes(&self) -> impl Iterator<Item = &str> {
        self.url_prefixes.iter().map(String::as_str)
    }
}

impl Default for Lexicons {
    fn default() -> Self {
        Lexicons::builtin()
    }
}
