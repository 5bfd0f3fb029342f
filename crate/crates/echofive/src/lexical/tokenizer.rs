//! Comment tokenizer.
//!
//! Scans left to right, skipping whitespace, and classifies each maximal
//! token as URL, emoticon, number, word or punctuation — in that order of
//! precedence, so that `:/` inside `http://` never counts as an emoticon or
//! punctuation. Every non-whitespace character of the input lands in
//! exactly one token.

use std::ops::Range;

use super::Lexicons;

/// Classification of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Number,
    Emoticon,
    Url,
    Punctuation,
}

/// A classified token. `text` is case-folded for words (with the curly
/// apostrophe normalized to `'`) and verbatim otherwise; `span` is the byte
/// range of the token in the original input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Range<usize>,
}

/// Tokenizer configured with the emoticon and URL inventories of a
/// [`Lexicons`].
pub struct Tokenizer<'a> {
    lexicons: &'a Lexicons,
}

fn is_word_char(c: char) -> bool {
    c.is_alphabetic()
}

fn is_word_joiner(c: char) -> bool {
    c == '\'' || c == '\u{2019}' || c == '-'
}

impl<'a> Tokenizer<'a> {
    pub fn new(lexicons: &'a Lexicons) -> Tokenizer<'a> {
        Tokenizer { lexicons }
    }

    /// Tokenize `text` into an ordered token sequence.
    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut tokens = Vec::new();
        let bytes = text.as_bytes();
        let mut pos = 0;

        while pos < text.len() {
            let rest = &text[pos..];
            let c = rest.chars().next().expect("pos is on a char boundary");

            if c.is_whitespace() {
                pos += c.len_utf8();
                continue;
            }

            if let Some(len) = self.match_url(rest) {
                tokens.push(Token {
                    kind: TokenKind::Url,
                    text: rest[..len].to_string(),
                    span: pos..pos + len,
                });
                pos += len;
                continue;
            }

            if let Some(len) = self.match_emoticon(rest) {
                tokens.push(Token {
                    kind: TokenKind::Emoticon,
                    text: rest[..len].to_string(),
                    span: pos..pos + len,
                });
                pos += len;
                continue;
            }

            if c.is_ascii_digit() {
                let len = match_number(rest);
                tokens.push(Token {
                    kind: TokenKind::Number,
                    text: rest[..len].to_string(),
                    span: pos..pos + len,
                });
                pos += len;
                continue;
            }

            if is_word_char(c) {
                let len = match_word(rest);
                let folded = rest[..len].to_lowercase().replace('\u{2019}', "'");
                tokens.push(Token {
                    kind: TokenKind::Word,
                    text: folded,
                    span: pos..pos + len,
                });
                pos += len;
                continue;
            }

            // Anything else is a single punctuation character. This is the
            // catch-all class, so the token partition stays total.
            let len = c.len_utf8();
            tokens.push(Token {
                kind: TokenKind::Punctuation,
                text: rest[..len].to_string(),
                span: pos..pos + len,
            });
            pos += len;
        }

        debug_assert!(pos == bytes.len());
        tokens
    }

    /// A URL starts with one of the configured prefixes (case-insensitive)
    /// and runs to the next whitespace.
    fn match_url(&self, rest: &str) -> Option<usize> {
        let lower: String = rest
            .chars()
            .take(12)
            .flat_map(char::to_lowercase)
            .collect();
        let hit = self
            .lexicons
            .url_prefixes()
            .any(|p| lower.starts_with(p) && rest.len() >= p.len());
        if !hit {
            return None;
        }
        let len = rest
            .char_indices()
            .find(|(_, c)| c.is_whitespace())
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        Some(len)
    }

    /// Longest emoticon from the inventory matching at this position.
    fn match_emoticon(&self, rest: &str) -> Option<usize> {
        self.lexicons
            .emoticons()
            .find(|e| rest.starts_with(e))
            .map(str::len)
    }
}

/// Maximal digit run, optionally with one decimal point between digits.
fn match_number(rest: &str) -> usize {
    let mut len = 0;
    let mut chars = rest.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_ascii_digit() {
            len = i + c.len_utf8();
            chars.next();
        } else if c == '.' && len > 0 {
            // Only consume the dot when a digit follows.
            let mut ahead = chars.clone();
            ahead.next();
            match ahead.peek() {
                Some(&(_, d)) if d.is_ascii_digit() => {
                    // Reject a second decimal point.
                    if rest[..len].contains('.') {
                        break;
                    }
                    chars.next();
                    len = i + 1;
                }
                _ => break,
            }
        } else {
            break;
        }
    }
    len
}

/// Maximal word: alphabetic characters, allowing internal apostrophes and
/// hyphens when followed by another alphabetic character, so hyphenated
/// words and contractions stay single tokens.
fn match_word(rest: &str) -> usize {
    let mut len = 0;
    let mut chars = rest.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if is_word_char(c) {
            len = i + c.len_utf8();
            chars.next();
        } else if is_word_joiner(c) && len > 0 {
            let mut ahead = chars.clone();
            ahead.next();
            match ahead.peek() {
                Some(&(_, d)) if is_word_char(d) => {
                    chars.next();
                    len = i + c.len_utf8();
                }
                _ => break,
            }
        } else {
            break;
        }
    }
    len
}
