//! Corpus data model, file ingestion, polarization classification and
//! eligibility filtering.
//!
//! Ingestion is fail-soft per record and fail-fast per file: unreadable
//! files abort, while malformed lines and records referencing unknown pages
//! are rejected and tallied in the [`IngestionReport`].

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::timeparse;

/// One of the two conflicting narratives a page can support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Narrative {
    Science,
    Conspiracy,
}

impl Narrative {
    pub fn label(self) -> &'static str {
        match self {
            Narrative::Science => "science",
            Narrative::Conspiracy => "conspiracy",
        }
    }

    pub fn parse(text: &str) -> Option<Narrative> {
        match text.trim().to_lowercase().as_str() {
            "science" => Some(Narrative::Science),
            "conspiracy" => Some(Narrative::Conspiracy),
            _ => None,
        }
    }
}

impl std::fmt::Display for Narrative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A page users comment on and like.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub page_id: String,
    pub narrative: Narrative,
}

/// One comment, the unit personality is read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub user_id: String,
    pub page_id: String,
    /// UTC epoch seconds.
    pub timestamp: i64,
    pub text: String,
}

/// A like — positive feedback from a user to a page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikeRecord {
    pub user_id: String,
    pub page_id: String,
}

/// Which echo chamber a user's likes place them in, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Science,
    Conspiracy,
    Unpolarized,
}

/// Per-user aggregates derived from the raw records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserActivity {
    pub comment_count: u64,
    pub science_likes: u64,
    pub conspiracy_likes: u64,
    pub polarization: Polarization,
}

/// Acceptance/rejection tally for one input file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileReport {
    pub accepted: u64,
    pub rejected: u64,
    pub reasons: BTreeMap<String, u64>,
}

impl FileReport {
    fn accept(&mut self) {
        self.accepted += 1;
    }

    fn reject(&mut self, reason: &str) {
        self.rejected += 1;
        *self.reasons.entry(reason.to_string()).or_insert(0) += 1;
    }
}

/// Tally of what was accepted and rejected per input file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestionReport {
    pub pages: FileReport,
    pub comments: FileReport,
    pub likes: FileReport,
}

/// Immutable snapshot of an ingested corpus. Per-user aggregates are
/// derived during construction and never mutated afterwards, so snapshots
/// are safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSnapshot {
    pages: BTreeMap<String, Narrative>,
    comments: Vec<Comment>,
    likes: Vec<LikeRecord>,
    users: BTreeMap<String, UserActivity>,
    ingestion: IngestionReport,
    polarization_threshold: f64,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to open {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("pages file {path} has no usable header (expected `page_id,narrative`)")]
    PagesHeader { path: String },
}

/// Options for [`load_corpus`].
#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Fraction of a user's likes that must fall on a single narrative for
    /// the user to count as polarized. Strictly greater-than.
    pub polarization_threshold: f64,
    /// Keep only comments with `timestamp >= from` (epoch seconds).
    pub from: Option<i64>,
    /// Keep only comments with `timestamp < to` (epoch seconds).
    pub to: Option<i64>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            polarization_threshold: 0.95,
            from: None,
            to: None,
        }
    }
}

/// Classify a user from their per-narrative like counts.
///
/// A user is polarized towards a narrative when the share of their likes on
/// that narrative strictly exceeds `threshold`; with no likes at all the
/// user is unpolarized.
pub fn classify_polarization(
    science_likes: u64,
    conspiracy_likes: u64,
    threshold: f64,
) -> Polarization {
    assert!(
        threshold > 0.5 && threshold <= 1.0,
        "polarization threshold must be in (0.5, 1], got {threshold}"
    );
    let total = science_likes + conspiracy_likes;
    if total == 0 {
        return Polarization::Unpolarized;
    }
    // Compare the rounded ratio against the rounded threshold so literals
    // like 0.95 meet 95/100 exactly at the boundary.
    let total = total as f64;
    if science_likes as f64 / total > threshold {
        Polarization::Science
    } else if conspiracy_likes as f64 / total > threshold {
        Polarization::Conspiracy
    } else {
        Polarization::Unpolarized
    }
}

/// Eligible users, partitioned by the narrative they are polarized towards.
/// Both lists are sorted by user id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EligibleUsers {
    pub science: Vec<String>,
    pub conspiracy: Vec<String>,
}

impl EligibleUsers {
    pub fn of(&self, narrative: Narrative) -> &[String] {
        match narrative {
            Narrative::Science => &self.science,
            Narrative::Conspiracy => &self.conspiracy,
        }
    }

    pub fn total(&self) -> usize {
        self.science.len() + self.conspiracy.len()
    }
}

/// Users polarized towards either narrative with at least `min_comments`
/// comments, partitioned by narrative.
pub fn eligible_users(snapshot: &CorpusSnapshot, min_comments: u64) -> EligibleUsers {
    assert!(min_comments >= 1, "min_comments must be at least 1");
    let mut out = EligibleUsers::default();
    for (user_id, activity) in &snapshot.users {
        if activity.comment_count < min_comments {
            continue;
        }
        match activity.polarization {
            Polarization::Science => out.science.push(user_id.clone()),
            Polarization::Conspiracy => out.conspiracy.push(user_id.clone()),
            Polarization::Unpolarized => {}
        }
    }
    out
}

#[derive(Deserialize)]
struct CommentLine {
    user_id: String,
    page_id: String,
    created_time: String,
    message: String,
}

#[derive(Deserialize)]
struct LikeLine {
    user_id: String,
    page_id: String,
}

/// Load a corpus from a pages CSV and comments/likes JSON-lines files,
/// computing per-user aggregates and an ingestion report.
pub fn load_corpus(
    pages_path: &Path,
    comments_path: &Path,
    likes_path: &Path,
    options: &LoadOptions,
) -> Result<CorpusSnapshot, CorpusError> {
    let mut report = IngestionReport::default();

    let pages = load_pages(pages_path, &mut report.pages)?;
    let comments = load_comments(comments_path, &pages, options, &mut report.comments)?;
    let likes = load_likes(likes_path, &pages, &mut report.likes)?;

    let mut users: BTreeMap<String, UserActivity> = BTreeMap::new();
    let blank = UserActivity {
        comment_count: 0,
        science_likes: 0,
        conspiracy_likes: 0,
        polarization: Polarization::Unpolarized,
    };
    for comment in &comments {
        users
            .entry(comment.user_id.clone())
            .or_insert(blank)
            .comment_count += 1;
    }
    for like in &likes {
        let entry = users.entry(like.user_id.clone()).or_insert(blank);
        match pages[&like.page_id] {
            Narrative::Science => entry.science_likes += 1,
            Narrative::Conspiracy => entry.conspiracy_likes += 1,
        }
    }
    for activity in users.values_mut() {
        activity.polarization = classify_polarization(
            activity.science_likes,
            activity.conspiracy_likes,
            options.polarization_threshold,
        );
    }

    Ok(CorpusSnapshot {
        pages,
        comments,
        likes,
        users,
        ingestion: report,
        polarization_threshold: options.polarization_threshold,
    })
}

fn open(path: &Path) -> Result<BufReader<File>, CorpusError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })
}

fn load_pages(
    path: &Path,
    report: &mut FileReport,
) -> Result<BTreeMap<String, Narrative>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(open(path)?);
    let headers = reader
        .headers()
        .map_err(|_| CorpusError::PagesHeader {
            path: path.display().to_string(),
        })?
        .clone();
    let id_col = headers.iter().position(|h| h.trim() == "page_id");
    let narrative_col = headers.iter().position(|h| h.trim() == "narrative");
    let (id_col, narrative_col) = match (id_col, narrative_col) {
        (Some(i), Some(n)) => (i, n),
        _ => {
            return Err(CorpusError::PagesHeader {
                path: path.display().to_string(),
            })
        }
    };

    let mut pages = BTreeMap::new();
    for row in reader.records() {
        let row = match row {
            Ok(row) => row,
            Err(_) => {
                report.reject("malformed_csv_row");
                continue;
            }
        };
        let page_id = row.get(id_col).unwrap_or("").trim();
        if page_id.is_empty() {
            report.reject("empty_page_id");
            continue;
        }
        let narrative = match Narrative::parse(row.get(narrative_col).unwrap_or("")) {
            Some(n) => n,
            None => {
                report.reject("unknown_narrative");
                continue;
            }
        };
        if pages.contains_key(page_id) {
            report.reject("duplicate_page_id");
            continue;
        }
        pages.insert(page_id.to_string(), narrative);
        report.accept();
    }
    Ok(pages)
}

fn load_comments(
    path: &Path,
    pages: &BTreeMap<String, Narrative>,
    options: &LoadOptions,
    report: &mut FileReport,
) -> Result<Vec<Comment>, CorpusError> {
    let mut comments = Vec::new();
    for line in open(path)?.lines() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: CommentLine = match serde_json::from_str(&line) {
            Ok(parsed) => parsed,
            Err(_) => {
                report.reject("malformed_json");
                continue;
            }
        };
        if !pages.contains_key(&parsed.page_id) {
            report.reject("unknown_page_id");
            continue;
        }
        let timestamp = match timeparse::parse_epoch_seconds(&parsed.created_time) {
            Some(t) => t,
            None => {
                report.reject("bad_timestamp");
                continue;
            }
        };
        if options.from.is_some_and(|from| timestamp < from)
            || options.to.is_some_and(|to| timestamp >= to)
        {
            report.reject("outside_date_filter");
            continue;
        }
        comments.push(Comment {
            user_id: parsed.user_id,
            page_id: parsed.page_id,
            timestamp,
            text: parsed.message,
        });
        report.accept();
    }
    Ok(comments)
}

fn load_likes(
    path: &Path,
    pages: &BTreeMap<String, Narrative>,
    report: &mut FileReport,
) -> Result<Vec<LikeRecord>, CorpusError> {
    let mut likes = Vec::new();
    for line in open(path)?.lines() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: LikeLine = match serde_json::from_str(&line) {
            Ok(parsed) => parsed,
            Err(_) => {
                report.reject("malformed_json");
                continue;
            }
        };
        if !pages.contains_key(&parsed.page_id) {
            report.reject("unknown_page_id");
            continue;
        }
        likes.push(LikeRecord {
            user_id: parsed.user_id,
            page_id: parsed.page_id,
        });
        report.accept();
    }
    Ok(likes)
}

impl CorpusSnapshot {
    pub fn pages(&self) -> &BTreeMap<String, Narrative> {
        &self.pages
    }

    pub fn comments(&self) -> &[Comment] {
        &self.comments
    }

    pub fn likes(&self) -> &[LikeRecord] {
        &self.likes
    }

    /// Per-user aggregates, keyed by user id (sorted).
    pub fn users(&self) -> &BTreeMap<String, UserActivity> {
        &self.users
    }

    pub fn ingestion_report(&self) -> &IngestionReport {
        &self.ingestion
    }

    pub fn narrative_of(&self, page_id: &str) -> Option<Narrative> {
        self.pages.get(page_id).copied()
    }

    /// Comments of one user, in file order.
    pub fn comments_of<'a>(&'a self, user_id: &'a str) -> impl Iterator<Item = &'a Comment> {
        self.comments.iter().filter(move |c| c.user_id == user_id)
    }

    /// Recompute every aggregate from the raw records and compare. Used by
    /// tests to show the derived state is consistent.
    pub fn aggregates_consistent(&self) -> bool {
        let mut fresh: BTreeMap<&str, UserActivity> = BTreeMap::new();
        let blank = UserActivity {
            comment_count: 0,
            science_likes: 0,
            conspiracy_likes: 0,
            polarization: Polarization::Unpolarized,
        };
        for c in &self.comments {
            fresh.entry(&c.user_id).or_insert(blank).comment_count += 1;
        }
        for l in &self.likes {
            let entry = fresh.entry(&l.user_id).or_insert(blank);
            match self.pages[&l.page_id] {
                Narrative::Science => entry.science_likes += 1,
                Narrative::Conspiracy => entry.conspiracy_likes += 1,
            }
        }
        for activity in fresh.values_mut() {
            activity.polarization = classify_polarization(
                activity.science_likes,
                activity.conspiracy_likes,
                self.polarization_threshold,
            );
        }
        self.users.len() == fresh.len()
            && self
                .users
                .iter()
                .all(|(id, a)| fresh.get(id.as_str()) == Some(a))
    }
}
