//! Synthetic corpus generation with planted personality signals, plus the
//! brute-force oracles in [`oracles`].
//!
//! The generator writes the exact corpus file formats the ingestion module
//! reads, so synthetic and real data flow through the same pipeline. Text
//! is assembled from feature-bearing tokens (pronouns, parentheses, long
//! words, emoticons, ...) rather than sampled language, which gives exact
//! control over which side of the corpus baseline every feature lands on.
//!
//! ## How planting works
//!
//! A planted user must strictly exceed the baseline on exactly one chosen
//! exceedance set of features, putting the sum of the matching sign-matrix
//! entries at the sign pattern of the planted model. The generator:
//!
//! - searches all feature subsets for one whose column sums match the
//!   planted model (first-person singular/plural move together so the
//!   derived self-reference count follows them deterministically);
//! - gives planted users a mean offset of `+delta` on set features and
//!   `-delta` off it, with `delta = 0.25/rho` for planted fraction `rho`,
//!   so the baseline lands at `±0.25` from the feature base;
//! - gives the remaining users jitter of `±0.1..±0.4` in exactly
//!   cancelling pairs, which keeps the baseline analytic and lets the
//!   background users fragment over many models.
//!
//! All margins beat the worst-case rounding from realizing means as
//! integer token counts, so recovery of the planted model is structural,
//! not statistical.

pub mod oracles;

pub use oracles::{exact_mann_whitney, exhaustive_mantel, permutations_of_five};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::Narrative;
use crate::lexical::FeatureId;
use crate::personality::{Label, PersonalityModel, SignMatrix, TraitId};

/// Parameters of a synthetic corpus.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub users_per_narrative: u64,
    /// Inclusive range the per-user comment count is drawn from. Keep the
    /// lower end at or above the pipeline's eligibility threshold.
    pub comments_per_user: RangeInclusive<u64>,
    pub planted_model: PersonalityModel,
    /// Fraction of each narrative's users that carry the planted model.
    pub planted_prevalence: f64,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("planted model {model} is unreachable: {explanation}")]
    UnreachableModel { model: String, explanation: String },
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Paths and bookkeeping of a generated corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthOutcome {
    pub pages_path: PathBuf,
    pub comments_path: PathBuf,
    pub likes_path: PathBuf,
    pub users_per_narrative: u64,
    pub planted_per_narrative: u64,
    /// Features a planted user exceeds the baseline on (including the
    /// derived self-reference feature).
    pub exceedance_set: Vec<FeatureId>,
}

/// Likes every generated user puts on their own narrative's page.
const LIKES_PER_USER: u64 = 100;

/// Baseline lands at `base ± PLANT_MARGIN` on planted features; the jitter
/// grid `±0.1..±0.4` straddles it with clearance 0.05.
const PLANT_MARGIN: f64 = 0.25;

/// Features controlled directly by emitted tokens (all but the derived
/// self-reference count). First-person singular and plural share one
/// search slot so the derived feature moves with them.
const SEARCH_SLOTS: usize = 16;

fn slot_features(slot: usize) -> &'static [FeatureId] {
    const SLOTS: [&[FeatureId]; SEARCH_SLOTS] = [
        &[FeatureId::AllPunctuation],
        &[FeatureId::Commas],
        &[FeatureId::Exclamations],
        &[FeatureId::ExternalLinks],
        // im and we move together; sr follows by derivation.
        &[
            FeatureId::FirstSingular,
            FeatureId::FirstPlural,
            FeatureId::SelfReferences,
        ],
        &[FeatureId::NegativeParticles],
        &[FeatureId::NegativeEmoticons],
        &[FeatureId::Numbers],
        &[FeatureId::Parentheses],
        &[FeatureId::PositiveEmoticons],
        &[FeatureId::Prepositions],
        &[FeatureId::QuestionMarks],
        &[FeatureId::LongWords],
        &[FeatureId::VulgarWords],
        &[FeatureId::WordCount],
        &[FeatureId::SecondSingular],
    ];
    SLOTS[slot]
}

/// Search for a feature set whose sign-matrix column sums carry the signs
/// of `model`. Deterministic: first match in subset order wins.
pub(crate) fn find_exceedance_set(
    matrix: &SignMatrix,
    model: &PersonalityModel,
) -> Result<Vec<FeatureId>, SynthError> {
    for mask in 0u32..(1 << SEARCH_SLOTS) {
        let mut sums = [0i32; TraitId::COUNT];
        for slot in 0..SEARCH_SLOTS {
            if mask & (1 << slot) == 0 {
                continue;
            }
            for &f in slot_features(slot) {
                for t in TraitId::ALL {
                    sums[t.index()] += i32::from(matrix.sign(f, t));
                }
            }
        }
        let matches = TraitId::ALL.into_iter().all(|t| {
            let want = model.label(t);
            let got = Label::of_score(sums[t.index()]);
            want == got
        });
        if matches {
            let mut set = Vec::new();
            for slot in 0..SEARCH_SLOTS {
                if mask & (1 << slot) != 0 {
                    set.extend_from_slice(slot_features(slot));
                }
            }
            set.sort();
            return Ok(set);
        }
    }
    Err(SynthError::UnreachableModel {
        model: model.to_string(),
        explanation: format!(
            "no subset of features sums to the sign pattern {model} under this sign matrix \
             (a trait column may be all zeros or lack the needed sign)"
        ),
    })
}

/// Per-comment base count for each feature, sized so every offset stays
/// realizable as non-negative integer token counts.
struct FeatureBases {
    base: [u64; FeatureId::COUNT],
}

const WORD_FEATURES: [FeatureId; 7] = [
    FeatureId::FirstSingular,
    FeatureId::FirstPlural,
    FeatureId::SecondSingular,
    FeatureId::Prepositions,
    FeatureId::NegativeParticles,
    FeatureId::VulgarWords,
    FeatureId::LongWords,
];

const PUNCT_FEATURES: [FeatureId; 4] = [
    FeatureId::Commas,
    FeatureId::Exclamations,
    FeatureId::QuestionMarks,
    FeatureId::Parentheses,
];

impl FeatureBases {
    fn for_delta(delta: f64) -> FeatureBases {
        let simple = delta.ceil() as u64 + 2;
        let mut base = [simple; FeatureId::COUNT];

        // Words must fit every word-class feature plus filler; punctuation
        // must fit commas, bangs, question marks, parens plus periods.
        let word_sum: u64 = WORD_FEATURES.len() as u64 * simple;
        base[FeatureId::WordCount.index()] = word_sum + (8.0 * delta).ceil() as u64 + 12;
        let punct_sum: u64 = PUNCT_FEATURES.len() as u64 * simple;
        base[FeatureId::AllPunctuation.index()] = punct_sum + (5.0 * delta).ceil() as u64 + 10;
        // The derived feature has no tokens of its own.
        base[FeatureId::SelfReferences.index()] = 0;
        FeatureBases { base }
    }

    fn get(&self, f: FeatureId) -> u64 {
        self.base[f.index()]
    }
}

/// Offsets a user's per-feature mean targets carry, in units of counts per
/// comment; realized as `round(offset * n)` extra tokens over `n` comments.
#[derive(Clone)]
struct UserPlan {
    user_id: String,
    narrative: Narrative,
    comments: u64,
    offsets: [f64; FeatureId::COUNT],
}

/// Generate a corpus with `spec.planted_prevalence` of each narrative's
/// users planted to score exactly `spec.planted_model`. Deterministic
/// given the seed: two runs produce byte-identical files.
pub fn generate_synthetic_corpus(
    spec: &SynthSpec,
    matrix: &SignMatrix,
    out_dir: &Path,
) -> Result<SynthOutcome, SynthError> {
    validate_spec(spec)?;

    let users = spec.users_per_narrative;
    let planted = (spec.planted_prevalence * users as f64).round() as u64;
    let all_planted = planted == users;
    let rho = planted as f64 / users as f64;

    if planted > 0 && all_planted && spec.planted_model.to_string() != "ooooo" {
        return Err(SynthError::UnreachableModel {
            model: spec.planted_model.to_string(),
            explanation: "with every user planted the baseline equals the planted profile, \
                          so no feature can strictly exceed it and every score is zero"
                .to_string(),
        });
    }
    if planted > 0 && !all_planted && rho > 0.8 {
        return Err(SynthError::InvalidSpec(format!(
            "planted prevalence {rho:.3} leaves too little background mass; the margin \
             between planted users and the baseline vanishes (supported: <= 0.8, or exactly \
             1.0 for the all-balanced model)"
        )));
    }

    // delta positions the baseline at base + rho*delta = base + 0.25 on
    // exceeded features (and -0.25 off them) regardless of prevalence.
    let delta = if planted == 0 || all_planted {
        0.0
    } else {
        PLANT_MARGIN / rho
    };
    if delta > 12.5 {
        return Err(SynthError::InvalidSpec(format!(
            "planted prevalence {rho} is too small: the required offset {delta:.1} would \
             make comments unreasonably large (supported: prevalence >= 0.02)"
        )));
    }

    let exceedance_set = if planted > 0 {
        find_exceedance_set(matrix, &spec.planted_model)?
    } else {
        Vec::new()
    };

    let bases = FeatureBases::for_delta(delta);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut plans: Vec<UserPlan> = Vec::with_capacity((2 * users) as usize);

    for narrative in [Narrative::Science, Narrative::Conspiracy] {
        let prefix = match narrative {
            Narrative::Science => "sci",
            Narrative::Conspiracy => "con",
        };
        let mut user_no = 0u64;
        let next_id = |user_no: &mut u64| {
            *user_no += 1;
            format!("{prefix}_u{user_no:05}")
        };

        // Planted users first: +delta on the exceedance set, -delta off it.
        for _ in 0..planted {
            let comments = draw_comments(&mut rng, &spec.comments_per_user);
            let mut offsets = [0.0; FeatureId::COUNT];
            if !all_planted {
                for f in FeatureId::ALL {
                    if f == FeatureId::SelfReferences {
                        continue;
                    }
                    offsets[f.index()] = if exceedance_set.contains(&f) {
                        delta
                    } else {
                        -delta
                    };
                }
            }
            plans.push(UserPlan {
                user_id: next_id(&mut user_no),
                narrative,
                comments,
                offsets,
            });
        }

        // Background users in exactly cancelling pairs (same comment count,
        // negated jitter), plus one zero-offset straggler when odd.
        let background = users - planted;
        for _ in 0..background / 2 {
            let comments = draw_comments(&mut rng, &spec.comments_per_user);
            let mut offsets = [0.0; FeatureId::COUNT];
            for f in FeatureId::ALL {
                if f == FeatureId::SelfReferences {
                    continue;
                }
                let magnitude = f64::from(rng.random_range(1..=4u32)) / 10.0;
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                offsets[f.index()] = sign * magnitude;
            }
            let mut mirrored = offsets;
            for v in &mut mirrored {
                *v = -*v;
            }
            plans.push(UserPlan {
                user_id: next_id(&mut user_no),
                narrative,
                comments,
                offsets,
            });
            plans.push(UserPlan {
                user_id: next_id(&mut user_no),
                narrative,
                comments,
                offsets: mirrored,
            });
        }
        if background % 2 == 1 {
            let comments = draw_comments(&mut rng, &spec.comments_per_user);
            plans.push(UserPlan {
                user_id: next_id(&mut user_no),
                narrative,
                comments,
                offsets: [0.0; FeatureId::COUNT],
            });
        }
    }

    write_corpus_files(&plans, &bases, out_dir).map(|(pages, comments, likes)| SynthOutcome {
        pages_path: pages,
        comments_path: comments,
        likes_path: likes,
        users_per_narrative: users,
        planted_per_narrative: planted,
        exceedance_set,
    })
}

fn validate_spec(spec: &SynthSpec) -> Result<(), SynthError> {
    if spec.users_per_narrative == 0 {
        return Err(SynthError::InvalidSpec(
            "users_per_narrative must be at least 1".to_string(),
        ));
    }
    let (lo, hi) = (
        *spec.comments_per_user.start(),
        *spec.comments_per_user.end(),
    );
    if lo == 0 || lo > hi {
        return Err(SynthError::InvalidSpec(format!(
            "comments_per_user range {lo}..={hi} is invalid"
        )));
    }
    if !(0.0..=1.0).contains(&spec.planted_prevalence) {
        return Err(SynthError::InvalidSpec(format!(
            "planted_prevalence {} is outside [0, 1]",
            spec.planted_prevalence
        )));
    }
    Ok(())
}

fn draw_comments(rng: &mut ChaCha8Rng, range: &RangeInclusive<u64>) -> u64 {
    rng.random_range(range.clone())
}

/// Target token totals of one user: base*count plus the rounded offset.
fn feature_totals(plan: &UserPlan, bases: &FeatureBases) -> [u64; FeatureId::COUNT] {
    let n = plan.comments;
    let mut totals = [0u64; FeatureId::COUNT];
    for f in FeatureId::ALL {
        if f == FeatureId::SelfReferences {
            continue;
        }
        let base = bases.get(f) * n;
        let extra = (plan.offsets[f.index()] * n as f64).round() as i64;
        let total = base as i64 + extra;
        assert!(total >= 0, "feature {} total went negative", f.code());
        totals[f.index()] = total as u64;
    }
    totals
}

/// Spread `total` over `n` comments: comment i gets the floor share plus
/// one while the remainder lasts.
fn share(total: u64, n: u64, i: u64) -> u64 {
    total / n + u64::from(i < total % n)
}

fn render_comment(totals: &[u64; FeatureId::COUNT], n: u64, i: u64) -> String {
    let count = |f: FeatureId| share(totals[f.index()], n, i);

    let mut tokens: Vec<String> = Vec::new();
    let words = [
        (FeatureId::FirstSingular, "i"),
        (FeatureId::FirstPlural, "we"),
        (FeatureId::SecondSingular, "you"),
        (FeatureId::Prepositions, "of"),
        (FeatureId::NegativeParticles, "not"),
        (FeatureId::VulgarWords, "damn"),
        (FeatureId::LongWords, "wonderful"),
    ];
    let mut word_tokens = 0;
    for (f, token) in words {
        for _ in 0..count(f) {
            tokens.push(token.to_string());
            word_tokens += 1;
        }
    }
    let wc = count(FeatureId::WordCount);
    assert!(
        wc >= word_tokens,
        "word budget {wc} cannot fit {word_tokens} word-class tokens"
    );
    for _ in 0..wc - word_tokens {
        tokens.push("la".to_string());
    }

    let puncts = [
        (FeatureId::Commas, ","),
        (FeatureId::Exclamations, "!"),
        (FeatureId::QuestionMarks, "?"),
    ];
    let mut punct_tokens = 0;
    for (f, token) in puncts {
        for _ in 0..count(f) {
            tokens.push(token.to_string());
            punct_tokens += 1;
        }
    }
    let parens = count(FeatureId::Parentheses);
    for k in 0..parens {
        tokens.push(if k % 2 == 0 { "(" } else { ")" }.to_string());
        punct_tokens += 1;
    }
    let ap = count(FeatureId::AllPunctuation);
    assert!(
        ap >= punct_tokens,
        "punctuation budget {ap} cannot fit {punct_tokens} marks"
    );
    for _ in 0..ap - punct_tokens {
        tokens.push(".".to_string());
    }

    for _ in 0..count(FeatureId::PositiveEmoticons) {
        tokens.push(":)".to_string());
    }
    for _ in 0..count(FeatureId::NegativeEmoticons) {
        tokens.push(":(".to_string());
    }
    for _ in 0..count(FeatureId::ExternalLinks) {
        tokens.push("http://x.io".to_string());
    }
    for _ in 0..count(FeatureId::Numbers) {
        tokens.push("7".to_string());
    }

    tokens.join(" ")
}

fn page_id(narrative: Narrative) -> &'static str {
    match narrative {
        Narrative::Science => "page_science",
        Narrative::Conspiracy => "page_conspiracy",
    }
}

fn timestamp(counter: u64) -> String {
    let day = (counter / 86_400) % 28 + 1;
    let rest = counter % 86_400;
    format!(
        "2012-01-{day:02}T{:02}:{:02}:{:02}Z",
        rest / 3600,
        rest % 3600 / 60,
        rest % 60
    )
}

fn write_corpus_files(
    plans: &[UserPlan],
    bases: &FeatureBases,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf, PathBuf), SynthError> {
    std::fs::create_dir_all(out_dir).map_err(|source| SynthError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let io_err = |path: &Path| {
        let path = path.display().to_string();
        move |source: std::io::Error| SynthError::Io {
            path: path.clone(),
            source,
        }
    };

    let pages_path = out_dir.join("pages.csv");
    let mut pages = BufWriter::new(File::create(&pages_path).map_err(io_err(&pages_path))?);
    writeln!(pages, "page_id,narrative").map_err(io_err(&pages_path))?;
    for narrative in [Narrative::Science, Narrative::Conspiracy] {
        writeln!(pages, "{},{}", page_id(narrative), narrative.label())
            .map_err(io_err(&pages_path))?;
    }
    pages.flush().map_err(io_err(&pages_path))?;

    let comments_path = out_dir.join("comments.jsonl");
    let mut comments =
        BufWriter::new(File::create(&comments_path).map_err(io_err(&comments_path))?);
    let mut counter = 0u64;
    for plan in plans {
        let totals = feature_totals(plan, bases);
        for i in 0..plan.comments {
            let line = serde_json::json!({
                "user_id": plan.user_id,
                "page_id": page_id(plan.narrative),
                "created_time": timestamp(counter),
                "message": render_comment(&totals, plan.comments, i),
            });
            serde_json::to_writer(&mut comments, &line).map_err(|e| SynthError::Io {
                path: comments_path.display().to_string(),
                source: std::io::Error::other(e),
            })?;
            comments.write_all(b"\n").map_err(io_err(&comments_path))?;
            counter += 1;
        }
    }
    comments.flush().map_err(io_err(&comments_path))?;

    let likes_path = out_dir.join("likes.jsonl");
    let mut likes = BufWriter::new(File::create(&likes_path).map_err(io_err(&likes_path))?);
    for plan in plans {
        for _ in 0..LIKES_PER_USER {
            let line = serde_json::json!({
                "user_id": plan.user_id,
                "page_id": page_id(plan.narrative),
            });
            serde_json::to_writer(&mut likes, &line).map_err(|e| SynthError::Io {
                path: likes_path.display().to_string(),
                source: std::io::Error::other(e),
            })?;
            likes.write_all(b"\n").map_err(io_err(&likes_path))?;
        }
    }
    likes.flush().map_err(io_err(&likes_path))?;

    Ok((pages_path, comments_path, likes_path))
}
