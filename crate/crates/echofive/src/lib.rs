//! Unsupervised Big Five personality recognition from comment corpora, and
//! comparative analysis of the personality profiles of polarized communities.
//!
//! The pipeline ingests a corpus of pages, comments and likes, classifies
//! each user as polarized towards one of two conflicting narratives (Science
//! or Conspiracy) or neither, extracts 18 lexical features from the comments
//! of eligible users, scores the five personality dimensions against a
//! corpus-wide baseline using a configurable feature/trait sign matrix, and
//! runs a battery of nonparametric statistics comparing the two communities.
//!
//! # Modules
//!
//! - [`corpus`] — data model, file ingestion, polarization classification
//!   and eligibility filtering.
//! - [`lexical`] — tokenization and extraction of the 18 per-comment
//!   linguistic feature counts, plus per-user feature means.
//! - [`personality`] — corpus baseline, sign-matrix trait scoring and
//!   discretization into five-letter personality models.
//! - [`stats`] — descriptive statistics, Mann-Whitney U, Pearson trait
//!   correlation matrices, the Mantel permutation test, personality-model
//!   ranking and activity/trait correlations.
//! - [`testkit`] — deterministic synthetic corpus generation with planted
//!   personality signals, and brute-force oracles used by the test suites.
//! - [`pipeline`] — end-to-end orchestration and report emission.
//! - [`report`] — JSON/CSV/SVG writers for the analysis bundle.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example tokenize_text            # token classification
//! cargo run --example extract_features         # per-comment feature counts
//! cargo run --example synthesize_corpus        # deterministic synthetic data
//! cargo run --example ingest_and_report        # ingestion + validation report
//! cargo run --example score_users              # baseline, scores, PM strings
//! cargo run --example compare_chambers         # descriptives + Mann-Whitney
//! cargo run --example correlation_analysis     # trait correlations + Mantel
//! cargo run --example rank_personality_models  # prevalent-model tables
//! cargo run --example full_pipeline            # everything, into a bundle dir
//! ```
//!
//! The `echofive` binary exposes the same stages as subcommands
//! (`ingest`, `score`, `analyze`, `synth`, `report`).

pub mod corpus;
pub mod lexical;
pub mod personality;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod testkit;
mod timeparse;

pub use corpus::{classify_polarization, eligible_users, load_corpus, CorpusSnapshot, Narrative, Polarization};
pub use lexical::{extract_features, user_feature_means, FeatureCounts, FeatureId, FeatureVector, Lexicons, Tokenizer};
pub use personality::{corpus_baseline, to_labels, trait_scores, CorpusBaseline, PersonalityModel, SignMatrix, TraitId, TraitScores};
pub use pipeline::{run_pipeline, BaselineMode, PipelineConfig};
