//! End-to-end orchestration: ingest → eligibility → features → baseline →
//! scoring → stats, with a report bundle and a run manifest written at the
//! end.
//!
//! Stage ordering is fixed and observable through the returned stage log;
//! the baseline is always fully materialized before any scoring starts.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{self, CorpusSnapshot, Narrative, UserActivity};
use crate::lexical::{extract_features, FeatureTotals, FeatureVector, Lexicons};
use crate::personality::{
    corpus_baseline, to_labels, trait_scores, CorpusBaseline, PersonalityModel, SignMatrix,
    TraitId, TraitScores,
};
use crate::report::{
    self, corr_matrix_rows, ActivityCorrRow, AnalysisReport, ChamberPair, Histogram,
    MantelSection, PmRow, ReportError, TraitDescriptive, TraitTestRow,
};
use crate::stats::{
    activity_trait_correlation, descriptive, mann_whitney_u, mantel, pm_ranking,
    trait_correlation_matrix, GroupScores, StatsError, UserScore,
};
use crate::timeparse;

/// Which population the feature baseline averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMode {
    /// Mean of per-user mean vectors; every user weighs the same.
    PerUser,
    /// Pooled mean over all comments; prolific users weigh more.
    PerComment,
}

impl std::fmt::Display for BaselineMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BaselineMode::PerUser => "per-user",
            BaselineMode::PerComment => "per-comment",
        })
    }
}

impl std::str::FromStr for BaselineMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-user" => Ok(BaselineMode::PerUser),
            "per-comment" => Ok(BaselineMode::PerComment),
            other => Err(format!(
                "baseline mode must be per-user or per-comment, got {other:?}"
            )),
        }
    }
}

/// Everything a pipeline run needs. CLI flags mirror these fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub pages: PathBuf,
    pub comments: PathBuf,
    pub likes: PathBuf,
    /// Directory of lexicon files; compiled-in defaults when absent.
    pub lexicon_dir: Option<PathBuf>,
    /// Sign-matrix CSV; the shipped default matrix when absent.
    pub sign_matrix: Option<PathBuf>,
    pub min_comments: u64,
    pub polarization_threshold: f64,
    pub baseline_mode: BaselineMode,
    pub mantel_replicates: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Inclusive ISO-8601 lower bound on comment timestamps.
    pub from: Option<String>,
    /// Exclusive ISO-8601 upper bound on comment timestamps.
    pub to: Option<String>,
}

impl PipelineConfig {
    pub fn new(pages: PathBuf, comments: PathBuf, likes: PathBuf, out_dir: PathBuf) -> Self {
        PipelineConfig {
            pages,
            comments,
            likes,
            lexicon_dir: None,
            sign_matrix: None,
            min_comments: 50,
            polarization_threshold: 0.95,
            baseline_mode: BaselineMode::PerUser,
            mantel_replicates: 10_000,
            seed: 0,
            out_dir,
            from: None,
            to: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("ingestion: {0}")]
    Ingest(#[from] corpus::CorpusError),
    #[error("{stage}: {message}")]
    Analysis { stage: &'static str, message: String },
    #[error("output: {0}")]
    Output(#[from] ReportError),
    #[error("no eligible users in the {0} chamber; nothing to analyze")]
    EmptyChamber(Narrative),
}

impl PipelineError {
    /// Process exit code: 1 usage/config, 2 ingestion, 3 analysis/output.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Ingest(_) => 2,
            PipelineError::Analysis { .. }
            | PipelineError::Output(_)
            | PipelineError::EmptyChamber(_) => 3,
        }
    }
}

fn stats_error(e: StatsError) -> PipelineError {
    PipelineError::Analysis {
        stage: "stats",
        message: e.to_string(),
    }
}

/// One scored user, as written to `scored_users.csv`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoredUser {
    pub user_id: String,
    pub narrative: Narrative,
    pub comment_count: u64,
    pub scores: TraitScores,
    pub pm: PersonalityModel,
}

/// Output of the scoring stages, before any statistics run.
#[derive(Debug, Clone)]
pub struct ScoringOutcome {
    pub baseline: CorpusBaseline,
    /// All eligible users of both chambers, sorted by user id.
    pub scored: Vec<ScoredUser>,
    pub science_count: usize,
    pub conspiracy_count: usize,
}

/// A line of the stage log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageLog {
    pub stage: &'static str,
    pub detail: String,
}

/// Everything a full run produces.
#[derive(Debug)]
pub struct RunBundle {
    pub out_dir: PathBuf,
    pub analysis: AnalysisReport,
    pub scoring: ScoringOutcome,
    pub stages: Vec<StageLog>,
    pub files: Vec<PathBuf>,
}

fn log_stage(stages: &mut Vec<StageLog>, stage: &'static str, detail: String) {
    eprintln!("[{stage}] {detail}");
    stages.push(StageLog { stage, detail });
}

pub fn validate_config(config: &PipelineConfig) -> Result<(), PipelineError> {
    if !(config.polarization_threshold > 0.5 && config.polarization_threshold <= 1.0) {
        return Err(PipelineError::Config(format!(
            "polarization threshold must be in (0.5, 1], got {}",
            config.polarization_threshold
        )));
    }
    if config.min_comments == 0 {
        return Err(PipelineError::Config(
            "min_comments must be at least 1".to_string(),
        ));
    }
    if config.mantel_replicates == 0 {
        return Err(PipelineError::Config(
            "mantel replicates must be at least 1".to_string(),
        ));
    }
    for (name, bound) in [("--from", &config.from), ("--to", &config.to)] {
        if let Some(text) = bound {
            if timeparse::parse_epoch_seconds(text).is_none() {
                return Err(PipelineError::Config(format!(
                    "{name} must be an ISO-8601 date or timestamp, got {text:?}"
                )));
            }
        }
    }
    Ok(())
}

/// Resolve the lexicons and sign matrix a config points at (builtin
/// defaults when unset).
pub fn load_inputs(config: &PipelineConfig) -> Result<(Lexicons, SignMatrix), PipelineError> {
    let lexicons = match &config.lexicon_dir {
        Some(dir) => Lexicons::load_dir(dir).map_err(|e| PipelineError::Config(e.to_string()))?,
        None => Lexicons::builtin(),
    };
    let matrix = match &config.sign_matrix {
        Some(path) => SignMatrix::load(path).map_err(|e| PipelineError::Config(e.to_string()))?,
        None => SignMatrix::builtin(),
    };
    Ok((lexicons, matrix))
}

/// Ingest the three corpus files under the config's thresholds and date
/// filter.
pub fn ingest_stage(config: &PipelineConfig) -> Result<CorpusSnapshot, PipelineError> {
    validate_config(config)?;
    let options = corpus::LoadOptions {
        polarization_threshold: config.polarization_threshold,
        from: config
            .from
            .as_deref()
            .and_then(timeparse::parse_epoch_seconds),
        to: config.to.as_deref().and_then(timeparse::parse_epoch_seconds),
    };
    Ok(corpus::load_corpus(
        &config.pages,
        &config.comments,
        &config.likes,
        &options,
    )?)
}

/// Eligibility, feature extraction, baseline and scoring. The baseline is
/// fully materialized before the first user is scored.
pub fn score_stage(
    config: &PipelineConfig,
    snapshot: &CorpusSnapshot,
    lexicons: &Lexicons,
    matrix: &SignMatrix,
    stages: &mut Vec<StageLog>,
) -> Result<ScoringOutcome, PipelineError> {
    let eligible = corpus::eligible_users(snapshot, config.min_comments);
    log_stage(
        stages,
        "eligibility",
        format!(
            "science={} conspiracy={} (min_comments={}, threshold={})",
            eligible.science.len(),
            eligible.conspiracy.len(),
            config.min_comments,
            config.polarization_threshold
        ),
    );
    if eligible.science.is_empty() {
        return Err(PipelineError::EmptyChamber(Narrative::Science));
    }
    if eligible.conspiracy.is_empty() {
        return Err(PipelineError::EmptyChamber(Narrative::Conspiracy));
    }

    // Feature totals per eligible user, in sorted user order.
    let eligible_set: BTreeSet<&str> = eligible
        .science
        .iter()
        .chain(eligible.conspiracy.iter())
        .map(String::as_str)
        .collect();
    let mut totals: BTreeMap<&str, FeatureTotals> = eligible_set
        .iter()
        .map(|&u| (u, FeatureTotals::default()))
        .collect();
    for comment in snapshot.comments() {
        if let Some(user_totals) = totals.get_mut(comment.user_id.as_str()) {
            user_totals.add(&extract_features(&comment.text, lexicons));
        }
    }
    log_stage(
        stages,
        "features",
        format!(
            "extracted features for {} users over {} comments",
            totals.len(),
            totals.values().map(FeatureTotals::comments).sum::<u64>()
        ),
    );

    let user_means: BTreeMap<&str, FeatureVector> = totals
        .iter()
        .map(|(&u, t)| {
            let means = t.mean().map_err(|e| PipelineError::Analysis {
                stage: "features",
                message: format!("user {u}: {e}"),
            })?;
            Ok((u, means))
        })
        .collect::<Result<_, PipelineError>>()?;

    let baseline = match config.baseline_mode {
        BaselineMode::PerUser => {
            let vectors: Vec<FeatureVector> = user_means.values().copied().collect();
            corpus_baseline(&vectors).map_err(|e| PipelineError::Analysis {
                stage: "baseline",
                message: e.to_string(),
            })?
        }
        BaselineMode::PerComment => {
            let mut pooled = FeatureTotals::default();
            for t in totals.values() {
                pooled.merge(t);
            }
            let means = pooled.mean().map_err(|e| PipelineError::Analysis {
                stage: "baseline",
                message: e.to_string(),
            })?;
            CorpusBaseline {
                means,
                population: totals.len(),
            }
        }
    };
    log_stage(
        stages,
        "baseline",
        format!(
            "{} baseline over {} users",
            config.baseline_mode, baseline.population
        ),
    );

    let science_set: BTreeSet<&str> = eligible.science.iter().map(String::as_str).collect();
    let mut scored = Vec::with_capacity(user_means.len());
    for (&user_id, means) in &user_means {
        let scores = trait_scores(means, &baseline, matrix);
        let activity: &UserActivity = &snapshot.users()[user_id];
        scored.push(ScoredUser {
            user_id: user_id.to_string(),
            narrative: if science_set.contains(user_id) {
                Narrative::Science
            } else {
                Narrative::Conspiracy
            },
            comment_count: activity.comment_count,
            scores,
            pm: to_labels(&scores),
        });
    }
    log_stage(stages, "scoring", format!("scored {} users", scored.len()));

    Ok(ScoringOutcome {
        baseline,
        scored,
        science_count: eligible.science.len(),
        conspiracy_count: eligible.conspiracy.len(),
    })
}

/// Split scored users into per-chamber groups.
pub fn groups_of(scored: &[ScoredUser]) -> Result<ChamberPair<GroupScores>, PipelineError> {
    let collect = |narrative: Narrative| -> Result<GroupScores, PipelineError> {
        let users: Vec<UserScore> = scored
            .iter()
            .filter(|s| s.narrative == narrative)
            .map(|s| UserScore {
                user_id: s.user_id.clone(),
                scores: s.scores,
                comment_count: s.comment_count,
            })
            .collect();
        if users.is_empty() {
            return Err(PipelineError::EmptyChamber(narrative));
        }
        GroupScores::new(narrative, users).map_err(stats_error)
    };
    Ok(ChamberPair {
        science: collect(Narrative::Science)?,
        conspiracy: collect(Narrative::Conspiracy)?,
    })
}

/// The full statistics battery over two scored chambers.
pub fn analyze_groups(
    science: &GroupScores,
    conspiracy: &GroupScores,
    mantel_replicates: u32,
    seed: u64,
) -> Result<AnalysisReport, PipelineError> {
    let descriptives_of = |group: &GroupScores| -> Result<Vec<TraitDescriptive>, PipelineError> {
        TraitId::ALL
            .into_iter()
            .map(|t| {
                let (mean, sd) = descriptive(&group.trait_values(t)).map_err(stats_error)?;
                Ok(TraitDescriptive {
                    trait_id: t.letter(),
                    mean,
                    sd,
                })
            })
            .collect()
    };

    let mann_whitney = TraitId::ALL
        .into_iter()
        .map(|t| {
            let result = mann_whitney_u(
                &science.trait_values(t),
                &conspiracy.trait_values(t),
            )
            .map_err(stats_error)?;
            Ok(TraitTestRow {
                trait_id: t.letter(),
                result,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;

    let sci_matrix = trait_correlation_matrix(science).map_err(stats_error)?;
    let con_matrix = trait_correlation_matrix(conspiracy).map_err(stats_error)?;

    let mantel_section = if sci_matrix.is_complete() && con_matrix.is_complete() {
        match mantel(&sci_matrix, &con_matrix, mantel_replicates, seed) {
            Ok(result) => MantelSection::Result(result),
            Err(StatsError::ConstantInput) => MantelSection::NotApplicable {
                not_applicable: "constant correlation triangle".to_string(),
            },
            Err(e) => return Err(stats_error(e)),
        }
    } else {
        MantelSection::NotApplicable {
            not_applicable: "a constant trait left a correlation matrix incomplete".to_string(),
        }
    };

    let activity_of = |group: &GroupScores| -> Result<Vec<ActivityCorrRow>, PipelineError> {
        let rs = activity_trait_correlation(group).map_err(stats_error)?;
        Ok(TraitId::ALL
            .into_iter()
            .map(|t| ActivityCorrRow {
                trait_id: t.letter(),
                r: rs[t.index()],
            })
            .collect())
    };

    let histograms_of = |group: &GroupScores| -> Result<Vec<Histogram>, PipelineError> {
        TraitId::ALL
            .into_iter()
            .map(|t| {
                let values: Vec<i32> = group.users().iter().map(|u| u.scores.get(t)).collect();
                Histogram::of_scores(t, &values).map_err(PipelineError::Output)
            })
            .collect()
    };

    Ok(AnalysisReport {
        descriptives: ChamberPair {
            science: descriptives_of(science)?,
            conspiracy: descriptives_of(conspiracy)?,
        },
        mann_whitney,
        corr_matrices: ChamberPair {
            science: corr_matrix_rows(&sci_matrix),
            conspiracy: corr_matrix_rows(&con_matrix),
        },
        mantel: mantel_section,
        pm_ranking: ChamberPair {
            science: PmRow::from_frequencies(&pm_ranking(science)),
            conspiracy: PmRow::from_frequencies(&pm_ranking(conspiracy)),
        },
        activity_corr: ChamberPair {
            science: activity_of(science)?,
            conspiracy: activity_of(conspiracy)?,
        },
        histograms: ChamberPair {
            science: histograms_of(science)?,
            conspiracy: histograms_of(conspiracy)?,
        },
    })
}

/// Write `scored_users.csv`.
pub fn write_scored_csv(scored: &[ScoredUser], path: &Path) -> Result<(), ReportError> {
    let rows: Vec<String> = scored
        .iter()
        .map(|s| {
            let v = s.scores.values();
            format!(
                "{},{},{},{},{},{},{},{},{}",
                s.user_id,
                s.narrative.label(),
                s.comment_count,
                v[0],
                v[1],
                v[2],
                v[3],
                v[4],
                s.pm
            )
        })
        .collect();
    report::write_csv(path, "user_id,narrative,comment_count,E,S,A,C,O,pm", &rows)
}

/// Read a `scored_users.csv` back into scored-user records.
pub fn read_scored_csv(path: &Path) -> Result<Vec<ScoredUser>, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "user_id,narrative,comment_count,E,S,A,C,O,pm" {
        return Err(PipelineError::Config(format!(
            "unexpected scored-user header in {}: {header:?}",
            path.display()
        )));
    }
    let mut scored = Vec::new();
    for (no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 9 {
            return Err(PipelineError::Config(format!(
                "{} line {}: expected 9 cells",
                path.display(),
                no + 2
            )));
        }
        let parse_err = |what: &str| {
            PipelineError::Config(format!("{} line {}: bad {what}", path.display(), no + 2))
        };
        let narrative =
            Narrative::parse(cells[1]).ok_or_else(|| parse_err("narrative"))?;
        let comment_count: u64 = cells[2].parse().map_err(|_| parse_err("comment count"))?;
        let mut values = [0i32; 5];
        for (slot, cell) in values.iter_mut().zip(&cells[3..8]) {
            *slot = cell.parse().map_err(|_| parse_err("score"))?;
        }
        let scores = TraitScores::new(values);
        let pm: PersonalityModel = cells[8].parse().map_err(|_| parse_err("pm"))?;
        scored.push(ScoredUser {
            user_id: cells[0].to_string(),
            narrative,
            comment_count,
            scores,
            pm,
        });
    }
    Ok(scored)
}

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    fnv1a64: String,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a PipelineConfig,
    inputs: BTreeMap<&'static str, InputDigest>,
    outputs: Vec<String>,
}

fn input_digest(path: &Path) -> Result<InputDigest, PipelineError> {
    let bytes = std::fs::read(path)
        .map_err(|e| PipelineError::Config(format!("cannot hash {}: {e}", path.display())))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        fnv1a64: report::fnv1a_hex(&bytes),
    })
}

#[derive(Deserialize)]
struct ManifestConfig {
    config: PipelineConfig,
}

/// Read the configuration back out of a run manifest, enabling exact
/// re-runs of a recorded bundle.
pub fn read_manifest_config(path: &Path) -> Result<PipelineConfig, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", path.display())))?;
    let manifest: ManifestConfig = serde_json::from_str(&text)
        .map_err(|e| PipelineError::Config(format!("bad manifest {}: {e}", path.display())))?;
    Ok(manifest.config)
}

fn write_manifest(
    config: &PipelineConfig,
    outputs: &[PathBuf],
    path: &Path,
) -> Result<(), PipelineError> {
    let mut inputs = BTreeMap::new();
    inputs.insert("pages", input_digest(&config.pages)?);
    inputs.insert("comments", input_digest(&config.comments)?);
    inputs.insert("likes", input_digest(&config.likes)?);
    let manifest = RunManifest {
        tool: "echofive",
        version: env!("CARGO_PKG_VERSION"),
        config,
        inputs,
        outputs: outputs
            .iter()
            .filter_map(|p| p.file_name())
            .map(|n| n.to_string_lossy().into_owned())
            .collect(),
    };
    report::write_json(&manifest, path)?;
    Ok(())
}

/// Run the whole pipeline and write the report bundle into
/// `config.out_dir`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunBundle, PipelineError> {
    let mut stages = Vec::new();
    validate_config(config)?;
    let (lexicons, matrix) = load_inputs(config)?;

    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| PipelineError::Config(format!("cannot create output directory: {e}")))?;
    let mut files = Vec::new();

    let snapshot = ingest_stage(config)?;
    let ingestion = snapshot.ingestion_report();
    log_stage(
        &mut stages,
        "ingest",
        format!(
            "pages {}+{} comments {}+{} likes {}+{} (accepted+rejected)",
            ingestion.pages.accepted,
            ingestion.pages.rejected,
            ingestion.comments.accepted,
            ingestion.comments.rejected,
            ingestion.likes.accepted,
            ingestion.likes.rejected
        ),
    );
    let ingestion_path = config.out_dir.join("ingestion_report.json");
    report::write_json(ingestion, &ingestion_path)?;
    files.push(ingestion_path);

    let scoring = score_stage(config, &snapshot, &lexicons, &matrix, &mut stages)?;
    let scored_path = config.out_dir.join("scored_users.csv");
    write_scored_csv(&scoring.scored, &scored_path)?;
    files.push(scored_path);

    let groups = groups_of(&scoring.scored)?;
    let analysis = analyze_groups(
        &groups.science,
        &groups.conspiracy,
        config.mantel_replicates,
        config.seed,
    )?;
    log_stage(
        &mut stages,
        "stats",
        format!(
            "mann-whitney on 5 traits, mantel {} replicates, seed {}",
            config.mantel_replicates, config.seed
        ),
    );

    let analysis_path = config.out_dir.join("analysis.json");
    report::write_json(&analysis, &analysis_path)?;
    files.push(analysis_path);
    files.extend(report::write_section_files(&analysis, &config.out_dir)?);
    log_stage(
        &mut stages,
        "render",
        format!("wrote {} bundle files", files.len()),
    );

    let manifest_path = config.out_dir.join("run_manifest.json");
    write_manifest(config, &files, &manifest_path)?;
    files.push(manifest_path);

    Ok(RunBundle {
        out_dir: config.out_dir.clone(),
        analysis,
        scoring,
        stages,
        files,
    })
}
