//! Command line front end: one subcommand per pipeline stage.
//!
//! Exit codes: 0 success, 1 usage/configuration, 2 ingestion failure,
//! 3 analysis or output failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use echofive::pipeline::{
    self, analyze_groups, groups_of, ingest_stage, run_pipeline, BaselineMode, PipelineConfig,
    PipelineError,
};
use echofive::personality::{PersonalityModel, SignMatrix};
use echofive::report::{self, MantelSection};
use echofive::testkit::{generate_synthetic_corpus, SynthSpec};

#[derive(Parser)]
#[command(
    name = "echofive",
    version,
    about = "Big Five personality recognition from comment corpora and \
             comparative analysis of polarized communities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Pages CSV (`page_id,narrative`; narrative science|conspiracy).
    #[arg(long, env = "ECHOFIVE_PAGES")]
    pages: PathBuf,
    /// Comments JSON-lines (`user_id`, `page_id`, `created_time`, `message`).
    #[arg(long, env = "ECHOFIVE_COMMENTS")]
    comments: PathBuf,
    /// Likes JSON-lines (`user_id`, `page_id`).
    #[arg(long, env = "ECHOFIVE_LIKES")]
    likes: PathBuf,
}

#[derive(Args)]
struct ConfigArgs {
    /// Directory of lexicon files; builtin lists when omitted.
    #[arg(long, env = "ECHOFIVE_LEXICONS")]
    lexicons: Option<PathBuf>,
    /// Sign-matrix CSV (`feature,E,S,A,C,O`); builtin default when omitted.
    #[arg(long, env = "ECHOFIVE_SIGNS")]
    signs: Option<PathBuf>,
    /// Minimum comments for a user to be eligible.
    #[arg(long, env = "ECHOFIVE_MIN_COMMENTS", default_value_t = 50)]
    min_comments: u64,
    /// Like share one narrative must strictly exceed for polarization.
    #[arg(long, env = "ECHOFIVE_POLARIZATION_THRESHOLD", default_value_t = 0.95)]
    polarization_threshold: f64,
    /// Feature baseline: per-user (mean of user means) or per-comment
    /// (pooled over all comments).
    #[arg(long, env = "ECHOFIVE_BASELINE", default_value = "per-user")]
    baseline: BaselineMode,
    /// Monte-Carlo replicates for the Mantel test.
    #[arg(long, env = "ECHOFIVE_MANTEL_REPLICATES", default_value_t = 10_000)]
    mantel_replicates: u32,
    /// Seed for every randomized step.
    #[arg(long, env = "ECHOFIVE_SEED", default_value_t = 0)]
    seed: u64,
    /// Keep only comments at or after this ISO-8601 date/timestamp.
    #[arg(long, env = "ECHOFIVE_FROM")]
    from: Option<String>,
    /// Keep only comments strictly before this ISO-8601 date/timestamp.
    #[arg(long, env = "ECHOFIVE_TO")]
    to: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the corpus files and write the ingestion report.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long, env = "ECHOFIVE_OUT")]
        out: PathBuf,
    },
    /// Run through scoring and write `scored_users.csv`.
    Score {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long, env = "ECHOFIVE_OUT")]
        out: PathBuf,
    },
    /// Run the full analysis battery and write the report bundle.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long, env = "ECHOFIVE_OUT")]
        out: PathBuf,
    },
    /// Generate a deterministic synthetic corpus with a planted model.
    Synth {
        /// Users per narrative.
        #[arg(long, default_value_t = 1000)]
        users: u64,
        /// Smallest per-user comment count.
        #[arg(long, default_value_t = 50)]
        comments_min: u64,
        /// Largest per-user comment count.
        #[arg(long, default_value_t = 200)]
        comments_max: u64,
        /// Personality model to plant (five letters over y/n/o).
        #[arg(long, default_value = "nynny")]
        pm: String,
        /// Fraction of each narrative's users carrying the planted model.
        #[arg(long, default_value_t = 0.4)]
        prevalence: f64,
        /// Generator seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sign-matrix CSV; builtin default when omitted.
        #[arg(long)]
        signs: Option<PathBuf>,
        /// Output directory for pages.csv, comments.jsonl, likes.jsonl.
        #[arg(long, env = "ECHOFIVE_OUT")]
        out: PathBuf,
    },
    /// Re-run the statistics battery from an existing scored_users.csv.
    Report {
        /// Scored-user CSV produced by `score` or `analyze`.
        #[arg(long)]
        scored: PathBuf,
        /// Monte-Carlo replicates for the Mantel test.
        #[arg(long, env = "ECHOFIVE_MANTEL_REPLICATES", default_value_t = 10_000)]
        mantel_replicates: u32,
        /// Seed for the Mantel permutation stream.
        #[arg(long, env = "ECHOFIVE_SEED", default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long, env = "ECHOFIVE_OUT")]
        out: PathBuf,
    },
}

fn pipeline_config(input: InputArgs, config: ConfigArgs, out: PathBuf) -> PipelineConfig {
    PipelineConfig {
        pages: input.pages,
        comments: input.comments,
        likes: input.likes,
        lexicon_dir: config.lexicons,
        sign_matrix: config.signs,
        min_comments: config.min_comments,
        polarization_threshold: config.polarization_threshold,
        baseline_mode: config.baseline,
        mantel_replicates: config.mantel_replicates,
        seed: config.seed,
        out_dir: out,
        from: config.from,
        to: config.to,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let is_usage_error = err.use_stderr();
            let _ = err.print();
            // Usage problems exit 1; --help/--version exit 0.
            return if is_usage_error {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Ingest { input, config, out } => {
            let config = pipeline_config(input, config, out);
            let snapshot = ingest_stage(&config)?;
            std::fs::create_dir_all(&config.out_dir)
                .map_err(|e| PipelineError::Config(format!("cannot create output dir: {e}")))?;
            let path = config.out_dir.join("ingestion_report.json");
            report::write_json(snapshot.ingestion_report(), &path)?;
            let report = snapshot.ingestion_report();
            println!(
                "pages: {} accepted, {} rejected",
                report.pages.accepted, report.pages.rejected
            );
            println!(
                "comments: {} accepted, {} rejected",
                report.comments.accepted, report.comments.rejected
            );
            println!(
                "likes: {} accepted, {} rejected",
                report.likes.accepted, report.likes.rejected
            );
            let eligible = echofive::corpus::eligible_users(&snapshot, config.min_comments);
            println!(
                "eligible users: {} science, {} conspiracy",
                eligible.science.len(),
                eligible.conspiracy.len()
            );
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Score { input, config, out } => {
            let config = pipeline_config(input, config, out);
            pipeline::validate_config(&config)?;
            let (lexicons, matrix) = pipeline::load_inputs(&config)?;
            let snapshot = ingest_stage(&config)?;
            std::fs::create_dir_all(&config.out_dir)
                .map_err(|e| PipelineError::Config(format!("cannot create output dir: {e}")))?;
            let mut stages = Vec::new();
            let scoring =
                pipeline::score_stage(&config, &snapshot, &lexicons, &matrix, &mut stages)?;
            let ingestion_path = config.out_dir.join("ingestion_report.json");
            report::write_json(snapshot.ingestion_report(), &ingestion_path)?;
            let scored_path = config.out_dir.join("scored_users.csv");
            pipeline::write_scored_csv(&scoring.scored, &scored_path)?;
            println!(
                "scored {} users ({} science, {} conspiracy)",
                scoring.scored.len(),
                scoring.science_count,
                scoring.conspiracy_count
            );
            println!("wrote {}", scored_path.display());
            Ok(())
        }
        Command::Analyze { input, config, out } => {
            let config = pipeline_config(input, config, out);
            let bundle = run_pipeline(&config)?;
            println!(
                "analyzed {} science and {} conspiracy users",
                bundle.scoring.science_count, bundle.scoring.conspiracy_count
            );
            print_rank_table("science", &bundle.analysis.pm_ranking.science);
            print_rank_table("conspiracy", &bundle.analysis.pm_ranking.conspiracy);
            if let MantelSection::Result(m) = &bundle.analysis.mantel {
                println!("mantel: r = {:.3}, p = {:.4}", m.statistic, m.p_value);
            }
            println!(
                "bundle: {} files in {}",
                bundle.files.len(),
                bundle.out_dir.display()
            );
            Ok(())
        }
        Command::Synth {
            users,
            comments_min,
            comments_max,
            pm,
            prevalence,
            seed,
            signs,
            out,
        } => {
            let model: PersonalityModel = pm
                .parse()
                .map_err(|e| PipelineError::Config(format!("--pm: {e}")))?;
            let matrix = match signs {
                Some(path) => {
                    SignMatrix::load(&path).map_err(|e| PipelineError::Config(e.to_string()))?
                }
                None => SignMatrix::builtin(),
            };
            let spec = SynthSpec {
                users_per_narrative: users,
                comments_per_user: comments_min..=comments_max,
                planted_model: model,
                planted_prevalence: prevalence,
                seed,
            };
            let outcome = generate_synthetic_corpus(&spec, &matrix, &out)
                .map_err(|e| PipelineError::Config(e.to_string()))?;
            println!(
                "generated {} users per narrative ({} planted with {})",
                outcome.users_per_narrative, outcome.planted_per_narrative, pm
            );
            println!("pages:    {}", outcome.pages_path.display());
            println!("comments: {}", outcome.comments_path.display());
            println!("likes:    {}", outcome.likes_path.display());
            Ok(())
        }
        Command::Report {
            scored,
            mantel_replicates,
            seed,
            out,
        } => {
            let scored_users = pipeline::read_scored_csv(&scored)?;
            let groups = groups_of(&scored_users)?;
            let analysis =
                analyze_groups(&groups.science, &groups.conspiracy, mantel_replicates, seed)?;
            std::fs::create_dir_all(&out)
                .map_err(|e| PipelineError::Config(format!("cannot create output dir: {e}")))?;
            let analysis_path = out.join("analysis.json");
            report::write_json(&analysis, &analysis_path)?;
            report::write_section_files(&analysis, &out)?;
            println!("re-rendered analysis into {}", out.display());
            Ok(())
        }
    }
}

fn print_rank_table(chamber: &str, rows: &[report::PmRow]) {
    println!("top personality models ({chamber}):");
    println!("  rank  pm      %");
    for row in rows.iter().take(10) {
        println!("  {:>4}  {}  {:>6.2}", row.rank, row.pm, row.percent);
    }
}
