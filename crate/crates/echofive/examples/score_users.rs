//! Baseline computation, trait scoring and personality-model strings.
//!
//! ```bash
//! cargo run --example score_users
//! ```

use echofive::personality::SignMatrix;
use echofive::pipeline::{self, PipelineConfig};
use echofive::testkit::{generate_synthetic_corpus, SynthSpec};

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("echofive-score-demo");
    let spec = SynthSpec {
        users_per_narrative: 30,
        comments_per_user: 50..=70,
        planted_model: "nynny".parse().expect("valid model string"),
        planted_prevalence: 0.4,
        seed: 21,
    };
    let outcome = generate_synthetic_corpus(&spec, &SignMatrix::builtin(), &dir.join("corpus"))?;

    let config = PipelineConfig::new(
        outcome.pages_path,
        outcome.comments_path,
        outcome.likes_path,
        dir.join("out"),
    );
    let snapshot = pipeline::ingest_stage(&config)?;
    let (lexicons, matrix) = pipeline::load_inputs(&config)?;
    let mut stages = Vec::new();
    let scoring = pipeline::score_stage(&config, &snapshot, &lexicons, &matrix, &mut stages)?;

    println!(
        "baseline over {} users (first few features):",
        scoring.baseline.population
    );
    for f in echofive::lexical::FeatureId::ALL.into_iter().take(6) {
        println!("  {:2}  {:.4}", f.code(), scoring.baseline.means.get(f));
    }

    println!("\nuser_id      narrative   comments  E  S  A  C  O  pm");
    for user in scoring.scored.iter().take(12) {
        let v = user.scores.values();
        println!(
            "{:12} {:11} {:8}  {:>2} {:>2} {:>2} {:>2} {:>2}  {}",
            user.user_id,
            user.narrative.label(),
            user.comment_count,
            v[0],
            v[1],
            v[2],
            v[3],
            v[4],
            user.pm
        );
    }
    println!("... ({} users total)", scoring.scored.len());
    Ok(())
}
