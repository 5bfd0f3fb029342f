//! Corpus ingestion with per-file validation tallies and eligibility
//! counts.
//!
//! ```bash
//! cargo run --example ingest_and_report
//! ```

use echofive::corpus::{eligible_users, load_corpus, LoadOptions};
use echofive::personality::SignMatrix;
use echofive::testkit::{generate_synthetic_corpus, SynthSpec};

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("echofive-ingest-demo");
    let spec = SynthSpec {
        users_per_narrative: 40,
        comments_per_user: 50..=70,
        planted_model: "nynny".parse().expect("valid model string"),
        planted_prevalence: 0.4,
        seed: 3,
    };
    let outcome = generate_synthetic_corpus(&spec, &SignMatrix::builtin(), &dir)?;

    // Append some records that must be rejected and tallied.
    let mut comments = std::fs::read_to_string(&outcome.comments_path)?;
    comments += "this line is not json\n";
    comments += "{\"user_id\":\"ghost\",\"page_id\":\"UNKNOWN_PAGE\",\"created_time\":\"2012-01-01\",\"message\":\"hi\"}\n";
    comments += "{\"user_id\":\"ghost\",\"page_id\":\"page_science\",\"created_time\":\"not a date\",\"message\":\"hi\"}\n";
    std::fs::write(&outcome.comments_path, comments)?;

    let snapshot = load_corpus(
        &outcome.pages_path,
        &outcome.comments_path,
        &outcome.likes_path,
        &LoadOptions::default(),
    )?;

    println!(
        "{}",
        serde_json::to_string_pretty(snapshot.ingestion_report())?
    );

    let eligible = eligible_users(&snapshot, 50);
    println!(
        "eligible users: {} science, {} conspiracy",
        eligible.science.len(),
        eligible.conspiracy.len()
    );
    Ok(())
}
