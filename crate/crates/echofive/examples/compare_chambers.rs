//! Descriptive statistics and the Mann-Whitney comparison of trait
//! distributions across the two chambers.
//!
//! ```bash
//! cargo run --example compare_chambers
//! ```

use echofive::personality::{SignMatrix, TraitId};
use echofive::pipeline::{self, run_pipeline, PipelineConfig};
use echofive::stats::{descriptive, mann_whitney_u};
use echofive::testkit::{generate_synthetic_corpus, SynthSpec};

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("echofive-compare-demo");
    let spec = SynthSpec {
        users_per_narrative: 120,
        comments_per_user: 50..=90,
        planted_model: "nynny".parse().expect("valid model string"),
        planted_prevalence: 0.4,
        seed: 4,
    };
    let outcome = generate_synthetic_corpus(&spec, &SignMatrix::builtin(), &dir.join("corpus"))?;
    let mut config = PipelineConfig::new(
        outcome.pages_path,
        outcome.comments_path,
        outcome.likes_path,
        dir.join("out"),
    );
    config.mantel_replicates = 999;
    let bundle = run_pipeline(&config)?;
    let groups = pipeline::groups_of(&bundle.scoring.scored)?;

    println!("trait                 science mean (sd)   conspiracy mean (sd)   mann-whitney p");
    for t in TraitId::ALL {
        let sci = groups.science.trait_values(t);
        let con = groups.conspiracy.trait_values(t);
        let (sci_mean, sci_sd) = descriptive(&sci)?;
        let (con_mean, con_sd) = descriptive(&con)?;
        let test = mann_whitney_u(&sci, &con)?;
        println!(
            "{:20}  {:>6.2} ({:>4.2})        {:>6.2} ({:>4.2})          {:.4}",
            t.name(),
            sci_mean,
            sci_sd,
            con_mean,
            con_sd,
            test.p_value
        );
    }
    Ok(())
}
