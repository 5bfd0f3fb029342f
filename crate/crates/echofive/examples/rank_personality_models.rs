//! Prevalent personality models per chamber, plus the activity/trait
//! correlations.
//!
//! ```bash
//! cargo run --example rank_personality_models
//! ```

use echofive::personality::{SignMatrix, TraitId};
use echofive::pipeline::{self, run_pipeline, PipelineConfig};
use echofive::stats::{activity_trait_correlation, pm_ranking};
use echofive::testkit::{generate_synthetic_corpus, SynthSpec};

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("echofive-rank-demo");
    let spec = SynthSpec {
        users_per_narrative: 200,
        comments_per_user: 50..=120,
        planted_model: "nynny".parse().expect("valid model string"),
        planted_prevalence: 0.4,
        seed: 17,
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

    for group in [&groups.science, &groups.conspiracy] {
        println!("top personality models ({}):", group.narrative.label());
        println!("  rank  pm       count      %");
        for (rank, row) in pm_ranking(group).iter().take(10).enumerate() {
            println!(
                "  {:>4}  {}  {:>6}  {:>6.2}",
                rank + 1,
                row.model,
                row.count,
                row.percent
            );
        }
        println!();
    }

    println!("comment-count/trait correlations:");
    println!("              E        S        A        C        O");
    for group in [&groups.science, &groups.conspiracy] {
        let rs = activity_trait_correlation(group)?;
        print!("{:11}", group.narrative.label());
        for t in TraitId::ALL {
            match rs[t.index()] {
                Some(r) => print!("  {r:>7.3}"),
                None => print!("  {:>7}", "NA"),
            }
        }
        println!();
    }
    Ok(())
}
