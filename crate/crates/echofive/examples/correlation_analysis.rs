//! Trait correlation matrices per chamber and the Mantel test between
//! them, with the exhaustive permutation oracle for comparison.
//!
//! ```bash
//! cargo run --example correlation_analysis
//! ```

use echofive::personality::{SignMatrix, TraitId};
use echofive::pipeline::{self, run_pipeline, PipelineConfig};
use echofive::stats::{mantel, trait_correlation_matrix};
use echofive::testkit::{exhaustive_mantel, generate_synthetic_corpus, SynthSpec};

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("echofive-corr-demo");
    let spec = SynthSpec {
        users_per_narrative: 150,
        comments_per_user: 50..=90,
        planted_model: "nynny".parse().expect("valid model string"),
        planted_prevalence: 0.4,
        seed: 13,
    };
    let outcome = generate_synthetic_corpus(&spec, &SignMatrix::builtin(), &dir.join("corpus"))?;
    let mut config = PipelineConfig::new(
        outcome.pages_path,
        outcome.comments_path,
        outcome.likes_path,
        dir.join("out"),
    );
    config.mantel_replicates = 9_999;
    config.seed = 5;
    let bundle = run_pipeline(&config)?;
    let groups = pipeline::groups_of(&bundle.scoring.scored)?;

    let science = trait_correlation_matrix(&groups.science)?;
    let conspiracy = trait_correlation_matrix(&groups.conspiracy)?;

    for (label, matrix) in [("science", &science), ("conspiracy", &conspiracy)] {
        println!("correlation matrix ({label}):");
        print!("     ");
        for t in TraitId::ALL {
            print!("{:>7}", t.letter());
        }
        println!();
        for (i, t) in TraitId::ALL.into_iter().enumerate() {
            print!("  {}  ", t.letter());
            for j in 0..TraitId::COUNT {
                match matrix.get(i, j) {
                    Some(r) => print!("{r:>7.3}"),
                    None => print!("{:>7}", "NA"),
                }
            }
            println!();
        }
        println!();
    }

    let mc = mantel(&science, &conspiracy, config.mantel_replicates, config.seed)?;
    println!(
        "mantel (monte carlo, {} replicates): r = {:.4}, p = {:.4}",
        config.mantel_replicates, mc.statistic, mc.p_value
    );
    let exact = exhaustive_mantel(&science, &conspiracy)?;
    println!(
        "mantel (all 120 permutations):        r = {:.4}, p = {:.4}",
        exact.statistic, exact.p_value
    );
    Ok(())
}
