//! The 18 per-comment feature counts and a user's feature means.
//!
//! ```bash
//! cargo run --example extract_features
//! ```

use echofive::lexical::{extract_features, user_feature_means, FeatureId, Lexicons};

fn main() {
    let lexicons = Lexicons::builtin();
    let comments = [
        "I think we won!! :)",
        "Check (this): over 9000 reasons?",
        "You never read the damn sources: http://journal.example.org",
    ];

    let mut counts = Vec::new();
    for comment in comments {
        let features = extract_features(comment, &lexicons);
        println!("{comment:?}");
        let nonzero: Vec<String> = FeatureId::ALL
            .into_iter()
            .filter(|f| features.get(*f) > 0)
            .map(|f| format!("{}={}", f.code(), features.get(f)))
            .collect();
        println!("  {}", nonzero.join(" "));
        counts.push(features);
    }

    let means = user_feature_means(&counts).expect("non-empty comment list");
    println!("\nper-user means over {} comments:", counts.len());
    for f in FeatureId::ALL {
        if means.get(f) > 0.0 {
            println!("  {:2}  {:.4}", f.code(), means.get(f));
        }
    }
}
