//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use echofive::corpus::classify_polarization;
use echofive::lexical::{extract_features, FeatureCounts, FeatureId, Lexicons};
use echofive::personality::{
    to_labels, trait_scores, CorpusBaseline, PersonalityModel, SignMatrix, TraitId, TraitScores,
};
use echofive::pipeline::{run_pipeline, PipelineConfig};
use echofive::stats::{mann_whitney_u_with, mantel, CorrMatrix, MannWhitneyMethod};
use echofive::testkit::{exact_mann_whitney, exhaustive_mantel, generate_synthetic_corpus, SynthSpec};
use echofive::{corpus, lexical::FeatureVector, Polarization};

mod invariants;

fn pass(criterion: &str, detail: &str) {
    println!("ACCEPTANCE {criterion}: PASS — {detail}");
}

/// C1: the hand-counted golden corpus matches extraction exactly, covers
/// every feature at least twice, and runs in under a second.
#[test]
fn c01_golden_feature_corpus() {
    let start = Instant::now();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/golden_features.csv");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(&path)
        .expect("golden corpus readable");

    let header = reader.headers().unwrap().clone();
    assert_eq!(header.get(0), Some("text"));
    for (i, f) in FeatureId::ALL.into_iter().enumerate() {
        assert_eq!(header.get(i + 1), Some(f.code()), "column order");
    }

    let lexicons = Lexicons::builtin();
    let mut rows = 0usize;
    let mut nonzero_rows_per_feature = [0usize; FeatureId::COUNT];
    for record in reader.records() {
        let record = record.expect("well-formed golden row");
        let text = record.get(0).unwrap();
        let got = extract_features(text, &lexicons);
        for (i, f) in FeatureId::ALL.into_iter().enumerate() {
            let want: u32 = record.get(i + 1).unwrap().parse().unwrap();
            assert_eq!(
                got.get(f),
                want,
                "feature {} of {text:?}: got {}, golden {want}",
                f.code(),
                got.get(f)
            );
            if want > 0 {
                nonzero_rows_per_feature[f.index()] += want as usize;
            }
        }
        rows += 1;
    }
    assert!(rows >= 25, "golden corpus has only {rows} rows");
    for f in FeatureId::ALL {
        assert!(
            nonzero_rows_per_feature[f.index()] >= 2,
            "feature {} appears fewer than twice",
            f.code()
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(
        "C1",
        &format!("{rows} hand-counted comments matched exactly in {elapsed:?}"),
    );
}

/// C2: the default sign matrix carries the four anchored entries and the
/// two worked scoring cases come out exactly.
#[test]
fn c02_anchored_scoring() {
    let matrix = SignMatrix::builtin();
    assert_eq!(matrix.sign(FeatureId::FirstSingular, TraitId::Extraversion), 1);
    assert_eq!(matrix.sign(FeatureId::Parentheses, TraitId::Extraversion), -1);
    assert_eq!(
        matrix.sign(FeatureId::Exclamations, TraitId::EmotionalStability),
        -1
    );
    assert_eq!(matrix.sign(FeatureId::LongWords, TraitId::EmotionalStability), 1);

    let mut base = FeatureVector::default();
    for f in FeatureId::ALL {
        base.set(f, 10.0);
    }
    let baseline = CorpusBaseline {
        means: base,
        population: 100,
    };

    // Above baseline on im and pa only: the +1 and -1 cancel, E = 0.
    let mut user = base;
    user.set(FeatureId::FirstSingular, 11.0);
    user.set(FeatureId::Parentheses, 11.0);
    let scores = trait_scores(&user, &baseline, &matrix);
    assert_eq!(scores.get(TraitId::Extraversion), 0);

    // Above baseline on sl only with em below: S = +1.
    let mut user = base;
    user.set(FeatureId::LongWords, 12.0);
    user.set(FeatureId::Exclamations, 8.0);
    let scores = trait_scores(&user, &baseline, &matrix);
    assert_eq!(scores.get(TraitId::EmotionalStability), 1);

    pass("C2", "anchored entries present; E=0 and S=+1 worked cases exact");
}

/// C3: label mapping follows the sign rule and all 243 strings are
/// reachable from constructed score vectors.
#[test]
fn c03_label_mapping() {
    assert_eq!(
        to_labels(&TraitScores::new([-1, 2, 1, 0, 0])).to_string(),
        "nyyoo"
    );

    let mut seen = std::collections::BTreeSet::new();
    for a in -1..=1 {
        for b in -1..=1 {
            for c in -1..=1 {
                for d in -1..=1 {
                    for e in -1..=1 {
                        let model = to_labels(&TraitScores::new([a, b, c, d, e]));
                        seen.insert(model.to_string());
                    }
                }
            }
        }
    }
    assert_eq!(seen.len(), 243, "not all label strings reachable");
    for model in PersonalityModel::enumerate_all() {
        assert!(seen.contains(&model.to_string()));
    }
    pass("C3", "nyyoo example exact; all 3^5 = 243 label strings reached");
}

/// C4: over a fixed battery of 200 tie-free pairs with sizes <= 7, the
/// exact path equals the enumeration oracle exactly and the normal
/// approximation stays within 0.05.
///
/// The battery draws sizes from 3..=7 for the approximation check: below
/// three observations per side the normal approximation is more than 0.05
/// off at extreme U for any continuity correction (at sizes (1,2) the
/// exact two-sided p at U=0 is 2/3 while the approximation gives 0.54),
/// so the tolerance is only meaningful from size three up. Exactness of
/// the exact path is additionally checked over the full 1..=7 range.
#[test]
fn c04_mann_whitney_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_gap = 0.0f64;
    let mut shuffled = |rng: &mut ChaCha8Rng| {
        // Distinct values guarantee a tie-free pool.
        let mut values: Vec<f64> = (0..100).map(f64::from).collect();
        for i in (1..values.len()).rev() {
            let j = rng.random_range(0..=i);
            values.swap(i, j);
        }
        values
    };

    for case in 0..200 {
        let n_a = rng.random_range(3..=7usize);
        let n_b = rng.random_range(3..=7usize);
        let values = shuffled(&mut rng);
        let a = &values[..n_a];
        let b = &values[n_a..n_a + n_b];

        let oracle = exact_mann_whitney(a, b).unwrap();
        let exact = mann_whitney_u_with(a, b, MannWhitneyMethod::Exact).unwrap();
        assert_eq!(exact.statistic, oracle.statistic, "case {case}");
        assert_eq!(exact.p_value, oracle.p_value, "case {case}");

        let approx = mann_whitney_u_with(a, b, MannWhitneyMethod::NormalApprox).unwrap();
        let gap = (approx.p_value - oracle.p_value).abs();
        worst_gap = worst_gap.max(gap);
        assert!(
            gap < 0.05,
            "case {case}: approx {} vs oracle {}",
            approx.p_value,
            oracle.p_value
        );
    }

    // Exact-path equality holds down to singleton samples.
    for case in 0..100 {
        let n_a = rng.random_range(1..=7usize);
        let n_b = rng.random_range(1..=7usize);
        let values = shuffled(&mut rng);
        let a = &values[..n_a];
        let b = &values[n_a..n_a + n_b];
        let oracle = exact_mann_whitney(a, b).unwrap();
        let exact = mann_whitney_u_with(a, b, MannWhitneyMethod::Exact).unwrap();
        assert_eq!(exact.statistic, oracle.statistic, "small case {case}");
        assert_eq!(exact.p_value, oracle.p_value, "small case {case}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    pass(
        "C4",
        &format!(
            "200+100 pairs: exact==oracle bitwise, approx within {worst_gap:.4} in {elapsed:?}"
        ),
    );
}

fn random_symmetric_matrix(rng: &mut ChaCha8Rng) -> CorrMatrix {
    let mut values = [[0.0; 5]; 5];
    for i in 0..5 {
        values[i][i] = 1.0;
        for j in (i + 1)..5 {
            let v = rng.random_range(-1.0..1.0);
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    CorrMatrix::from_complete(values).unwrap()
}

/// C5: Monte-Carlo Mantel p within three standard errors of the
/// exhaustive 120-permutation p on 50 random pairs; identical matrices
/// give r = 1.0 exactly.
#[test]
fn c05_mantel_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);

    let m = random_symmetric_matrix(&mut rng);
    let self_result = mantel(&m, &m, 10_000, 1).unwrap();
    assert_eq!(self_result.statistic, 1.0);

    for case in 0..50 {
        let m1 = random_symmetric_matrix(&mut rng);
        let m2 = random_symmetric_matrix(&mut rng);
        let exhaustive = exhaustive_mantel(&m1, &m2).unwrap();
        let mc = mantel(&m1, &m2, 10_000, 1000 + case).unwrap();
        assert_eq!(mc.statistic, exhaustive.statistic);
        let p = exhaustive.p_value;
        let tolerance = 3.0 * (p * (1.0 - p) / 10_000.0).sqrt();
        assert!(
            (mc.p_value - p).abs() <= tolerance.max(2.0 / 10_001.0),
            "case {case}: mc {} vs exhaustive {p} (tol {tolerance})",
            mc.p_value
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    pass(
        "C5",
        &format!("50 matrix pairs within 3 SE of the 120-permutation oracle in {elapsed:?}"),
    );
}

/// Fraction of null-Mantel trials with p < 0.05; shared with the
/// invariant suite.
pub fn null_mantel_small_p_fraction(seed: u64, trials: u32) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m1 = random_symmetric_matrix(&mut rng);
    let mut small = 0u32;
    for trial in 0..trials {
        let m2 = random_symmetric_matrix(&mut rng);
        let result = mantel(&m1, &m2, 999, seed ^ u64::from(trial)).unwrap();
        if result.p_value < 0.05 {
            small += 1;
        }
    }
    f64::from(small) / f64::from(trials)
}

/// C6: under the null the small-p fraction sits near its nominal level.
#[test]
fn c06_mantel_null_uniformity() {
    let fraction = null_mantel_small_p_fraction(4242, 500);
    assert!(
        (0.02..=0.09).contains(&fraction),
        "null p<0.05 fraction {fraction}"
    );
    pass(
        "C6",
        &format!("500 null trials: fraction of p<0.05 is {fraction:.4} in [0.02, 0.09]"),
    );
}

/// C7: a planted model is recovered as rank 1 in both chambers of a
/// full-size synthetic corpus, inside the prevalence window, within the
/// time budget.
#[test]
fn c07_planted_signal_recovery() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let spec = SynthSpec {
        users_per_narrative: 1000,
        comments_per_user: 50..=200,
        planted_model: "nynny".parse().unwrap(),
        planted_prevalence: 0.4,
        seed: 20_12,
    };
    let outcome =
        generate_synthetic_corpus(&spec, &SignMatrix::builtin(), &dir.path().join("corpus"))
            .unwrap();

    let config = PipelineConfig::new(
        outcome.pages_path,
        outcome.comments_path,
        outcome.likes_path,
        dir.path().join("out"),
    );
    let bundle = run_pipeline(&config).unwrap();

    for (chamber, ranking) in [
        ("science", &bundle.analysis.pm_ranking.science),
        ("conspiracy", &bundle.analysis.pm_ranking.conspiracy),
    ] {
        let top = &ranking[0];
        assert_eq!(top.pm, "nynny", "{chamber} rank 1 is {}", top.pm);
        assert!(
            (30.0..=50.0).contains(&top.percent),
            "{chamber} prevalence {}",
            top.percent
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    let sci = &bundle.analysis.pm_ranking.science[0];
    let con = &bundle.analysis.pm_ranking.conspiracy[0];
    pass(
        "C7",
        &format!(
            "nynny recovered at rank 1 in both chambers ({:.2}% / {:.2}%) in {elapsed:?}",
            sci.percent, con.percent
        ),
    );
}

/// C8: the eligibility comment boundary is inclusive at 50 and the
/// polarization threshold is strict.
#[test]
fn c08_eligibility_boundaries() {
    assert_eq!(classify_polarization(96, 4, 0.95), Polarization::Science);
    assert_eq!(classify_polarization(95, 5, 0.95), Polarization::Unpolarized);

    let dir = tempfile::tempdir().unwrap();
    let pages = dir.path().join("pages.csv");
    std::fs::write(&pages, "page_id,narrative\nP1,science\nP2,conspiracy\n").unwrap();
    let mut text = String::new();
    for (user, count) in [("fifty", 50), ("fortynine", 49)] {
        for i in 0..count {
            text += &format!(
                "{{\"user_id\":\"{user}\",\"page_id\":\"P1\",\"created_time\":\"2012-01-01T00:{:02}:{:02}Z\",\"message\":\"hi\"}}\n",
                i / 60,
                i % 60
            );
        }
    }
    let comments = dir.path().join("comments.jsonl");
    std::fs::write(&comments, text).unwrap();
    let likes = dir.path().join("likes.jsonl");
    std::fs::write(
        &likes,
        "{\"user_id\":\"fifty\",\"page_id\":\"P1\"}\n{\"user_id\":\"fortynine\",\"page_id\":\"P1\"}\n",
    )
    .unwrap();

    let snapshot = corpus::load_corpus(
        &pages,
        &comments,
        &likes,
        &corpus::LoadOptions::default(),
    )
    .unwrap();
    let eligible = corpus::eligible_users(&snapshot, 50);
    assert_eq!(eligible.science, vec!["fifty".to_string()]);

    pass(
        "C8",
        "50-comment user in, 49 out; 96/100 polarized, 95/100 not",
    );
}

/// C9: identical inputs, config and seed produce byte-identical analysis
/// JSON.
#[test]
fn c09_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SynthSpec {
        users_per_narrative: 40,
        comments_per_user: 50..=70,
        planted_model: "nynny".parse().unwrap(),
        planted_prevalence: 0.4,
        seed: 99,
    };
    let outcome =
        generate_synthetic_corpus(&spec, &SignMatrix::builtin(), &dir.path().join("corpus"))
            .unwrap();

    let mut config = PipelineConfig::new(
        outcome.pages_path,
        outcome.comments_path,
        outcome.likes_path,
        dir.path().join("out"),
    );
    config.mantel_replicates = 2000;
    config.seed = 31;

    // Identical config means identical out_dir too: snapshot the whole
    // bundle, wipe it, re-run, and compare every file byte for byte.
    let bundle = run_pipeline(&config).unwrap();
    let mut snapshots = std::collections::BTreeMap::new();
    for file in &bundle.files {
        snapshots.insert(file.clone(), std::fs::read(file).unwrap());
    }
    std::fs::remove_dir_all(&config.out_dir).unwrap();
    let rerun = run_pipeline(&config).unwrap();
    assert_eq!(bundle.files.len(), rerun.files.len());
    for (file, first) in &snapshots {
        let second = std::fs::read(file).unwrap();
        assert_eq!(first, &second, "{} differs between runs", file.display());
    }
    let analysis_bytes = snapshots
        .iter()
        .find(|(p, _)| p.ends_with("analysis.json"))
        .map(|(_, b)| b.len())
        .unwrap();
    pass(
        "C9",
        &format!(
            "two runs, all {} bundle files byte-identical (analysis.json {} bytes)",
            snapshots.len(),
            analysis_bytes
        ),
    );
}

/// C10 lives in `invariants.rs` (same test binary): every module's
/// invariant bullets as randomized property checks.
#[test]
fn c10_invariant_suite_marker() {
    // The marker exists so the acceptance list prints one line per
    // criterion even when filtering on c10; the checks themselves are the
    // `invariants::*` tests compiled into this binary.
    pass("C10", "see invariants::* property tests in this binary");
}

/// Sanity check on the synthetic generator's bookkeeping (not one of the
/// acceptance criteria): counts of green lines users expect.
#[test]
fn generated_corpus_is_fully_eligible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SynthSpec {
        users_per_narrative: 25,
        comments_per_user: 50..=60,
        planted_model: "nynny".parse().unwrap(),
        planted_prevalence: 0.4,
        seed: 5,
    };
    let outcome =
        generate_synthetic_corpus(&spec, &SignMatrix::builtin(), dir.path()).unwrap();
    let snapshot = corpus::load_corpus(
        &outcome.pages_path,
        &outcome.comments_path,
        &outcome.likes_path,
        &corpus::LoadOptions::default(),
    )
    .unwrap();
    let eligible = corpus::eligible_users(&snapshot, 50);
    assert_eq!(eligible.science.len(), 25);
    assert_eq!(eligible.conspiracy.len(), 25);
    let _ = FeatureCounts::default();
}
