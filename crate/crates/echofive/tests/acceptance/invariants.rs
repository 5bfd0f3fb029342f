//! The invariant suite (criterion C10): every module's invariant bullets
//! as property tests over 100 randomized instances, driven by a
//! deterministic proptest runner.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use echofive::corpus::{self, classify_polarization};
use echofive::lexical::{
    extract_features, user_feature_means, FeatureCounts, FeatureId, Lexicons, TokenKind, Tokenizer,
};
use echofive::lexical::FeatureVector;
use echofive::personality::{
    corpus_baseline, to_labels, trait_scores, CorpusBaseline, Label, SignMatrix, TraitId,
};
use echofive::pipeline::{self, run_pipeline, PipelineConfig};
use echofive::stats::{
    activity_trait_correlation, mann_whitney_u, mantel, pearson, pm_ranking,
    trait_correlation_matrix, CorrMatrix, GroupScores, UserScore,
};
use echofive::testkit::{exact_mann_whitney, exhaustive_mantel, generate_synthetic_corpus, SynthSpec};
use echofive::personality::TraitScores;
use echofive::corpus::Narrative;

const CASES: u32 = 100;

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

// ---------------------------------------------------------------- corpus

#[test]
fn corpus_polarization_is_scale_invariant() {
    runner()
        .run(
            &(0u64..100_000, 0u64..100_000, 1u64..1_000, 51u32..=100),
            |(a, b, k, threshold_pct)| {
                let threshold = f64::from(threshold_pct) / 100.0;
                prop_assert_eq!(
                    classify_polarization(a, b, threshold),
                    classify_polarization(a * k, b * k, threshold)
                );
                Ok(())
            },
        )
        .unwrap();
}

/// Random tiny corpus: users with per-narrative comment/like counts.
#[derive(Debug, Clone)]
struct TinyCorpus {
    users: Vec<(u64, u64, u64, u64)>, // science/conspiracy comments, science/conspiracy likes
}

fn tiny_corpus_strategy() -> impl Strategy<Value = TinyCorpus> {
    proptest::collection::vec((0u64..8, 0u64..8, 0u64..30, 0u64..30), 1..8)
        .prop_map(|users| TinyCorpus { users })
}

fn corpus_files(corpus: &TinyCorpus, dir: &std::path::Path) -> [std::path::PathBuf; 3] {
    let pages = dir.join("pages.csv");
    std::fs::write(&pages, "page_id,narrative\nPS,science\nPC,conspiracy\n").unwrap();
    let mut comments = String::new();
    let mut likes = String::new();
    for (i, &(sci_c, con_c, sci_l, con_l)) in corpus.users.iter().enumerate() {
        let user = format!("u{i:03}");
        for (page, n) in [("PS", sci_c), ("PC", con_c)] {
            for k in 0..n {
                comments += &format!(
                    "{{\"user_id\":\"{user}\",\"page_id\":\"{page}\",\"created_time\":\"2012-01-01T00:00:{:02}Z\",\"message\":\"hello world {k}\"}}\n",
                    k % 60
                );
            }
        }
        for (page, n) in [("PS", sci_l), ("PC", con_l)] {
            for _ in 0..n {
                likes += &format!("{{\"user_id\":\"{user}\",\"page_id\":\"{page}\"}}\n");
            }
        }
    }
    let comments_path = dir.join("comments.jsonl");
    std::fs::write(&comments_path, comments).unwrap();
    let likes_path = dir.join("likes.jsonl");
    std::fs::write(&likes_path, likes).unwrap();
    [pages, comments_path, likes_path]
}

#[test]
fn corpus_load_is_stable_partitioned_and_consistent() {
    runner()
        .run(&tiny_corpus_strategy(), |corpus| {
            let dir = tempfile::tempdir().unwrap();
            let [pages, comments, likes] = corpus_files(&corpus, dir.path());
            let options = corpus::LoadOptions::default();
            let first = corpus::load_corpus(&pages, &comments, &likes, &options).unwrap();
            let second = corpus::load_corpus(&pages, &comments, &likes, &options).unwrap();
            // Reload gives a byte-stable snapshot.
            prop_assert_eq!(&first, &second);
            // Aggregates recompute to the same values.
            prop_assert!(first.aggregates_consistent());
            // Comment counts add up to the accepted records.
            let total: u64 = first.users().values().map(|u| u.comment_count).sum();
            prop_assert_eq!(total, first.ingestion_report().comments.accepted);
            // Eligibility partitions are disjoint.
            let eligible = corpus::eligible_users(&first, 1);
            for user in &eligible.science {
                prop_assert!(!eligible.conspiracy.contains(user));
            }
            Ok(())
        })
        .unwrap();
}

// --------------------------------------------------------------- lexical

/// Text built from fragments the tokenizer cares about, plus arbitrary
/// unicode noise.
fn text_strategy() -> impl Strategy<Value = String> {
    let fragment = prop_oneof![
        Just("we".to_string()),
        Just("I".to_string()),
        Just("you".to_string()),
        Just("of".to_string()),
        Just("not".to_string()),
        Just("damn".to_string()),
        Just("wonderful".to_string()),
        Just("la".to_string()),
        Just("mother-in-law".to_string()),
        Just("don't".to_string()),
        Just(":)".to_string()),
        Just(":-(".to_string()),
        Just("http://a.io/x?q=1".to_string()),
        Just("www.example.org".to_string()),
        Just("3.14".to_string()),
        Just("9000".to_string()),
        Just(",".to_string()),
        Just("!".to_string()),
        Just("?".to_string()),
        Just("(".to_string()),
        Just(")".to_string()),
        Just(".".to_string()),
        Just("…".to_string()),
        Just("café".to_string()),
        Just("😀".to_string()),
        "[a-zA-Z]{1,10}",
        "\\PC{0,4}",
    ];
    prop_oneof![
        proptest::collection::vec(fragment, 0..30).prop_map(|parts| parts.join(" ")),
        "\\PC{0,60}",
    ]
}

#[test]
fn lexical_extraction_is_pure_and_keeps_count_identities() {
    let lexicons = Lexicons::builtin();
    runner()
        .run(&text_strategy(), |text| {
            let first = extract_features(&text, &lexicons);
            let second = extract_features(&text, &lexicons);
            prop_assert_eq!(first, second);

            let sr = first.get(FeatureId::SelfReferences);
            let im = first.get(FeatureId::FirstSingular);
            let we = first.get(FeatureId::FirstPlural);
            prop_assert_eq!(sr, im + we, "sr != im + we for {:?}", text);

            let ap = first.get(FeatureId::AllPunctuation);
            let parts = first.get(FeatureId::Commas)
                + first.get(FeatureId::Exclamations)
                + first.get(FeatureId::QuestionMarks)
                + first.get(FeatureId::Parentheses);
            prop_assert!(ap >= parts, "ap < cm+em+qm+pa for {:?}", text);

            prop_assert!(
                first.get(FeatureId::LongWords) <= first.get(FeatureId::WordCount),
                "sl > wc for {:?}",
                text
            );
            Ok(())
        })
        .unwrap();
}

#[test]
fn lexical_tokens_partition_non_whitespace_input() {
    let lexicons = Lexicons::builtin();
    let tokenizer = Tokenizer::new(&lexicons);
    runner()
        .run(&text_strategy(), |text| {
            let tokens = tokenizer.tokenize(&text);
            let mut covered = vec![false; text.len()];
            for token in &tokens {
                prop_assert!(token.span.end <= text.len());
                for i in token.span.clone() {
                    prop_assert!(!covered[i], "byte {} covered twice in {:?}", i, text);
                    covered[i] = true;
                }
                // Word tokens case-fold; spans still map to real bytes.
                if token.kind == TokenKind::Word {
                    prop_assert!(!token.text.is_empty());
                }
            }
            for (i, c) in text.char_indices() {
                let expect = !c.is_whitespace();
                for k in i..i + c.len_utf8() {
                    prop_assert_eq!(
                        covered[k],
                        expect,
                        "byte {} of {:?} in {:?}",
                        k,
                        c,
                        text
                    );
                }
            }
            Ok(())
        })
        .unwrap();
}

fn counts_strategy() -> impl Strategy<Value = FeatureCounts> {
    proptest::collection::vec(0u32..40, FeatureId::COUNT).prop_map(|values| {
        let mut counts = FeatureCounts::default();
        for (f, v) in FeatureId::ALL.into_iter().zip(values) {
            counts.set(f, v);
        }
        counts
    })
}

#[test]
fn lexical_means_are_permutation_invariant_and_bounded() {
    runner()
        .run(
            &(
                proptest::collection::vec(counts_strategy(), 1..20),
                any::<u64>(),
            ),
            |(vectors, seed)| {
                let mean = user_feature_means(&vectors).unwrap();
                // Shuffle deterministically from the seed.
                let mut shuffled = vectors.clone();
                let mut state = seed | 1;
                for i in (1..shuffled.len()).rev() {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    shuffled.swap(i, (state % (i as u64 + 1)) as usize);
                }
                let mean_shuffled = user_feature_means(&shuffled).unwrap();
                prop_assert_eq!(mean, mean_shuffled);

                for f in FeatureId::ALL {
                    let lo = vectors.iter().map(|v| v.get(f)).min().unwrap();
                    let hi = vectors.iter().map(|v| v.get(f)).max().unwrap();
                    prop_assert!(mean.get(f) >= f64::from(lo));
                    prop_assert!(mean.get(f) <= f64::from(hi));
                }
                Ok(())
            },
        )
        .unwrap();
}

// ----------------------------------------------------------- personality

fn vector_strategy() -> impl Strategy<Value = FeatureVector> {
    proptest::collection::vec((0u32..2_000, 1u32..9), FeatureId::COUNT).prop_map(|cells| {
        let mut v = FeatureVector::default();
        for (f, (num, den)) in FeatureId::ALL.into_iter().zip(cells) {
            v.set(f, f64::from(num) / f64::from(den));
        }
        v
    })
}

#[test]
fn personality_identical_users_all_score_balanced() {
    let matrix = SignMatrix::builtin();
    runner()
        .run(&(vector_strategy(), 1usize..60), |(v, population)| {
            let baseline = corpus_baseline(&vec![v; population]).unwrap();
            let scores = trait_scores(&v, &baseline, &matrix);
            prop_assert_eq!(scores.values(), [0; 5]);
            prop_assert_eq!(to_labels(&scores).to_string(), "ooooo");
            Ok(())
        })
        .unwrap();
}

#[test]
fn personality_zeroed_column_forces_balanced_label() {
    runner()
        .run(
            &(vector_strategy(), vector_strategy(), 0usize..5),
            |(user, base, which)| {
                let trait_id = TraitId::ALL[which];
                let matrix = SignMatrix::builtin().with_zeroed_column(trait_id);
                let baseline = CorpusBaseline {
                    means: base,
                    population: 1,
                };
                let scores = trait_scores(&user, &baseline, &matrix);
                prop_assert_eq!(scores.get(trait_id), 0);
                prop_assert_eq!(to_labels(&scores).label(trait_id), Label::Balanced);
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn personality_scores_are_monotone_in_positive_features() {
    let matrix = SignMatrix::builtin();
    let positive_pairs: Vec<(FeatureId, TraitId)> = FeatureId::ALL
        .into_iter()
        .flat_map(|f| TraitId::ALL.into_iter().map(move |t| (f, t)))
        .filter(|&(f, t)| matrix.sign(f, t) == 1)
        .collect();
    runner()
        .run(
            &(vector_strategy(), vector_strategy(), 0usize..positive_pairs.len()),
            |(user, base, pick)| {
                let (feature, trait_id) = positive_pairs[pick];
                let baseline = CorpusBaseline {
                    means: base,
                    population: 1,
                };
                let mut below = user;
                below.set(feature, baseline.means.get(feature) - 1.0);
                let mut above = user;
                above.set(feature, baseline.means.get(feature) + 1.0);
                let score_below = trait_scores(&below, &baseline, &matrix).get(trait_id);
                let score_above = trait_scores(&above, &baseline, &matrix).get(trait_id);
                prop_assert!(score_above >= score_below);
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn personality_scores_depend_only_on_the_exceedance_set() {
    let matrix = SignMatrix::builtin();
    runner()
        .run(&(vector_strategy(), vector_strategy()), |(user, base)| {
            let baseline = CorpusBaseline {
                means: base,
                population: 1,
            };
            let scores = trait_scores(&user, &baseline, &matrix);

            let exceedance: Vec<FeatureId> = FeatureId::ALL
                .into_iter()
                .filter(|&f| user.get(f) > baseline.means.get(f))
                .collect();

            // Canonical reconstruction with the same exceedance set.
            let mut canon_user = FeatureVector::default();
            for &f in &exceedance {
                canon_user.set(f, 1.0);
            }
            let canon_baseline = CorpusBaseline {
                means: FeatureVector::default(),
                population: 1,
            };
            let canon_scores = trait_scores(&canon_user, &canon_baseline, &matrix);
            prop_assert_eq!(scores, canon_scores);

            // Brute-force re-evaluation: sum matrix entries over the set.
            for t in TraitId::ALL {
                let brute: i32 = exceedance
                    .iter()
                    .map(|&f| i32::from(matrix.sign(f, t)))
                    .sum();
                prop_assert_eq!(scores.get(t), brute);
            }
            prop_assert_eq!(to_labels(&scores), to_labels(&canon_scores));
            Ok(())
        })
        .unwrap();
}

#[test]
fn personality_score_magnitude_is_bounded_by_column_support() {
    let matrix = SignMatrix::builtin();
    runner()
        .run(&(vector_strategy(), vector_strategy()), |(user, base)| {
            let baseline = CorpusBaseline {
                means: base,
                population: 1,
            };
            let scores = trait_scores(&user, &baseline, &matrix);
            for t in TraitId::ALL {
                prop_assert!(
                    scores.get(t).unsigned_abs() as usize <= matrix.nonzero_in_column(t)
                );
            }
            Ok(())
        })
        .unwrap();
}

// ------------------------------------------------------------------ stats

fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0i32..25, 1..12)
        .prop_map(|v| v.into_iter().map(f64::from).collect())
}

#[test]
fn stats_mann_whitney_symmetry_and_u_sum() {
    runner()
        .run(
            &(sample_strategy(), sample_strategy(), any::<u64>()),
            |(a, b, seed)| {
                let ab = mann_whitney_u(&a, &b).unwrap();
                let ba = mann_whitney_u(&b, &a).unwrap();
                prop_assert_eq!(ab.p_value, ba.p_value);
                prop_assert_eq!(ab.statistic + ba.statistic, (a.len() * b.len()) as f64);

                // Permuting elements within a sample changes nothing.
                let mut shuffled = a.clone();
                let mut state = seed | 1;
                for i in (1..shuffled.len()).rev() {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    shuffled.swap(i, (state % (i as u64 + 1)) as usize);
                }
                let shuffled_result = mann_whitney_u(&shuffled, &b).unwrap();
                prop_assert_eq!(ab.statistic, shuffled_result.statistic);
                prop_assert_eq!(ab.p_value, shuffled_result.p_value);
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn stats_mann_whitney_is_shift_invariant() {
    runner()
        .run(
            &(sample_strategy(), sample_strategy(), -50i32..50),
            |(a, b, shift)| {
                let base = mann_whitney_u(&a, &b).unwrap();
                let sa: Vec<f64> = a.iter().map(|v| v + f64::from(shift)).collect();
                let sb: Vec<f64> = b.iter().map(|v| v + f64::from(shift)).collect();
                let shifted = mann_whitney_u(&sa, &sb).unwrap();
                prop_assert_eq!(base.statistic, shifted.statistic);
                prop_assert_eq!(base.p_value, shifted.p_value);
                Ok(())
            },
        )
        .unwrap();
}

fn correlated_pair_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    proptest::collection::vec((0i32..50, 0i32..50), 2..20)
        .prop_map(|pairs| {
            let (x, y): (Vec<i32>, Vec<i32>) = pairs.into_iter().unzip();
            (
                x.into_iter().map(f64::from).collect(),
                y.into_iter().map(f64::from).collect(),
            )
        })
        .prop_filter("non-constant inputs", |(x, y): &(Vec<f64>, Vec<f64>)| {
            x.iter().any(|v| *v != x[0]) && y.iter().any(|v| *v != y[0])
        })
}

#[test]
fn stats_pearson_affine_invariance_and_antisymmetry() {
    runner()
        .run(
            &(correlated_pair_strategy(), 1i32..6, -10i32..10),
            |((x, y), scale, offset)| {
                let r = pearson(&x, &y).unwrap();
                let transformed: Vec<f64> = x
                    .iter()
                    .map(|v| f64::from(scale) * v + f64::from(offset))
                    .collect();
                let r_affine = pearson(&transformed, &y).unwrap();
                prop_assert!((r - r_affine).abs() < 1e-9, "{r} vs {r_affine}");

                let negated: Vec<f64> = y.iter().map(|v| -v).collect();
                let r_neg = pearson(&x, &negated).unwrap();
                prop_assert!((r + r_neg).abs() < 1e-9, "{r} vs {r_neg}");
                Ok(())
            },
        )
        .unwrap();
}

fn group_strategy() -> impl Strategy<Value = GroupScores> {
    proptest::collection::vec(
        (
            proptest::array::uniform5(-4i32..=4),
            1u64..300,
        ),
        2..40,
    )
    .prop_map(|rows| {
        let users = rows
            .into_iter()
            .enumerate()
            .map(|(i, (values, comment_count))| UserScore {
                user_id: format!("u{i:04}"),
                scores: TraitScores::new(values),
                comment_count,
            })
            .collect();
        GroupScores::new(Narrative::Science, users).unwrap()
    })
}

#[test]
fn stats_correlation_matrices_are_symmetric_with_unit_diagonal() {
    runner()
        .run(&group_strategy(), |group| {
            let matrix = trait_correlation_matrix(&group).unwrap();
            prop_assert!(matrix.is_symmetric());
            for i in 0..TraitId::COUNT {
                prop_assert_eq!(matrix.get(i, i), Some(1.0));
                for j in 0..TraitId::COUNT {
                    if let Some(r) = matrix.get(i, j) {
                        prop_assert!((-1.0..=1.0).contains(&r));
                    }
                }
            }
            // Activity correlations exist (or are flagged NA) per trait.
            let activity = activity_trait_correlation(&group).unwrap();
            for r in activity.into_iter().flatten() {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
            Ok(())
        })
        .unwrap();
}

fn triangle_strategy() -> impl Strategy<Value = CorrMatrix> {
    proptest::collection::vec(-100i32..=100, 10).prop_map(|tri| {
        let mut values = [[0.0; 5]; 5];
        let mut k = 0;
        for i in 0..5 {
            values[i][i] = 1.0;
            for j in (i + 1)..5 {
                values[i][j] = f64::from(tri[k]) / 100.0;
                values[j][i] = values[i][j];
                k += 1;
            }
        }
        CorrMatrix::from_complete(values).unwrap()
    })
}

#[test]
fn stats_mantel_is_deterministic_in_its_seed() {
    runner()
        .run(
            &(triangle_strategy(), triangle_strategy(), 10u32..400, any::<u64>()),
            |(m1, m2, replicates, seed)| {
                match (
                    mantel(&m1, &m2, replicates, seed),
                    mantel(&m1, &m2, replicates, seed),
                ) {
                    (Ok(a), Ok(b)) => {
                        prop_assert_eq!(a, b);
                    }
                    (Err(_), Err(_)) => {}
                    (a, b) => prop_assert!(false, "diverged: {a:?} vs {b:?}"),
                }
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn stats_mantel_null_p_values_are_near_uniform() {
    // 500 fresh null trials with a different seed than criterion C6.
    let fraction = crate::null_mantel_small_p_fraction(777, 500);
    assert!(
        (0.02..=0.09).contains(&fraction),
        "null p<0.05 fraction {fraction}"
    );
}

#[test]
fn stats_ranking_percentages_sum_to_one_hundred() {
    runner()
        .run(&group_strategy(), |group| {
            let ranking = pm_ranking(&group);
            let total: f64 = ranking.iter().map(|r| r.percent).sum();
            prop_assert!((total - 100.0).abs() < 0.01, "total {total}");
            // Sorted by count descending, lexicographic tie-break.
            for pair in ranking.windows(2) {
                prop_assert!(
                    pair[0].count > pair[1].count
                        || (pair[0].count == pair[1].count
                            && pair[0].model.to_string() < pair[1].model.to_string())
                );
            }
            Ok(())
        })
        .unwrap();
}

// ---------------------------------------------------------------- testkit

#[test]
fn testkit_generation_is_bit_deterministic() {
    let matrix = SignMatrix::builtin();
    runner()
        .run(
            &(2u64..8, 5u64..10, 0u8..3, any::<u64>()),
            |(users, comments_lo, model_pick, seed)| {
                let model = ["nynny", "ooooo", "ynyny"][model_pick as usize];
                let spec = SynthSpec {
                    users_per_narrative: users,
                    comments_per_user: comments_lo..=comments_lo + 4,
                    planted_model: model.parse().unwrap(),
                    planted_prevalence: 0.5,
                    seed,
                };
                let dir = tempfile::tempdir().unwrap();
                let a = generate_synthetic_corpus(&spec, &matrix, &dir.path().join("a")).unwrap();
                let b = generate_synthetic_corpus(&spec, &matrix, &dir.path().join("b")).unwrap();
                for (left, right) in [
                    (&a.pages_path, &b.pages_path),
                    (&a.comments_path, &b.comments_path),
                    (&a.likes_path, &b.likes_path),
                ] {
                    prop_assert_eq!(std::fs::read(left).unwrap(), std::fs::read(right).unwrap());
                }
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn testkit_generated_users_are_all_eligible() {
    let matrix = SignMatrix::builtin();
    runner()
        .run(&(2u64..8, any::<u64>()), |(users, seed)| {
            let spec = SynthSpec {
                users_per_narrative: users,
                comments_per_user: 6..=12,
                planted_model: "nynny".parse().unwrap(),
                planted_prevalence: 0.4,
                seed,
            };
            let dir = tempfile::tempdir().unwrap();
            let outcome = generate_synthetic_corpus(&spec, &matrix, dir.path()).unwrap();
            let snapshot = corpus::load_corpus(
                &outcome.pages_path,
                &outcome.comments_path,
                &outcome.likes_path,
                &corpus::LoadOptions::default(),
            )
            .unwrap();
            let eligible = corpus::eligible_users(&snapshot, *spec.comments_per_user.start());
            prop_assert_eq!(eligible.science.len() as u64, users);
            prop_assert_eq!(eligible.conspiracy.len() as u64, users);
            Ok(())
        })
        .unwrap();
}

#[test]
fn testkit_oracles_agree_with_main_paths() {
    runner()
        .run(
            &(
                proptest::collection::vec(0u8..200, 2..10),
                triangle_strategy(),
                triangle_strategy(),
                any::<u64>(),
            ),
            |(pool, m1, m2, seed)| {
                // Tie-free small samples: dedupe then split.
                let mut values: Vec<f64> = pool.iter().map(|v| f64::from(*v)).collect();
                values.sort_by(|x, y| x.partial_cmp(y).unwrap());
                values.dedup();
                if values.len() >= 2 {
                    let split = values.len() / 2;
                    let (a, b) = values.split_at(split);
                    let oracle = exact_mann_whitney(a, b).unwrap();
                    let main = echofive::stats::mann_whitney_u_with(
                        a,
                        b,
                        echofive::stats::MannWhitneyMethod::Exact,
                    )
                    .unwrap();
                    prop_assert_eq!(oracle.p_value, main.p_value);
                    prop_assert_eq!(oracle.statistic, main.statistic);
                }

                let exhaustive = exhaustive_mantel(&m1, &m2);
                let mc = mantel(&m1, &m2, 1999, seed);
                match (exhaustive, mc) {
                    (Ok(ex), Ok(mc)) => {
                        // Criterion C5 checks the pinned 3-SE bound over
                        // its 50-pair battery; a hundred simultaneous
                        // comparisons here need the family-wise 4-SE bound
                        // (a correct pair still lands past 3 SE about once
                        // in four hundred draws).
                        let tolerance =
                            4.0 * (ex.p_value * (1.0 - ex.p_value) / 1999.0).sqrt();
                        prop_assert!(
                            (mc.p_value - ex.p_value).abs() <= tolerance.max(2.0 / 2000.0),
                            "mc {} vs exhaustive {}",
                            mc.p_value,
                            ex.p_value
                        );
                    }
                    (Err(_), Err(_)) => {}
                    (ex, mc) => prop_assert!(false, "diverged: {ex:?} vs {mc:?}"),
                }
                Ok(())
            },
        )
        .unwrap();
}

// --------------------------------------------------------------- pipeline

#[test]
fn pipeline_reruns_are_identical_and_manifest_reproduces() {
    let matrix = SignMatrix::builtin();
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    runner
        .run(&(2u64..6, any::<u64>(), any::<u64>()), |(users, synth_seed, seed)| {
            let dir = tempfile::tempdir().unwrap();
            let spec = SynthSpec {
                users_per_narrative: users,
                comments_per_user: 5..=9,
                planted_model: "nynny".parse().unwrap(),
                planted_prevalence: 0.5,
                seed: synth_seed,
            };
            let outcome =
                generate_synthetic_corpus(&spec, &matrix, &dir.path().join("corpus")).unwrap();
            let mut config = PipelineConfig::new(
                outcome.pages_path,
                outcome.comments_path,
                outcome.likes_path,
                dir.path().join("out1"),
            );
            config.min_comments = 5;
            config.mantel_replicates = 99;
            config.seed = seed;

            let bundle = run_pipeline(&config).unwrap();
            let first = std::fs::read(config.out_dir.join("analysis.json")).unwrap();

            // Stage ordering: ingest < baseline < scoring < stats.
            let order: Vec<&str> = bundle.stages.iter().map(|s| s.stage).collect();
            let position = |name: &str| order.iter().position(|s| *s == name).unwrap();
            prop_assert!(position("ingest") < position("baseline"));
            prop_assert!(position("baseline") < position("scoring"));
            prop_assert!(position("scoring") < position("stats"));

            // Same config, fresh directory: identical bytes.
            let mut rerun = config.clone();
            rerun.out_dir = dir.path().join("out2");
            run_pipeline(&rerun).unwrap();
            let second = std::fs::read(rerun.out_dir.join("analysis.json")).unwrap();
            prop_assert_eq!(&first, &second);

            // The manifest alone reproduces the bundle.
            let mut from_manifest =
                pipeline::read_manifest_config(&config.out_dir.join("run_manifest.json"))
                    .unwrap();
            from_manifest.out_dir = dir.path().join("out3");
            run_pipeline(&from_manifest).unwrap();
            let third = std::fs::read(from_manifest.out_dir.join("analysis.json")).unwrap();
            prop_assert_eq!(&first, &third);
            Ok(())
        })
        .unwrap();
}
