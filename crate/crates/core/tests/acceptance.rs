//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `cargo test --test acceptance -- --nocapture` to see
//! them). Oracles here are independent re-implementations: path scores are
//! re-summed straight off the documented weight layout and partition
//! functions, marginals, and best paths come from explicit enumeration over
//! all 3^T label sequences.

use std::collections::HashSet;
use std::process::Command;

use holdercrf::corpus::{
    document_gold_spans, HolderLabel, HolderSpan, Sentence, Subjectivity, Token, NO_ENTITY,
};
use holdercrf::crf::{CrfModel, FeatureIndex, LabeledSequence, TrainConfig, TrainMeta};
use holdercrf::eval::f_measure;
use holdercrf::features::{AblationGroup, FeatureVector};
use holdercrf::lexicons::{ClueStrength, Polarity, PosReductionMap, ReducedPos, SubjectivityLexicon};
use holdercrf::patterns::{parse_pattern, validate_patterns, extract_holders_by_pattern, Pattern};
use holdercrf::pipeline::{
    fit_crf, run_ablation, run_experiment, Approach, ExperimentReport, PipelineConfig, Resources,
};
use holdercrf::rng::SplitMix64;
use holdercrf::subjectivity::{classify_sentence, ClueCounts};
use holdercrf::synth;
use holdercrf::Document;

// ---------------------------------------------------------------------------
// Criterion 1: published precision/recall pairs reproduce the published
// F-measures through the harmonic-mean formula, within +/- 0.02.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_1_metric_arithmetic_matches_published_tables() {
    let rows: [(f64, f64, f64); 7] = [
        (29.93, 30.44, 30.18),
        (66.67, 29.74, 41.13),
        (84.14, 38.73, 53.04),
        (84.83, 39.05, 53.48),
        (70.45, 31.79, 43.82),
        (86.0, 39.05, 53.71),
        (85.52, 39.49, 54.03),
    ];
    for (p, r, f_published) in rows {
        let f = f_measure(p, r);
        assert!(
            (f - f_published).abs() <= 0.02,
            "P={p} R={r}: computed {f:.4}, published {f_published}"
        );
    }
    println!("acceptance 1 (metric arithmetic, 7 rows, tol 0.02): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 2: lattice quantities against brute-force enumeration on >= 200
// random models.
// ---------------------------------------------------------------------------

/// Independent path score: re-summed directly off the serialized weight
/// layout (emissions at fid*3+label, transitions after them, START row 3).
fn oracle_score(model: &CrfModel, x: &[FeatureVector], labels: &[usize]) -> f64 {
    let w = model.weights();
    let f = model.index().num_feature_strings();
    let mut total = 0.0;
    let mut prev = 3usize;
    for (t, fv) in x.iter().enumerate() {
        for feat in &fv.features {
            if let Some(fid) = model.index().feature_id(feat) {
                total += w[fid as usize * 3 + labels[t]];
            }
        }
        total += w[3 * f + prev * 3 + labels[t]];
        prev = labels[t];
    }
    total
}

fn all_paths(t_len: usize) -> Vec<Vec<usize>> {
    let mut paths = vec![vec![]];
    for _ in 0..t_len {
        paths = paths
            .into_iter()
            .flat_map(|p| {
                (0..3).map(move |l| {
                    let mut q = p.clone();
                    q.push(l);
                    q
                })
            })
            .collect();
    }
    paths
}

fn random_model(rng: &mut SplitMix64, max_features: usize) -> CrfModel {
    let n = 1 + rng.below(max_features);
    let names: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
    let index = FeatureIndex::from_names(names).unwrap();
    let weights = (0..index.num_parameters())
        .map(|_| rng.range_f64(-2.0, 2.0))
        .collect();
    CrfModel::from_parts(index, weights, TrainMeta::default()).unwrap()
}

fn random_input(rng: &mut SplitMix64, n_features: usize, t_len: usize) -> Vec<FeatureVector> {
    (0..t_len)
        .map(|t| FeatureVector {
            position: t,
            features: (0..n_features)
                .filter(|_| rng.next_f64() < 0.4)
                .map(|i| format!("f{i}"))
                .collect(),
        })
        .collect()
}

#[test]
fn acceptance_2_crf_enumeration_oracle() {
    let mut rng = SplitMix64::new(0xACCE97);
    for case in 0..220 {
        let model = random_model(&mut rng, 20);
        let n_features = model.index().num_feature_strings();
        let t_len = 1 + rng.below(5);
        let x = random_input(&mut rng, n_features, t_len);
        let paths = all_paths(t_len);
        let scores: Vec<f64> = paths.iter().map(|p| oracle_score(&model, &x, p)).collect();

        // Partition function.
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let enum_log_z = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
        let log_z = model.log_partition(&x).unwrap();
        assert!(
            (log_z - enum_log_z).abs() <= 1e-9 * enum_log_z.abs().max(1.0),
            "case {case}: logZ {log_z} vs {enum_log_z}"
        );

        // Position and edge marginals.
        let m = model.marginals(&x).unwrap();
        for t in 0..t_len {
            for j in 0..3 {
                let expected: f64 = paths
                    .iter()
                    .zip(&scores)
                    .filter(|(p, _)| p[t] == j)
                    .map(|(_, s)| (s - enum_log_z).exp())
                    .sum();
                assert!(
                    (m.positions[t][j] - expected).abs() < 1e-9,
                    "case {case}: marginal t={t} j={j}"
                );
            }
        }
        for t in 0..t_len.saturating_sub(1) {
            for i in 0..3 {
                for j in 0..3 {
                    let expected: f64 = paths
                        .iter()
                        .zip(&scores)
                        .filter(|(p, _)| p[t] == i && p[t + 1] == j)
                        .map(|(_, s)| (s - enum_log_z).exp())
                        .sum();
                    assert!(
                        (m.edges[t][i][j] - expected).abs() < 1e-9,
                        "case {case}: edge t={t} {i}->{j}"
                    );
                }
            }
        }

        // Viterbi attains the enumerated maximum.
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let decoded = model.viterbi_raw(&x).unwrap();
        let decoded_ids: Vec<usize> = decoded.iter().map(|l| l.index()).collect();
        let decoded_score = oracle_score(&model, &x, &decoded_ids);
        assert!(
            (decoded_score - best).abs() < 1e-9,
            "case {case}: viterbi {decoded_score} vs max {best}"
        );
    }
    println!("acceptance 2 (enumeration oracle, 220 random models, tol 1e-9): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 3: analytic gradient vs central finite differences.
// ---------------------------------------------------------------------------

fn fix_bio(labels: &mut [HolderLabel]) {
    let mut prev = HolderLabel::NonHolder;
    for label in labels.iter_mut() {
        if *label == HolderLabel::IHolder && prev == HolderLabel::NonHolder {
            *label = HolderLabel::BHolder;
        }
        prev = *label;
    }
}

#[test]
fn acceptance_3_gradient_matches_finite_differences() {
    let mut rng = SplitMix64::new(0x6AD0);
    let h = 1e-5;
    for case in 0..22 {
        let n_features = 2 + rng.below(6);
        let batch: Vec<LabeledSequence> = (0..2)
            .map(|_| {
                let t_len = 1 + rng.below(4);
                let features = random_input(&mut rng, n_features, t_len);
                let mut labels: Vec<HolderLabel> = (0..t_len)
                    .map(|_| HolderLabel::from_index(rng.below(3)))
                    .collect();
                fix_bio(&mut labels);
                LabeledSequence { features, labels }
            })
            .collect();
        // Freeze an index over the batch, then evaluate at random weights.
        let zero = holdercrf::crf::train(
            &batch,
            &TrainConfig {
                max_iters: 0,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        let k = zero.index().num_parameters();
        let weights: Vec<f64> = (0..k).map(|_| rng.range_f64(-1.0, 1.0)).collect();
        let model =
            CrfModel::from_parts(zero.index().clone(), weights.clone(), TrainMeta::default())
                .unwrap();
        let sigma2 = 10.0;
        let (_, grad) = model.nll_and_gradient(&batch, sigma2).unwrap();
        let objective_at = |w: Vec<f64>| {
            CrfModel::from_parts(zero.index().clone(), w, TrainMeta::default())
                .unwrap()
                .nll_and_gradient(&batch, sigma2)
                .unwrap()
                .0
        };
        for coord in 0..k {
            let mut plus = weights.clone();
            plus[coord] += h;
            let mut minus = weights.clone();
            minus[coord] -= h;
            let numeric = (objective_at(plus) - objective_at(minus)) / (2.0 * h);
            let scale = grad[coord].abs().max(numeric.abs()).max(1.0);
            let rel = (grad[coord] - numeric).abs() / scale;
            assert!(
                rel < 1e-5,
                "case {case} coord {coord}: analytic {} vs numeric {numeric} (rel {rel:.2e})",
                grad[coord]
            );
        }
    }
    println!("acceptance 3 (gradient vs central differences, 22 sets, rel < 1e-5): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 4: learnability on a separable planted-cue corpus.
// ---------------------------------------------------------------------------

fn resources_of(corpus: &synth::SynthCorpus) -> Resources {
    Resources {
        subjectivity: corpus.subjectivity(),
        semantic: corpus.semantic(),
        pos_rules: corpus.pos_rules(),
        patterns: corpus.patterns(),
    }
}

fn synth_cfg(approach: Approach) -> PipelineConfig {
    PipelineConfig {
        approach,
        train: TrainConfig {
            max_iters: 60,
            tol: 1e-5,
            ..TrainConfig::default()
        },
        min_pattern_frequency: 3,
        min_pattern_precision: 0.8,
        ..PipelineConfig::default()
    }
}

#[test]
fn acceptance_4_learnability_on_separable_corpus() {
    let corpus = synth::lexical_cue_corpus(4, 12, 18);
    let total_sentences: usize = corpus.documents.iter().map(|d| d.sentences.len()).sum();
    assert!(total_sentences >= 200);
    let resources = resources_of(&corpus);
    let cfg = synth_cfg(Approach::CrfWithPattern);

    // Token accuracy on the training data itself.
    let predictor = fit_crf(
        &corpus.documents,
        None,
        &resources,
        &holdercrf::pipeline::approach_features(Approach::CrfWithPattern, &cfg.features),
        &cfg,
        true,
    )
    .unwrap();
    let mut correct = 0usize;
    let mut total = 0usize;
    for doc in &corpus.documents {
        let tagged = predictor.tag_document(doc);
        for (sentence, labels) in doc.sentences.iter().zip(&tagged) {
            for (token, label) in sentence.tokens.iter().zip(labels) {
                total += 1;
                if token.gold == *label {
                    correct += 1;
                }
            }
        }
    }
    let accuracy = correct as f64 / total as f64;
    assert!(
        accuracy >= 0.99,
        "training token accuracy {accuracy:.4} ({correct}/{total})"
    );

    // Exact-match F under 3-fold cross-validation.
    let report = run_experiment(&cfg, &corpus.documents, None, &resources, true, None).unwrap();
    let ExperimentReport::CrossValidated(cv) = &report else {
        panic!("expected cross-validated report");
    };
    assert!(
        cv.mean_f >= 0.95,
        "cross-validated mean F {:.4} (folds {:?})",
        cv.mean_f,
        cv.folds.iter().map(|f| f.f_measure).collect::<Vec<_>>()
    );
    println!(
        "acceptance 4 (learnability: accuracy {:.2}% >= 99%, mean F {:.2} >= 95): PASS",
        accuracy * 100.0,
        cv.mean_f * 100.0
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: subjectivity rule truth table, exhaustive over window counts.
// ---------------------------------------------------------------------------

fn clue_sentence(strong: usize, weak: usize) -> Sentence {
    let mut tokens = vec![Token {
        surface: "x".into(),
        lemma: "x".into(),
        pos_fine: "X".into(),
        bpc: "O".into(),
        ne: NO_ENTITY.into(),
        gold: HolderLabel::NonHolder,
    }];
    for _ in 0..strong {
        let mut t = tokens[0].clone();
        t.lemma = "s".into();
        tokens.push(t);
    }
    for _ in 0..weak {
        let mut t = tokens[0].clone();
        t.lemma = "w".into();
        tokens.push(t);
    }
    Sentence::new(tokens)
}

#[test]
fn acceptance_5_subjectivity_rule_truth_table() {
    let mut lex = SubjectivityLexicon::new();
    lex.insert("s", ClueStrength::Strong, Polarity::Negative);
    lex.insert("w", ClueStrength::Weak, Polarity::Positive);
    let mut checked = 0usize;
    for ps in 0..=4usize {
        for pw in 0..=4usize {
            for cs in 0..=4usize {
                for cw in 0..=4usize {
                    for ns in 0..=4usize {
                        for nw in 0..=4usize {
                            let prev = clue_sentence(ps, pw);
                            let cur = clue_sentence(cs, cw);
                            let next = clue_sentence(ns, nw);
                            let got = classify_sentence(Some(&prev), &cur, Some(&next), &lex);

                            // Independent statement of the two rules.
                            let window = ClueCounts {
                                strong: ps + cs + ns,
                                weak: pw + cw + nw,
                            };
                            let subjective = cs >= 2;
                            let objective = window.strong == 0 && window.weak <= 1;
                            assert!(!(subjective && objective), "rules co-fired");
                            let expected = if subjective {
                                Subjectivity::Subjective
                            } else if objective {
                                Subjectivity::Objective
                            } else {
                                Subjectivity::Unlabeled
                            };
                            assert_eq!(
                                got, expected,
                                "ps={ps} pw={pw} cs={cs} cw={cw} ns={ns} nw={nw}"
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert_eq!(checked, 5usize.pow(6));
    println!("acceptance 5 (subjectivity truth table, {checked} windows): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 6: pattern validator at threshold boundaries.
// ---------------------------------------------------------------------------

fn cue_doc(id: &str, cue: &str, total: usize, correct: usize) -> Document {
    // `total` sentences "cue name", the first `correct` of them gold-marked.
    let sentences = (0..total)
        .map(|i| {
            Sentence::new(vec![
                Token {
                    surface: cue.into(),
                    lemma: cue.into(),
                    pos_fine: "V_PAST".into(),
                    bpc: "O".into(),
                    ne: NO_ENTITY.into(),
                    gold: HolderLabel::NonHolder,
                },
                Token {
                    surface: format!("n{i}"),
                    lemma: format!("n{i}"),
                    pos_fine: "N_PROP".into(),
                    bpc: "O".into(),
                    ne: "Person".into(),
                    gold: if i < correct {
                        HolderLabel::BHolder
                    } else {
                        HolderLabel::NonHolder
                    },
                },
            ])
        })
        .collect();
    Document {
        id: id.into(),
        sentences,
    }
}

#[test]
fn acceptance_6_pattern_validator_threshold_boundaries() {
    let mut pos_map = PosReductionMap::new();
    pos_map.push_rule("V_*", ReducedPos::Verb);
    pos_map.push_rule("N_*", ReducedPos::Noun);
    let candidates: Vec<Pattern> = vec![
        parse_pattern("freq4", "\"cuefour\" HOLDER").unwrap(),
        parse_pattern("freq5", "\"cuefive\" HOLDER").unwrap(),
        parse_pattern("prec79", "\"cueseventynine\" HOLDER").unwrap(),
        parse_pattern("prec80", "\"cueeighty\" HOLDER").unwrap(),
    ];
    // Frequency corpus: 4 vs 5 occurrences straddle the threshold; the
    // precision cues occur plentifully.
    let unlabeled = vec![
        cue_doc("u1", "cuefour", 4, 0),
        cue_doc("u2", "cuefive", 5, 0),
        cue_doc("u3", "cueseventynine", 20, 0),
        cue_doc("u4", "cueeighty", 20, 0),
    ];
    // Annotated corpus: 79/100 vs 80/100 correct captures straddle 0.8; the
    // frequency cues extract perfectly.
    let annotated = vec![
        cue_doc("a1", "cuefour", 3, 3),
        cue_doc("a2", "cuefive", 3, 3),
        cue_doc("a3", "cueseventynine", 100, 79),
        cue_doc("a4", "cueeighty", 100, 80),
    ];
    let (retained, stats) =
        validate_patterns(&candidates, &unlabeled, &annotated, 5, 0.8, &pos_map);
    let ids: Vec<&str> = retained.iter().map(|p| p.id.as_str()).collect();
    assert_eq!(ids, vec!["freq5", "prec80"], "stats: {stats:?}");
    let by_id = |id: &str| stats.iter().find(|s| s.pattern_id == id).unwrap();
    assert_eq!(by_id("freq4").frequency, 4);
    assert_eq!(by_id("freq5").frequency, 5);
    assert!((by_id("prec79").precision - 0.79).abs() < 1e-12);
    assert!((by_id("prec80").precision - 0.80).abs() < 1e-12);

    // Monotonicity: raising either threshold never grows the retained set.
    let mut previous: Option<HashSet<String>> = None;
    for (fmin, pmin) in [(1, 0.0), (4, 0.5), (5, 0.8), (6, 0.8), (6, 0.81), (21, 1.0)] {
        let (retained, _) =
            validate_patterns(&candidates, &unlabeled, &annotated, fmin, pmin, &pos_map);
        let ids: HashSet<String> = retained.into_iter().map(|p| p.id).collect();
        if let Some(prev) = &previous {
            assert!(ids.is_subset(prev), "thresholds ({fmin}, {pmin})");
        }
        previous = Some(ids);
    }
    println!("acceptance 6 (validator boundaries 4|5 and 0.79|0.80, monotone): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 7: the three retention rules on one constructed document.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_7_retention_rules_exact_span_set() {
    let mut pos_map = PosReductionMap::new();
    pos_map.push_rule("V_*", ReducedPos::Verb);
    pos_map.push_rule("N_*", ReducedPos::Noun);
    let pattern = parse_pattern("p1", "\"qal\" HOLDER").unwrap();
    let mk = |name: &str, ne: &str, subjectivity: Subjectivity| {
        let mut s = Sentence::new(vec![
            Token {
                surface: "qal".into(),
                lemma: "qal".into(),
                pos_fine: "V_PAST".into(),
                bpc: "O".into(),
                ne: NO_ENTITY.into(),
                gold: HolderLabel::NonHolder,
            },
            Token {
                surface: name.into(),
                lemma: name.into(),
                pos_fine: "N_PROP".into(),
                bpc: "O".into(),
                ne: ne.into(),
                gold: HolderLabel::NonHolder,
            },
        ]);
        s.subjectivity = Some(subjectivity);
        s
    };
    let doc = Document {
        id: "d".into(),
        sentences: vec![
            mk("obj", "Person", Subjectivity::Objective), // rule 1: dropped
            mk("subj", NO_ENTITY, Subjectivity::Subjective), // rule 2: kept
            mk("unl_ne", "Person", Subjectivity::Unlabeled), // rule 3: kept
            mk("unl_plain", NO_ENTITY, Subjectivity::Unlabeled), // rule 3: dropped
        ],
    };
    let holders = extract_holders_by_pattern(&doc, &[pattern], &pos_map).unwrap();
    assert_eq!(
        holders,
        vec![HolderSpan::new(1, 1, 1), HolderSpan::new(2, 1, 1)]
    );
    println!("acceptance 7 (retention rules yield the exact expected spans): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 8: qualitative replication of the experimental ordering.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_8_approach_ordering_and_relative_deltas() {
    let corpus = synth::ne_cue_corpus(11, 12, 16);
    let resources = resources_of(&corpus);

    let f_of = |approach: Approach| -> f64 {
        let cfg = synth_cfg(approach);
        run_experiment(&cfg, &corpus.documents, None, &resources, true, None)
            .unwrap()
            .headline_f()
    };
    let f_patterns = f_of(Approach::PatternsOnly);
    let f_crf = f_of(Approach::CrfNoPattern);
    let f_integration = f_of(Approach::CrfWithPattern);

    assert!(
        f_integration + 1e-9 >= f_crf,
        "integration {f_integration:.4} < crf {f_crf:.4}"
    );
    assert!(
        f_crf + 1e-9 >= f_patterns,
        "crf {f_crf:.4} < patterns {f_patterns:.4}"
    );

    // The pattern-feature delta must be small next to removing NE features.
    let cfg = synth_cfg(Approach::CrfWithPattern);
    let rows = run_ablation(
        &cfg,
        &corpus.documents,
        None,
        &resources,
        2,
        &[AblationGroup::AllNe],
    )
    .unwrap();
    let f_base = rows[0].report.f_measure;
    let f_no_ne = rows[1].report.f_measure;
    let ne_delta = f_base - f_no_ne;
    let pattern_delta = f_integration - f_crf;
    assert!(ne_delta > 0.0, "NE ablation did not hurt ({ne_delta:.4})");
    assert!(
        ne_delta >= pattern_delta,
        "NE delta {ne_delta:.4} < pattern delta {pattern_delta:.4}"
    );
    println!(
        "acceptance 8 (ordering: patterns {:.2} <= crf {:.2} <= integration {:.2}; \
         pattern delta {:.2} <= NE delta {:.2}): PASS",
        f_patterns * 100.0,
        f_crf * 100.0,
        f_integration * 100.0,
        pattern_delta * 100.0,
        ne_delta * 100.0
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: byte-identical experiment reruns, through the CLI binary.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_9_experiment_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth::lexical_cue_corpus(77, 6, 8);
    let files = corpus.write_files(&dir.path().join("data")).unwrap();
    let config_path = dir.path().join("exp.cfg");
    std::fs::write(
        &config_path,
        format!(
            "approach = crf+patterns\ncorpus = {}\npatterns = {}\n\
             subjectivity_lexicon = {}\nsemantic_lexicon = {}\npos_rules = {}\n\
             folds = 3\nseed = 5\nmax_iters = 40\npattern_min_freq = 3\n",
            files.corpus.display(),
            files.patterns.display(),
            files.subjectivity.display(),
            files.semantic.display(),
            files.pos_rules.display(),
        ),
    )
    .unwrap();

    let run = |tag: &str| -> (Vec<u8>, Vec<Vec<u8>>) {
        let report = dir.path().join(format!("report_{tag}.tsv"));
        let models = dir.path().join(format!("models_{tag}"));
        let out = Command::new(env!("CARGO_BIN_EXE_holdercrf"))
            .arg("experiment")
            .arg("--config")
            .arg(&config_path)
            .arg("--out")
            .arg(&report)
            .arg("--models-out")
            .arg(&models)
            .args(["--format", "tsv"])
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report_bytes = std::fs::read(&report).unwrap();
        let model_bytes: Vec<Vec<u8>> = (1..=3)
            .map(|k| std::fs::read(models.join(format!("fold{k}.crf"))).unwrap())
            .collect();
        (report_bytes, model_bytes)
    };

    let (report_a, models_a) = run("a");
    let (report_b, models_b) = run("b");
    assert_eq!(report_a, report_b, "reports differ between reruns");
    for (k, (a, b)) in models_a.iter().zip(&models_b).enumerate() {
        assert_eq!(a, b, "fold {} model differs between reruns", k + 1);
    }
    assert!(!report_a.is_empty());
    println!("acceptance 9 (byte-identical reports and fold models across reruns): PASS");
}

// ---------------------------------------------------------------------------
// Shared sanity: the synthetic corpora really contain gold holders, so the
// criteria above cannot pass vacuously.
// ---------------------------------------------------------------------------

#[test]
fn synthetic_corpora_are_not_degenerate() {
    for corpus in [
        synth::lexical_cue_corpus(4, 12, 18),
        synth::ne_cue_corpus(11, 12, 16),
    ] {
        let holders: usize = corpus
            .documents
            .iter()
            .map(|d| document_gold_spans(d).len())
            .sum();
        assert!(holders >= 60, "only {holders} gold holders");
    }
}
