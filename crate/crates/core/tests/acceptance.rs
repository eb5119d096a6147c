//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line (written
//! past the test harness capture) and then asserts.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use medtweet::cli::{cmd_train, ConfigArgs, TrainArgs};
use medtweet::corpus::{self, Dataset, Tweet};
use medtweet::eval::{fold_assignment, mi_rank, micro_prf, mutual_information, prf_class, Confusion, Prf};
use medtweet::features::{
    domain_generalize, domain_ngrams, embedding_sum, noncontig_ngrams, sentiment_features, word_ngrams, Extractor,
};
use medtweet::imbalance::undersample;
use medtweet::pipeline::{Classifier, Imbalance};
use medtweet::resources::{EmbeddingTable, ScoredLexicon, TermLexicon};
use medtweet::svm::BinaryProblem;
use medtweet::textprep::{mark_negation, tokenize, Negators, TokenSequence};
use medtweet::{synthetic, FeatureConfig, FeatureVector, PipelineConfig, Resources, Task, TrainParams, TrainedPipeline};

fn report(id: u32, name: &str, failures: &[String], elapsed: Duration, limit: Duration, detail: &str) {
    let mut failures = failures.to_vec();
    if elapsed > limit {
        failures.push(format!("runtime {elapsed:.2?} exceeds {limit:.2?}"));
    }
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{status} criterion {id}: {name} [{elapsed:.2?}] {detail}");
    for f in &failures {
        let _ = writeln!(out, "     - {f}");
    }
    let _ = out.flush();
    assert!(failures.is_empty(), "criterion {id} failed: {failures:?}");
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn repeat_labels(counts: &[(i32, usize)]) -> Vec<i32> {
    counts.iter().flat_map(|&(c, n)| std::iter::repeat_n(c, n)).collect()
}

#[test]
fn criterion_1_adr_baseline_metrics() {
    let gold = repeat_labels(&[(1, 771), (0, 9190)]);
    let pred = vec![1; gold.len()];
    let start = Instant::now();
    let mut f = Vec::new();
    let direct = Prf::from_counts(771, 9190, 0);
    let via_confusion = prf_class(&Confusion::with_classes(&gold, &pred, &[0, 1]).unwrap(), 1);
    for (route, p) in [("counts", direct), ("confusion", via_confusion)] {
        check(&mut f, within(p.precision, 0.077, 0.001), || format!("{route}: P={}", p.precision));
        check(&mut f, within(p.recall, 1.000, 0.001), || format!("{route}: R={}", p.recall));
        check(&mut f, within(p.f, 0.143, 0.001), || format!("{route}: F={}", p.f));
    }
    let elapsed = start.elapsed();
    let detail = format!("P={:.4} R={:.4} F={:.4}", direct.precision, direct.recall, direct.f);
    report(1, "class-1 P/R/F of the all-ADR baseline", &f, elapsed, Duration::from_millis(1), &detail);
}

#[test]
fn criterion_2_intake_baseline_metrics() {
    let gold = repeat_labels(&[(1, 1731), (2, 2697), (3, 3085)]);
    let pred = vec![2; gold.len()];
    let start = Instant::now();
    let mut f = Vec::new();
    let c = Confusion::with_classes(&gold, &pred, &[1, 2, 3]).unwrap();
    let m = micro_prf(&c, &[1, 2]);
    check(&mut f, within(m.precision, 0.359, 0.001), || format!("P={}", m.precision));
    check(&mut f, within(m.recall, 0.609, 0.001), || format!("R={}", m.recall));
    check(&mut f, within(m.f, 0.452, 0.001), || format!("F={}", m.f));
    let elapsed = start.elapsed();
    let detail = format!("P={:.4} R={:.4} F={:.4}", m.precision, m.recall, m.f);
    report(2, "micro P/R/F(1+2) of the all-class-2 baseline", &f, elapsed, Duration::from_millis(1), &detail);
}

#[test]
fn criterion_3_undersampling_arithmetic() {
    let tweets: Vec<Tweet> = repeat_labels(&[(1, 732), (0, 5519)])
        .into_iter()
        .enumerate()
        .map(|(i, y)| Tweet::labeled(format!("t{i}"), y, format!("tweet number {i}")))
        .collect();
    let d = Dataset::new(tweets, [0, 1]).unwrap();
    let start = Instant::now();
    let mut f = Vec::new();
    let mut majority_sets: BTreeSet<Vec<String>> = BTreeSet::new();
    for seed in 0..100u64 {
        let s = undersample(&d, 1, 2.0, seed).unwrap();
        let counts = s.dataset.class_counts().unwrap();
        check(&mut f, s.dataset.len() == 2196, || format!("seed {seed}: {} instances", s.dataset.len()));
        check(&mut f, counts.get(1) == 732 && counts.get(0) == 1464, || format!("seed {seed}: {counts}"));
        let again = undersample(&d, 1, 2.0, seed).unwrap();
        check(&mut f, again.dataset == s.dataset, || format!("seed {seed}: not deterministic"));
        let ids: BTreeSet<&str> = s.dataset.iter().map(|t| t.id.as_str()).collect();
        check(&mut f, ids.len() == 2196, || format!("seed {seed}: repeated instances"));
        check(&mut f, d.iter().filter(|t| t.label == Some(1)).all(|t| ids.contains(t.id.as_str())), || {
            format!("seed {seed}: minority instance dropped")
        });
        let mut majority: Vec<String> =
            s.dataset.iter().filter(|t| t.label == Some(0)).map(|t| t.id.clone()).collect();
        majority.sort();
        majority_sets.insert(majority);
    }
    check(&mut f, majority_sets.len() == 100, || {
        format!("only {} distinct samples over 100 seeds", majority_sets.len())
    });
    let elapsed = start.elapsed();
    report(3, "under-sampling 732/5519 at ratio 2", &f, elapsed, Duration::from_secs(1), "2196 = 732 + 1464 on 100 seeds");
}

#[test]
fn criterion_4_solver_matches_reference() {
    let start = Instant::now();
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_rel = 0.0f64;
    let mut worst_gap = 0.0f64;
    let instances = 240;
    for case in 0..instances {
        let n = rng.gen_range(2..=20);
        let d = rng.gen_range(1..=5);
        let c = [0.01, 0.1, 1.0, 10.0][rng.gen_range(0..4)];
        let w_pos = [1.0, 2.0, 4.0][rng.gen_range(0..3)];
        let w_neg = [1.0, 2.0, 4.0][rng.gen_range(0..3)];
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(-2.0..2.0) })
                    .collect()
            })
            .collect();
        let mut ys: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        ys[0] = 1.0;
        ys[1] = -1.0;
        let costs: Vec<f64> = ys.iter().map(|&y| c * if y > 0.0 { w_pos } else { w_neg }).collect();
        let xs: Vec<FeatureVector> = rows
            .iter()
            .map(|r| FeatureVector::from_pairs(r.iter().enumerate().map(|(i, &v)| (i as u32, v)).collect()))
            .collect();
        let problem = BinaryProblem::new(&xs, ys.clone(), costs.clone(), d).unwrap();
        // Large-C instances can need several thousand sweeps.
        let sol = problem.solve(1e-4, 100_000, case as u64);
        let reference = common::reference_svm(&rows, &ys, &costs);
        let solver_primal = common::primal(&sol.w, &rows, &ys, &costs);
        let rel = (solver_primal - reference.primal).abs() / reference.primal;
        worst_rel = worst_rel.max(rel);
        worst_gap = worst_gap.max(sol.report.gap());
        check(&mut f, rel <= 1e-4, || {
            format!("case {case}: primal {solver_primal} vs reference {} (rel {rel:.2e})", reference.primal)
        });
        check(&mut f, sol.report.converged, || format!("case {case}: not converged after {} sweeps", sol.report.sweeps));
        check(&mut f, sol.report.gap() <= 1e-4, || format!("case {case}: gap {}", sol.report.gap()));
        check(&mut f, (solver_primal - sol.report.primal).abs() <= 1e-9 * (1.0 + solver_primal), || {
            format!("case {case}: reported primal {} differs from {solver_primal}", sol.report.primal)
        });
        check(&mut f, sol.alpha.iter().zip(&costs).all(|(a, u)| *a >= 0.0 && a <= u), || {
            format!("case {case}: box constraint violated")
        });
        check(&mut f, reference.dual <= solver_primal + 1e-9, || format!("case {case}: weak duality against reference"));
    }
    let elapsed = start.elapsed();
    let detail = format!("{instances} instances, worst relative primal error {worst_rel:.2e}, worst gap {worst_gap:.2e}");
    report(4, "dual coordinate descent against a projected-gradient reference", &f, elapsed, Duration::from_secs(30), &detail);
}

const MI_VOCAB: &[&str] = &["pain", "ache", "tylenol", "good", "bad", "sleep", "my", "head", "today", "not"];

fn random_corpus(rng: &mut ChaCha8Rng, n: usize, classes: &[i32]) -> Dataset {
    let tweets = (0..n)
        .map(|i| {
            let len = rng.gen_range(1..=6);
            let text: Vec<&str> = (0..len).map(|_| MI_VOCAB[rng.gen_range(0..MI_VOCAB.len())]).collect();
            Tweet::labeled(format!("m{i}"), classes[rng.gen_range(0..classes.len())], text.join(" "))
        })
        .collect();
    Dataset::new(tweets, classes.iter().copied()).unwrap()
}

#[test]
fn criterion_5_mi_ranking_oracle() {
    let start = Instant::now();
    let mut f = Vec::new();
    let res = Resources::new();
    let cfg = FeatureConfig {
        word_ngram_max: 2,
        ..FeatureConfig::default()
    };
    let extractor = Extractor::new(&cfg, &res).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let corpora = 60;
    for case in 0..corpora {
        let n = rng.gen_range(8..=30);
        let classes: &[i32] = if case % 3 == 2 { &[1, 2, 3] } else { &[0, 1] };
        let d = random_corpus(&mut rng, n, classes);
        let labels = d.labels().unwrap();
        let docs: Vec<BTreeSet<String>> = d
            .iter()
            .map(|t| extractor.named_features(&t.text).into_iter().map(|(n, _)| n).collect())
            .collect();
        let oracle = common::brute_force_mi(&docs, &labels);
        let h_c = common::class_entropy(&labels);
        let ranked = mi_rank(&d, &cfg, &res, 0).unwrap();
        check(&mut f, ranked.len() == oracle.len(), || format!("case {case}: {} vs {} features", ranked.len(), oracle.len()));
        for (name, mi) in &ranked {
            let expected = oracle.get(name).copied().unwrap_or(f64::NAN);
            check(&mut f, within(*mi, expected, 1e-12), || format!("case {case}: {name} {mi} vs {expected}"));
            check(&mut f, *mi >= 0.0 && *mi <= h_c + 1e-12, || format!("case {case}: {name} MI {mi} outside [0, H(C)]"));
        }
        for pair in ranked.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let (oa, ob) = (oracle[&a.0], oracle[&b.0]);
            let ordered = oa >= ob - 1e-12 && !(within(oa, ob, 1e-14) && a.0 > b.0);
            check(&mut f, ordered, || format!("case {case}: {} before {} out of order", a.0, b.0));
        }
    }
    // Anchors: a perfect predictor of a balanced binary class and an independent feature.
    let totals: BTreeMap<i32, usize> = [(0, 4), (1, 4)].into();
    let perfect = mutual_information(&[(1, 4)].into(), &totals);
    let independent = mutual_information(&[(0, 2), (1, 2)].into(), &totals);
    check(&mut f, within(perfect, std::f64::consts::LN_2, 1e-12), || format!("perfect predictor MI {perfect}"));
    check(&mut f, independent.abs() < 1e-12, || format!("independent MI {independent}"));
    let anchor = Dataset::new(
        (0..8)
            .map(|i| Tweet::labeled(format!("a{i}"), i % 2, if i % 2 == 1 { "alpha x" } else { "beta x" }))
            .collect(),
        [0, 1],
    )
    .unwrap();
    let ranked: BTreeMap<String, f64> = mi_rank(&anchor, &FeatureConfig::unigrams(), &res, 0).unwrap().into_iter().collect();
    check(&mut f, within(ranked["alpha"], std::f64::consts::LN_2, 1e-12), || format!("alpha {}", ranked["alpha"]));
    check(&mut f, ranked["x"].abs() < 1e-12, || format!("x {}", ranked["x"]));
    let elapsed = start.elapsed();
    report(5, "MI ranking against brute-force enumeration", &f, elapsed, Duration::from_secs(5), &format!("{corpora} corpora plus anchors"));
}

fn seq(words: &[&str]) -> TokenSequence {
    TokenSequence::from_words(words)
}

fn names(features: &[(String, f64)]) -> BTreeSet<String> {
    features.iter().map(|(n, _)| n.clone()).collect()
}

/// Every feature group of the task presets enabled at once.
fn all_groups() -> FeatureConfig {
    let adr = PipelineConfig::preset("task1-sub1").unwrap().features;
    let intake = PipelineConfig::preset("task2-sub2").unwrap().features;
    FeatureConfig {
        use_negation: true,
        sentiment_lexicons: intake.sentiment_lexicons,
        ..adr
    }
}

/// One config per feature group of `all`, each with only that group on.
fn single_groups(all: &FeatureConfig) -> Vec<(&'static str, FeatureConfig)> {
    let none = FeatureConfig {
        use_negation: all.use_negation,
        ..FeatureConfig::default()
    };
    vec![
        ("negation", none.clone()),
        ("word", FeatureConfig { word_ngram_max: all.word_ngram_max, ..none.clone() }),
        ("noncontig", FeatureConfig { noncontig_ngram_max: all.noncontig_ngram_max, ..none.clone() }),
        ("char", FeatureConfig { char_ngram_max: all.char_ngram_max, ..none.clone() }),
        ("stems", FeatureConfig { use_stems: true, ..none.clone() }),
        ("twitter", FeatureConfig { use_twitter: true, ..none.clone() }),
        ("punctuation", FeatureConfig { use_punctuation: true, ..none.clone() }),
        ("embeddings", FeatureConfig { embedding_tables: all.embedding_tables.clone(), ..none.clone() }),
        ("clusters", FeatureConfig { cluster_maps: all.cluster_maps.clone(), ..none.clone() }),
        (
            "domain",
            FeatureConfig {
                domain_ngram_max: all.domain_ngram_max,
                domain_noncontig_max: all.domain_noncontig_max,
                ..none.clone()
            },
        ),
        ("adr-lexicon", FeatureConfig { use_adr_lexicon_feature: true, ..none.clone() }),
        ("pronouns", FeatureConfig { use_pronoun_lexicon: true, ..none.clone() }),
        ("domain-embeddings", FeatureConfig { domain_embedding_tables: all.domain_embedding_tables.clone(), ..none.clone() }),
        ("domain-clusters", FeatureConfig { domain_cluster_maps: all.domain_cluster_maps.clone(), ..none.clone() }),
        ("sentiment", FeatureConfig { sentiment_lexicons: all.sentiment_lexicons.clone(), ..none }),
    ]
}

#[test]
fn criterion_6_feature_properties() {
    let start = Instant::now();
    let mut f = Vec::new();
    let res = synthetic::resources(6);
    let corpus = synthetic::adr_corpus(120, 3, 0.0, 6);
    let texts: Vec<String> = corpus
        .iter()
        .map(|t| t.text.clone())
        .chain(["NOT sleeping at all :( #fail", "why?? no more pills", "soooo tired"].map(String::from))
        .collect();

    // Binary n-gram values do not depend on repetition counts.
    let all = all_groups();
    let extractor = Extractor::new(&all, &res).unwrap();
    let binary_prefixes = ["nc:", "c:", "s:", "g:", "gnc:", "cl:"];
    let unigram_cfg = FeatureConfig::unigrams();
    let unigrams = Extractor::new(&unigram_cfg, &res).unwrap();
    for text in &texts {
        let doubled = format!("{text} {text}");
        for (name, v) in extractor.named_features(&doubled) {
            let is_binary = binary_prefixes.iter().any(|p| name.starts_with(p)) || !name.contains(':');
            check(&mut f, !is_binary || v == 1.0, || format!("{name} = {v} in {doubled:?}"));
        }
        check(&mut f, unigrams.named_features(text) == unigrams.named_features(&doubled), || {
            format!("unigrams change when {text:?} is repeated")
        });
    }

    // Groups partition the feature names: disjoint, and their union is the full extraction.
    let groups = single_groups(&all);
    let group_extractors: Vec<(&str, Extractor)> =
        groups.iter().map(|(g, cfg)| (*g, Extractor::new(cfg, &res).unwrap())).collect();
    for text in &texts {
        let full = names(&extractor.named_features(text));
        let mut union = BTreeSet::new();
        let mut owner: BTreeMap<String, &str> = BTreeMap::new();
        for (g, e) in &group_extractors {
            for name in names(&e.named_features(text)) {
                // Negation marking is on in every group; its own feature belongs to the negation group.
                if name == "neg:present" && *g != "negation" {
                    continue;
                }
                if let Some(prev) = owner.insert(name.clone(), g) {
                    f.push(format!("{name} produced by both {prev} and {g}"));
                }
                union.insert(name);
            }
        }
        check(&mut f, union == full, || format!("group union differs from full extraction for {text:?}"));
    }

    // With every group off the vector is empty.
    let off = FeatureConfig::default();
    let empty = Extractor::new(&off, &res).unwrap();
    check(&mut f, texts.iter().all(|t| empty.named_features(t).is_empty()), || "disabled groups emit features".into());

    // Without lexicon hits, generalized n-grams equal plain n-grams up to prefix.
    let med = res.medications.as_ref().unwrap();
    let adr = res.adr.as_ref().unwrap();
    for text in ["my head feels fine today", "going to the gym then work", "love this song so much"] {
        let s = tokenize(text);
        let generalized = domain_generalize(&s, med, adr);
        let got = domain_ngrams(&generalized, 4, 5);
        let expected: BTreeSet<String> = word_ngrams(&s, 4)
            .into_iter()
            .map(|n| format!("g:{n}"))
            .chain(noncontig_ngrams(&s, 5).into_iter().map(|n| format!("gnc:{}", n.trim_start_matches("nc:"))))
            .collect();
        check(&mut f, got == expected, || format!("generalization changed {text:?}"));
    }

    // Negation scope.
    let negators = Negators::default();
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let vocab = ["i", "am", "not", "never", "happy", ".", "tired", "!", "no", "pills", "today", "?"];
    for _ in 0..300 {
        let len = rng.gen_range(0..12);
        let words: Vec<&str> = (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
        let marked = mark_negation(&seq(&words), &negators);
        let first = words.iter().position(|w| negators.is_negator(w)).unwrap_or(words.len());
        check(&mut f, marked.tokens()[..first].iter().all(|t| !t.negated), || format!("marks before first negator in {words:?}"));
        let stripped: Vec<&str> = words.iter().copied().filter(|w| !negators.is_negator(w)).collect();
        let none = mark_negation(&seq(&stripped), &negators);
        check(&mut f, none.iter().all(|t| !t.negated), || format!("marks without negators in {stripped:?}"));
        for (i, t) in marked.iter().enumerate() {
            if t.negated {
                let opener = words[..i].iter().rposition(|w| negators.is_negator(w));
                let closed = opener.is_some_and(|o| words[o + 1..i].iter().any(|w| ".!?".contains(*w)));
                check(&mut f, opener.is_some() && !closed, || format!("token {i} of {words:?} negated outside a scope"));
            }
        }
    }

    // Embedding sums: arithmetic, out-of-vocabulary tokens and empty input.
    let table = EmbeddingTable::new("t", 2, [("a", vec![1.0, 0.0]), ("b", vec![0.5, 2.0])]).unwrap();
    check(&mut f, embedding_sum(&seq(&["a", "b"]), &table) == [1.5, 2.0], || "embedding sum of a b".into());
    check(&mut f, embedding_sum(&seq(&["a", "zzz"]), &table) == [1.0, 0.0], || "OOV token contributed".into());
    check(&mut f, embedding_sum(&seq(&[]), &table) == [0.0, 0.0], || "empty tweet embedding".into());
    let emb_cfg = FeatureConfig {
        embedding_tables: vec!["word2vec_general".into()],
        ..FeatureConfig::default()
    };
    let emb = Extractor::new(&emb_cfg, &res).unwrap();
    check(&mut f, emb.named_features("qqqq zzzz").is_empty() && emb.named_features("").is_empty(), || {
        "all-OOV tweet emitted embedding entries".into()
    });

    // The four sentiment statistics on hand-computed fixtures.
    let lex = ScoredLexicon::new("fixture", [("good", 2.0), ("bad", -3.0)]);
    let s = sentiment_features(&seq(&["good", "bad", "bad"]), &lex);
    check(&mut f, (s.count, s.total, s.max, s.last) == (3, -4.0, Some(2.0), -3.0), || format!("good bad bad: {s:?}"));
    let s = sentiment_features(&seq(&["meh", "ok"]), &lex);
    check(&mut f, (s.count, s.total, s.max, s.last) == (0, 0.0, None, 0.0), || format!("no hits: {s:?}"));
    let s = sentiment_features(&seq(&["good"]), &lex);
    check(&mut f, (s.count, s.total, s.max, s.last) == (1, 2.0, Some(2.0), 2.0), || format!("good: {s:?}"));

    // The "<MED> makes me" generalized n-gram.
    let meds = TermLexicon::new("medications", ["tylenol"]);
    let reactions = TermLexicon::new("adr", ["headache"]);
    let generalized = domain_generalize(&seq(&["tylenol", "makes", "me"]), &meds, &reactions);
    let grams = domain_ngrams(&generalized, 3, 0);
    check(&mut f, grams.contains("g:<MED> makes me") && grams.contains("g:<MED> makes"), || format!("{grams:?}"));
    let dom_res = Resources::new().with_medications(meds).with_adr(reactions);
    let dom_cfg = FeatureConfig {
        domain_ngram_max: 3,
        ..FeatureConfig::default()
    };
    let dom = Extractor::new(&dom_cfg, &dom_res).unwrap();
    let got = names(&dom.named_features("Tylenol makes me sleepy"));
    check(&mut f, got.contains("g:<MED> makes me"), || format!("extractor output {got:?}"));

    let elapsed = start.elapsed();
    report(6, "feature extractor properties", &f, elapsed, Duration::from_secs(10), &format!("{} tweets", texts.len()));
}

fn split(d: &Dataset, seed: u64) -> (Dataset, Dataset) {
    let folds = fold_assignment(d.len(), 4, seed).unwrap();
    (d.subset(&folds[1..].concat()), d.subset(&folds[0]))
}

fn class1_f(model: &TrainedPipeline, test: &Dataset, res: &Resources) -> f64 {
    let pred = model.predict(test, res).unwrap();
    common::f_class(&test.labels().unwrap(), &pred, 1)
}

#[test]
fn criterion_7_end_to_end_margins() {
    let start = Instant::now();
    let mut f = Vec::new();
    let mut rows = Vec::new();
    let seeds = 0..5u64;
    for seed in seeds.clone() {
        let res = synthetic::resources(seed);
        let data = synthetic::adr_corpus(2000, 10, 0.01, seed);
        let (train, test) = split(&data, seed);
        let full = PipelineConfig::preset("task1-sub1").unwrap().with_seed(seed);
        let no_imbalance = PipelineConfig {
            imbalance: Imbalance::None,
            ..full.clone()
        };
        let unigram = |c: f64| {
            PipelineConfig::new(
                Task::Adr,
                FeatureConfig::unigrams(),
                TrainParams { seed, ..TrainParams::with_c(c) },
                Imbalance::None,
            )
        };
        let score = |cfg: &PipelineConfig| class1_f(&TrainedPipeline::fit(cfg, &train, &res).unwrap().0, &test, &res);
        let unigram_best = score(&unigram(1.0)).max(score(&unigram(0.001)));
        rows.push((score(&full), score(&no_imbalance), unigram_best));
    }
    let k = rows.len() as f64;
    let mean = |g: fn(&(f64, f64, f64)) -> f64| rows.iter().map(g).sum::<f64>() / k;
    let (full, none, uni) = (mean(|r| r.0), mean(|r| r.1), mean(|r| r.2));
    check(&mut f, full - none >= 0.05, || format!("margin over no imbalance handling {:.4}", full - none));
    check(&mut f, full - uni >= 0.05, || format!("margin over unigram SVM {:.4}", full - uni));
    let elapsed = start.elapsed();
    let detail = format!("mean F1: full {full:.4}, no imbalance handling {none:.4}, unigram SVM {uni:.4} over {} seeds", rows.len());
    report(7, "full pipeline beats the baselines by 5 F points", &f, elapsed, Duration::from_secs(120), &detail);
}

#[test]
fn criterion_8_ensemble_behavior() {
    let start = Instant::now();
    let mut f = Vec::new();

    // The (2, 3, 4) ensemble votes exactly as its members combined by hand.
    let res = synthetic::resources(8);
    let train = synthetic::adr_corpus(1200, 10, 0.01, 8);
    let cfg = PipelineConfig::preset("task1-sub3").unwrap();
    let (model, _) = TrainedPipeline::fit(&cfg, &train, &res).unwrap();
    let Classifier::Ensemble(ensemble) = model.classifier() else {
        panic!("task1-sub3 did not train an ensemble");
    };
    check(&mut f, ensemble.ratios() == [2.0, 3.0, 4.0], || format!("ratios {:?}", ensemble.ratios()));
    let fresh = synthetic::adr_corpus(1000, 3, 0.0, 800);
    let texts: Vec<&str> = fresh.iter().map(|t| t.text.as_str()).collect();
    let xs = model.vectorize(&texts, &res).unwrap();
    let mut disagreements = 0;
    for x in &xs {
        let votes: Vec<i32> = ensemble.members().iter().map(|m| m.predict(x).unwrap()).collect();
        if ensemble.predict(x).unwrap() != common::hand_vote(&votes, Some(1)) {
            disagreements += 1;
        }
    }
    check(&mut f, disagreements == 0, || format!("{disagreements} of 1000 votes differ"));

    // A 7-member ratio-2 ensemble never scores below its worst member.
    let mut summary = Vec::new();
    for seed in 0..5u64 {
        let res = synthetic::resources(seed);
        let data = synthetic::adr_corpus(2000, 10, 0.01, 100 + seed);
        let (train, test) = split(&data, seed);
        let cfg = PipelineConfig {
            imbalance: Imbalance::Ensemble(vec![2.0; 7]),
            ..PipelineConfig::preset("task1-sub1").unwrap().with_seed(seed)
        };
        let (model, _) = TrainedPipeline::fit(&cfg, &train, &res).unwrap();
        let gold = test.labels().unwrap();
        let texts: Vec<&str> = test.iter().map(|t| t.text.as_str()).collect();
        let xs = model.vectorize(&texts, &res).unwrap();
        let member_f: Vec<f64> = model
            .classifier()
            .models()
            .iter()
            .map(|m| common::f_class(&gold, &m.predict_all(&xs).unwrap(), 1))
            .collect();
        let worst = member_f.iter().copied().fold(f64::INFINITY, f64::min);
        let ens = class1_f(&model, &test, &res);
        check(&mut f, member_f.len() == 7, || format!("seed {seed}: {} members", member_f.len()));
        check(&mut f, ens >= worst, || format!("seed {seed}: ensemble {ens:.4} below worst member {worst:.4}"));
        summary.push(format!("{ens:.3}/{worst:.3}"));
    }
    let elapsed = start.elapsed();
    let detail = format!("1000 votes checked; ensemble/worst member F1: {}", summary.join(" "));
    report(8, "ensemble voting", &f, elapsed, Duration::from_secs(180), &detail);
}

fn write_fixture(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let train = dir.join("train.tsv");
    std::fs::write(&train, corpus::to_tsv(&synthetic::adr_corpus(600, 10, 0.01, 9))).unwrap();
    let res_dir = dir.join("resources");
    synthetic::resources(9).write_dir(&res_dir).unwrap();
    (train, res_dir)
}

#[test]
fn criterion_9_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let (train, res_dir) = write_fixture(dir.path());
    let start = Instant::now();
    let mut f = Vec::new();
    let run = |out: &str| {
        let args = TrainArgs {
            config: ConfigArgs {
                preset: Some("task1-sub1".into()),
                config: None,
                seed: Some(31),
                resources_dir: Some(res_dir.clone()),
            },
            train: train.clone(),
            dev: None,
            dedup: false,
            out: dir.path().join(out),
        };
        cmd_train(&args).unwrap()
    };
    let a = run("a.model");
    let b = run("b.model");
    for (x, y) in [(&a.model_path, &b.model_path), (&a.log_path, &b.log_path), (&a.config_path, &b.config_path)] {
        let (bx, by) = (std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        check(&mut f, bx == by, || format!("{} and {} differ", x.display(), y.display()));
    }
    let text = std::fs::read_to_string(&a.model_path).unwrap();
    let model = TrainedPipeline::from_json(&text).unwrap();
    check(&mut f, model.to_json().unwrap() == text, || "re-serialized model differs".into());
    let original = TrainedPipeline::load(&b.model_path).unwrap();
    let reloaded = TrainedPipeline::from_json(&original.to_json().unwrap()).unwrap();
    let bits = |m: &TrainedPipeline| -> Vec<u64> {
        m.classifier()
            .models()
            .iter()
            .flat_map(|lm| {
                let count = if lm.is_binary() { 1 } else { lm.classes().len() };
                (0..count).flat_map(move |k| lm.augmented_weights(k).iter().map(|w| w.to_bits()))
            })
            .collect()
    };
    check(&mut f, bits(&original) == bits(&reloaded), || "weights not bit-identical".into());
    check(&mut f, original == reloaded, || "round-tripped pipeline differs".into());
    let elapsed = start.elapsed();
    let detail = format!("{} byte model written twice", text.len());
    report(9, "byte-identical training and exact round-trip", &f, elapsed, Duration::from_secs(60), &detail);
}
