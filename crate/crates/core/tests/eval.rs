mod common;

use std::collections::BTreeSet;

use medtweet::eval::{
    ablation_run, augmented_splits, confusion, kfold_splits, micro_prf, mi_rank, prf_class, Confusion, Protocol,
    ADR_ABLATION, INTAKE_ABLATION,
};
use medtweet::{synthetic, FeatureConfig, PipelineConfig, Resources};
use proptest::prelude::*;

fn labelings() -> impl Strategy<Value = (Vec<i32>, Vec<i32>)> {
    (1usize..80).prop_flat_map(|n| (prop::collection::vec(1i32..4, n), prop::collection::vec(1i32..4, n)))
}

proptest! {
    #[test]
    fn micro_over_all_classes_is_accuracy((gold, pred) in labelings()) {
        let c = confusion(&gold, &pred).unwrap();
        let m = micro_prf(&c, c.classes());
        let accuracy = gold.iter().zip(&pred).filter(|(g, p)| g == p).count() as f64 / gold.len() as f64;
        prop_assert!((m.precision - accuracy).abs() < 1e-12 && (m.recall - accuracy).abs() < 1e-12);
    }

    #[test]
    fn single_class_micro_equals_class_scores((gold, pred) in labelings(), class in 1i32..4) {
        let c = Confusion::with_classes(&gold, &pred, &[1, 2, 3]).unwrap();
        prop_assert_eq!(micro_prf(&c, &[class]), prf_class(&c, class));
        let p = prf_class(&c, class);
        for v in [p.precision, p.recall, p.f] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        if p.precision + p.recall > 0.0 {
            let h = 2.0 * p.precision * p.recall / (p.precision + p.recall);
            prop_assert!((p.f - h).abs() < 1e-12);
        }
        for g in [1, 2, 3] {
            let row: usize = [1, 2, 3].iter().map(|&q| c.count(g, q)).sum();
            prop_assert_eq!(row, gold.iter().filter(|&&x| x == g).count());
        }
    }

    #[test]
    fn kfold_tests_partition_the_data(n in 2usize..200, k in 2usize..10, seed in 0u64..100) {
        prop_assume!(k <= n);
        let splits = kfold_splits(n, k, seed).unwrap();
        prop_assert_eq!(splits.len(), k);
        let mut seen: Vec<usize> = splits.iter().flat_map(|s| s.test.iter().copied()).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        for s in &splits {
            prop_assert_eq!(s.train.len() + s.test.len(), n);
            prop_assert!(s.test.len() == n / k || s.test.len() == n / k + 1);
            prop_assert!(s.train.iter().all(|i| !s.test.contains(i)));
        }
    }

    #[test]
    fn augmented_rounds_never_test_on_training_instances(n_train in 0usize..50, n_dev in 2usize..60, k in 2usize..6, seed in 0u64..50) {
        prop_assume!(k <= n_dev);
        let splits = augmented_splits(n_train, n_dev, k, seed).unwrap();
        let mut tested = BTreeSet::new();
        for s in &splits {
            prop_assert!(s.test.iter().all(|&i| i >= n_train && i < n_train + n_dev));
            prop_assert!((0..n_train).all(|i| s.train.contains(&i)));
            prop_assert!(s.train.iter().all(|i| !s.test.contains(i)));
            tested.extend(s.test.iter().copied());
        }
        prop_assert_eq!(tested.len(), n_dev);
    }
}

#[test]
fn mi_respects_its_bounds() {
    let res = Resources::new();
    for seed in 0..5 {
        let d = synthetic::intake_corpus(60, 0.1, seed);
        let labels = d.labels().unwrap();
        let h = common::class_entropy(&labels);
        let cfg = FeatureConfig { word_ngram_max: 2, ..FeatureConfig::default() };
        for (name, mi) in mi_rank(&d, &cfg, &res, 0).unwrap() {
            assert!(mi >= 0.0 && mi <= h + 1e-12, "{name}: {mi} outside [0, {h}]");
        }
    }
}

#[test]
fn ablation_base_row_ignores_group_order() {
    let res = synthetic::resources(11);
    let data = synthetic::adr_corpus(240, 5, 0.0, 11);
    let (train, test) = (data.subset(&(0..180).collect::<Vec<_>>()), data.subset(&(180..240).collect::<Vec<_>>()));
    let base = PipelineConfig::preset("task1-sub2").unwrap();
    let protocol = Protocol::Holdout { train: &train, test: &test };
    let forward = ablation_run(&base, &["negation", "domain-ngrams"], &protocol, &res).unwrap();
    let backward = ablation_run(&base, &["domain-ngrams", "negation"], &protocol, &res).unwrap();
    assert_eq!(forward.rows[0], backward.rows[0]);
    assert_eq!(forward.rows[1].report, backward.rows[2].report);
    assert_eq!((ADR_ABLATION.len() + 1, INTAKE_ABLATION.len() + 1), (12, 11));
}
