use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use profilekit::aq::{self, LefConfig};
use profilekit::corpus::{kfold_with, split_70_30_with};
use profilekit::eval::{metrics, t_test, Confusion};
use profilekit::features::{tfidf_weight, DfTable};
use profilekit::rocchio::{cosine, grid, init_profile, pr_sweep, TermVector};
use profilekit::table::{AttrKind, Attribute, Example, Schema, Value};
use profilekit::tree::{build_tree, tree_to_rules, TreeConfig};
use profilekit::{Corpus, Document, GeneralizationHierarchy, Label, DUMMY};

fn corpus(labels: &[bool]) -> Corpus {
    Corpus::new(
        labels
            .iter()
            .enumerate()
            .map(|(i, &p)| Document::new(format!("d{i}"), "x", if p { Label::Positive } else { Label::Negative }))
            .collect(),
    )
    .unwrap()
}

fn ids(c: &Corpus) -> BTreeSet<String> {
    c.iter().map(|d| d.id.clone()).collect()
}

fn term_vector() -> impl Strategy<Value = TermVector> {
    prop::collection::btree_map("[a-e]", -5.0..5.0f64, 0..5)
}

proptest! {
    #[test]
    fn kfold_partitions(labels in prop::collection::vec(any::<bool>(), 2..60), k in 2usize..12, seed: u64, strat: bool) {
        prop_assume!(k <= labels.len());
        let c = corpus(&labels);
        let folds = kfold_with(&c, k, seed, strat).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut seen = BTreeSet::new();
        for (train, test) in &folds {
            prop_assert!(ids(train).is_disjoint(&ids(test)));
            prop_assert_eq!(train.len() + test.len(), c.len());
            for id in ids(test) {
                prop_assert!(seen.insert(id));
            }
        }
        prop_assert_eq!(seen, ids(&c));
    }

    #[test]
    fn seventy_thirty_partitions(labels in prop::collection::vec(any::<bool>(), 2..80), seed: u64, strat: bool) {
        let c = corpus(&labels);
        let (train, test) = split_70_30_with(&c, seed, strat).unwrap();
        prop_assert!(ids(&train).is_disjoint(&ids(&test)));
        prop_assert_eq!(ids(&train).union(&ids(&test)).cloned().collect::<BTreeSet<_>>(), ids(&c));
        if !strat {
            let tenths = 7 * labels.len();
            prop_assert_eq!(train.len(), tenths / 10 + usize::from(tenths % 10 >= 5));
        }
        let again = split_70_30_with(&c, seed, strat).unwrap();
        prop_assert_eq!(ids(&again.0), ids(&train));
    }

    #[test]
    fn tfidf_is_linear_in_tf(tf in 0usize..50, k in 1usize..5, n in 1usize..500, df_frac in 0.0..1.0f64) {
        let df = 1 + ((n - 1) as f64 * df_frac) as usize;
        let one = tfidf_weight(1, df, n).unwrap();
        prop_assert!((tfidf_weight(tf * k, df, n).unwrap() - (tf * k) as f64 * one).abs() < 1e-9);
        prop_assert!(one >= 1.0);
    }

    #[test]
    fn cosine_bounded_and_scale_invariant(a in term_vector(), b in term_vector(), s in 0.01..100.0f64) {
        let c = cosine(&a, &b);
        prop_assert!((-1.0..=1.0).contains(&c));
        prop_assert!((c - cosine(&b, &a)).abs() < 1e-12);
        let scaled: TermVector = a.iter().map(|(t, w)| (t.clone(), w * s)).collect();
        prop_assert!((cosine(&scaled, &b) - c).abs() < 1e-9);
    }

    #[test]
    fn metrics_match_counts(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..1000)) {
        let (pred, act): (Vec<bool>, Vec<bool>) = pairs.iter().copied().unzip();
        let c = Confusion::from_predictions(&pred, &act);
        prop_assert_eq!(c.total(), pairs.len());
        let m = metrics(&c).unwrap();
        for v in [m.accuracy, m.precision, m.recall] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        let tp = pairs.iter().filter(|(p, a)| *p && *a).count();
        prop_assert_eq!(c.tp, tp);
        prop_assert_eq!(m.precision_undefined, !pred.contains(&true));
    }

    #[test]
    fn t_test_is_symmetric(a in prop::collection::vec(0.0..1.0f64, 10), b in prop::collection::vec(0.0..1.0f64, 10)) {
        let ab = t_test(&a, &b, 0.90).unwrap();
        let ba = t_test(&b, &a, 0.90).unwrap();
        prop_assert_eq!(ab.verdict, ba.verdict);
        prop_assert!((ab.t.unwrap() + ba.t.unwrap()).abs() < 1e-9);
        prop_assert_eq!(ab.df, 18);
    }

    #[test]
    fn init_then_idf_recovers_mean(counts in prop::collection::vec(prop::collection::btree_map("[a-d]", 1usize..6, 1..4), 1..6)) {
        let table = DfTable::from_term_sets(counts.iter().map(|c| c.keys().map(String::as_str)));
        let relevant: Vec<TermVector> = counts.iter().map(|c| table.weigh(c)).collect();
        let back = init_profile(&relevant, &table).unwrap().to_tfidf(&table);
        for t in ["a", "b", "c", "d"] {
            let mean = relevant.iter().map(|v| v.get(t).copied().unwrap_or(0.0)).sum::<f64>() / relevant.len() as f64;
            prop_assert!((back.weight(t) - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        }
    }

    #[test]
    fn recall_falls_as_cutoff_rises(scores in prop::collection::vec((0.0..1.0f64, any::<bool>()), 1..40)) {
        let curve = pr_sweep(&scores, &grid(101));
        for w in curve.windows(2) {
            prop_assert!(w[1].recall <= w[0].recall);
        }
    }

    #[test]
    fn aq_rules_fit_consistent_data(rows in prop::collection::vec((prop::collection::vec(0u8..3, 3), any::<bool>()), 1..20)) {
        let mut label: BTreeMap<Vec<u8>, bool> = BTreeMap::new();
        for (r, l) in &rows {
            label.entry(r.clone()).or_insert(*l);
        }
        prop_assume!(label.values().any(|&l| l));
        let schema = Schema::new((0..3).map(|i| Attribute { name: format!("a{i}"), kind: AttrKind::Categorical }).collect());
        let examples: Vec<Example> = rows
            .iter()
            .map(|(r, _)| Example::new(r.iter().map(|v| Value::Cat(format!("v{v}"))).collect(), label[r]))
            .collect();
        let h = GeneralizationHierarchy::parse("root\t-\n").unwrap();
        let rules = aq::learn(&examples, &schema, &h, &LefConfig::default()).unwrap();
        for e in &examples {
            prop_assert_eq!(rules.classify(&e.values, &h), e.positive);
        }
    }

    #[test]
    fn tree_fits_separable_numeric_data(xs in prop::collection::vec(0.0..10.0f64, 4..40), cut in 2.0..8.0f64) {
        prop_assume!(xs.iter().filter(|&&x| x > cut).count() >= 2 && xs.iter().filter(|&&x| x <= cut).count() >= 2);
        let schema = Schema::new(vec![Attribute { name: "x".into(), kind: AttrKind::Numeric }]);
        let examples: Vec<Example> = xs.iter().map(|&x| Example::new(vec![Value::Num(x)], x > cut)).collect();
        let tree = build_tree(&examples, &schema, &TreeConfig::default());
        prop_assert_eq!(tree.depth(), 1);
        let rules = tree_to_rules(&tree, &examples, 0.25);
        for e in &examples {
            prop_assert_eq!(rules.classify(&e.values), e.positive);
        }
    }
}

#[test]
fn reference_hierarchy_walks_agree() {
    let h = GeneralizationHierarchy::reference();
    for node in h.nodes() {
        let path = h.path_to_root(node).unwrap();
        assert_eq!(path.len(), h.level(node).unwrap() + 1);
        assert_eq!(*path.last().unwrap(), h.root());
        for (up, anc) in path.iter().enumerate() {
            assert_eq!(h.ancestor_at(node, up).unwrap(), *anc);
            assert!(h.covers(anc, node).unwrap());
        }
        assert_eq!(h.ancestor_at(node, path.len()).unwrap(), DUMMY);
        if h.is_leaf(node).unwrap() {
            assert_eq!(h.leaves_under(node).unwrap(), [node]);
        }
    }
    let leaves: Vec<&str> = h.leaves().collect();
    for pair in leaves.windows(2) {
        let g = h.minimal_common_generalization(pair.iter().copied()).unwrap();
        assert!(pair.iter().all(|l| h.covers(g, l).unwrap()));
        assert!(h.children(g).unwrap().all(|c| !pair.iter().all(|l| h.covers(c, l).unwrap())));
    }
}
