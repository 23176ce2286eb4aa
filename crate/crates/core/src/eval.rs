//! Metrics, the train/test experiment runner, significance testing and
//! result tables.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::aq::{self, AqError, LefConfig, RuleSet};
use crate::corpus::{Corpus, CorpusError, SplitPlan, Tokenizer};
use crate::features::{assemble, select_keywords, DfTable, FeatureContext, FeatureError, FeatureSet};
use crate::hierarchy::{GeneralizationHierarchy, HierarchyError};
pub use crate::resources::Resources;
use crate::rocchio::{self, RocchioError, RocchioParams};
use crate::table::{Example, Schema};
use crate::tree::{self, DecisionTree, PrunedRuleSet, TreeConfig};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("run {run}: {source}")]
    Run {
        run: usize,
        #[source]
        source: LearnError,
    },
}

#[derive(Debug, Error)]
pub enum LearnError {
    #[error(transparent)]
    Aq(#[from] AqError),
    #[error(transparent)]
    Rocchio(#[from] RocchioError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

impl LearnError {
    /// Failures caused by the training data rather than the configuration.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            LearnError::Aq(AqError::Inconsistent { .. } | AqError::NoPositives)
                | LearnError::Rocchio(RocchioError::NoRelevant)
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    /// Nothing predicted positive; precision reported as 0.
    pub precision_undefined: bool,
    /// No positives in the test set; recall reported as 0.
    pub recall_undefined: bool,
}

pub fn metrics(c: &Confusion) -> Result<Metrics, EvalError> {
    let total = c.total();
    if total == 0 {
        return Err(EvalError::Validation("metrics of an empty test set".into()));
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    Ok(Metrics {
        accuracy: (c.tp + c.tn) as f64 / total as f64,
        precision: ratio(c.tp, c.tp + c.fp),
        recall: ratio(c.tp, c.tp + c.fn_),
        precision_undefined: c.tp + c.fp == 0,
        recall_undefined: c.tp + c.fn_ == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Learner {
    Aq,
    Tree,
    Rocchio,
}

impl Learner {
    pub fn label(self) -> &'static str {
        match self {
            Learner::Aq => "AQ",
            Learner::Tree => "C4.5",
            Learner::Rocchio => "Rocchio",
        }
    }
}

impl fmt::Display for Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Learner::Aq => "aq",
            Learner::Tree => "tree",
            Learner::Rocchio => "rocchio",
        })
    }
}

impl FromStr for Learner {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aq" => Ok(Learner::Aq),
            "tree" | "c4.5" => Ok(Learner::Tree),
            "rocchio" => Ok(Learner::Rocchio),
            other => Err(EvalError::Validation(format!("unknown learner `{other}`"))),
        }
    }
}

pub const DEFAULT_N_KEYWORDS: usize = 50;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnerParams {
    pub lef: LefConfig,
    pub tree: TreeConfig,
    pub rocchio: RocchioParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub feature_set: FeatureSet,
    pub learner: Learner,
    pub split: SplitPlan,
    pub n_keywords: usize,
    pub params: LearnerParams,
}

impl ExperimentConfig {
    pub fn new(feature_set: FeatureSet, learner: Learner, split: SplitPlan) -> Self {
        ExperimentConfig { feature_set, learner, split, n_keywords: DEFAULT_N_KEYWORDS, params: LearnerParams::default() }
    }
}

/// Mean number of conditions per rule.
pub trait RuleLengths {
    fn rule_lengths(&self) -> Vec<usize>;
}

impl RuleLengths for RuleSet {
    fn rule_lengths(&self) -> Vec<usize> {
        self.rules.iter().map(|r| r.complex.selector_count()).collect()
    }
}

impl RuleLengths for PrunedRuleSet {
    fn rule_lengths(&self) -> Vec<usize> {
        self.rules.iter().map(|r| r.conditions.len()).collect()
    }
}

pub fn profile_length<R: RuleLengths + ?Sized>(rules: &R) -> f64 {
    let lengths = rules.rule_lengths();
    if lengths.is_empty() {
        0.0
    } else {
        lengths.iter().sum::<usize>() as f64 / lengths.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: Confusion,
    pub metrics: Metrics,
    /// Mean conditions per rule; absent for the Rocchio baseline.
    pub profile_length: Option<f64>,
    /// Ids of the tested documents.
    pub tested: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub learner: Learner,
    pub feature_set: FeatureSet,
    pub split: SplitPlan,
    pub n_keywords: usize,
    pub runs: Vec<RunResult>,
    pub mean: Summary,
    /// Sample variance across runs.
    pub variance: Summary,
    pub profile_length: Option<f64>,
}

impl RunReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.metrics.accuracy).collect()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

fn summarize(runs: &[RunResult]) -> (Summary, Summary) {
    let n = runs.len() as f64;
    let col = |f: fn(&Metrics) -> f64| -> (f64, f64) {
        let vals: Vec<f64> = runs.iter().map(|r| f(&r.metrics)).collect();
        let mean = vals.iter().sum::<f64>() / n;
        let var = if runs.len() < 2 { 0.0 } else { vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) };
        (mean, var)
    };
    let (a, va) = col(|m| m.accuracy);
    let (p, vp) = col(|m| m.precision);
    let (r, vr) = col(|m| m.recall);
    (Summary { accuracy: a, precision: p, recall: r }, Summary { accuracy: va, precision: vp, recall: vr })
}

/// Keyword vocabulary and df table for one run. The df table counts the
/// training documents plus any unlabeled ones; the vocabulary comes from
/// the labeled training documents alone.
pub fn training_context(
    train: &Corpus,
    unlabeled: &Corpus,
    tokenizer: &Tokenizer,
    n_keywords: usize,
) -> Result<(DfTable, Vec<String>), EvalError> {
    let docs: Vec<_> = train.iter().chain(unlabeled.iter()).cloned().collect();
    let context = Corpus::new(docs)?;
    let df = DfTable::build(&context, tokenizer);
    let vocabulary = select_keywords(train, &df, tokenizer, n_keywords);
    Ok((df, vocabulary))
}

/// A model trained on one partition, ready to label documents.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Aq { rules: RuleSet, schema: Schema, context: FeatureContext, feature_set: FeatureSet },
    Tree { tree: DecisionTree, rules: PrunedRuleSet, schema: Schema, base: Schema, levels: usize, context: FeatureContext, feature_set: FeatureSet },
    Rocchio { model: rocchio::RocchioModel, df: DfTable, tokenizer: Tokenizer },
}

impl TrainedModel {
    pub fn profile_length(&self) -> Option<f64> {
        match self {
            TrainedModel::Aq { rules, .. } => Some(profile_length(rules)),
            TrainedModel::Tree { rules, .. } => Some(profile_length(rules)),
            TrainedModel::Rocchio { .. } => None,
        }
    }

    pub fn classify(&self, doc: &crate::corpus::Document, h: &GeneralizationHierarchy) -> Result<bool, LearnError> {
        Ok(match self {
            TrainedModel::Aq { rules, schema, context, feature_set } => {
                rules.classify(&schema.encode(&assemble(doc, *feature_set, context)?), h)
            }
            TrainedModel::Tree { rules, base, levels, context, feature_set, .. } => {
                let row = base.encode(&assemble(doc, *feature_set, context)?);
                rules.classify(&tree::extend_row(&row, base, h, *levels)?)
            }
            TrainedModel::Rocchio { model, df, tokenizer } => model.classify(&df.weigh(&tokenizer.term_counts(&doc.text))),
        })
    }

    /// Human-readable form of the learned profile.
    pub fn render(&self) -> String {
        match self {
            TrainedModel::Aq { rules, .. } => rules.render(),
            TrainedModel::Tree { rules, .. } => rules.render(),
            TrainedModel::Rocchio { model, .. } => model.profile.to_tsv(),
        }
    }
}

/// Trains `learner` on the labeled documents of `train`, with the feature
/// context built from `train` plus `unlabeled`.
pub fn train_model(
    train: &Corpus,
    unlabeled: &Corpus,
    res: &Resources,
    config: &ExperimentConfig,
) -> Result<TrainedModel, LearnError> {
    let (df, vocabulary) = training_context(train, unlabeled, &res.tokenizer, config.n_keywords.max(1))
        .map_err(|e| LearnError::Feature(FeatureError::Domain(e.to_string())))?;
    if config.learner == Learner::Rocchio {
        let docs: Vec<_> = train
            .iter()
            .filter(|d| d.label.is_labeled())
            .map(|d| (res.tokenizer.term_counts(&d.text), d.label == crate::corpus::Label::Positive))
            .collect();
        let model = rocchio::learn(&docs, &df, config.params.rocchio)?;
        return Ok(TrainedModel::Rocchio { model, df, tokenizer: res.tokenizer.clone() });
    }
    let set = config.feature_set;
    let context = FeatureContext {
        tokenizer: res.tokenizer.clone(),
        df: Some(df),
        vocabulary: Some(vocabulary.clone()),
        lexicon: Some(res.lexicon.clone()),
        correlations: Some(res.correlations.clone()),
        gazetteer: Some(res.gazetteer.clone()),
    };
    let schema = Schema::for_features(set, &vocabulary);
    let mut examples = Vec::new();
    for d in train.iter().filter(|d| d.label.is_labeled()) {
        let row = schema.encode(&assemble(d, set, &context)?);
        examples.push(Example::new(row, d.label == crate::corpus::Label::Positive));
    }
    match config.learner {
        Learner::Aq => {
            let rules = aq::learn(&examples, &schema, &res.hierarchy, &config.params.lef)?;
            Ok(TrainedModel::Aq { rules, schema, context, feature_set: set })
        }
        Learner::Tree => {
            let levels = config.params.tree.ancestor_levels;
            let ext = tree::extended_schema(&schema, levels);
            let examples = examples
                .into_iter()
                .map(|e| Ok(Example::new(tree::extend_row(&e.values, &schema, &res.hierarchy, levels)?, e.positive)))
                .collect::<Result<Vec<_>, HierarchyError>>()?;
            let t = tree::build_tree(&examples, &ext, &config.params.tree);
            let rules = tree::tree_to_rules(&t, &examples, config.params.tree.confidence);
            Ok(TrainedModel::Tree { tree: t, rules, schema: ext, base: schema, levels, context, feature_set: set })
        }
        Learner::Rocchio => unreachable!("handled above"),
    }
}

fn run_once(
    run: usize,
    train: &Corpus,
    test: &Corpus,
    unlabeled: &Corpus,
    res: &Resources,
    config: &ExperimentConfig,
) -> Result<RunResult, EvalError> {
    let wrap = |source: LearnError| EvalError::Run { run, source };
    let model = train_model(train, unlabeled, res, config).map_err(wrap)?;
    let mut predicted = Vec::with_capacity(test.len());
    for d in test {
        predicted.push(model.classify(d, &res.hierarchy).map_err(wrap)?);
    }
    let actual: Vec<bool> = test.iter().map(|d| d.label == crate::corpus::Label::Positive).collect();
    let confusion = Confusion::from_predictions(&predicted, &actual);
    Ok(RunResult {
        run,
        n_train: train.len(),
        n_test: test.len(),
        metrics: metrics(&confusion)?,
        confusion,
        profile_length: model.profile_length(),
        tested: test.iter().map(|d| d.id.clone()).collect(),
    })
}

/// Runs every partition of the split plan. Unlabeled documents only feed
/// the per-run df tables. Runs execute in parallel; results are ordered by
/// run index.
pub fn run_experiment(corpus: &Corpus, res: &Resources, config: &ExperimentConfig) -> Result<RunReport, EvalError> {
    let (labeled, unlabeled) = corpus.partition_labeled();
    if labeled.is_empty() {
        return Err(EvalError::Validation("corpus has no labeled documents".into()));
    }
    let partitions = config.split.partitions(&labeled)?;
    let runs: Vec<RunResult> = partitions
        .par_iter()
        .enumerate()
        .map(|(i, (train, test))| run_once(i, train, test, &unlabeled, res, config))
        .collect::<Result<_, _>>()?;
    let (mean, variance) = summarize(&runs);
    let lengths: Vec<f64> = runs.iter().filter_map(|r| r.profile_length).collect();
    let profile_length = (!lengths.is_empty()).then(|| lengths.iter().sum::<f64>() / lengths.len() as f64);
    Ok(RunReport {
        learner: config.learner,
        feature_set: config.feature_set,
        split: config.split,
        n_keywords: config.n_keywords,
        runs,
        mean,
        variance,
        profile_length,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Significance {
    Significant,
    NotSignificant,
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Significance::Significant => "significant",
            Significance::NotSignificant => "not_significant",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    /// `None` when the pooled variance is zero.
    pub t: Option<f64>,
    pub df: usize,
    pub critical: f64,
    pub level: f64,
    pub verdict: Significance,
}

const T_LEVELS: [f64; 3] = [0.90, 0.95, 0.99];

fn t_table() -> &'static BTreeMap<usize, [f64; 3]> {
    static TABLE: OnceLock<BTreeMap<usize, [f64; 3]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        include_str!("../data/t_critical.tsv")
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| {
                let f: Vec<f64> = l.split('\t').map(|x| x.parse().expect("table is numeric")).collect();
                (f[0] as usize, [f[1], f[2], f[3]])
            })
            .collect()
    })
}

/// Two-tailed critical value of Student's t. Tabulated levels and degrees
/// of freedom come from the embedded table; others are computed.
pub fn t_critical(level: f64, df: usize) -> f64 {
    if let Some(i) = T_LEVELS.iter().position(|&l| (l - level).abs() < 1e-12) {
        if let Some(row) = t_table().get(&df) {
            return row[i];
        }
    }
    StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1").inverse_cdf(1.0 - (1.0 - level) / 2.0)
}

/// Two-tailed pooled-variance two-sample t-test on equal-sized samples.
pub fn t_test(a: &[f64], b: &[f64], level: f64) -> Result<TTest, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::Validation(format!("run counts differ: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(EvalError::Validation("t-test needs at least 2 runs per sample".into()));
    }
    if !(0.0..1.0).contains(&level) || level <= 0.0 {
        return Err(EvalError::Validation(format!("significance level {level} outside (0, 1)")));
    }
    let n = a.len() as f64;
    let mean = |x: &[f64]| x.iter().sum::<f64>() / n;
    let (ma, mb) = (mean(a), mean(b));
    let ss = |x: &[f64], m: f64| x.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    let df = 2 * a.len() - 2;
    let pooled = (ss(a, ma) + ss(b, mb)) / df as f64;
    let critical = t_critical(level, df);
    // Constant samples have zero variance even when rounding in the means
    // leaves tiny residuals.
    let constant = |x: &[f64]| x.iter().all(|v| *v == x[0]);
    let (t, significant) = if pooled == 0.0 || (constant(a) && constant(b)) {
        (None, a[0] != b[0])
    } else {
        let t = (ma - mb) / (pooled * 2.0 / n).sqrt();
        (Some(t), t.abs() > critical)
    };
    let verdict = if significant { Significance::Significant } else { Significance::NotSignificant };
    Ok(TTest { t, df, critical, level, verdict })
}

/// One table cell: mean accuracy, precision and recall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
}

impl From<&RunReport> for Cell {
    fn from(r: &RunReport) -> Self {
        Cell { accuracy: r.mean.accuracy, precision: r.mean.precision, recall: r.mean.recall }
    }
}

/// Results keyed by (learner, problem), then feature set. Rows keep
/// insertion order.
#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    rows: IndexMap<(String, String), BTreeMap<FeatureSet, Cell>>,
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, learner: &str, problem: &str, set: FeatureSet, cell: Cell) {
        self.rows.entry((learner.to_string(), problem.to_string())).or_default().insert(set, cell);
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, learner: &str, problem: &str, set: FeatureSet) -> Option<&Cell> {
        self.rows.get(&(learner.to_string(), problem.to_string()))?.get(&set)
    }
}

fn pr_cell(c: &Cell) -> String {
    if c.precision == 0.0 && c.recall == 0.0 {
        "0.0/0.0".to_string()
    } else {
        format!("{:.2}/{:.2}", c.precision, c.recall)
    }
}

/// Accuracy columns then precision/recall columns for TFIDF, POL, SFC and
/// ALL. Missing cells print `-`; the best cell of each row group is starred.
pub fn render_table(table: &ResultTable) -> String {
    let sets = FeatureSet::ALL_SETS;
    let mut lines: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["Learner".to_string(), "Problem".to_string()];
    header.extend(sets.iter().map(|s| format!("Acc {}", s.label())));
    header.extend(sets.iter().map(|s| format!("P/R {}", s.label())));
    lines.push(header);
    for ((learner, problem), cells) in &table.rows {
        let best = |score: fn(&Cell) -> f64| {
            cells.values().map(score).fold(f64::NEG_INFINITY, f64::max)
        };
        let best_acc = best(|c| c.accuracy);
        let best_pr = best(|c| c.precision + c.recall);
        let mut row = vec![learner.clone(), problem.clone()];
        for s in sets {
            row.push(cells.get(&s).map_or("-".to_string(), |c| {
                format!("{:.2}{}", c.accuracy, if c.accuracy == best_acc { "*" } else { "" })
            }));
        }
        for s in sets {
            row.push(cells.get(&s).map_or("-".to_string(), |c| {
                format!("{}{}", pr_cell(c), if c.precision + c.recall == best_pr && best_pr > 0.0 { "*" } else { "" })
            }));
        }
        lines.push(row);
    }
    let widths: Vec<usize> =
        (0..lines[0].len()).map(|i| lines.iter().map(|l| l[i].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for l in &lines {
        let cells: Vec<String> = l.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Long-format CSV: one line per filled cell.
pub fn render_table_csv(table: &ResultTable) -> String {
    let mut out = String::from("learner,problem,features,accuracy,precision,recall\n");
    for ((learner, problem), cells) in &table.rows {
        for (set, c) in cells {
            out.push_str(&format!(
                "{learner},{problem},{},{:.4},{:.4},{:.4}\n",
                set.label(),
                c.accuracy,
                c.precision,
                c.recall
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aq::{Complex, Selector, ValueSet};
    use crate::corpus::{Document, Label};
    use crate::table::{AttrKind, Attribute};

    #[test]
    fn metric_examples() {
        let m = metrics(&Confusion { tp: 3, fp: 1, fn_: 2, tn: 4 }).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall), (0.7, 0.75, 0.6));
        let m = metrics(&Confusion { tp: 4, fp: 0, fn_: 0, tn: 6 }).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall), (1.0, 1.0, 1.0));
        let m = metrics(&Confusion { tp: 0, fp: 0, fn_: 3, tn: 7 }).unwrap();
        assert_eq!((m.precision, m.recall), (0.0, 0.0));
        assert!(m.precision_undefined && !m.recall_undefined);
        assert!(metrics(&Confusion::default()).is_err());
    }

    #[test]
    fn profile_length_counts_selectors() {
        let h = GeneralizationHierarchy::reference();
        let schema = Schema::new(vec![
            Attribute { name: "subject1".into(), kind: AttrKind::Subject },
            Attribute { name: "subject2".into(), kind: AttrKind::Subject },
        ]);
        let c = Complex::from_selectors(
            vec![
                Selector::subject(&schema, "subject1", ValueSet::of(["nature", "physical_science"])).unwrap(),
                Selector::subject(&schema, "subject2", ValueSet::of(["medical_science"])).unwrap(),
            ],
            &h,
        )
        .unwrap();
        assert_eq!(profile_length(&RuleSet::from_complexes(vec![c])), 2.0);
        assert_eq!(profile_length(&RuleSet::default()), 0.0);
        assert_eq!(profile_length(&PrunedRuleSet { rules: vec![], default_positive: false }), 0.0);
    }

    #[test]
    fn t_test_edges() {
        let a = [0.5; 10];
        assert_eq!(t_test(&a, &a, 0.9).unwrap().verdict, Significance::NotSignificant);
        let hi = [0.9; 10];
        let lo = [0.1; 10];
        assert_eq!(t_test(&hi, &lo, 0.9).unwrap().verdict, Significance::Significant);
        assert!(t_test(&hi, &lo[..9], 0.9).is_err());
        // scipy: t.ppf(0.95, 18)
        assert!((t_critical(0.9, 18) - 1.7340636066).abs() < 1e-9);
        assert!((t_critical(0.9, 500) - 1.6479).abs() < 1e-3);
    }

    #[test]
    fn t_test_matches_scipy_on_fixture() {
        // scipy.stats.ttest_ind(a, b): t = 1.8525405838431708, p = 0.0804
        let a = [0.7, 0.8, 0.75, 0.9, 0.85, 0.6, 0.8, 0.7, 0.9, 0.75];
        let b = [0.6, 0.7, 0.8, 0.65, 0.75, 0.7, 0.6, 0.8, 0.7, 0.75];
        let r = t_test(&a, &b, 0.9).unwrap();
        assert!((r.t.unwrap() - 1.8525405838431708).abs() < 1e-9, "{:?}", r.t);
        assert_eq!(r.verdict, Significance::Significant);
        assert_eq!(t_test(&a, &b, 0.95).unwrap().verdict, Significance::NotSignificant);
    }

    #[test]
    fn table_layout() {
        let mut t = ResultTable::new();
        for (i, s) in FeatureSet::ALL_SETS.iter().enumerate() {
            let acc = 0.5 + i as f64 * 0.1;
            t.insert("AQ", "USMED", *s, Cell { accuracy: acc, precision: 0.78, recall: 0.73 });
        }
        t.insert("C4.5", "USMED", FeatureSet::Sfc, Cell { accuracy: 0.6, precision: 0.0, recall: 0.0 });
        let text = render_table(&t);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("TFIDF") && lines[0].contains("ALL"));
        assert!(lines[1].contains("0.80*") && lines[1].contains("0.78/0.73"));
        assert!(lines[2].contains('-') && lines[2].contains("0.0/0.0"));
        assert_eq!(render_table_csv(&t).lines().count(), 6);
    }

    fn toy_corpus() -> Corpus {
        let mut docs = Vec::new();
        for i in 0..10 {
            docs.push(Document::new(format!("p{i}"), "scuba scubaer reef diving kayaking", Label::Positive));
            docs.push(Document::new(format!("n{i}"), "football footballer stadium goal", Label::Negative));
        }
        docs.push(Document::new("u0", "unlabeled reading matter", Label::Unlabeled));
        Corpus::new(docs).unwrap()
    }

    #[test]
    fn kfold_tests_every_example_once() {
        let c = toy_corpus();
        let cfg = ExperimentConfig::new(FeatureSet::Sfc, Learner::Aq, SplitPlan::kfold(10, 7));
        let report = run_experiment(&c, &Resources::reference(), &cfg).unwrap();
        assert_eq!(report.runs.len(), 10);
        let mut tested: Vec<&String> = report.runs.iter().flat_map(|r| &r.tested).collect();
        tested.sort();
        tested.dedup();
        assert_eq!(tested.len(), 20);
        assert_eq!(report.mean.accuracy, 1.0);
    }

    #[test]
    fn seventy_thirty_shape_and_determinism() {
        let c = toy_corpus();
        for learner in [Learner::Aq, Learner::Tree, Learner::Rocchio] {
            let cfg = ExperimentConfig::new(FeatureSet::All, learner, SplitPlan::seventy_thirty(10, 3));
            let a = run_experiment(&c, &Resources::reference(), &cfg).unwrap();
            let b = run_experiment(&c, &Resources::reference(), &cfg).unwrap();
            assert_eq!(a.runs.len(), 10);
            assert!(a.runs.iter().all(|r| r.n_train == 14 && r.n_test == 6));
            assert_eq!(a.to_json_string(), b.to_json_string());
            assert_eq!(a.mean.accuracy, 1.0, "{learner}");
        }
    }
}
