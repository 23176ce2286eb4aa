//! Labeled document collections: the line-delimited JSON corpus format,
//! tokenization, and the train/test partitioning protocols.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "pos")]
    Positive,
    #[serde(rename = "neg")]
    Negative,
    #[serde(rename = "none")]
    Unlabeled,
}

impl Label {
    pub fn is_labeled(self) -> bool {
        self != Label::Unlabeled
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolKind {
    Person,
    Organization,
    Location,
}

/// A named entity mention. `attrs` carries kind-specific fields such as
/// `honorific`, `title`, `business` or `country`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolEntity {
    pub kind: PolKind,
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, String>,
}

impl PolEntity {
    pub fn new(kind: PolKind, name: impl Into<String>) -> Self {
        PolEntity { kind, name: name.into(), attrs: BTreeMap::new() }
    }

    pub fn with_attr(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attrs.insert(key.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Label,
    #[serde(default, rename = "pol", skip_serializing_if = "Option::is_none")]
    pub pol_annotations: Option<Vec<PolEntity>>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Label) -> Self {
        Document { id: id.into(), text: text.into(), label, pol_annotations: None }
    }
}

/// An ordered document collection. Ids are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Corpus { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn n_total(&self) -> usize {
        self.documents.len()
    }

    pub fn n_positive(&self) -> usize {
        self.count(Label::Positive)
    }

    pub fn n_negative(&self) -> usize {
        self.count(Label::Negative)
    }

    fn count(&self, label: Label) -> usize {
        self.documents.iter().filter(|d| d.label == label).count()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    /// Splits into (labeled, unlabeled) sub-corpora, preserving order.
    pub fn partition_labeled(&self) -> (Corpus, Corpus) {
        let (labeled, unlabeled): (Vec<_>, Vec<_>) =
            self.documents.iter().cloned().partition(|d| d.label.is_labeled());
        (Corpus { documents: labeled }, Corpus { documents: unlabeled })
    }

    fn select(&self, indices: &[usize]) -> Corpus {
        Corpus { documents: indices.iter().map(|&i| self.documents[i].clone()).collect() }
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Document;
    type IntoIter = std::slice::Iter<'a, Document>;

    fn into_iter(self) -> Self::IntoIter {
        self.documents.iter()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    id: String,
    text: String,
    label: Label,
    #[serde(default)]
    pol: Option<Vec<PolEntity>>,
}

/// Reads one JSON record per line. Blank lines are skipped.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Parse { line: i + 1, message: e.to_string() })?;
        if !seen.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId(record.id));
        }
        documents.push(Document {
            id: record.id,
            text: record.text,
            label: record.label,
            pol_annotations: record.pol,
        });
    }
    Ok(Corpus { documents })
}

pub fn write_corpus<W: Write>(corpus: &Corpus, mut writer: W) -> Result<(), CorpusError> {
    for doc in corpus {
        let line = serde_json::to_string(doc).expect("documents always serialize");
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Lowercasing tokenizer over maximal runs of Unicode letters and digits.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    stopwords: HashSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::from_stopword_list(DEFAULT_STOPWORDS)
    }
}

impl Tokenizer {
    pub fn new<I, S>(stopwords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Tokenizer { stopwords: stopwords.into_iter().map(|s| s.as_ref().to_lowercase()).collect() }
    }

    pub fn without_stopwords() -> Self {
        Tokenizer { stopwords: HashSet::new() }
    }

    /// Parses a stopword file: one token per line.
    pub fn from_stopword_list(text: &str) -> Self {
        Tokenizer::new(text.lines().map(str::trim).filter(|l| !l.is_empty()))
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .filter(|w| !self.stopwords.contains(w))
            .collect()
    }

    /// Term counts for a text.
    pub fn term_counts(&self, text: &str) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for token in self.tokenize(text) {
            *counts.entry(token).or_insert(0) += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    #[serde(rename = "70-30", alias = "seventy_thirty")]
    SeventyThirty,
    #[serde(rename = "kfold")]
    KFold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub kind: SplitKind,
    pub k: usize,
    pub runs: usize,
    pub seed: u64,
    #[serde(default)]
    pub stratified: bool,
}

impl Default for SplitPlan {
    fn default() -> Self {
        SplitPlan { kind: SplitKind::SeventyThirty, k: 10, runs: 10, seed: 0, stratified: false }
    }
}

impl SplitPlan {
    pub fn kfold(k: usize, seed: u64) -> Self {
        SplitPlan { kind: SplitKind::KFold, k, runs: k, seed, stratified: false }
    }

    pub fn seventy_thirty(runs: usize, seed: u64) -> Self {
        SplitPlan { kind: SplitKind::SeventyThirty, k: 10, runs, seed, stratified: false }
    }

    /// Number of train/test runs the plan produces.
    pub fn n_runs(&self) -> usize {
        match self.kind {
            SplitKind::SeventyThirty => self.runs,
            SplitKind::KFold => self.k,
        }
    }

    /// Materializes every (train, test) pair of the plan.
    pub fn partitions(&self, corpus: &Corpus) -> Result<Vec<(Corpus, Corpus)>, CorpusError> {
        if self.runs == 0 {
            return Err(CorpusError::Validation("split plan needs at least one run".into()));
        }
        match self.kind {
            SplitKind::SeventyThirty => (0..self.runs)
                .map(|run| {
                    split_70_30_with(corpus, derive_run_seed(self.seed, run as u64), self.stratified)
                })
                .collect(),
            SplitKind::KFold => kfold_with(corpus, self.k, self.seed, self.stratified),
        }
    }
}

/// Per-run seed derived from a base seed (SplitMix64 finalizer).
pub fn derive_run_seed(base: u64, run: u64) -> u64 {
    let mut z = base.wrapping_add(run.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn shuffled_indices(indices: &mut [usize], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
}

/// Training-set size for a 70/30 split, rounding half up.
pub fn seventy_percent(n: usize) -> usize {
    (7 * n + 5) / 10
}

pub fn split_70_30(corpus: &Corpus, run_seed: u64) -> Result<(Corpus, Corpus), CorpusError> {
    split_70_30_with(corpus, run_seed, false)
}

/// 70/30 split. With `stratified`, each label class is split separately
/// by the same rule.
pub fn split_70_30_with(
    corpus: &Corpus,
    run_seed: u64,
    stratified: bool,
) -> Result<(Corpus, Corpus), CorpusError> {
    let n = corpus.len();
    if n < 2 {
        return Err(CorpusError::Validation(format!(
            "70/30 split needs at least 2 documents, corpus has {n}"
        )));
    }
    let groups = if stratified { label_groups(corpus) } else { vec![(0..n).collect()] };
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (g, mut group) in groups.into_iter().enumerate() {
        shuffled_indices(&mut group, run_seed.wrapping_add(g as u64));
        let cut = seventy_percent(group.len());
        train.extend_from_slice(&group[..cut]);
        test.extend_from_slice(&group[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((corpus.select(&train), corpus.select(&test)))
}

pub fn kfold(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<(Corpus, Corpus)>, CorpusError> {
    kfold_with(corpus, k, seed, false)
}

/// k-fold partitioning: a seeded shuffle followed by contiguous slicing, the
/// first `n % k` folds taking one extra document. The stratified variant
/// deals each label class round-robin across folds instead.
pub fn kfold_with(
    corpus: &Corpus,
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<Vec<(Corpus, Corpus)>, CorpusError> {
    let n = corpus.len();
    if k < 2 {
        return Err(CorpusError::Validation(format!("k-fold needs k >= 2, got {k}")));
    }
    if k > n {
        return Err(CorpusError::Validation(format!(
            "k-fold with k={k} exceeds corpus size {n}"
        )));
    }
    let folds = fold_assignment(corpus, k, seed, stratified);
    Ok((0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| folds[i] == f);
            (corpus.select(&train), corpus.select(&test))
        })
        .collect())
}

fn fold_assignment(corpus: &Corpus, k: usize, seed: u64, stratified: bool) -> Vec<usize> {
    let n = corpus.len();
    let mut folds = vec![0; n];
    if stratified {
        let mut order = Vec::with_capacity(n);
        for (g, mut group) in label_groups(corpus).into_iter().enumerate() {
            shuffled_indices(&mut group, seed.wrapping_add(g as u64));
            order.extend(group);
        }
        for (pos, idx) in order.into_iter().enumerate() {
            folds[idx] = pos % k;
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        shuffled_indices(&mut order, seed);
        let base = n / k;
        let extra = n % k;
        let mut pos = 0;
        for f in 0..k {
            let size = base + usize::from(f < extra);
            for &idx in &order[pos..pos + size] {
                folds[idx] = f;
            }
            pos += size;
        }
    }
    folds
}

fn label_groups(corpus: &Corpus) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, doc) in corpus.iter().enumerate() {
        groups.entry(doc.label).or_default().push(i);
    }
    groups.into_values().collect()
}
