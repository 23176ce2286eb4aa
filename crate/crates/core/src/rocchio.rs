//! Word-level relevance-feedback baseline: a modified-Rocchio profile
//! matched by cosine similarity with a tuned cutoff.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::DfTable;

/// Sparse term → weight map. Absent terms weigh 0.
pub type TermVector = BTreeMap<String, f64>;

#[derive(Debug, Error)]
pub enum RocchioError {
    #[error("no relevant training documents")]
    NoRelevant,
    #[error("profile parameters must be finite")]
    NonFinite,
    #[error("profile dump line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RocchioParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for RocchioParams {
    fn default() -> Self {
        RocchioParams { alpha: 8.0, beta: 16.0, gamma: 4.0 }
    }
}

impl RocchioParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, RocchioError> {
        if [alpha, beta, gamma].iter().all(|x| x.is_finite()) {
            Ok(RocchioParams { alpha, beta, gamma })
        } else {
            Err(RocchioError::NonFinite)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Tf,
    TfIdf,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Tf => "tf",
            Scale::TfIdf => "tfidf",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub weights: TermVector,
    pub scale: Scale,
    pub params: RocchioParams,
    /// Relevant and non-relevant document counts behind the weights.
    pub r: usize,
    pub s: usize,
}

impl Profile {
    pub fn weight(&self, term: &str) -> f64 {
        self.weights.get(term).copied().unwrap_or(0.0)
    }

    /// Multiplies tf-scale weights back by idf. Terms unknown to `df` are
    /// dropped.
    pub fn to_tfidf(&self, df: &DfTable) -> Profile {
        if self.scale == Scale::TfIdf {
            return self.clone();
        }
        let weights = self
            .weights
            .iter()
            .filter_map(|(t, w)| df.idf(t).ok().map(|idf| (t.clone(), w * idf)))
            .collect();
        Profile { weights, scale: Scale::TfIdf, ..self.clone() }
    }

    /// TSV dump: a `#` header with the scale and parameters, then
    /// `term<TAB>weight` lines in term order.
    pub fn to_tsv(&self) -> String {
        let p = &self.params;
        let mut out = format!(
            "# scale={} alpha={} beta={} gamma={} r={} s={}\n",
            self.scale, p.alpha, p.beta, p.gamma, self.r, self.s
        );
        for (t, w) in &self.weights {
            out.push_str(&format!("{t}\t{w}\n"));
        }
        out
    }

    pub fn from_tsv<R: BufRead>(reader: R) -> Result<Self, RocchioError> {
        let bad = |line: usize, message: &str| RocchioError::Format { line, message: message.to_string() };
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| bad(1, "missing header"))??;
        let fields: BTreeMap<&str, &str> = header
            .strip_prefix('#')
            .ok_or_else(|| bad(1, "header must start with `#`"))?
            .split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .collect();
        let num = |key: &str| -> Result<f64, RocchioError> {
            fields.get(key).and_then(|v| v.parse().ok()).ok_or_else(|| bad(1, &format!("bad or missing `{key}`")))
        };
        let count = |key: &str| -> Result<usize, RocchioError> {
            fields.get(key).and_then(|v| v.parse().ok()).ok_or_else(|| bad(1, &format!("bad or missing `{key}`")))
        };
        let scale = match fields.get("scale") {
            Some(&"tf") => Scale::Tf,
            Some(&"tfidf") => Scale::TfIdf,
            _ => return Err(bad(1, "bad or missing `scale`")),
        };
        let params = RocchioParams::new(num("alpha")?, num("beta")?, num("gamma")?)?;
        let mut weights = TermVector::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (t, w) = line.split_once('\t').ok_or_else(|| bad(i + 2, "expected term<TAB>weight"))?;
            let w: f64 = w.trim().parse().map_err(|_| bad(i + 2, "weight is not a number"))?;
            if !w.is_finite() {
                return Err(bad(i + 2, "weight is not finite"));
            }
            weights.insert(t.to_string(), w);
        }
        Ok(Profile { weights, scale, params, r: count("r")?, s: count("s")? })
    }
}

/// Mean of the relevant tf·idf vectors, divided by idf per term.
pub fn init_profile(relevant: &[TermVector], df: &DfTable) -> Result<Profile, RocchioError> {
    if relevant.is_empty() {
        return Err(RocchioError::NoRelevant);
    }
    let r = relevant.len() as f64;
    let mut sums = TermVector::new();
    for doc in relevant {
        for (t, w) in doc {
            *sums.entry(t.clone()).or_insert(0.0) += w;
        }
    }
    let weights = sums
        .into_iter()
        .filter_map(|(t, sum)| {
            let idf = df.idf(&t).ok()?;
            let w = sum / r / idf;
            (w != 0.0).then_some((t, w))
        })
        .collect();
    Ok(Profile { weights, scale: Scale::Tf, params: RocchioParams::default(), r: relevant.len(), s: 0 })
}

/// `α·p_old + (β/r)·Σ relevant − (γ/s)·Σ nonrelevant` per term. An empty
/// side contributes nothing. Negative weights are kept.
pub fn reweight(p_old: &Profile, relevant: &[TermVector], nonrelevant: &[TermVector], params: RocchioParams) -> Profile {
    let mut weights: TermVector = p_old.weights.iter().map(|(t, w)| (t.clone(), params.alpha * w)).collect();
    for (docs, coef) in [(relevant, params.beta), (nonrelevant, -params.gamma)] {
        if docs.is_empty() {
            continue;
        }
        let scale = coef / docs.len() as f64;
        let mut sums = TermVector::new();
        for doc in docs {
            for (t, w) in doc {
                *sums.entry(t.clone()).or_insert(0.0) += w;
            }
        }
        for (t, sum) in sums {
            *weights.entry(t).or_insert(0.0) += scale * sum;
        }
    }
    weights.retain(|_, w| *w != 0.0);
    Profile { weights, scale: p_old.scale, params, r: relevant.len(), s: nonrelevant.len() }
}

fn norm(v: &TermVector) -> f64 {
    v.values().map(|w| w * w).sum::<f64>().sqrt()
}

/// Cosine of two sparse vectors; 0 when either is all zeros.
pub fn cosine(a: &TermVector, b: &TermVector) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small.iter().filter_map(|(t, w)| large.get(t).map(|x| w * x)).sum();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Cosine between a document's tf·idf weights and a profile, converting a
/// tf-scale profile to tf·idf first.
pub fn cosine_similarity(doc_weights: &TermVector, profile: &Profile, df: &DfTable) -> f64 {
    match profile.scale {
        Scale::TfIdf => cosine(doc_weights, &profile.weights),
        Scale::Tf => cosine(doc_weights, &profile.to_tfidf(df).weights),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub cutoff: f64,
    pub precision: f64,
    pub recall: f64,
    /// No predicted positives; precision reported as 0.
    pub precision_undefined: bool,
    /// No known positives; recall reported as 0.
    pub recall_undefined: bool,
}

/// `n` evenly spaced cutoffs from 0 to 1 inclusive.
pub fn grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn default_grid() -> Vec<f64> {
    grid(101)
}

/// Precision and recall at each cutoff, predicting relevant iff
/// similarity ≥ cutoff.
pub fn pr_sweep(scores: &[(f64, bool)], cutoffs: &[f64]) -> Vec<CurvePoint> {
    let known = scores.iter().filter(|(_, l)| *l).count();
    cutoffs
        .iter()
        .map(|&cutoff| {
            let predicted = scores.iter().filter(|(s, _)| *s >= cutoff).count();
            let tp = scores.iter().filter(|(s, l)| *l && *s >= cutoff).count();
            CurvePoint {
                cutoff,
                precision: if predicted == 0 { 0.0 } else { tp as f64 / predicted as f64 },
                recall: if known == 0 { 0.0 } else { tp as f64 / known as f64 },
                precision_undefined: predicted == 0,
                recall_undefined: known == 0,
            }
        })
        .collect()
}

/// Cutoff maximizing precision + recall; the smallest wins ties.
pub fn best_cutoff(curve: &[CurvePoint]) -> Option<f64> {
    let mut best: Option<&CurvePoint> = None;
    for p in curve {
        let better = match best {
            None => true,
            Some(b) => {
                let (sp, sb) = (p.precision + p.recall, b.precision + b.recall);
                sp > sb || (sp == sb && p.cutoff < b.cutoff)
            }
        };
        if better {
            best = Some(p);
        }
    }
    best.map(|p| p.cutoff)
}

/// A trained matcher: tf-scale profile, its tf·idf form and the cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocchioModel {
    pub profile: Profile,
    pub matching: TermVector,
    pub cutoff: f64,
}

impl RocchioModel {
    pub fn score(&self, doc_weights: &TermVector) -> f64 {
        cosine(doc_weights, &self.matching)
    }

    pub fn classify(&self, doc_weights: &TermVector) -> bool {
        self.score(doc_weights) >= self.cutoff
    }
}

pub fn counts_to_vector(counts: &BTreeMap<String, usize>) -> TermVector {
    counts.iter().map(|(t, c)| (t.clone(), *c as f64)).collect()
}

/// Initial profile from the relevant documents, one reweighting step with
/// raw term counts as document weights, then the cutoff that maximizes
/// precision + recall on the same training documents.
pub fn learn(
    train: &[(BTreeMap<String, usize>, bool)],
    df: &DfTable,
    params: RocchioParams,
) -> Result<RocchioModel, RocchioError> {
    let tfidf: Vec<TermVector> = train.iter().map(|(c, _)| df.weigh(c)).collect();
    let relevant: Vec<TermVector> =
        tfidf.iter().zip(train).filter(|(_, (_, l))| *l).map(|(v, _)| v.clone()).collect();
    let initial = init_profile(&relevant, df)?;
    let dw_rel: Vec<TermVector> = train.iter().filter(|(_, l)| *l).map(|(c, _)| counts_to_vector(c)).collect();
    let dw_non: Vec<TermVector> = train.iter().filter(|(_, l)| !*l).map(|(c, _)| counts_to_vector(c)).collect();
    let profile = reweight(&initial, &dw_rel, &dw_non, params);
    let matching = profile.to_tfidf(df).weights;
    let scores: Vec<(f64, bool)> = tfidf.iter().zip(train).map(|(v, (_, l))| (cosine(v, &matching), *l)).collect();
    let cutoff = best_cutoff(&pr_sweep(&scores, &default_grid())).expect("grid is nonempty");
    Ok(RocchioModel { profile, matching, cutoff })
}
