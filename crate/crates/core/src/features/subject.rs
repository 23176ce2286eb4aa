//! Subject-category assignment: a two-pass surrogate that votes with
//! unambiguous words first, then resolves ambiguous words against the
//! pass-one tallies through pairwise category correlations.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::corpus::Tokenizer;
use crate::hierarchy::GeneralizationHierarchy;

pub const N_SUBJECTS: usize = 5;

/// term → candidate categories with priors summing to one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<(String, f64)>>,
}

impl Lexicon {
    /// Builds a lexicon from `(term, category, prior)` triples. Priors are
    /// normalized per term; a zero prior total falls back to uniform.
    pub fn from_triples<I, T, C>(triples: I) -> Result<Self, FeatureError>
    where
        I: IntoIterator<Item = (T, C, f64)>,
        T: Into<String>,
        C: Into<String>,
    {
        let mut entries: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
        for (term, cat, prior) in triples {
            let term = term.into();
            if !prior.is_finite() || prior < 0.0 {
                return Err(FeatureError::Format(format!("bad prior {prior} for term `{term}`")));
            }
            let cands = entries.entry(term).or_default();
            let cat = cat.into();
            match cands.iter_mut().find(|(c, _)| *c == cat) {
                Some(slot) => slot.1 += prior,
                None => cands.push((cat, prior)),
            }
        }
        for cands in entries.values_mut() {
            let total: f64 = cands.iter().map(|(_, p)| p).sum();
            let uniform = 1.0 / cands.len() as f64;
            for (_, p) in cands.iter_mut() {
                *p = if total > 0.0 { *p / total } else { uniform };
            }
            cands.sort_by(|a, b| a.0.cmp(&b.0));
        }
        Ok(Lexicon { entries })
    }

    /// Parses `term<TAB>category<TAB>prior` lines.
    pub fn parse(text: &str) -> Result<Self, FeatureError> {
        let mut triples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [term, cat, prior] = fields[..] else {
                return Err(FeatureError::Format(format!(
                    "lexicon line {}: expected term<TAB>category<TAB>prior",
                    i + 1
                )));
            };
            let prior: f64 = prior.trim().parse().map_err(|_| {
                FeatureError::Format(format!("lexicon line {}: bad prior `{prior}`", i + 1))
            })?;
            triples.push((term.trim().to_lowercase(), cat.trim().to_string(), prior));
        }
        Self::from_triples(triples)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (term, cands) in &self.entries {
            for (cat, p) in cands {
                out.push_str(&format!("{term}\t{cat}\t{p}\n"));
            }
        }
        out
    }

    pub fn candidates(&self, term: &str) -> Option<&[(String, f64)]> {
        self.entries.get(term).map(Vec::as_slice)
    }

    pub fn is_unambiguous(&self, term: &str) -> bool {
        self.entries.get(term).is_some_and(|c| c.len() == 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Terms whose single category is `category`.
    pub fn unambiguous_terms_for<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a str> {
        self.entries
            .iter()
            .filter(move |(_, c)| c.len() == 1 && c[0].0 == category)
            .map(|(t, _)| t.as_str())
    }

    /// Every category must name a hierarchy node.
    pub fn validate(&self, h: &GeneralizationHierarchy) -> Result<(), FeatureError> {
        for (term, cands) in &self.entries {
            for (cat, _) in cands {
                if !h.contains(cat) {
                    return Err(FeatureError::Format(format!(
                        "lexicon term `{term}` names unknown category `{cat}`"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Symmetric category correlations; absent pairs read as zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CategoryCorrelations {
    // Both orientations are stored so lookups need no key allocation.
    corr: HashMap<String, HashMap<String, f64>>,
    pairs: usize,
}

impl CategoryCorrelations {
    pub fn set(&mut self, a: &str, b: &str, value: f64) -> Result<(), FeatureError> {
        if !value.is_finite() || value < 0.0 {
            return Err(FeatureError::Format(format!("correlation {a}/{b} must be >= 0, got {value}")));
        }
        let fresh = self.corr.entry(a.to_string()).or_default().insert(b.to_string(), value).is_none();
        self.corr.entry(b.to_string()).or_default().insert(a.to_string(), value);
        if fresh {
            self.pairs += 1;
        }
        Ok(())
    }

    pub fn get(&self, a: &str, b: &str) -> f64 {
        self.corr.get(a).and_then(|row| row.get(b)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs == 0
    }

    /// Parses `cat_a<TAB>cat_b<TAB>value` lines.
    pub fn parse(text: &str) -> Result<Self, FeatureError> {
        let mut out = CategoryCorrelations::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [a, b, v] = fields[..] else {
                return Err(FeatureError::Format(format!(
                    "correlation line {}: expected cat_a<TAB>cat_b<TAB>value",
                    i + 1
                )));
            };
            let v: f64 = v.trim().parse().map_err(|_| {
                FeatureError::Format(format!("correlation line {}: bad value `{v}`", i + 1))
            })?;
            out.set(a.trim(), b.trim(), v)?;
        }
        Ok(out)
    }

    pub fn to_tsv(&self) -> String {
        let mut pairs: Vec<(&str, &str, f64)> = self
            .corr
            .iter()
            .flat_map(|(a, row)| row.iter().map(move |(b, &v)| (a.as_str(), b.as_str(), v)))
            .filter(|(a, b, _)| a <= b)
            .collect();
        pairs.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        pairs.into_iter().map(|(a, b, v)| format!("{a}\t{b}\t{v}\n")).collect()
    }
}

/// Per-document category salience, L1-normalized or all zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SubjectVector {
    salience: BTreeMap<String, f64>,
}

impl SubjectVector {
    pub fn from_tallies(tallies: BTreeMap<String, f64>) -> Self {
        let total: f64 = tallies.values().sum();
        if total <= 0.0 {
            return SubjectVector::default();
        }
        SubjectVector {
            salience: tallies.into_iter().filter(|(_, v)| *v > 0.0).map(|(c, v)| (c, v / total)).collect(),
        }
    }

    pub fn get(&self, category: &str) -> f64 {
        self.salience.get(category).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.salience.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.salience.iter().map(|(c, &v)| (c.as_str(), v))
    }

    /// The `k` most salient categories, descending, lexicographic tie-break,
    /// padded with `None`.
    pub fn top(&self, k: usize) -> Vec<Option<String>> {
        let mut ranked: Vec<(&String, f64)> = self.salience.iter().map(|(c, &v)| (c, v)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let mut out: Vec<Option<String>> = ranked.into_iter().take(k).map(|(c, _)| Some(c.clone())).collect();
        out.resize(k, None);
        out
    }
}

/// Two-pass category assignment over a token stream.
pub fn subject_vector_from_tokens<S: AsRef<str>>(
    tokens: &[S],
    lex: &Lexicon,
    corr: &CategoryCorrelations,
) -> SubjectVector {
    let mut tally: BTreeMap<String, f64> = BTreeMap::new();
    for tok in tokens {
        if let Some([(cat, _)]) = lex.candidates(tok.as_ref()) {
            *tally.entry(cat.clone()).or_insert(0.0) += 1.0;
        }
    }
    // Ambiguous tokens are scored against the pass-one context only, so the
    // result does not depend on token order.
    let context: Vec<(String, f64)> = tally.iter().map(|(c, &v)| (c.clone(), v)).collect();
    for tok in tokens {
        let Some(cands) = lex.candidates(tok.as_ref()) else { continue };
        if cands.len() < 2 {
            continue;
        }
        let mut best: Option<(&str, f64)> = None;
        // Candidates are sorted by category id, so strict `>` keeps the
        // lexicographically smallest on ties.
        for (cat, prior) in cands {
            let support: f64 = context.iter().map(|(u, t)| t * corr.get(cat, u)).sum();
            let score = prior * (1.0 + support);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((cat, score));
            }
        }
        if let Some((cat, _)) = best {
            *tally.entry(cat.to_string()).or_insert(0.0) += 1.0;
        }
    }
    SubjectVector::from_tallies(tally)
}

pub fn subject_vector(
    text: &str,
    tokenizer: &Tokenizer,
    lex: &Lexicon,
    corr: &CategoryCorrelations,
) -> SubjectVector {
    subject_vector_from_tokens(&tokenizer.tokenize(text), lex, corr)
}

/// Subject attributes x1..x5.
pub fn top_subjects(sv: &SubjectVector) -> [Option<String>; N_SUBJECTS] {
    let top = sv.top(N_SUBJECTS);
    std::array::from_fn(|i| top[i].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::from_triples([
            ("heart", "med", 1.0),
            ("pulse", "med", 1.0),
            ("goal", "sport", 1.0),
            ("court", "law", 0.5),
            ("court", "sport", 0.5),
            ("t", "a", 0.5),
            ("t", "b", 0.5),
            ("n", "neighbor", 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn single_category_is_one_hot() {
        let sv = subject_vector_from_tokens(&["heart", "pulse"], &lex(), &CategoryCorrelations::default());
        assert_eq!(sv.get("med"), 1.0);
        assert_eq!(sv.iter().count(), 1);
    }

    #[test]
    fn no_hits_is_zero() {
        let sv = subject_vector_from_tokens(&["zzz"], &lex(), &CategoryCorrelations::default());
        assert!(sv.is_zero());
        assert_eq!(top_subjects(&sv), [None, None, None, None, None]);
    }

    #[test]
    fn ambiguous_token_follows_correlated_context() {
        let mut corr = CategoryCorrelations::default();
        corr.set("a", "neighbor", 1.0).unwrap();
        let sv = subject_vector_from_tokens(&["t", "n"], &lex(), &corr);
        // a: 0.5 * (1 + 1*1) = 1.0 beats b: 0.5 * (1 + 0) = 0.5.
        assert_eq!(sv.get("a"), 0.5);
        assert_eq!(sv.get("b"), 0.0);
        // Without correlation evidence, the tie goes to `a` lexicographically.
        let sv = subject_vector_from_tokens(&["t"], &lex(), &CategoryCorrelations::default());
        assert_eq!(sv.get("a"), 1.0);
    }

    #[test]
    fn top_subject_ordering() {
        let sv = SubjectVector::from_tallies(
            [("med".to_string(), 5.0), ("sport".to_string(), 3.0), ("law".to_string(), 2.0)].into(),
        );
        assert_eq!(
            top_subjects(&sv),
            [Some("med".into()), Some("sport".into()), Some("law".into()), None, None]
        );
        let sv = SubjectVector::from_tallies(
            [("b".to_string(), 2.0), ("a".to_string(), 2.0), ("c".to_string(), 1.0)].into(),
        );
        let top = top_subjects(&sv);
        assert_eq!(top[0].as_deref(), Some("a"));
        assert_eq!(top[1].as_deref(), Some("b"));
    }

    #[test]
    fn lexicon_priors_normalize() {
        let lex = Lexicon::from_triples([("w", "x", 2.0), ("w", "y", 6.0)]).unwrap();
        let c = lex.candidates("w").unwrap();
        assert_eq!(c, &[("x".to_string(), 0.25), ("y".to_string(), 0.75)]);
        assert!(!lex.is_unambiguous("w"));
    }

    #[test]
    fn lexicon_and_corr_parse() {
        let lex = Lexicon::parse("Heart\tmed\t1\ncourt\tlaw\t0.5\ncourt\tsport\t0.5\n").unwrap();
        assert!(lex.is_unambiguous("heart"));
        assert!(Lexicon::parse("bad line\n").is_err());
        let corr = CategoryCorrelations::parse("a\tb\t0.5\n").unwrap();
        assert_eq!(corr.get("b", "a"), 0.5);
        assert_eq!(corr.get("a", "c"), 0.0);
    }
}
