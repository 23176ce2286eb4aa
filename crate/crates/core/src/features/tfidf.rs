use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::corpus::{Corpus, Tokenizer};

/// Document frequencies over a collection of `n` documents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfTable {
    df: BTreeMap<String, usize>,
    n: usize,
}

impl DfTable {
    pub fn build(corpus: &Corpus, tokenizer: &Tokenizer) -> Self {
        let mut df = BTreeMap::new();
        for doc in corpus {
            let terms: BTreeSet<String> = tokenizer.tokenize(&doc.text).into_iter().collect();
            for term in terms {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        DfTable { df, n: corpus.len() }
    }

    /// Builds a table from pre-tokenized term sets (one per document).
    pub fn from_term_sets<'a, I, S>(docs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = &'a str>,
    {
        let mut df = BTreeMap::new();
        let mut n = 0;
        for doc in docs {
            n += 1;
            let terms: BTreeSet<&str> = doc.into_iter().collect();
            for term in terms {
                *df.entry(term.to_string()).or_insert(0) += 1;
            }
        }
        DfTable { df, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn df(&self, term: &str) -> usize {
        self.df.get(term).copied().unwrap_or(0)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.df.contains_key(term)
    }

    pub fn len(&self) -> usize {
        self.df.len()
    }

    pub fn is_empty(&self) -> bool {
        self.df.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, usize)> {
        self.df.iter().map(|(t, &d)| (t.as_str(), d))
    }

    /// The idf factor `log2(n) - log2(df) + 1`.
    pub fn idf(&self, term: &str) -> Result<f64, FeatureError> {
        idf_factor(self.df(term), self.n)
    }

    pub fn weight(&self, term: &str, tf: usize) -> Result<f64, FeatureError> {
        tfidf_weight(tf, self.df(term), self.n)
    }

    /// tf·idf weights of a document's term counts. Terms the table has
    /// never seen are dropped.
    pub fn weigh(&self, counts: &BTreeMap<String, usize>) -> BTreeMap<String, f64> {
        counts
            .iter()
            .filter(|(t, _)| self.contains(t))
            .map(|(t, &tf)| (t.clone(), self.weight(t, tf).expect("term is present")))
            .collect()
    }
}

pub fn df_table(corpus: &Corpus, tokenizer: &Tokenizer) -> DfTable {
    DfTable::build(corpus, tokenizer)
}

fn idf_factor(df: usize, n: usize) -> Result<f64, FeatureError> {
    if df == 0 {
        return Err(FeatureError::Domain(format!("idf undefined for df=0 (n={n})")));
    }
    if df > n {
        return Err(FeatureError::Domain(format!("df={df} exceeds n={n}")));
    }
    Ok((n as f64).log2() - (df as f64).log2() + 1.0)
}

/// `tf * (log2(n) - log2(df) + 1)`; zero when `tf` is zero.
pub fn tfidf_weight(tf: usize, df: usize, n: usize) -> Result<f64, FeatureError> {
    if tf == 0 {
        return Ok(0.0);
    }
    Ok(tf as f64 * idf_factor(df, n)?)
}

/// Ranks every term in `train` by its maximum tf·idf weight over the
/// training documents and keeps the first `n_keywords`. Ties go to the
/// lexicographically smaller term.
pub fn select_keywords(
    train: &Corpus,
    df: &DfTable,
    tokenizer: &Tokenizer,
    n_keywords: usize,
) -> Vec<String> {
    let mut best: BTreeMap<String, f64> = BTreeMap::new();
    for doc in train {
        for (term, tf) in tokenizer.term_counts(&doc.text) {
            let Ok(w) = df.weight(&term, tf) else { continue };
            let slot = best.entry(term).or_insert(f64::NEG_INFINITY);
            if w > *slot {
                *slot = w;
            }
        }
    }
    let mut ranked: Vec<(String, f64)> = best.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.into_iter().take(n_keywords).map(|(t, _)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Label};

    fn corpus(texts: &[&str]) -> Corpus {
        Corpus::new(
            texts
                .iter()
                .enumerate()
                .map(|(i, t)| Document::new(format!("d{i}"), *t, Label::Positive))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn df_counts_documents() {
        let tok = Tokenizer::without_stopwords();
        let t = df_table(&corpus(&["a b", "a"]), &tok);
        assert_eq!((t.df("a"), t.df("b"), t.n()), (2, 1, 2));
        let t = df_table(&Corpus::default(), &tok);
        assert!(t.is_empty());
        assert_eq!(t.n(), 0);
        let t = df_table(&corpus(&["x x x x x"]), &tok);
        assert_eq!(t.df("x"), 1);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(tfidf_weight(0, 0, 0).unwrap(), 0.0);
        assert_eq!(tfidf_weight(2, 1, 4).unwrap(), 6.0);
        assert_eq!(tfidf_weight(3, 8, 8).unwrap(), 3.0);
        assert!(tfidf_weight(1, 0, 4).is_err());
    }

    #[test]
    fn keyword_truncation_and_ties() {
        let tok = Tokenizer::without_stopwords();
        let c = corpus(&["b a c"]);
        let df = df_table(&c, &tok);
        assert_eq!(select_keywords(&c, &df, &tok, 5), vec!["a", "b", "c"]);
        assert_eq!(select_keywords(&c, &df, &tok, 2), vec!["a", "b"]);
    }

    #[test]
    fn keyword_ranking_matches_exhaustive_scores() {
        let tok = Tokenizer::without_stopwords();
        let c = corpus(&["apple apple pear", "pear fig", "fig fig fig kiwi", "apple kiwi plum"]);
        let df = df_table(&c, &tok);
        // Exhaustive: n=4; df apple=2 pear=2 fig=2 kiwi=2 plum=1.
        // max weights: apple 2*(2-1+1)=4, pear 2, fig 3*2=6, kiwi 2, plum 1*(2-0+1)=3.
        assert_eq!(
            select_keywords(&c, &df, &tok, 10),
            vec!["fig", "apple", "plum", "kiwi", "pear"]
        );
    }
}
