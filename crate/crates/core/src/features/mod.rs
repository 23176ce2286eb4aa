//! Hybrid document representation: subject attributes x1..x5, entity slots
//! x6..x140 and tf·idf weights for a selected keyword vocabulary.

mod pol;
mod subject;
mod tfidf;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use thiserror::Error;

pub use pol::{
    block, kind_of_slot, pol_slots, pol_tag, slot_index, slot_name, sub_slots, tag_text, Gazetteer,
    LOCATION_SLOTS, ORGANIZATION_SLOTS, PERSON_SLOTS, POL_SLOTS,
};
pub use subject::{
    subject_vector, subject_vector_from_tokens, top_subjects, CategoryCorrelations, Lexicon,
    SubjectVector, N_SUBJECTS,
};
pub use tfidf::{df_table, select_keywords, tfidf_weight, DfTable};

use crate::corpus::{Document, Tokenizer};

/// Spelling of an empty slot in dumps and reports.
pub const NULL: &str = "__null__";

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("{0}")]
    Domain(String),
    #[error("feature set {set} needs {missing}")]
    MissingContext { set: FeatureSet, missing: &'static str },
    #[error("{0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Tfidf,
    Pol,
    Sfc,
    All,
}

impl FeatureSet {
    pub const ALL_SETS: [FeatureSet; 4] = [FeatureSet::Tfidf, FeatureSet::Pol, FeatureSet::Sfc, FeatureSet::All];

    pub fn has_subjects(self) -> bool {
        matches!(self, FeatureSet::Sfc | FeatureSet::All)
    }

    pub fn has_pol(self) -> bool {
        matches!(self, FeatureSet::Pol | FeatureSet::All)
    }

    pub fn has_keywords(self) -> bool {
        matches!(self, FeatureSet::Tfidf | FeatureSet::All)
    }

    pub fn label(self) -> &'static str {
        match self {
            FeatureSet::Tfidf => "TFIDF",
            FeatureSet::Pol => "POL",
            FeatureSet::Sfc => "SFC",
            FeatureSet::All => "ALL",
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FeatureSet {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tfidf" => Ok(FeatureSet::Tfidf),
            "pol" => Ok(FeatureSet::Pol),
            "sfc" => Ok(FeatureSet::Sfc),
            "all" => Ok(FeatureSet::All),
            other => Err(FeatureError::Format(format!("unknown feature set `{other}`"))),
        }
    }
}

/// A document's attribute values. Blocks not requested by the feature set
/// are `None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    pub subjects: Option<[Option<String>; N_SUBJECTS]>,
    pub pol: Option<Vec<Option<String>>>,
    /// Weights aligned with the context vocabulary.
    pub keywords: Option<Vec<(String, f64)>>,
}

impl FeatureVector {
    pub fn subject(&self, i: usize) -> Option<&str> {
        self.subjects.as_ref().and_then(|s| s[i].as_deref())
    }

    /// JSON dump with `subjects`, `pol` and `keywords` blocks; empty slots
    /// spelled [`NULL`].
    pub fn to_json(&self) -> Json {
        let mut obj = serde_json::Map::new();
        let spell = |v: &Option<String>| Json::String(v.clone().unwrap_or_else(|| NULL.to_string()));
        if let Some(s) = &self.subjects {
            obj.insert("subjects".into(), Json::Array(s.iter().map(spell).collect()));
        }
        if let Some(p) = &self.pol {
            obj.insert("pol".into(), Json::Array(p.iter().map(spell).collect()));
        }
        if let Some(k) = &self.keywords {
            let kw: serde_json::Map<String, Json> = k.iter().map(|(t, w)| (t.clone(), json!(w))).collect();
            obj.insert("keywords".into(), Json::Object(kw));
        }
        Json::Object(obj)
    }

    pub fn from_json(value: &Json) -> Result<Self, FeatureError> {
        let bad = |what: &str| FeatureError::Format(format!("feature dump: bad `{what}` block"));
        let unspell = |v: &Json| -> Result<Option<String>, FeatureError> {
            match v.as_str() {
                Some(NULL) => Ok(None),
                Some(s) => Ok(Some(s.to_string())),
                None => Err(bad("slot")),
            }
        };
        let subjects = match value.get("subjects") {
            None => None,
            Some(Json::Array(a)) if a.len() == N_SUBJECTS => {
                let vals: Vec<Option<String>> = a.iter().map(unspell).collect::<Result<_, _>>()?;
                Some(std::array::from_fn(|i| vals[i].clone()))
            }
            Some(_) => return Err(bad("subjects")),
        };
        let pol = match value.get("pol") {
            None => None,
            Some(Json::Array(a)) if a.len() == POL_SLOTS => Some(a.iter().map(unspell).collect::<Result<_, _>>()?),
            Some(_) => return Err(bad("pol")),
        };
        let keywords = match value.get("keywords") {
            None => None,
            Some(Json::Object(m)) => Some(
                m.iter()
                    .map(|(t, w)| w.as_f64().map(|w| (t.clone(), w)).ok_or_else(|| bad("keywords")))
                    .collect::<Result<_, _>>()?,
            ),
            Some(_) => return Err(bad("keywords")),
        };
        Ok(FeatureVector { subjects, pol, keywords })
    }
}

/// Shared, read-only resources for feature extraction. Components a
/// feature set does not use may be absent.
#[derive(Debug, Clone, Default)]
pub struct FeatureContext {
    pub tokenizer: Tokenizer,
    pub df: Option<DfTable>,
    pub vocabulary: Option<Vec<String>>,
    pub lexicon: Option<Lexicon>,
    pub correlations: Option<CategoryCorrelations>,
    pub gazetteer: Option<Gazetteer>,
}

/// Fills the blocks named by `set`.
pub fn assemble(doc: &Document, set: FeatureSet, ctx: &FeatureContext) -> Result<FeatureVector, FeatureError> {
    let missing = |what| FeatureError::MissingContext { set, missing: what };
    let mut fv = FeatureVector::default();
    let tokens = if set.has_subjects() || set.has_keywords() { ctx.tokenizer.tokenize(&doc.text) } else { Vec::new() };
    if set.has_subjects() {
        let lex = ctx.lexicon.as_ref().ok_or_else(|| missing("a lexicon"))?;
        let corr = ctx.correlations.as_ref().ok_or_else(|| missing("category correlations"))?;
        fv.subjects = Some(top_subjects(&subject_vector_from_tokens(&tokens, lex, corr)));
    }
    if set.has_pol() {
        let gaz = ctx.gazetteer.as_ref().ok_or_else(|| missing("a gazetteer"))?;
        fv.pol = Some(pol_slots(&pol_tag(doc, gaz)));
    }
    if set.has_keywords() {
        let df = ctx.df.as_ref().ok_or_else(|| missing("a document-frequency table"))?;
        let vocab = ctx.vocabulary.as_ref().ok_or_else(|| missing("a keyword vocabulary"))?;
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for t in &tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
        let weights = vocab
            .iter()
            .map(|term| {
                let tf = counts.get(term.as_str()).copied().unwrap_or(0);
                Ok((term.clone(), df.weight(term, tf)?))
            })
            .collect::<Result<_, FeatureError>>()?;
        fv.keywords = Some(weights);
    }
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, Label};
    use crate::resources;

    fn context(corpus: &Corpus) -> FeatureContext {
        let tokenizer = Tokenizer::default();
        let df = df_table(corpus, &tokenizer);
        let vocabulary = select_keywords(corpus, &df, &tokenizer, 4);
        FeatureContext {
            tokenizer,
            df: Some(df),
            vocabulary: Some(vocabulary),
            lexicon: Some(resources::reference_lexicon()),
            correlations: Some(resources::reference_correlations()),
            gazetteer: Some(Gazetteer::reference()),
        }
    }

    fn corpus() -> Corpus {
        Corpus::new(vec![
            Document::new("a", "Dr. Smith went scuba diving near Boston with scubaer gear", Label::Positive),
            Document::new("b", "football football goal", Label::Negative),
        ])
        .unwrap()
    }

    #[test]
    fn sfc_fills_subjects_only() {
        let c = corpus();
        let fv = assemble(&c.documents()[0], FeatureSet::Sfc, &context(&c)).unwrap();
        assert_eq!(fv.subject(0), Some("scuba"));
        assert!(fv.pol.is_none() && fv.keywords.is_none());
    }

    #[test]
    fn all_fills_every_block() {
        let c = corpus();
        let fv = assemble(&c.documents()[0], FeatureSet::All, &context(&c)).unwrap();
        assert!(fv.subjects.is_some());
        let pol = fv.pol.as_ref().unwrap();
        assert_eq!(pol.len(), POL_SLOTS);
        assert_eq!(pol[slot_index("POLtag1_honorific").unwrap()].as_deref(), Some("Dr."));
        assert_eq!(fv.keywords.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn tfidf_on_unrelated_doc_is_zero() {
        let c = corpus();
        let doc = Document::new("z", "entirely unrelated words", Label::Negative);
        let fv = assemble(&doc, FeatureSet::Tfidf, &context(&c)).unwrap();
        assert!(fv.keywords.unwrap().iter().all(|(_, w)| *w == 0.0));
    }

    #[test]
    fn missing_context_is_configuration_error() {
        let c = corpus();
        let ctx = FeatureContext::default();
        assert!(matches!(
            assemble(&c.documents()[0], FeatureSet::Pol, &ctx),
            Err(FeatureError::MissingContext { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let c = corpus();
        let fv = assemble(&c.documents()[0], FeatureSet::All, &context(&c)).unwrap();
        let back = FeatureVector::from_json(&fv.to_json()).unwrap();
        assert_eq!(back.subjects, fv.subjects);
        assert_eq!(back.pol, fv.pol);
        let mut a = fv.keywords.unwrap();
        let mut b = back.keywords.unwrap();
        a.sort_by(|x, y| x.0.cmp(&y.0));
        b.sort_by(|x, y| x.0.cmp(&y.0));
        assert_eq!(a, b);
    }
}
