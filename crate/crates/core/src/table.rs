//! Attribute-value view of feature vectors shared by the rule learners.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::features::{slot_name, FeatureSet, FeatureVector, NULL, N_SUBJECTS, POL_SLOTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrKind {
    /// Category id interpreted through the generalization hierarchy.
    Subject,
    Categorical,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttrKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Cat(String),
    Num(f64),
}

impl Value {
    pub fn as_cat(&self) -> Option<&str> {
        match self {
            Value::Cat(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Categorical identity: `None` stands for NULL.
    pub fn cat_key(&self) -> Option<&str> {
        self.as_cat()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str(NULL),
            Value::Cat(s) => f.write_str(s),
            Value::Num(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    attributes: Vec<Attribute>,
}

pub fn subject_attribute(i: usize) -> String {
    format!("subject{}", i + 1)
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>) -> Self {
        Schema { attributes }
    }

    /// Attribute layout for a feature set: subject1..5, POL slots, then one
    /// numeric attribute per vocabulary term.
    pub fn for_features(set: FeatureSet, vocabulary: &[String]) -> Self {
        let mut attributes = Vec::new();
        if set.has_subjects() {
            attributes.extend(
                (0..N_SUBJECTS).map(|i| Attribute { name: subject_attribute(i), kind: AttrKind::Subject }),
            );
        }
        if set.has_pol() {
            attributes.extend(
                (0..POL_SLOTS).map(|i| Attribute { name: slot_name(i), kind: AttrKind::Categorical }),
            );
        }
        if set.has_keywords() {
            attributes.extend(
                vocabulary.iter().map(|t| Attribute { name: t.clone(), kind: AttrKind::Numeric }),
            );
        }
        Schema { attributes }
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn get(&self, i: usize) -> &Attribute {
        &self.attributes[i]
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn push(&mut self, attribute: Attribute) {
        self.attributes.push(attribute);
    }

    /// Encodes a feature vector into this schema's attribute order. Blocks
    /// the vector lacks read as NULL (or 0 for keyword weights).
    pub fn encode(&self, fv: &FeatureVector) -> Vec<Value> {
        let mut out = Vec::with_capacity(self.len());
        let mut kw_iter = fv.keywords.as_deref().unwrap_or(&[]).iter();
        for (i, attr) in self.attributes.iter().enumerate() {
            let cat = |v: Option<&String>| v.map_or(Value::Null, |s| Value::Cat(s.clone()));
            let value = match attr.kind {
                AttrKind::Subject => {
                    let idx = attr.name.strip_prefix("subject").and_then(|n| n.parse::<usize>().ok());
                    cat(idx.and_then(|k| fv.subjects.as_ref()?.get(k - 1)?.as_ref()))
                }
                AttrKind::Categorical => {
                    let slot = crate::features::slot_index(&attr.name);
                    cat(slot.and_then(|s| fv.pol.as_ref()?.get(s)?.as_ref()))
                }
                AttrKind::Numeric => {
                    // Keywords are aligned with the vocabulary in order; fall
                    // back to a lookup when they are not.
                    match kw_iter.next() {
                        Some((t, w)) if *t == attr.name => Value::Num(*w),
                        _ => Value::Num(
                            fv.keywords
                                .as_deref()
                                .and_then(|k| k.iter().find(|(t, _)| *t == attr.name))
                                .map_or(0.0, |(_, w)| *w),
                        ),
                    }
                }
            };
            debug_assert!(i == out.len());
            out.push(value);
        }
        out
    }
}

/// A labeled row.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub values: Vec<Value>,
    pub positive: bool,
}

impl Example {
    pub fn new(values: Vec<Value>, positive: bool) -> Self {
        Example { values, positive }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_layout() {
        let vocab = vec!["scuba".to_string(), "reef".to_string()];
        assert_eq!(Schema::for_features(FeatureSet::All, &vocab).len(), 5 + 135 + 2);
        assert_eq!(Schema::for_features(FeatureSet::Sfc, &vocab).len(), 5);
        assert_eq!(Schema::for_features(FeatureSet::Tfidf, &vocab).len(), 2);
        let s = Schema::for_features(FeatureSet::Pol, &vocab);
        assert_eq!(s.get(1).name, "POLtag1_honorific");
    }

    #[test]
    fn encode_vector() {
        let vocab = vec!["scuba".to_string(), "reef".to_string()];
        let schema = Schema::for_features(FeatureSet::All, &vocab);
        let mut pol = vec![None; POL_SLOTS];
        pol[1] = Some("Dr.".to_string());
        let fv = FeatureVector {
            subjects: Some([Some("scuba".into()), None, None, None, None]),
            pol: Some(pol),
            keywords: Some(vec![("scuba".into(), 2.0), ("reef".into(), 0.0)]),
        };
        let row = schema.encode(&fv);
        assert_eq!(row[0], Value::Cat("scuba".into()));
        assert_eq!(row[1], Value::Null);
        assert_eq!(row[6], Value::Cat("Dr.".into()));
        assert_eq!(row[140], Value::Num(2.0));
        assert_eq!(row[141], Value::Num(0.0));
    }
}
