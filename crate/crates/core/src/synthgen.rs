//! Labeled synthetic corpora with a known target concept.
//!
//! Each document is drafted to satisfy (or, for negatives, to narrowly miss)
//! the concept, rendered to text plus entity annotations, and labeled by
//! running the real featurization and checking coverage. Drafts whose
//! computed label disagrees with the intended one are redrawn.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aq::{Complex, Selector, ValueSet};
use crate::corpus::{Corpus, CorpusError, Document, Label, PolEntity, PolKind};
use crate::features::{
    block, kind_of_slot, pol_slots, pol_tag, slot_index, sub_slots, subject_vector_from_tokens, top_subjects, DfTable,
    FeatureSet, FeatureVector, N_SUBJECTS,
};
use crate::resources::{compact, distractor_words, Resources, TERM_SUFFIXES};
use crate::table::{AttrKind, Schema};

const MAX_ATTEMPTS: usize = 400;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid generator spec: {0}")]
    Invalid(String),
    #[error("target concept cannot be realized: {0}")]
    Unsatisfiable(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// One concept condition. `subjectK` takes hierarchy nodes, `POLtag…`
/// names take slot values, and any other attribute is a keyword that must
/// occur (its `values` are ignored).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptSelector {
    pub attribute: String,
    #[serde(default)]
    pub values: Vec<String>,
}

impl ConceptSelector {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(attribute: &str, values: I) -> Self {
        ConceptSelector { attribute: attribute.to_string(), values: values.into_iter().map(Into::into).collect() }
    }
}

fn default_vocab_size() -> usize {
    400
}

fn default_tokens_per_doc() -> usize {
    60
}

fn default_near_miss() -> f64 {
    0.6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n_docs: usize,
    pub positive_fraction: f64,
    pub target_concept: Vec<ConceptSelector>,
    #[serde(default = "default_vocab_size")]
    pub vocab_size: usize,
    #[serde(default = "default_tokens_per_doc")]
    pub tokens_per_doc: usize,
    #[serde(default)]
    pub noise_rate: f64,
    #[serde(default)]
    pub seed: u64,
    /// Share of negatives drafted to miss the concept by one condition.
    #[serde(default = "default_near_miss")]
    pub near_miss_fraction: f64,
}

impl GenSpec {
    pub fn new(n_docs: usize, target_concept: Vec<ConceptSelector>, seed: u64) -> Self {
        GenSpec {
            n_docs,
            positive_fraction: 0.5,
            target_concept,
            vocab_size: default_vocab_size(),
            tokens_per_doc: default_tokens_per_doc(),
            noise_rate: 0.0,
            seed,
            near_miss_fraction: default_near_miss(),
        }
    }
}

#[derive(Debug, Clone)]
enum Term {
    Subject { slot: usize, nodes: Vec<String> },
    Pol { kind: PolKind, entity: usize, sub: usize, values: Vec<String> },
    Keyword(String),
}

fn parse_concept(spec: &GenSpec, res: &Resources) -> Result<Vec<Term>, SynthError> {
    let invalid = |m: String| SynthError::Invalid(m);
    let mut terms = Vec::new();
    for sel in &spec.target_concept {
        let name = sel.attribute.as_str();
        let subject_slot = name.strip_prefix("subject").and_then(|k| k.parse::<usize>().ok());
        if let Some(k) = subject_slot {
            if !(1..=N_SUBJECTS).contains(&k) {
                return Err(invalid(format!("`{name}`: subject slots run 1..={N_SUBJECTS}")));
            }
            if sel.values.is_empty() {
                return Err(invalid(format!("`{name}` needs at least one category")));
            }
            for v in &sel.values {
                if !res.hierarchy.contains(v) {
                    return Err(invalid(format!("`{name}`: unknown category `{v}`")));
                }
            }
            terms.push(Term::Subject { slot: k - 1, nodes: sel.values.clone() });
        } else if let Some(slot) = slot_index(name) {
            if sel.values.is_empty() {
                return Err(invalid(format!("`{name}` needs at least one value")));
            }
            let kind = kind_of_slot(slot);
            let rel = slot - block(kind).0;
            terms.push(Term::Pol { kind, entity: rel / 3, sub: rel % 3, values: sel.values.clone() });
        } else {
            if res.tokenizer.tokenize(name) != [name.to_string()] {
                return Err(invalid(format!("keyword `{name}` does not survive tokenization")));
            }
            terms.push(Term::Keyword(name.to_string()));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for sel in &spec.target_concept {
        if !seen.insert(sel.attribute.as_str()) {
            return Err(invalid(format!("attribute `{}` named twice", sel.attribute)));
        }
    }
    Ok(terms)
}

fn keywords(terms: &[Term]) -> Vec<String> {
    terms.iter().filter_map(|t| if let Term::Keyword(k) = t { Some(k.clone()) } else { None }).collect()
}

/// Schema the concept is expressed in: the ALL layout with the concept's
/// keywords as vocabulary.
pub fn concept_schema(spec: &GenSpec, res: &Resources) -> Result<Schema, SynthError> {
    let terms = parse_concept(spec, res)?;
    Ok(Schema::for_features(FeatureSet::All, &keywords(&terms)))
}

/// The target concept as a complex over [`concept_schema`].
pub fn concept_complex(spec: &GenSpec, res: &Resources) -> Result<Complex, SynthError> {
    parse_concept(spec, res)?;
    let schema = concept_schema(spec, res)?;
    let mut selectors = Vec::new();
    for sel in &spec.target_concept {
        let name = sel.attribute.as_str();
        let s = if name.starts_with("subject") {
            Selector::subject(&schema, name, ValueSet::of(sel.values.iter().cloned()))
        } else if slot_index(name).is_some() {
            Selector::categorical(&schema, name, ValueSet::of(sel.values.iter().cloned()))
        } else {
            Selector::interval(&schema, name, Some(0.0), None)
        };
        selectors.push(s.expect("attribute is in the concept schema"));
    }
    Complex::from_selectors(selectors, &res.hierarchy)
        .ok_or_else(|| SynthError::Unsatisfiable("conditions contradict each other".into()))
}

/// Whether the concept covers a document, computed through featurization.
/// Keyword weights use a df table of the document alone, which keeps their
/// sign (present or absent) intact.
pub fn concept_covers(doc: &Document, spec: &GenSpec, res: &Resources) -> Result<bool, SynthError> {
    let complex = concept_complex(spec, res)?;
    let schema = concept_schema(spec, res)?;
    Ok(covers_with(doc, &complex, &schema, res))
}

fn covers_with(doc: &Document, complex: &Complex, schema: &Schema, res: &Resources) -> bool {
    let tokens = res.tokenizer.tokenize(&doc.text);
    let df = DfTable::from_term_sets([tokens.iter().map(String::as_str)]);
    let counts = res.tokenizer.term_counts(&doc.text);
    let keywords = schema
        .attributes()
        .iter()
        .filter(|a| a.kind == AttrKind::Numeric)
        .map(|a| {
            let tf = counts.get(&a.name).copied().unwrap_or(0);
            (a.name.clone(), df.weight(&a.name, tf).expect("present terms are in the table"))
        })
        .collect();
    let fv = FeatureVector {
        subjects: Some(top_subjects(&subject_vector_from_tokens(&tokens, &res.lexicon, &res.correlations))),
        pol: Some(pol_slots(&pol_tag(doc, &res.gazetteer))),
        keywords: Some(keywords),
    };
    complex.covers(&schema.encode(&fv), &res.hierarchy)
}

/// A document before rendering.
#[derive(Debug, Default)]
struct Draft {
    /// Leaf categories in intended salience order, with word counts.
    subjects: Vec<(String, usize)>,
    entities: BTreeMap<PolKind, Vec<PolEntity>>,
    keywords: Vec<(String, usize)>,
}

struct Generator<'a> {
    spec: &'a GenSpec,
    res: &'a Resources,
    terms: Vec<Term>,
    leaves: Vec<String>,
    distractors: Vec<String>,
    persons: Vec<String>,
    organizations: Vec<String>,
    locations: Vec<(String, Option<String>)>,
    countries: Vec<String>,
    rng: ChaCha8Rng,
}

impl<'a> Generator<'a> {
    fn new(spec: &'a GenSpec, res: &'a Resources, terms: Vec<Term>) -> Self {
        let mut persons: Vec<String> = res.gazetteer.persons.iter().cloned().collect();
        persons.sort();
        let mut organizations: Vec<String> = res.gazetteer.organizations.iter().cloned().collect();
        organizations.sort();
        let locations: Vec<(String, Option<String>)> =
            res.gazetteer.locations.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut countries: Vec<String> = locations.iter().filter_map(|(_, c)| c.clone()).collect();
        countries.sort();
        countries.dedup();
        Generator {
            spec,
            res,
            terms,
            leaves: res.hierarchy.leaves().map(str::to_string).collect(),
            distractors: distractor_words(spec.vocab_size.max(1), &res.lexicon),
            persons,
            organizations,
            locations,
            countries,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
        }
    }

    fn leaves_under(&self, node: &str) -> Vec<String> {
        self.res.hierarchy.leaves_under(node).expect("validated node").into_iter().map(str::to_string).collect()
    }

    fn under_any(&self, leaf: &str, nodes: &[String]) -> bool {
        nodes.iter().any(|n| self.res.hierarchy.covers(n, leaf).unwrap_or(false))
    }

    /// A leaf outside `nodes`, preferring subtrees of the nodes' siblings.
    fn near_leaf(&mut self, nodes: &[String]) -> Option<String> {
        let h = &self.res.hierarchy;
        let mut near: Vec<String> = Vec::new();
        for n in nodes {
            if let Some(parent) = h.parent(n).ok().flatten() {
                for sib in h.children(parent).expect("parent exists") {
                    near.extend(h.leaves_under(sib).expect("node exists").into_iter().map(str::to_string));
                }
            }
        }
        near.retain(|l| !self.under_any(l, nodes));
        if near.is_empty() || self.rng.gen_bool(0.2) {
            near = self.leaves.iter().filter(|l| !self.under_any(l, nodes)).cloned().collect();
        }
        near.choose(&mut self.rng).cloned()
    }

    fn random_entity(&mut self, kind: PolKind) -> PolEntity {
        match kind {
            PolKind::Person => {
                let mut e = PolEntity::new(kind, self.persons.choose(&mut self.rng).expect("persons").clone());
                if self.rng.gen_bool(0.5) {
                    let h = self.res.gazetteer.honorifics.choose(&mut self.rng).expect("honorifics").clone();
                    e = e.with_attr("honorific", h);
                }
                e
            }
            PolKind::Organization => {
                PolEntity::new(kind, self.organizations.choose(&mut self.rng).expect("organizations").clone())
            }
            PolKind::Location => {
                let (name, country) = self.locations.choose(&mut self.rng).expect("locations").clone();
                let e = PolEntity::new(kind, name);
                match country {
                    Some(c) => e.with_attr("country", c),
                    None => e,
                }
            }
        }
    }

    /// Values a sub-slot can take in generated data.
    fn pool(&self, kind: PolKind, sub: usize) -> Vec<String> {
        match (kind, sub) {
            (PolKind::Person, 0) => self.persons.clone(),
            (PolKind::Person, 1) => self.res.gazetteer.honorifics.clone(),
            (PolKind::Organization, 0) => self.organizations.clone(),
            (PolKind::Location, 0) => self.locations.iter().map(|(n, _)| n.clone()).collect(),
            (PolKind::Location, 1) => self.countries.clone(),
            _ => Vec::new(),
        }
    }

    fn set_sub(entity: &mut PolEntity, sub: usize, value: Option<String>) {
        let key = sub_slots(entity.kind)[sub];
        match (sub, value) {
            (0, Some(v)) => entity.name = v,
            (0, None) => {}
            (_, Some(v)) => {
                entity.attrs.insert(key.to_string(), v);
            }
            (_, None) => {
                entity.attrs.remove(key);
            }
        }
    }

    /// Descending word counts for `n` ranked categories.
    fn rank_counts(&mut self, n: usize) -> Vec<usize> {
        let mut counts = Vec::with_capacity(n);
        let mut c = 2 * n + self.rng.gen_range(2..=5);
        for _ in 0..n {
            counts.push(c);
            c = c.saturating_sub(self.rng.gen_range(1..=2)).max(1);
        }
        // Strictly decreasing keeps the intended ranking free of ties.
        for i in 1..counts.len() {
            if counts[i] >= counts[i - 1] {
                counts[i] = counts[i - 1].saturating_sub(1);
            }
        }
        counts.retain(|&c| c > 0);
        counts
    }

    /// Satisfies every concept term except `violate`.
    fn draft(&mut self, violate: Option<usize>) -> Draft {
        let terms = self.terms.clone();
        let mut draft = Draft::default();

        let depth = terms.iter().filter_map(|t| if let Term::Subject { slot, .. } = t { Some(slot + 1) } else { None }).max();
        let ranked = depth.unwrap_or_else(|| self.rng.gen_range(1..=3));
        let extra = self.rng.gen_range(0..=2);
        let counts = self.rank_counts(ranked + extra);
        let mut chosen: Vec<Option<String>> = vec![None; counts.len()];
        let mut concept_nodes: Vec<String> = Vec::new();
        for (i, t) in terms.iter().enumerate() {
            if let Term::Subject { slot, nodes } = t {
                concept_nodes.extend(nodes.iter().cloned());
                if *slot >= chosen.len() {
                    continue;
                }
                chosen[*slot] = if violate == Some(i) {
                    self.near_leaf(nodes)
                } else {
                    let node = nodes.choose(&mut self.rng).expect("nonempty").clone();
                    self.leaves_under(&node).choose(&mut self.rng).cloned()
                };
            }
        }
        for (i, slot) in chosen.iter_mut().enumerate() {
            if slot.is_none() {
                // Lower-ranked fillers sometimes come from the concept's own
                // subtree so that word presence alone is not decisive.
                let from_concept = i >= ranked && !concept_nodes.is_empty() && self.rng.gen_bool(0.5);
                *slot = if from_concept {
                    let node = concept_nodes.choose(&mut self.rng).expect("nonempty").clone();
                    self.leaves_under(&node).choose(&mut self.rng).cloned()
                } else {
                    self.leaves.choose(&mut self.rng).cloned()
                };
            }
        }
        for (leaf, count) in chosen.into_iter().zip(counts) {
            if let Some(leaf) = leaf {
                if !draft.subjects.iter().any(|(l, _)| *l == leaf) {
                    draft.subjects.push((leaf, count));
                }
            }
        }

        for kind in [PolKind::Person, PolKind::Organization, PolKind::Location] {
            let needed = terms
                .iter()
                .filter_map(|t| match t {
                    Term::Pol { kind: k, entity, .. } if *k == kind => Some(entity + 1),
                    _ => None,
                })
                .max()
                .unwrap_or(0);
            let n = needed + self.rng.gen_range(0..=2);
            let list: Vec<PolEntity> = (0..n).map(|_| self.random_entity(kind)).collect();
            draft.entities.insert(kind, list);
        }
        for (i, t) in terms.iter().enumerate() {
            if let Term::Pol { kind, entity, sub, values } = t {
                let value = if violate == Some(i) {
                    let pool: Vec<String> = self.pool(*kind, *sub).into_iter().filter(|v| !values.contains(v)).collect();
                    pool.choose(&mut self.rng).cloned()
                } else {
                    Some(values.choose(&mut self.rng).expect("nonempty").clone())
                };
                let e = &mut draft.entities.get_mut(kind).expect("every kind drafted")[*entity];
                Self::set_sub(e, *sub, value);
            }
        }

        for (i, t) in terms.iter().enumerate() {
            if let Term::Keyword(k) = t {
                if violate != Some(i) {
                    draft.keywords.push((k.clone(), self.rng.gen_range(1..=3)));
                }
            }
        }
        draft
    }

    /// Random document with no regard for the concept.
    fn background(&mut self) -> Draft {
        let mut draft = Draft::default();
        let n = self.rng.gen_range(1..=4);
        let counts = self.rank_counts(n);
        for count in counts {
            let leaf = self.leaves.choose(&mut self.rng).expect("leaves").clone();
            if !draft.subjects.iter().any(|(l, _)| *l == leaf) {
                draft.subjects.push((leaf, count));
            }
        }
        for kind in [PolKind::Person, PolKind::Organization, PolKind::Location] {
            let n = self.rng.gen_range(0..=3);
            let list = (0..n).map(|_| self.random_entity(kind)).collect();
            draft.entities.insert(kind, list);
        }
        let terms = self.terms.clone();
        for t in &terms {
            if let Term::Keyword(k) = t {
                if self.rng.gen_bool(0.3) {
                    draft.keywords.push((k.clone(), 1));
                }
            }
        }
        draft
    }

    fn render(&mut self, id: String, draft: &Draft) -> Document {
        let mut words: Vec<String> = Vec::new();
        for (leaf, count) in &draft.subjects {
            let stem = compact(leaf);
            for _ in 0..*count {
                let suffix = TERM_SUFFIXES.choose(&mut self.rng).expect("suffixes");
                words.push(format!("{stem}{suffix}"));
            }
        }
        for (k, count) in &draft.keywords {
            words.extend(std::iter::repeat_n(k.clone(), *count));
        }
        let mut entities: Vec<PolEntity> = Vec::new();
        for list in draft.entities.values() {
            for e in list {
                let mention = match e.attrs.get("honorific") {
                    Some(h) => format!("{h} {}", e.name),
                    None => e.name.clone(),
                };
                words.push(mention);
                entities.push(e.clone());
            }
        }
        while words.len() < self.spec.tokens_per_doc {
            words.push(self.distractors.choose(&mut self.rng).expect("distractors").clone());
        }
        words.shuffle(&mut self.rng);
        let mut doc = Document::new(id, words.join(" "), Label::Negative);
        doc.pol_annotations = Some(entities);
        doc
    }
}

fn validate(spec: &GenSpec) -> Result<(), SynthError> {
    if spec.n_docs == 0 {
        return Err(SynthError::Invalid("n_docs must be positive".into()));
    }
    if !(0.0..=1.0).contains(&spec.positive_fraction) {
        return Err(SynthError::Invalid(format!("positive_fraction {} outside [0, 1]", spec.positive_fraction)));
    }
    if !(0.0..0.5).contains(&spec.noise_rate) {
        return Err(SynthError::Invalid(format!("noise_rate {} outside [0, 0.5)", spec.noise_rate)));
    }
    if !(0.0..=1.0).contains(&spec.near_miss_fraction) {
        return Err(SynthError::Invalid(format!("near_miss_fraction {} outside [0, 1]", spec.near_miss_fraction)));
    }
    Ok(())
}

/// Number of intended positives: `n · fraction`, rounded half up.
pub fn positive_count(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction + 0.5).floor() as usize).min(n)
}

/// A generated corpus together with the labels before noise was applied.
#[derive(Debug, Clone)]
pub struct Generated {
    pub corpus: Corpus,
    pub clean_labels: Vec<bool>,
}

pub fn generate(spec: &GenSpec, res: &Resources) -> Result<Corpus, SynthError> {
    Ok(generate_with_truth(spec, res)?.corpus)
}

pub fn generate_with_truth(spec: &GenSpec, res: &Resources) -> Result<Generated, SynthError> {
    validate(spec)?;
    let terms = parse_concept(spec, res)?;
    let complex = concept_complex(spec, res)?;
    let schema = concept_schema(spec, res)?;
    let mut gen = Generator::new(spec, res, terms.clone());

    let n_pos = positive_count(spec.n_docs, spec.positive_fraction);
    let mut intended: Vec<bool> = (0..spec.n_docs).map(|i| i < n_pos).collect();
    intended.shuffle(&mut gen.rng);

    let width = spec.n_docs.to_string().len().max(4);
    let mut docs = Vec::with_capacity(spec.n_docs);
    for (i, &want) in intended.iter().enumerate() {
        let id = format!("syn{i:0width$}");
        let mut accepted = None;
        for _ in 0..MAX_ATTEMPTS {
            let draft = if want {
                gen.draft(None)
            } else if !terms.is_empty() && gen.rng.gen_bool(spec.near_miss_fraction) {
                let j = gen.rng.gen_range(0..terms.len());
                gen.draft(Some(j))
            } else {
                gen.background()
            };
            let doc = gen.render(id.clone(), &draft);
            if covers_with(&doc, &complex, &schema, res) == want {
                accepted = Some(doc);
                break;
            }
        }
        let doc = accepted.ok_or_else(|| {
            SynthError::Unsatisfiable(format!(
                "no {} document found in {MAX_ATTEMPTS} draws",
                if want { "covered" } else { "uncovered" }
            ))
        })?;
        docs.push(doc);
    }

    // Noise uses its own stream so the text does not depend on the rate.
    let mut noise = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x6e6f_6973_6500_0000);
    for (doc, &clean) in docs.iter_mut().zip(&intended) {
        let flip = noise.gen_bool(spec.noise_rate);
        doc.label = if clean != flip { Label::Positive } else { Label::Negative };
    }
    Ok(Generated { corpus: Corpus::new(docs)?, clean_labels: intended })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::write_corpus;

    fn spec(concept: Vec<ConceptSelector>) -> GenSpec {
        let mut s = GenSpec::new(100, concept, 11);
        s.tokens_per_doc = 40;
        s
    }

    fn bytes(c: &Corpus) -> Vec<u8> {
        let mut out = Vec::new();
        write_corpus(c, &mut out).unwrap();
        out
    }

    #[test]
    fn ancestor_concept_is_separable() {
        let res = Resources::reference();
        let s = spec(vec![ConceptSelector::new("subject1", ["water_sports"])]);
        let g = generate_with_truth(&s, &res).unwrap();
        assert_eq!(g.corpus.n_positive(), 50);
        assert_eq!(g.corpus.n_negative(), 50);
        for (doc, clean) in g.corpus.iter().zip(&g.clean_labels) {
            assert_eq!(concept_covers(doc, &s, &res).unwrap(), *clean);
            assert_eq!(doc.label == Label::Positive, *clean);
        }
    }

    #[test]
    fn deterministic_by_seed() {
        let res = Resources::reference();
        let s = spec(vec![
            ConceptSelector::new("subject1", ["medicine"]),
            ConceptSelector::new("POLtag1_honorific", ["Dr."]),
        ]);
        let a = generate(&s, &res).unwrap();
        let b = generate(&s, &res).unwrap();
        assert_eq!(bytes(&a), bytes(&b));
        let mut other = s.clone();
        other.seed = 12;
        assert_ne!(bytes(&a), bytes(&generate(&other, &res).unwrap()));
    }

    #[test]
    fn mixed_concept_truth_holds() {
        let res = Resources::reference();
        let s = spec(vec![
            ConceptSelector::new("subject2", ["outdoor_life"]),
            ConceptSelector::new("POLtag2_country", ["US"]),
            ConceptSelector::new("reef", Vec::<String>::new()),
        ]);
        let g = generate_with_truth(&s, &res).unwrap();
        for (doc, clean) in g.corpus.iter().zip(&g.clean_labels) {
            assert_eq!(concept_covers(doc, &s, &res).unwrap(), *clean, "{}", doc.id);
        }
    }

    #[test]
    fn noise_flips_labels_only() {
        let res = Resources::reference();
        let clean = spec(vec![ConceptSelector::new("subject1", ["sports"])]);
        let mut noisy = clean.clone();
        noisy.noise_rate = 0.2;
        let a = generate(&clean, &res).unwrap();
        let b = generate(&noisy, &res).unwrap();
        let flipped = a.iter().zip(b.iter()).filter(|(x, y)| x.label != y.label).count();
        assert!(a.iter().zip(b.iter()).all(|(x, y)| x.text == y.text));
        assert!((5..=40).contains(&flipped), "{flipped}");
    }

    #[test]
    fn rejects_bad_specs() {
        let res = Resources::reference();
        let mut s = spec(vec![ConceptSelector::new("subject1", ["no_such_node"])]);
        assert!(matches!(generate(&s, &res), Err(SynthError::Invalid(_))));
        s.target_concept = vec![ConceptSelector::new("subject1", ["sports"])];
        s.noise_rate = 0.5;
        assert!(matches!(generate(&s, &res), Err(SynthError::Invalid(_))));
        s.noise_rate = 0.0;
        s.target_concept = vec![ConceptSelector::new("POLtag1_honorific", ["Dr."]), ConceptSelector::new("POLtag1_honorific", ["Mr."])];
        assert!(generate(&s, &res).is_err());
    }

    #[test]
    fn root_concept_leaves_only_empty_negatives() {
        let res = Resources::reference();
        let s = spec(vec![ConceptSelector::new("subject1", ["root"])]);
        // Every document with any category word is covered, and drafts always
        // carry one, so negatives cannot be produced.
        assert!(matches!(generate(&s, &res), Err(SynthError::Unsatisfiable(_))));
    }
}
