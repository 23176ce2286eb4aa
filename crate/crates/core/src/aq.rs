//! AQ-style covering learner.
//!
//! A seed positive is picked, a *star* of maximally general complexes that
//! cover the seed and exclude every negative is grown by repeated extension
//! against negatives, the best complex under the lexicographic evaluation
//! functional (LEF) becomes a rule, and the positives it covers are removed.
//! Subject attributes take hierarchy nodes as values, so extension against a
//! negative climbs to the highest ancestor that still excludes it.

use std::cmp::Ordering;
use std::fmt;

use indexmap::IndexSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::NULL;
use crate::hierarchy::{GeneralizationHierarchy, HierarchyError};
use crate::table::{AttrKind, Example, Schema, Value};

#[derive(Debug, Error)]
pub enum AqError {
    #[error("inconsistent training data: positive #{positive} and negative #{negative} cannot be separated")]
    Inconsistent { positive: usize, negative: usize },
    #[error("no positive training examples")]
    NoPositives,
    #[error("example has {got} values, schema has {expected}")]
    Arity { got: usize, expected: usize },
    #[error("rule set does not fit the schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

/// Set of categorical values; `null` admits the NULL value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueSet {
    pub values: IndexSet<String>,
    #[serde(default)]
    pub null: bool,
}

impl ValueSet {
    pub fn of<I: IntoIterator<Item = S>, S: Into<String>>(values: I) -> Self {
        ValueSet { values: values.into_iter().map(Into::into).collect(), null: false }
    }

    pub fn null_only() -> Self {
        ValueSet { values: IndexSet::new(), null: true }
    }

    pub fn insert(&mut self, value: &Value) {
        match value {
            Value::Cat(s) => {
                self.values.insert(s.clone());
            }
            Value::Null => self.null = true,
            Value::Num(_) => {}
        }
    }

    pub fn contains(&self, value: &Value) -> bool {
        match value {
            Value::Cat(s) => self.values.contains(s.as_str()),
            Value::Null => self.null,
            Value::Num(_) => false,
        }
    }

    pub fn without(&self, value: &Value) -> Self {
        let mut out = self.clone();
        match value {
            Value::Cat(s) => {
                out.values.shift_remove(s.as_str());
            }
            Value::Null => out.null = false,
            Value::Num(_) => {}
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && !self.null
    }

    pub fn len(&self) -> usize {
        self.values.len() + usize::from(self.null)
    }

    fn is_subset(&self, other: &ValueSet) -> bool {
        (!self.null || other.null) && self.values.iter().all(|v| other.values.contains(v))
    }

    fn intersect(&self, other: &ValueSet) -> ValueSet {
        ValueSet {
            values: self.values.iter().filter(|v| other.values.contains(*v)).cloned().collect(),
            null: self.null && other.null,
        }
    }

    fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.values.iter().map(String::as_str).collect();
        if self.null {
            out.push(NULL);
        }
        out
    }
}

/// Values a selector admits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Allowed {
    Categorical(ValueSet),
    /// Hierarchy nodes; each admits itself and all descendants.
    Subject(ValueSet),
    /// Open interval; a missing bound is infinite.
    Interval { lo: Option<f64>, hi: Option<f64> },
}

impl Allowed {
    fn value_count(&self) -> usize {
        match self {
            Allowed::Categorical(s) | Allowed::Subject(s) => s.len(),
            Allowed::Interval { .. } => 1,
        }
    }
}

/// One attribute condition with internal disjunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selector {
    pub attribute: usize,
    pub name: String,
    #[serde(flatten)]
    pub allowed: Allowed,
}

impl Selector {
    pub fn categorical(schema: &Schema, name: &str, values: ValueSet) -> Option<Self> {
        let attribute = schema.position(name)?;
        Some(Selector { attribute, name: name.to_string(), allowed: Allowed::Categorical(values) })
    }

    pub fn subject(schema: &Schema, name: &str, nodes: ValueSet) -> Option<Self> {
        let attribute = schema.position(name)?;
        Some(Selector { attribute, name: name.to_string(), allowed: Allowed::Subject(nodes) })
    }

    pub fn interval(schema: &Schema, name: &str, lo: Option<f64>, hi: Option<f64>) -> Option<Self> {
        let attribute = schema.position(name)?;
        Some(Selector { attribute, name: name.to_string(), allowed: Allowed::Interval { lo, hi } })
    }

    pub fn matches(&self, value: &Value, h: &GeneralizationHierarchy) -> bool {
        match (&self.allowed, value) {
            (Allowed::Categorical(set), v) => set.contains(v),
            (Allowed::Subject(set), Value::Null) => set.null,
            (Allowed::Subject(set), Value::Cat(x)) => {
                let Ok(x) = h.id(x) else { return false };
                set.values.iter().any(|a| h.id(a).is_ok_and(|a| h.covers_id(a, x)))
            }
            (Allowed::Interval { lo, hi }, Value::Num(x)) => {
                lo.is_none_or(|lo| *x > lo) && hi.is_none_or(|hi| *x < hi)
            }
            _ => false,
        }
    }

    /// True when every value this selector admits is admitted by `general`.
    fn is_subsumed_by(&self, general: &Selector, h: &GeneralizationHierarchy) -> bool {
        match (&self.allowed, &general.allowed) {
            (Allowed::Categorical(a), Allowed::Categorical(b)) => a.is_subset(b),
            (Allowed::Subject(a), Allowed::Subject(b)) => {
                (!a.null || b.null)
                    && a.values.iter().all(|x| b.values.iter().any(|g| h.covers(g, x).unwrap_or(false)))
            }
            (Allowed::Interval { lo: l1, hi: h1 }, Allowed::Interval { lo: l2, hi: h2 }) => {
                let lo_ok = match (l1, l2) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(a), Some(b)) => a >= b,
                };
                let hi_ok = match (h1, h2) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(a), Some(b)) => a <= b,
                };
                lo_ok && hi_ok
            }
            _ => false,
        }
    }

    /// Conjunction of two selectors on the same attribute; `None` when the
    /// result admits nothing.
    fn intersect(&self, other: &Selector, h: &GeneralizationHierarchy) -> Option<Selector> {
        debug_assert_eq!(self.attribute, other.attribute);
        let allowed = match (&self.allowed, &other.allowed) {
            (Allowed::Categorical(a), Allowed::Categorical(b)) => {
                let s = a.intersect(b);
                (!s.is_empty()).then_some(Allowed::Categorical(s))
            }
            (Allowed::Subject(a), Allowed::Subject(b)) => {
                let mut nodes: IndexSet<String> = IndexSet::new();
                for x in &a.values {
                    for y in &b.values {
                        if h.covers(x, y).unwrap_or(false) {
                            nodes.insert(y.clone());
                        } else if h.covers(y, x).unwrap_or(false) {
                            nodes.insert(x.clone());
                        }
                    }
                }
                let s = ValueSet { values: nodes, null: a.null && b.null };
                (!s.is_empty()).then(|| Allowed::Subject(normalize_nodes(s, h)))
            }
            (Allowed::Interval { lo: l1, hi: h1 }, Allowed::Interval { lo: l2, hi: h2 }) => {
                let lo = match (l1, l2) {
                    (Some(a), Some(b)) => Some(a.max(*b)),
                    (a, b) => a.or(*b),
                };
                let hi = match (h1, h2) {
                    (Some(a), Some(b)) => Some(a.min(*b)),
                    (a, b) => a.or(*b),
                };
                match (lo, hi) {
                    (Some(l), Some(u)) if l >= u => None,
                    _ => Some(Allowed::Interval { lo, hi }),
                }
            }
            _ => None,
        }?;
        Some(Selector { attribute: self.attribute, name: self.name.clone(), allowed })
    }
}

/// Drops nodes already covered by another node of the set.
fn normalize_nodes(set: ValueSet, h: &GeneralizationHierarchy) -> ValueSet {
    let values: IndexSet<String> = set
        .values
        .iter()
        .filter(|x| !set.values.iter().any(|g| g != *x && h.covers(g, x).unwrap_or(false)))
        .cloned()
        .collect();
    ValueSet { values, null: set.null }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.allowed {
            Allowed::Categorical(s) | Allowed::Subject(s) => {
                write!(f, "{} = {}", self.name, s.labels().join(" or "))
            }
            Allowed::Interval { lo: Some(lo), hi: Some(hi) } => {
                write!(f, "{} < {} < {}", fmt_num(*lo), self.name, fmt_num(*hi))
            }
            Allowed::Interval { lo: Some(lo), hi: None } => write!(f, "{} > {}", self.name, fmt_num(*lo)),
            Allowed::Interval { lo: None, hi: Some(hi) } => write!(f, "{} < {}", self.name, fmt_num(*hi)),
            Allowed::Interval { lo: None, hi: None } => write!(f, "{} = any", self.name),
        }
    }
}

/// Conjunction of selectors, at most one per attribute, kept sorted by
/// attribute index. The empty complex covers everything.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub selectors: Vec<Selector>,
}

impl Complex {
    pub fn universal() -> Self {
        Complex::default()
    }

    pub fn from_selectors(selectors: Vec<Selector>, h: &GeneralizationHierarchy) -> Option<Self> {
        let mut c = Complex::universal();
        for s in selectors {
            c = c.and(&s, h)?;
        }
        Some(c)
    }

    pub fn is_universal(&self) -> bool {
        self.selectors.is_empty()
    }

    pub fn selector_count(&self) -> usize {
        self.selectors.len()
    }

    pub fn value_count(&self) -> usize {
        self.selectors.iter().map(|s| s.allowed.value_count()).sum()
    }

    /// Every selector holds on the row; absent attributes read as NULL.
    pub fn covers(&self, row: &[Value], h: &GeneralizationHierarchy) -> bool {
        self.selectors.iter().all(|s| s.matches(row.get(s.attribute).unwrap_or(&Value::Null), h))
    }

    /// Specializes by one more selector, intersecting with an existing
    /// selector on the same attribute.
    pub fn and(&self, sel: &Selector, h: &GeneralizationHierarchy) -> Option<Complex> {
        let mut selectors = self.selectors.clone();
        match selectors.binary_search_by_key(&sel.attribute, |s| s.attribute) {
            Ok(i) => selectors[i] = selectors[i].intersect(sel, h)?,
            Err(i) => selectors.insert(i, sel.clone()),
        }
        Some(Complex { selectors })
    }

    /// True when `self` admits every row `specific` admits (syntactic check).
    pub fn generalizes(&self, specific: &Complex, h: &GeneralizationHierarchy) -> bool {
        self.selectors.iter().all(|g| {
            specific
                .selectors
                .binary_search_by_key(&g.attribute, |s| s.attribute)
                .is_ok_and(|i| specific.selectors[i].is_subsumed_by(g, h))
        })
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.selectors.is_empty() {
            return f.write_str("true");
        }
        let parts: Vec<String> = self.selectors.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" & "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LefCriterion {
    MaxNewPositiveCoverage,
    MinSelectorCount,
    MinValueCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LefConfig {
    pub criteria: Vec<LefCriterion>,
    /// Beam width; `None` keeps every candidate.
    pub maxstar: Option<usize>,
    pub seed_rng: u64,
}

impl Default for LefConfig {
    fn default() -> Self {
        LefConfig {
            criteria: vec![
                LefCriterion::MaxNewPositiveCoverage,
                LefCriterion::MinSelectorCount,
                LefCriterion::MinValueCount,
            ],
            maxstar: Some(10),
            seed_rng: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LefScore {
    coverage: usize,
    selectors: usize,
    values: usize,
}

impl LefScore {
    /// `Less` means `self` is preferred.
    fn cmp_by(&self, other: &LefScore, criteria: &[LefCriterion]) -> Ordering {
        for c in criteria {
            let ord = match c {
                LefCriterion::MaxNewPositiveCoverage => other.coverage.cmp(&self.coverage),
                LefCriterion::MinSelectorCount => self.selectors.cmp(&other.selectors),
                LefCriterion::MinValueCount => self.values.cmp(&other.values),
            };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

/// Bit set over the positive examples still being scored.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn full(n: usize) -> Self {
        let mut v = vec![u64::MAX; n.div_ceil(64)];
        if !n.is_multiple_of(64) {
            if let Some(last) = v.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        Bits(v)
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut v = vec![0u64; n.div_ceil(64)];
        for i in (0..n).filter(|&i| f(i)) {
            v[i / 64] |= 1 << (i % 64);
        }
        Bits(v)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Everything star generation needs besides the seed and negatives.
pub struct StarContext<'a> {
    pub schema: &'a Schema,
    pub hierarchy: &'a GeneralizationHierarchy,
    /// Observed value sets per categorical attribute.
    pub domains: Vec<ValueSet>,
    pub lef: &'a LefConfig,
}

impl<'a> StarContext<'a> {
    /// Builds categorical domains from the training rows.
    pub fn new<'r, I>(schema: &'a Schema, hierarchy: &'a GeneralizationHierarchy, lef: &'a LefConfig, rows: I) -> Self
    where
        I: IntoIterator<Item = &'r [Value]>,
    {
        let mut domains = vec![ValueSet::default(); schema.len()];
        for row in rows {
            for (i, v) in row.iter().enumerate() {
                if schema.get(i).kind == AttrKind::Categorical {
                    domains[i].insert(v);
                }
            }
        }
        StarContext { schema, hierarchy, domains, lef }
    }
}

/// Most general selectors that keep the seed's value and exclude the
/// negative's, one per attribute on which they differ. Empty when the pair
/// cannot be separated.
pub fn extend_against(seed: &[Value], negative: &[Value], ctx: &StarContext<'_>) -> Result<Vec<Selector>, AqError> {
    let h = ctx.hierarchy;
    let mut out = Vec::new();
    for (i, attr) in ctx.schema.attributes().iter().enumerate() {
        let (s, v) = (&seed[i], &negative[i]);
        if s == v {
            continue;
        }
        let allowed = match attr.kind {
            AttrKind::Subject => match (s, v) {
                (Value::Null, _) => Some(Allowed::Subject(ValueSet::null_only())),
                (Value::Cat(s), v) => {
                    let excluded = |a: &str| match v {
                        Value::Cat(v) => !h.covers(a, v).unwrap_or(false),
                        _ => true,
                    };
                    h.path_to_root(s)?
                        .into_iter()
                        .rev()
                        .find(|a| excluded(a))
                        .map(|a| Allowed::Subject(ValueSet::of([a])))
                }
                _ => None,
            },
            AttrKind::Categorical => {
                let mut domain = ctx.domains[i].clone();
                domain.insert(s);
                Some(Allowed::Categorical(domain.without(v)))
            }
            AttrKind::Numeric => match (s.as_num(), v.as_num()) {
                (Some(s), Some(v)) => {
                    let mid = (s + v) / 2.0;
                    Some(if s > v {
                        Allowed::Interval { lo: Some(mid), hi: None }
                    } else {
                        Allowed::Interval { lo: None, hi: Some(mid) }
                    })
                }
                _ => None,
            },
        };
        if let Some(allowed) = allowed {
            out.push(Selector { attribute: i, name: attr.name.clone(), allowed });
        }
    }
    Ok(out)
}

struct Candidate {
    complex: Complex,
    covered: Bits,
}

/// Grows the star of `seed` against `negatives`. LEF coverage is scored over
/// `positives` (typically the still-uncovered positives).
pub fn generate_star(
    seed: &[Value],
    negatives: &[&[Value]],
    positives: &[&[Value]],
    ctx: &StarContext<'_>,
) -> Result<Vec<Complex>, AqError> {
    generate_star_indexed(seed, 0, negatives, positives, ctx)
}

fn generate_star_indexed(
    seed: &[Value],
    seed_index: usize,
    negatives: &[&[Value]],
    positives: &[&[Value]],
    ctx: &StarContext<'_>,
) -> Result<Vec<Complex>, AqError> {
    let h = ctx.hierarchy;
    let n_pos = positives.len();
    let mut star = vec![Candidate { complex: Complex::universal(), covered: Bits::full(n_pos) }];
    for (ni, neg) in negatives.iter().enumerate() {
        if !star.iter().any(|c| c.complex.covers(neg, h)) {
            continue;
        }
        let ext = extend_against(seed, neg, ctx)?;
        if ext.is_empty() {
            return Err(AqError::Inconsistent { positive: seed_index, negative: ni });
        }
        let ext_cov: Vec<Bits> =
            ext.iter().map(|s| Bits::from_fn(n_pos, |p| s.matches(&positives[p][s.attribute], h))).collect();
        let mut next: Vec<Candidate> = Vec::new();
        for cand in star {
            if !cand.complex.covers(neg, h) {
                push_unique(&mut next, cand);
                continue;
            }
            for (sel, cov) in ext.iter().zip(&ext_cov) {
                let Some(complex) = cand.complex.and(sel, h) else { continue };
                if !complex.covers(seed, h) {
                    continue;
                }
                let covered = if complex.selectors.len() > cand.complex.selectors.len() {
                    cand.covered.and(cov)
                } else {
                    // Intersected an existing selector: recount from scratch.
                    Bits::from_fn(n_pos, |p| complex.covers(positives[p], h))
                };
                push_unique(&mut next, Candidate { complex, covered });
            }
        }
        star = trim(next, ctx);
    }
    Ok(star.into_iter().map(|c| c.complex).collect())
}

fn push_unique(list: &mut Vec<Candidate>, cand: Candidate) {
    if !list.iter().any(|c| c.complex == cand.complex) {
        list.push(cand);
    }
}

fn score(c: &Candidate) -> LefScore {
    LefScore { coverage: c.covered.count(), selectors: c.complex.selector_count(), values: c.complex.value_count() }
}

/// Keeps the `maxstar` best candidates under LEF that no other candidate
/// strictly generalizes.
fn trim(cands: Vec<Candidate>, ctx: &StarContext<'_>) -> Vec<Candidate> {
    let h = ctx.hierarchy;
    let scores: Vec<LefScore> = cands.iter().map(score).collect();
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| scores[a].cmp_by(&scores[b], &ctx.lef.criteria));
    let limit = ctx.lef.maxstar.unwrap_or(usize::MAX);
    let mut keep = Vec::new();
    for &i in &order {
        if keep.len() >= limit {
            break;
        }
        let dominated = cands
            .iter()
            .enumerate()
            .any(|(j, other)| j != i && other.complex.generalizes(&cands[i].complex, h));
        if !dominated {
            keep.push(i);
        }
    }
    let mut slots: Vec<Option<Candidate>> = cands.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("each index kept once")).collect()
}

/// A learned conjunctive rule for the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AqRule {
    pub complex: Complex,
    /// Positives newly covered when the rule was added.
    pub positive_coverage: usize,
}

/// Disjunction of complexes describing the positive class.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<AqRule>,
}

impl RuleSet {
    pub fn from_complexes(complexes: Vec<Complex>) -> Self {
        RuleSet { rules: complexes.into_iter().map(|complex| AqRule { complex, positive_coverage: 0 }).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    /// Positive iff some rule covers the row.
    pub fn classify(&self, row: &[Value], h: &GeneralizationHierarchy) -> bool {
        self.rules.iter().any(|r| r.complex.covers(row, h))
    }

    /// One `IF ... THEN article is of interest` line per rule.
    pub fn render(&self) -> String {
        self.rules.iter().map(|r| format!("IF {} THEN article is of interest\n", r.complex)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("rule sets serialize")
    }

    /// Parses the JSON form and checks it against a schema.
    pub fn from_json(value: &serde_json::Value, schema: &Schema) -> Result<Self, AqError> {
        let rs: RuleSet = serde_json::from_value(value.clone()).map_err(|e| AqError::Schema(e.to_string()))?;
        for rule in &rs.rules {
            for s in &rule.complex.selectors {
                if schema.position(&s.name) != Some(s.attribute) {
                    return Err(AqError::Schema(format!("attribute `{}` at index {}", s.name, s.attribute)));
                }
            }
        }
        Ok(rs)
    }
}

pub fn classify(rs: &RuleSet, row: &[Value], h: &GeneralizationHierarchy) -> bool {
    rs.classify(row, h)
}

/// Covering loop over labeled examples.
pub fn learn(
    examples: &[Example],
    schema: &Schema,
    h: &GeneralizationHierarchy,
    lef: &LefConfig,
) -> Result<RuleSet, AqError> {
    for e in examples {
        if e.values.len() != schema.len() {
            return Err(AqError::Arity { got: e.values.len(), expected: schema.len() });
        }
    }
    let positives: Vec<&[Value]> = examples.iter().filter(|e| e.positive).map(|e| e.values.as_slice()).collect();
    let negatives: Vec<&[Value]> = examples.iter().filter(|e| !e.positive).map(|e| e.values.as_slice()).collect();
    if positives.is_empty() {
        return Err(AqError::NoPositives);
    }
    let ctx = StarContext::new(schema, h, lef, examples.iter().map(|e| e.values.as_slice()));

    let mut order: Vec<usize> = (0..positives.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(lef.seed_rng));
    let mut uncovered = vec![true; positives.len()];
    let mut rules = Vec::new();
    for &seed in &order {
        if !uncovered[seed] {
            continue;
        }
        let remaining: Vec<usize> = (0..positives.len()).filter(|&p| uncovered[p]).collect();
        let pool: Vec<&[Value]> = remaining.iter().map(|&p| positives[p]).collect();
        let star = generate_star_indexed(positives[seed], seed, &negatives, &pool, &ctx)?;
        let best = star
            .into_iter()
            .map(|complex| {
                let covered: Vec<usize> =
                    remaining.iter().copied().filter(|&p| complex.covers(positives[p], h)).collect();
                let score =
                    LefScore { coverage: covered.len(), selectors: complex.selector_count(), values: complex.value_count() };
                (complex, covered, score)
            })
            .reduce(|best, c| if c.2.cmp_by(&best.2, &lef.criteria) == Ordering::Less { c } else { best })
            .expect("a star always holds at least one complex");
        let (complex, covered, _) = best;
        debug_assert!(covered.contains(&seed));
        for &p in &covered {
            uncovered[p] = false;
        }
        uncovered[seed] = false;
        rules.push(AqRule { complex, positive_coverage: covered.len() });
    }
    Ok(RuleSet { rules })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Attribute;

    fn cat(s: &str) -> Value {
        Value::Cat(s.to_string())
    }

    fn subject_schema() -> Schema {
        Schema::new(vec![Attribute { name: "subject1".into(), kind: AttrKind::Subject }])
    }

    #[test]
    fn universal_complex_covers_anything() {
        let h = GeneralizationHierarchy::reference();
        assert!(Complex::universal().covers(&[cat("scuba")], &h));
        assert!(Complex::universal().covers(&[], &h));
    }

    #[test]
    fn subject_selector_uses_hierarchy() {
        let h = GeneralizationHierarchy::reference();
        let schema = subject_schema();
        let sel = Selector::subject(&schema, "subject1", ValueSet::of(["medical_science"])).unwrap();
        assert!(sel.matches(&cat("contagious"), &h));
        assert!(!sel.matches(&cat("football"), &h));
        assert!(!sel.matches(&Value::Null, &h));
    }

    #[test]
    fn extension_climbs_to_highest_safe_ancestor() {
        let h = GeneralizationHierarchy::reference();
        let schema = subject_schema();
        let lef = LefConfig::default();
        let ctx = StarContext::new(&schema, &h, &lef, std::iter::empty());
        let ext = extend_against(&[cat("contagious")], &[cat("football")], &ctx).unwrap();
        assert_eq!(ext.len(), 1);
        assert_eq!(ext[0].allowed, Allowed::Subject(ValueSet::of(["medical_science"])));
    }

    #[test]
    fn categorical_extension_is_complement() {
        let h = GeneralizationHierarchy::reference();
        let schema = Schema::new(vec![Attribute { name: "c".into(), kind: AttrKind::Categorical }]);
        let lef = LefConfig::default();
        let rows = [vec![cat("a")], vec![cat("b")], vec![cat("c")]];
        let ctx = StarContext::new(&schema, &h, &lef, rows.iter().map(Vec::as_slice));
        let ext = extend_against(&[cat("a")], &[cat("b")], &ctx).unwrap();
        assert_eq!(ext[0].allowed, Allowed::Categorical(ValueSet::of(["a", "c"])));
    }

    #[test]
    fn numeric_extension_is_midpoint() {
        let h = GeneralizationHierarchy::reference();
        let schema = Schema::new(vec![Attribute { name: "w".into(), kind: AttrKind::Numeric }]);
        let lef = LefConfig::default();
        let ctx = StarContext::new(&schema, &h, &lef, std::iter::empty());
        let ext = extend_against(&[Value::Num(4.0)], &[Value::Num(1.0)], &ctx).unwrap();
        assert_eq!(ext[0].allowed, Allowed::Interval { lo: Some(2.5), hi: None });
        assert_eq!(ext[0].to_string(), "w > 2.5");
    }

    #[test]
    fn identical_pair_is_noise() {
        let h = GeneralizationHierarchy::reference();
        let schema = subject_schema();
        let examples = vec![Example::new(vec![cat("scuba")], true), Example::new(vec![cat("scuba")], false)];
        assert!(matches!(
            learn(&examples, &schema, &h, &LefConfig::default()),
            Err(AqError::Inconsistent { .. })
        ));
    }

    #[test]
    fn empty_positive_set_rejected() {
        let h = GeneralizationHierarchy::reference();
        let examples = vec![Example::new(vec![cat("scuba")], false)];
        assert!(matches!(learn(&examples, &subject_schema(), &h, &LefConfig::default()), Err(AqError::NoPositives)));
    }

    #[test]
    fn no_negatives_gives_universal_star() {
        let h = GeneralizationHierarchy::reference();
        let schema = subject_schema();
        let lef = LefConfig::default();
        let ctx = StarContext::new(&schema, &h, &lef, std::iter::empty());
        let star = generate_star(&[cat("scuba")], &[], &[], &ctx).unwrap();
        assert_eq!(star, vec![Complex::universal()]);
    }

    #[test]
    fn boolean_star() {
        let h = GeneralizationHierarchy::reference();
        let schema = Schema::new(vec![
            Attribute { name: "a".into(), kind: AttrKind::Categorical },
            Attribute { name: "b".into(), kind: AttrKind::Categorical },
        ]);
        let lef = LefConfig { maxstar: None, ..LefConfig::default() };
        let rows = [vec![cat("1"), cat("1")], vec![cat("0"), cat("0")]];
        let ctx = StarContext::new(&schema, &h, &lef, rows.iter().map(Vec::as_slice));
        let star = generate_star(&rows[0], &[&rows[1]], &[&rows[0]], &ctx).unwrap();
        let rendered: Vec<String> = star.iter().map(ToString::to_string).collect();
        assert_eq!(rendered, vec!["a = 1", "b = 1"]);

        let lef1 = LefConfig { maxstar: Some(1), ..LefConfig::default() };
        let ctx = StarContext::new(&schema, &h, &lef1, rows.iter().map(Vec::as_slice));
        assert_eq!(generate_star(&rows[0], &[&rows[1]], &[&rows[0]], &ctx).unwrap().len(), 1);
    }

    #[test]
    fn empty_ruleset_is_negative() {
        let h = GeneralizationHierarchy::reference();
        assert!(!RuleSet::default().classify(&[cat("scuba")], &h));
    }

    #[test]
    fn learns_single_ancestor_rule() {
        let h = GeneralizationHierarchy::reference();
        let schema = subject_schema();
        let mut examples = Vec::new();
        for leaf in ["scuba", "kayaking", "sailing", "swimming"] {
            examples.push(Example::new(vec![cat(leaf)], true));
        }
        for leaf in ["camping", "football", "oncology", "hiking"] {
            examples.push(Example::new(vec![cat(leaf)], false));
        }
        let rs = learn(&examples, &schema, &h, &LefConfig::default()).unwrap();
        assert_eq!(rs.render(), "IF subject1 = water_sports THEN article is of interest\n");
        assert_eq!(rs.rules[0].positive_coverage, 4);
    }

    #[test]
    fn json_round_trip() {
        let h = GeneralizationHierarchy::reference();
        let schema = subject_schema();
        let c = Complex::from_selectors(
            vec![Selector::subject(&schema, "subject1", ValueSet::of(["nature", "physical_science"])).unwrap()],
            &h,
        )
        .unwrap();
        let rs = RuleSet::from_complexes(vec![c]);
        assert_eq!(RuleSet::from_json(&rs.to_json(), &schema).unwrap(), rs);
        let other = Schema::new(vec![Attribute { name: "x".into(), kind: AttrKind::Subject }]);
        assert!(RuleSet::from_json(&rs.to_json(), &other).is_err());
    }

    #[test]
    fn subject_intersection_keeps_specific_node() {
        let h = GeneralizationHierarchy::reference();
        let schema = subject_schema();
        let wide = Selector::subject(&schema, "subject1", ValueSet::of(["recreation"])).unwrap();
        let narrow = Selector::subject(&schema, "subject1", ValueSet::of(["water_sports"])).unwrap();
        let c = Complex::universal().and(&wide, &h).unwrap().and(&narrow, &h).unwrap();
        assert_eq!(c.to_string(), "subject1 = water_sports");
        let disjoint = Selector::subject(&schema, "subject1", ValueSet::of(["sports"])).unwrap();
        assert!(c.and(&disjoint, &h).is_none());
    }
}
