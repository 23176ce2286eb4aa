//! C4.5-style learner: gain-ratio tree induction, rule extraction and
//! pessimistic rule pruning, over base attributes extended with subject
//! ancestors.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::features::{FeatureVector, N_SUBJECTS};
use crate::hierarchy::{GeneralizationHierarchy, HierarchyError};
use crate::table::{subject_attribute, AttrKind, Attribute, Example, Schema, Value};

pub const DEFAULT_ANCESTOR_LEVELS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub min_node_size: usize,
    /// Confidence factor for the pessimistic error bound.
    pub confidence: f64,
    pub ancestor_levels: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { min_node_size: 2, confidence: 0.25, ancestor_levels: DEFAULT_ANCESTOR_LEVELS }
    }
}

pub fn ancestor_attribute(slot: usize, up: usize) -> String {
    format!("x{}_up{}", slot + 1, up)
}

/// A feature vector plus `xK_upU` ancestor attributes for its non-null
/// subject slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedVector {
    pub base: FeatureVector,
    pub ancestors: Vec<(String, String)>,
}

impl ExtendedVector {
    pub fn added(&self) -> usize {
        self.ancestors.len()
    }

    pub fn ancestor(&self, name: &str) -> Option<&str> {
        self.ancestors.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }
}

pub fn extend_attributes(
    x: &FeatureVector,
    h: &GeneralizationHierarchy,
    levels: usize,
) -> Result<ExtendedVector, HierarchyError> {
    let mut ancestors = Vec::new();
    for slot in 0..N_SUBJECTS {
        if let Some(value) = x.subject(slot) {
            for up in 1..=levels {
                ancestors.push((ancestor_attribute(slot, up), h.ancestor_at(value, up)?.to_string()));
            }
        }
    }
    Ok(ExtendedVector { base: x.clone(), ancestors })
}

/// Base schema plus `levels` ancestor attributes per subject attribute.
/// Subject attributes are treated as plain categorical values by the tree.
pub fn extended_schema(base: &Schema, levels: usize) -> Schema {
    let mut out = Schema::new(
        base.attributes()
            .iter()
            .map(|a| Attribute {
                name: a.name.clone(),
                kind: if a.kind == AttrKind::Subject { AttrKind::Categorical } else { a.kind },
            })
            .collect(),
    );
    for slot in 0..N_SUBJECTS {
        if base.position(&subject_attribute(slot)).is_some() {
            for up in 1..=levels {
                out.push(Attribute { name: ancestor_attribute(slot, up), kind: AttrKind::Categorical });
            }
        }
    }
    out
}

/// Appends ancestor values to a base row. NULL subjects give NULL ancestors.
pub fn extend_row(
    row: &[Value],
    base: &Schema,
    h: &GeneralizationHierarchy,
    levels: usize,
) -> Result<Vec<Value>, HierarchyError> {
    let mut out = row.to_vec();
    for slot in 0..N_SUBJECTS {
        let Some(pos) = base.position(&subject_attribute(slot)) else { continue };
        for up in 1..=levels {
            out.push(match &row[pos] {
                Value::Cat(v) => Value::Cat(h.ancestor_at(v, up)?.to_string()),
                _ => Value::Null,
            });
        }
    }
    Ok(out)
}

fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitTest {
    Categorical,
    Threshold(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitScore {
    pub gain: f64,
    pub split_info: f64,
    pub ratio: f64,
    pub test: SplitTest,
    /// Example counts per branch.
    pub branch_sizes: Vec<usize>,
}

/// Gain ratio of splitting `examples` on `attribute`. `None` when the
/// attribute is constant on the set.
pub fn gain_ratio(examples: &[&Example], attribute: usize, kind: AttrKind) -> Option<SplitScore> {
    let total = [examples.iter().filter(|e| e.positive).count(), examples.iter().filter(|e| !e.positive).count()];
    let base = entropy(&total);
    let n = examples.len() as f64;
    match kind {
        AttrKind::Categorical | AttrKind::Subject => {
            let mut groups: BTreeMap<Option<&str>, [usize; 2]> = BTreeMap::new();
            for e in examples {
                let g = groups.entry(e.values[attribute].cat_key()).or_default();
                g[usize::from(!e.positive)] += 1;
            }
            if groups.len() < 2 {
                return None;
            }
            let cond: f64 = groups.values().map(|g| (g[0] + g[1]) as f64 / n * entropy(g)).sum();
            let sizes: Vec<usize> = groups.values().map(|g| g[0] + g[1]).collect();
            let split_info = entropy(&sizes);
            let gain = (base - cond).max(0.0);
            Some(SplitScore { gain, split_info, ratio: gain / split_info, test: SplitTest::Categorical, branch_sizes: sizes })
        }
        AttrKind::Numeric => {
            let mut vals: Vec<(f64, bool)> =
                examples.iter().map(|e| (e.values[attribute].as_num().unwrap_or(0.0), e.positive)).collect();
            vals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut best: Option<(f64, f64, usize)> = None;
            let mut left = [0usize; 2];
            for i in 0..vals.len() - 1 {
                left[usize::from(!vals[i].1)] += 1;
                if vals[i].0 == vals[i + 1].0 {
                    continue;
                }
                let right = [total[0] - left[0], total[1] - left[1]];
                let nl = (i + 1) as f64;
                let cond = nl / n * entropy(&left) + (n - nl) / n * entropy(&right);
                let gain = (base - cond).max(0.0);
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, (vals[i].0 + vals[i + 1].0) / 2.0, i + 1));
                }
            }
            let (gain, threshold, nl) = best?;
            let sizes = vec![nl, vals.len() - nl];
            let split_info = entropy(&sizes);
            Some(SplitScore {
                gain,
                split_info,
                ratio: gain / split_info,
                test: SplitTest::Threshold(threshold),
                branch_sizes: sizes,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        positive: bool,
        n_pos: usize,
        n_neg: usize,
    },
    Branch {
        attribute: usize,
        name: String,
        /// `None` key stands for NULL.
        branches: Vec<(Option<String>, Node)>,
        majority: bool,
    },
    Threshold {
        attribute: usize,
        name: String,
        threshold: f64,
        le: Box<Node>,
        gt: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
}

/// Majority class; ties go to negative.
fn majority(examples: &[&Example]) -> bool {
    let pos = examples.iter().filter(|e| e.positive).count();
    pos * 2 > examples.len()
}

pub fn build_tree(examples: &[Example], schema: &Schema, config: &TreeConfig) -> DecisionTree {
    let refs: Vec<&Example> = examples.iter().collect();
    DecisionTree { root: grow(&refs, schema, config) }
}

fn leaf(examples: &[&Example]) -> Node {
    let n_pos = examples.iter().filter(|e| e.positive).count();
    Node::Leaf { positive: majority(examples), n_pos, n_neg: examples.len() - n_pos }
}

fn grow(examples: &[&Example], schema: &Schema, config: &TreeConfig) -> Node {
    let n_pos = examples.iter().filter(|e| e.positive).count();
    let min = config.min_node_size.max(1);
    if n_pos == 0 || n_pos == examples.len() || examples.len() < 2 * min {
        return leaf(examples);
    }
    let candidates: Vec<(usize, SplitScore)> = (0..schema.len())
        .filter_map(|a| gain_ratio(examples, a, schema.get(a).kind).map(|s| (a, s)))
        .filter(|(_, s)| s.branch_sizes.iter().filter(|&&b| b >= min).count() >= 2)
        .collect();
    if candidates.is_empty() {
        return leaf(examples);
    }
    let mean_gain = candidates.iter().map(|(_, s)| s.gain).sum::<f64>() / candidates.len() as f64;
    let mut best: Option<&(usize, SplitScore)> = None;
    for c in candidates.iter().filter(|(_, s)| s.gain >= mean_gain - 1e-12) {
        if best.is_none_or(|b| c.1.ratio > b.1.ratio) {
            best = Some(c);
        }
    }
    let (attribute, score) = best.expect("the max-gain candidate passes the mean guard");
    let name = schema.get(*attribute).name.clone();
    match score.test {
        SplitTest::Categorical => {
            let mut groups: BTreeMap<Option<&str>, Vec<&Example>> = BTreeMap::new();
            for e in examples {
                groups.entry(e.values[*attribute].cat_key()).or_default().push(e);
            }
            let branches =
                groups.into_iter().map(|(k, sub)| (k.map(str::to_string), grow(&sub, schema, config))).collect();
            Node::Branch { attribute: *attribute, name, branches, majority: majority(examples) }
        }
        SplitTest::Threshold(t) => {
            let (le, gt): (Vec<&Example>, Vec<&Example>) =
                examples.iter().partition(|e| e.values[*attribute].as_num().unwrap_or(0.0) <= t);
            Node::Threshold {
                attribute: *attribute,
                name,
                threshold: t,
                le: Box::new(grow(&le, schema, config)),
                gt: Box::new(grow(&gt, schema, config)),
            }
        }
    }
}

impl DecisionTree {
    pub fn classify(&self, row: &[Value]) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { positive, .. } => return *positive,
                Node::Branch { attribute, branches, majority, .. } => {
                    let key = row.get(*attribute).and_then(Value::cat_key);
                    match branches.iter().find(|(k, _)| k.as_deref() == key) {
                        Some((_, child)) => node = child,
                        None => return *majority,
                    }
                }
                Node::Threshold { attribute, threshold, le, gt, .. } => {
                    let x = row.get(*attribute).and_then(Value::as_num).unwrap_or(0.0);
                    node = if x <= *threshold { le } else { gt };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn depth(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 0,
                Node::Branch { branches, .. } => 1 + branches.iter().map(|(_, c)| depth(c)).max().unwrap_or(0),
                Node::Threshold { le, gt, .. } => 1 + depth(le).max(depth(gt)),
            }
        }
        depth(&self.root)
    }

    /// Attribute name tested at the root, if any.
    pub fn root_attribute(&self) -> Option<&str> {
        match &self.root {
            Node::Leaf { .. } => None,
            Node::Branch { name, .. } | Node::Threshold { name, .. } => Some(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Test {
    Eq { value: Option<String> },
    Le { threshold: f64 },
    Gt { threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub attribute: usize,
    pub name: String,
    #[serde(flatten)]
    pub test: Test,
}

impl Condition {
    pub fn eq(schema: &Schema, name: &str, value: &str) -> Option<Self> {
        Some(Condition {
            attribute: schema.position(name)?,
            name: name.to_string(),
            test: Test::Eq { value: Some(value.to_string()) },
        })
    }

    pub fn holds(&self, row: &[Value]) -> bool {
        let v = row.get(self.attribute).unwrap_or(&Value::Null);
        match &self.test {
            Test::Eq { value } => v.cat_key() == value.as_deref() && !matches!(v, Value::Num(_)),
            Test::Le { threshold } => v.as_num().unwrap_or(0.0) <= *threshold,
            Test::Gt { threshold } => v.as_num().unwrap_or(0.0) > *threshold,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.test {
            Test::Eq { value } => write!(f, "{} = {}", self.name, value.as_deref().unwrap_or(crate::features::NULL)),
            Test::Le { threshold } => write!(f, "{} <= {}", self.name, fmt_threshold(*threshold)),
            Test::Gt { threshold } => write!(f, "{} > {}", self.name, fmt_threshold(*threshold)),
        }
    }
}

fn fmt_threshold(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeRule {
    pub conditions: Vec<Condition>,
    pub positive: bool,
    /// Training examples covered and misclassified by the rule.
    pub covered: usize,
    pub errors: usize,
}

impl TreeRule {
    pub fn matches(&self, row: &[Value]) -> bool {
        self.conditions.iter().all(|c| c.holds(row))
    }

    pub fn accuracy(&self) -> f64 {
        if self.covered == 0 {
            0.0
        } else {
            (self.covered - self.errors) as f64 / self.covered as f64
        }
    }
}

impl fmt::Display for TreeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conditions.is_empty() {
            return f.write_str("true");
        }
        let parts: Vec<String> = self.conditions.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" & "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrunedRuleSet {
    pub rules: Vec<TreeRule>,
    pub default_positive: bool,
}

impl PrunedRuleSet {
    /// First matching rule's class; the default class otherwise.
    pub fn classify(&self, row: &[Value]) -> bool {
        self.rules.iter().find(|r| r.matches(row)).map_or(self.default_positive, |r| r.positive)
    }

    /// Positive-class rules as one disjunction, then negative-class rules
    /// and the default.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (positive, then) in [(true, "article is of interest"), (false, "article is not of interest")] {
            let group: Vec<&TreeRule> = self.rules.iter().filter(|r| r.positive == positive).collect();
            if group.is_empty() {
                continue;
            }
            let parts: Vec<String> = group
                .iter()
                .map(|r| if group.len() > 1 && r.conditions.len() > 1 { format!("({r})") } else { r.to_string() })
                .collect();
            out.push_str(&format!("IF {} THEN {then}\n", parts.join(" or ")));
        }
        let default = if self.default_positive { "article is of interest" } else { "article is not of interest" };
        out.push_str(&format!("OTHERWISE {default}\n"));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("rule sets serialize")
    }
}

/// Upper confidence bound on the error rate of a rule with `errors` out of
/// `covered` at confidence factor `cf`.
pub fn pessimistic_error(errors: usize, covered: usize, cf: f64) -> f64 {
    if covered == 0 {
        return 1.0;
    }
    if errors >= covered {
        return 1.0;
    }
    let n = covered as f64;
    if errors == 0 {
        return 1.0 - cf.powf(1.0 / n);
    }
    // P(X <= e; n, p) = I_{1-p}(n - e, e + 1); decreasing in p.
    let cdf = |p: f64| beta_reg(n - errors as f64, errors as f64 + 1.0, 1.0 - p);
    let (mut lo, mut hi) = (errors as f64 / n, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) > cf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn coverage(conditions: &[Condition], positive: bool, examples: &[Example]) -> (usize, usize) {
    let mut covered = 0;
    let mut errors = 0;
    for e in examples {
        if conditions.iter().all(|c| c.holds(&e.values)) {
            covered += 1;
            if e.positive != positive {
                errors += 1;
            }
        }
    }
    (covered, errors)
}

/// Greedy condition deletion while the pessimistic error does not increase.
pub fn prune_rule(mut conditions: Vec<Condition>, positive: bool, examples: &[Example], cf: f64) -> TreeRule {
    let (mut covered, mut errors) = coverage(&conditions, positive, examples);
    let mut current = pessimistic_error(errors, covered, cf);
    while !conditions.is_empty() {
        let mut best: Option<(usize, f64, usize, usize)> = None;
        for i in 0..conditions.len() {
            let mut trial = conditions.clone();
            trial.remove(i);
            let (c, e) = coverage(&trial, positive, examples);
            let u = pessimistic_error(e, c, cf);
            if best.is_none_or(|b| u < b.1) {
                best = Some((i, u, c, e));
            }
        }
        let (i, u, c, e) = best.expect("at least one condition");
        if u > current {
            break;
        }
        conditions.remove(i);
        current = u;
        covered = c;
        errors = e;
    }
    TreeRule { conditions, positive, covered, errors }
}

fn leaf_paths(node: &Node, prefix: &mut Vec<Condition>, out: &mut Vec<(Vec<Condition>, bool)>) {
    match node {
        Node::Leaf { positive, .. } => out.push((prefix.clone(), *positive)),
        Node::Branch { attribute, name, branches, .. } => {
            for (key, child) in branches {
                prefix.push(Condition { attribute: *attribute, name: name.clone(), test: Test::Eq { value: key.clone() } });
                leaf_paths(child, prefix, out);
                prefix.pop();
            }
        }
        Node::Threshold { attribute, name, threshold, le, gt } => {
            for (test, child) in [(Test::Le { threshold: *threshold }, le), (Test::Gt { threshold: *threshold }, gt)] {
                prefix.push(Condition { attribute: *attribute, name: name.clone(), test });
                leaf_paths(child, prefix, out);
                prefix.pop();
            }
        }
    }
}

/// One rule per leaf, pruned against the training examples, merged and
/// ordered by training accuracy.
pub fn tree_to_rules(tree: &DecisionTree, examples: &[Example], cf: f64) -> PrunedRuleSet {
    let mut paths = Vec::new();
    leaf_paths(&tree.root, &mut Vec::new(), &mut paths);
    let mut rules: Vec<TreeRule> = Vec::new();
    for (conds, positive) in paths {
        let rule = prune_rule(conds, positive, examples, cf);
        let duplicate = rules.iter().any(|r| {
            r.positive == rule.positive
                && r.conditions.len() == rule.conditions.len()
                && r.conditions.iter().all(|c| rule.conditions.contains(c))
        });
        if !duplicate {
            rules.push(rule);
        }
    }
    // Stable sort keeps tree order among equally accurate rules.
    rules.sort_by(|a, b| b.accuracy().total_cmp(&a.accuracy()).then(b.covered.cmp(&a.covered)));
    let uncovered: Vec<&Example> = examples.iter().filter(|e| !rules.iter().any(|r| r.matches(&e.values))).collect();
    let default_positive =
        if uncovered.is_empty() { majority(&examples.iter().collect::<Vec<_>>()) } else { majority(&uncovered) };
    PrunedRuleSet { rules, default_positive }
}
