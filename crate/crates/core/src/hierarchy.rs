//! Subject-category generalization hierarchy.
//!
//! A rooted tree loaded from `node<TAB>parent` lines. Rules produced by the
//! learners may name internal nodes, which then cover every descendant.

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

/// Value of an ancestor attribute whose walk passes above the root.
pub const DUMMY: &str = "__dummy__";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("line {line}: expected `node<TAB>parent`")]
    Malformed { line: usize },
    #[error("node `{0}` is declared more than once")]
    Duplicate(String),
    #[error("parent `{0}` is not declared as a node")]
    OrphanParent(String),
    #[error("multiple roots: `{0}` and `{1}`")]
    MultipleRoots(String, String),
    #[error("no root line (`node<TAB>-`)")]
    NoRoot,
    #[error("cycle through node `{0}`")]
    Cycle(String),
    #[error("`{0}` is a reserved name")]
    Reserved(String),
    #[error("unknown category `{0}`")]
    Unknown(String),
    #[error("empty value set")]
    Empty,
    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` wrapper so the error enum stays `PartialEq`.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct IoError(pub String);

impl PartialEq for IoError {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl Eq for IoError {}

pub type NodeId = usize;

#[derive(Debug, Clone)]
pub struct GeneralizationHierarchy {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    level: Vec<usize>,
    root: NodeId,
    max_depth: usize,
}

const REFERENCE: &str = include_str!("../data/reference_hierarchy.tsv");

impl GeneralizationHierarchy {
    /// The bundled reference subject hierarchy.
    pub fn reference() -> Self {
        Self::parse(REFERENCE).expect("bundled hierarchy is valid")
    }

    pub fn parse(text: &str) -> Result<Self, HierarchyError> {
        load_hierarchy(text.as_bytes())
    }

    pub fn from_edges<'a, I>(edges: I) -> Result<Self, HierarchyError>
    where
        I: IntoIterator<Item = (&'a str, Option<&'a str>)>,
    {
        let mut names = Vec::new();
        let mut index = HashMap::new();
        let mut parent_names = Vec::new();
        let mut root: Option<NodeId> = None;
        for (node, parent) in edges {
            if node == DUMMY || node == "-" {
                return Err(HierarchyError::Reserved(node.to_string()));
            }
            if index.contains_key(node) {
                return Err(HierarchyError::Duplicate(node.to_string()));
            }
            let id = names.len();
            index.insert(node.to_string(), id);
            names.push(node.to_string());
            if parent.is_none() {
                if let Some(r) = root {
                    return Err(HierarchyError::MultipleRoots(names[r].clone(), node.to_string()));
                }
                root = Some(id);
            }
            parent_names.push(parent.map(str::to_string));
        }
        let root = root.ok_or(HierarchyError::NoRoot)?;
        let mut parent = Vec::with_capacity(names.len());
        let mut children = vec![Vec::new(); names.len()];
        for (id, p) in parent_names.iter().enumerate() {
            match p {
                None => parent.push(None),
                Some(p) => {
                    let pid = *index.get(p).ok_or_else(|| HierarchyError::OrphanParent(p.clone()))?;
                    parent.push(Some(pid));
                    children[pid].push(id);
                }
            }
        }
        // Breadth-first levels; anything unreached sits on a cycle.
        let mut level = vec![usize::MAX; names.len()];
        level[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut max_depth = 0;
        while let Some(n) = queue.pop_front() {
            for &c in &children[n] {
                level[c] = level[n] + 1;
                max_depth = max_depth.max(level[c]);
                queue.push_back(c);
            }
        }
        if let Some(id) = level.iter().position(|&l| l == usize::MAX) {
            return Err(HierarchyError::Cycle(names[id].clone()));
        }
        Ok(GeneralizationHierarchy { names, index, parent, children, level, root, max_depth })
    }

    pub fn root(&self) -> &str {
        &self.names[self.root]
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, node: &str) -> bool {
        self.index.contains_key(node)
    }

    pub fn id(&self, node: &str) -> Result<NodeId, HierarchyError> {
        self.index.get(node).copied().ok_or_else(|| HierarchyError::Unknown(node.to_string()))
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    /// Node names in declaration order.
    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &str> {
        (0..self.names.len()).filter(|&i| self.children[i].is_empty()).map(|i| self.name(i))
    }

    pub fn is_leaf(&self, node: &str) -> Result<bool, HierarchyError> {
        Ok(self.children[self.id(node)?].is_empty())
    }

    pub fn level(&self, node: &str) -> Result<usize, HierarchyError> {
        Ok(self.level[self.id(node)?])
    }

    pub fn parent(&self, node: &str) -> Result<Option<&str>, HierarchyError> {
        Ok(self.parent[self.id(node)?].map(|p| self.name(p)))
    }

    pub fn children(&self, node: &str) -> Result<impl Iterator<Item = &str>, HierarchyError> {
        Ok(self.children[self.id(node)?].iter().map(|&c| self.name(c)))
    }

    /// Leaves under `node` (the node itself when it is a leaf).
    pub fn leaves_under(&self, node: &str) -> Result<Vec<&str>, HierarchyError> {
        let mut out = Vec::new();
        let mut stack = vec![self.id(node)?];
        while let Some(n) = stack.pop() {
            if self.children[n].is_empty() {
                out.push(self.name(n));
            } else {
                stack.extend(self.children[n].iter().rev());
            }
        }
        Ok(out)
    }

    /// The chain `node, parent(node), ..., root`.
    pub fn path_to_root(&self, node: &str) -> Result<Vec<&str>, HierarchyError> {
        let mut id = Some(self.id(node)?);
        let mut out = Vec::new();
        while let Some(n) = id {
            out.push(self.name(n));
            id = self.parent[n];
        }
        Ok(out)
    }

    /// Walks `levels_up` parent links; [`DUMMY`] once the walk passes the root.
    pub fn ancestor_at(&self, node: &str, levels_up: usize) -> Result<&str, HierarchyError> {
        let mut id = self.id(node)?;
        for _ in 0..levels_up {
            match self.parent[id] {
                Some(p) => id = p,
                None => return Ok(DUMMY),
            }
        }
        Ok(self.name(id))
    }

    /// True iff `general` is an ancestor-or-self of `specific`. [`DUMMY`]
    /// covers nothing and is covered by nothing.
    pub fn covers(&self, general: &str, specific: &str) -> Result<bool, HierarchyError> {
        if general == DUMMY || specific == DUMMY {
            return Ok(false);
        }
        Ok(self.covers_id(self.id(general)?, self.id(specific)?))
    }

    pub fn covers_id(&self, general: NodeId, specific: NodeId) -> bool {
        let target = self.level[general];
        let mut id = specific;
        if self.level[id] < target {
            return false;
        }
        while self.level[id] > target {
            id = self.parent[id].expect("non-root nodes have parents");
        }
        id == general
    }

    /// Deepest node that is an ancestor-or-self of every value.
    pub fn minimal_common_generalization<'a, I>(&self, values: I) -> Result<&str, HierarchyError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut iter = values.into_iter();
        let first = iter.next().ok_or(HierarchyError::Empty)?;
        let mut acc = self.id(first)?;
        for v in iter {
            acc = self.common_ancestor(acc, self.id(v)?);
        }
        Ok(self.name(acc))
    }

    fn common_ancestor(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.level[a] > self.level[b] {
            a = self.parent[a].expect("below root");
        }
        while self.level[b] > self.level[a] {
            b = self.parent[b].expect("below root");
        }
        while a != b {
            a = self.parent[a].expect("below root");
            b = self.parent[b].expect("below root");
        }
        a
    }

    /// Serializes back to the TSV edge-list format.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (id, name) in self.names.iter().enumerate() {
            let parent = self.parent[id].map_or("-", |p| self.name(p));
            out.push_str(name);
            out.push('\t');
            out.push_str(parent);
            out.push('\n');
        }
        out
    }
}

/// Loads a hierarchy from `node<TAB>parent` lines; the root uses `-` as its
/// parent. Blank lines and `#` comments are skipped.
pub fn load_hierarchy<R: BufRead>(reader: R) -> Result<GeneralizationHierarchy, HierarchyError> {
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| HierarchyError::Io(IoError(e.to_string())))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(node), Some(parent), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(HierarchyError::Malformed { line: i + 1 });
        };
        let (node, parent) = (node.trim().to_string(), parent.trim().to_string());
        if node.is_empty() || parent.is_empty() {
            return Err(HierarchyError::Malformed { line: i + 1 });
        }
        edges.push((node, parent));
    }
    GeneralizationHierarchy::from_edges(
        edges.iter().map(|(n, p)| (n.as_str(), (p != "-").then_some(p.as_str()))),
    )
}
