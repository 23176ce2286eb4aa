//! Bundled reference resources: subject hierarchy, category lexicon,
//! category correlations and entity gazetteers.
//!
//! The lexicon is derived from the hierarchy: every leaf category owns a
//! pool of unambiguous words built from its name, and every node with two
//! or more leaf children contributes one ambiguous word shared by them.

use std::collections::BTreeSet;

use crate::corpus::Tokenizer;
use crate::features::{CategoryCorrelations, Gazetteer, Lexicon};
use crate::hierarchy::GeneralizationHierarchy;

/// Word-forming suffixes for a leaf's unambiguous term pool.
pub const TERM_SUFFIXES: [&str; 12] =
    ["", "er", "ing", "ist", "ology", "ware", "craft", "line", "zone", "kit", "fest", "team"];

pub const SELF_CORRELATION: f64 = 2.0;
pub const SIBLING_CORRELATION: f64 = 1.0;
pub const COUSIN_CORRELATION: f64 = 0.25;

/// `water_sports` → `watersports`.
pub fn compact(category: &str) -> String {
    category.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

/// Hierarchy, lexicon, correlations, gazetteer and tokenizer shared by all
/// runs.
#[derive(Debug, Clone)]
pub struct Resources {
    pub hierarchy: GeneralizationHierarchy,
    pub lexicon: Lexicon,
    pub correlations: CategoryCorrelations,
    pub gazetteer: Gazetteer,
    pub tokenizer: Tokenizer,
}

impl Resources {
    pub fn reference() -> Self {
        let hierarchy = GeneralizationHierarchy::reference();
        Resources {
            lexicon: lexicon_for(&hierarchy),
            correlations: correlations_for(&hierarchy),
            hierarchy,
            gazetteer: Gazetteer::reference(),
            tokenizer: Tokenizer::default(),
        }
    }
}

pub fn reference_hierarchy() -> GeneralizationHierarchy {
    GeneralizationHierarchy::reference()
}

pub fn lexicon_for(h: &GeneralizationHierarchy) -> Lexicon {
    let mut triples: Vec<(String, String, f64)> = Vec::new();
    for leaf in h.leaves() {
        let stem = compact(leaf);
        for suffix in TERM_SUFFIXES {
            triples.push((format!("{stem}{suffix}"), leaf.to_string(), 1.0));
        }
    }
    for node in h.nodes() {
        let leaf_children: Vec<&str> =
            h.children(node).expect("node exists").filter(|c| h.is_leaf(c).unwrap_or(false)).collect();
        if leaf_children.len() >= 2 {
            for child in leaf_children {
                triples.push((compact(node), child.to_string(), 1.0));
            }
        }
    }
    Lexicon::from_triples(triples).expect("generated priors are valid")
}

pub fn correlations_for(h: &GeneralizationHierarchy) -> CategoryCorrelations {
    let mut corr = CategoryCorrelations::default();
    let leaves: Vec<&str> = h.leaves().collect();
    for leaf in &leaves {
        corr.set(leaf, leaf, SELF_CORRELATION).expect("finite");
    }
    for (i, a) in leaves.iter().enumerate() {
        for b in &leaves[i + 1..] {
            let value = if h.ancestor_at(a, 1).ok() == h.ancestor_at(b, 1).ok() {
                SIBLING_CORRELATION
            } else if h.ancestor_at(a, 2).ok() == h.ancestor_at(b, 2).ok()
                && h.level(a).ok() == h.level(b).ok()
            {
                COUSIN_CORRELATION
            } else {
                continue;
            };
            corr.set(a, b, value).expect("finite");
        }
    }
    corr
}

pub fn reference_lexicon() -> Lexicon {
    lexicon_for(&GeneralizationHierarchy::reference())
}

pub fn reference_correlations() -> CategoryCorrelations {
    correlations_for(&GeneralizationHierarchy::reference())
}

pub fn reference_gazetteer() -> Gazetteer {
    Gazetteer::reference()
}

/// Bundled resource files, as (file name, contents).
pub fn reference_files() -> Vec<(&'static str, String)> {
    let h = GeneralizationHierarchy::reference();
    vec![
        ("hierarchy.tsv", h.to_tsv()),
        ("lexicon.tsv", lexicon_for(&h).to_tsv()),
        ("correlations.tsv", correlations_for(&h).to_tsv()),
        ("persons.txt", include_str!("../data/persons.txt").to_string()),
        ("organizations.txt", include_str!("../data/organizations.txt").to_string()),
        ("locations.tsv", include_str!("../data/locations.tsv").to_string()),
        ("honorifics.txt", include_str!("../data/honorifics.txt").to_string()),
        ("corporate_cues.txt", include_str!("../data/corporate_cues.txt").to_string()),
        ("stopwords.txt", include_str!("../data/stopwords.txt").to_string()),
    ]
}

/// Words that the reference lexicon does not know and the tokenizer keeps;
/// used as neutral filler by the synthetic generator.
pub fn distractor_words(count: usize, lexicon: &Lexicon) -> Vec<String> {
    const SYLLABLES: [&str; 16] =
        ["ka", "lo", "mi", "ne", "su", "ta", "ri", "po", "da", "ve", "zu", "ho", "bi", "fe", "go", "ju"];
    let known: BTreeSet<&str> = lexicon.terms().collect();
    let mut out = Vec::with_capacity(count);
    let mut i = 0usize;
    while out.len() < count {
        let word: String = [i % 16, (i / 16) % 16, (i / 256) % 16]
            .iter()
            .map(|&s| SYLLABLES[s])
            .collect::<String>()
            + if i >= 4096 { "x" } else { "" };
        i += 1;
        if !known.contains(word.as_str()) {
            out.push(word);
        }
    }
    out
}
