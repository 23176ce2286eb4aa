//! Learning text-filtering profiles.
//!
//! Documents are represented by a hybrid of subject categories drawn from a
//! generalization hierarchy, people/organization/location slots and tf·idf
//! keyword weights. Two symbolic learners (an AQ-style covering learner and
//! a C4.5-style tree/rule learner) exploit the hierarchy; a modified-Rocchio
//! profile provides the word-level baseline. The `eval` module runs the
//! train/test protocols and reports accuracy, precision and recall.

pub mod aq;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod hierarchy;
pub mod resources;
pub mod synthgen;
pub mod rocchio;
pub mod table;
pub mod tree;

pub use corpus::{Corpus, Document, Label, PolEntity, PolKind, SplitKind, SplitPlan, Tokenizer};
pub use features::{FeatureContext, FeatureSet, FeatureVector};
pub use hierarchy::{GeneralizationHierarchy, DUMMY};
