//! Shared fixtures for the benchmarks.

use profilekit::resources::Resources;
use profilekit::synthgen::{generate, ConceptSelector, GenSpec};
use profilekit::Corpus;

/// Synthetic corpus whose positives sit under `water_sports`.
pub fn water_sports_corpus(n_docs: usize, seed: u64) -> (Corpus, Resources) {
    let res = Resources::reference();
    let spec = GenSpec::new(n_docs, vec![ConceptSelector::new("subject1", ["water_sports"])], seed);
    let corpus = generate(&spec, &res).expect("reference concept is satisfiable");
    (corpus, res)
}
