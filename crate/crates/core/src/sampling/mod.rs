//! Hard negative candidate generation: sub-word inverted index with idf
//! ranking, hierarchy-neighbourhood search, and uniform random sampling.

mod index;
mod negatives;
mod tokenize;

pub use index::{build_inverted_index, InvertedIndex};
pub use negatives::{
    compute_invalid_set, generate_all, generate_negative_candidates, neighbour_sample,
    random_sample, CandidateRecord, SamplingContext, SamplingPlan, Strategy, DEFAULT_MAX_HOPS,
};
pub use tokenize::{Tokenizer, CONTINUATION_PREFIX};
