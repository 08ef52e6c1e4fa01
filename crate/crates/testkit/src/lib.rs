//! Shared test support: random generators for every representation and
//! reference series computations that never take a derivative.

pub mod fixtures;
pub mod gen;
pub mod laws;
pub mod series;

pub use gen::RandomCoeff;
pub use series::Series;

/// Step bound used when comparing membership against leftmost derivations.
pub fn oracle_step_bound(word_len: usize, num_nonterminals: usize) -> usize {
    4 * (word_len + 1) * num_nonterminals.max(1)
}
