//! Confining subsets and the poset of hyperbolic structures for F_n, F_n± and lamplighters.

pub mod confining;
pub mod exactnum;
pub mod lamplighter;
pub mod nonlamplike;
pub mod plmap;
pub mod treesim;
pub mod verdict;
