//! Exact state complexity of finite colored languages.
//!
//! A language of words of fixed length `n` over an alphabet of size `b`, with
//! each word assigned one of `c` colors, is a [`ColoredFunction`]. This crate
//! computes the size of its minimal partial deterministic automaton, evaluates
//! the matching upper bounds in exact arithmetic, constructs functions that
//! attain them, counts how many do, and checks the lattice embeddings used to
//! build maximally complex monotone languages and complete simple games.

pub mod bounds;
pub mod certificate;
pub mod counting;
pub mod csg;
pub mod error;
pub mod function;
pub mod lattice;
pub mod minauto;
pub mod poset;
pub mod witness;

pub use certificate::Certificate;
pub use error::{Error, Result};
pub use function::{
    is_early, is_monotone, is_zero, residual, ColoredFunction, MonotoneFunction, Word,
};
pub use lattice::{
    AdequacyCertificate, Embedding, Order, RelationFailure, SearchConfig, SearchOutcome,
};
pub use minauto::{minimal_pdfa, mn_equivalent, state_complexity, Pdfa};
pub use poset::{LatticeMap, Poset};

/// Arbitrary-precision nonnegative integer used for bounds and counts.
pub type BigCount = num_bigint::BigUint;
