//! deltakit: repetitiveness measures and compressed representations built
//! around substring complexity.
//!
//! The crate provides:
//!
//! - [`textcore`] — the [`Text`] type, the substring
//!   complexity profile and the measure `delta`, Lempel-Ziv factorization,
//!   smallest period, and small-scale brute-force oracles (distinct counts,
//!   smallest attractor).
//! - [`recompression`] — restricted recompression rounds (run-length
//!   encoding and randomized pair compression, both gated by an exact
//!   expansion-length threshold) producing run-length grammars, plus a
//!   retry wrapper with a size budget.
//! - [`rlslp`] — run-length straight-line programs: expansion, random
//!   access, substring extraction, validity verification, serialization.
//! - [`blocktree`] — block trees parameterized for `delta`-bounded space,
//!   with access, extraction, group fingerprints, and per-level statistics.
//! - [`families`] — generators for the string families used as corpora and
//!   oracles (power-of-two `b` placements, perturbed and recolored
//!   variants, delimiter compositions, permutation tails).
//!
//! Positions and ranges in the public API are 0-based and half-open.

pub mod blocktree;
pub mod error;
pub mod families;
pub mod recompression;
pub mod rlslp;
pub mod textcore;
mod util;

pub use error::{Error, Result};
pub use textcore::Text;

pub use util::{derive_seed, SplitMix64};
