//! Finite-horizon simulation engine and verification harness for topological
//! selection games (Menger/Rothberger style cover games and their ω-/k-cover
//! variants).
//!
//! Everything here operates on *effectively presented* desk models: points,
//! open sets, and compact sets are finite descriptor trees with decidable
//! membership and containment, and covers are intensional oracles (element
//! stream + selector).  All cover-property judgments are therefore relative
//! to the finite challenge batteries a space ships with: a failed judgment is
//! a concrete counterexample, a passed one certifies the battery only.  That
//! finite-horizon reading is deliberate and pervasive; see `docs/formats.md`
//! in the repository root for the on-disk formats.
//!
//! Module map:
//! * [`combinatorics`] — graded finite-sequence enumerations and the
//!   prime-power pairing used to schedule strategy bookkeeping.
//! * [`topology`] — descriptor algebra, space models, cover oracles,
//!   classification, and cover transformations.
//! * [`engine`] — game specs, strategy handles, the round loop, transcripts,
//!   and the judge.
//! * [`strategy`] — constructive strategies and strategy transformations.
//! * [`witnesses`] — countable witness families, cofinality checks, and the
//!   implication chain between family kinds.
//! * [`verify`] — the named verification suites the CLI and the acceptance
//!   test both run.

pub mod combinatorics;
pub mod engine;
pub mod error;
pub mod qset;
pub mod rat;
pub mod strategy;
pub mod topology;
pub mod verify;
pub mod witnesses;

pub use error::Error;
pub use rat::Q;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
