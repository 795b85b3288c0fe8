//! Classification engine for the Dirac series of `GL(n,R)`.
//!
//! Irreducible unitary modules with half-integral infinitesimal character are
//! parabolically induced from Speh representations and a special unipotent
//! representation. This crate decides nonvanishing of Dirac cohomology for
//! such a module, computes spin-lowest K-types (closed forms where the case
//! theorems give them, a candidate-solve / membership-select pipeline
//! elsewhere), and enumerates the FS-scattered part of the Dirac series,
//! including the `S_n` counts and the reference tables for small `n`.
//!
//! The main entry points:
//!
//! - [`duals::UnitaryModule`] — a module described by Speh factors plus an
//!   optional unipotent factor, with its chains and infinitesimal character;
//! - [`dirac::classify`] — the nonvanishing verdict and spin-lowest K-types;
//! - [`scattered::fs_scattered`] / [`scattered::count_s`] — the census;
//! - [`scattered::tables`] — table rows matching the bundled golden files;
//! - [`cli::run`] — the command-line front end used by the `dirac-series`
//!   binary.
//!
//! Everything is exact integer/half-integer arithmetic; there is no floating
//! point anywhere in the decision paths.

pub mod cli;
pub mod dirac;
pub mod duals;
pub mod ktypes;
pub mod scattered;
pub mod weights;

pub use dirac::{classify, DiracResult, SpinStatus};
pub use duals::{Chain, ChainKind, SpehParams, UnipParams, UnitaryModule};
pub use ktypes::{Eta, KTypeLabel};
pub use weights::{NormSq, Weight};

/// Errors surfaced by the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed arguments: bad ranks, unparseable descriptors, invalid n.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A module (or character) outside the admissible range.
    #[error("inadmissible: {0}")]
    Inadmissible(String),
    /// A character-oracle request beyond the configured feasibility ceiling.
    #[error("oracle infeasible: {0}")]
    Infeasible(String),
    /// A virtual (non-genuine) character where a true character was required.
    #[error("virtual character: negative multiplicity at {0}")]
    VirtualCharacter(String),
    /// An internal cross-check failed; this indicates a bug, not bad input.
    #[error("internal consistency violation: {0}")]
    Inconsistent(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
