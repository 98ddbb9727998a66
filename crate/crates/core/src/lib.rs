//! Quantum speed-limit bounds on exact finite-dimensional evolutions.
//!
//! The crate evaluates the Franson inequality `|δ⟨Q⟩| ≤ ΔQ`, its strict time
//! window `πħ/(4ΔE)`, the relaxed crossing bounds down to `ħ/(2ΔE)` and the
//! tangent-ratio law `|δ⟨Q⟩|/ΔQ ≤ tan(ΔE t/ħ)` on Hermitian models, and searches
//! random ensembles for instances that would beat them.
//!
//! Internally every formula runs in natural units (`ħ = 1`); [`UnitsConfig`]
//! converts at the boundaries.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
mod error;
mod roots;
pub mod models;
pub mod quantum;
pub mod search;

pub use error::{Error, Result};
pub use quantum::{
    expectation, fidelity, shift_observable, spectral_decompose, two_level_decompose,
    uncertainty, validate_hermitian, evolve, Observable, Propagator, QuantumState,
    SpectralDecomposition, TwoLevelSplit, UnitsConfig, C64,
};
