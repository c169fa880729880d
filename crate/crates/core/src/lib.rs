//! Compression-based search for Legendre pairs.
//!
//! A Legendre pair of odd length `ℓ` is two `±1` sequences `A`, `B` with
//! `PAF_A(s) + PAF_B(s) = −2` for every shift `s ≠ 0`. The search runs in two
//! stages: enumerate short candidate compressions `(𝒜, ℬ)` that satisfy the
//! compressed constraints ([`candgen`], seeded by [`diophantine`] when
//! `ℓ = 5m`), then decompress them back to full sequences ([`decompress`]).
//! [`grouptools`] supplies the multiplier-orbit construction and the subset
//! codes used to name orbit selections.

pub mod candgen;
pub mod decompress;
pub mod diophantine;
pub mod error;
pub mod golden;
pub mod grouptools;
pub mod pipeline;
pub mod seqcore;

pub use error::{Error, Result};
