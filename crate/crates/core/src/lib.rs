//! Exact-arithmetic workbench for multiple recurrence of linear operators.
//!
//! The crate is split along four lines:
//!
//! * [`ap`] analyses finite sets of naturals (return-time sets) for
//!   arithmetic-progression structure and density, and computes small
//!   Szemerédi and van der Waerden quantities exactly.
//! * [`gowers`] evaluates the quantitative bounds behind the existence of
//!   multiply recurrent operators that are not weakly mixing.
//! * [`seq`] is the sequence-space kernel: finitely supported rational
//!   vectors, `ℓ_p` balls and an algebra of weighted shifts.
//! * [`recurrence`] runs the experiments: return sets, the backward-shift
//!   progression criterion, witness searches and their verification.
//!
//! Progression lengths in [`ap`] count terms. Recurrence operations use `m`
//! for the number of steps, so a recurrence witness of order `m` covers
//! `m + 1` iterates.

pub mod ap;
pub mod error;
pub mod gowers;
pub mod recurrence;
pub mod seq;
pub mod verify;

pub use error::{Error, Result};
