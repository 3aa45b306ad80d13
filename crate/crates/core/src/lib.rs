//! Classical simulation of phase-encoded quantum hash functions.
//!
//! The pipeline is: pick a small-bias set B ⊆ F_q ([`bias`]), phase-encode
//! field elements into hash states ([`qstate`]), optionally compose with a
//! Reed–Solomon layer ([`generator`]), then measure collision resistance,
//! equality-test acceptance, decoder success against the Holevo–Nayak cap
//! ([`bounds`]) and coherent-state overlaps ([`coherent`]). The [`cli`] module
//! exposes all of it as JSON-emitting subcommands.

pub mod bias;
pub mod bounds;
pub mod cli;
pub mod coherent;
pub mod error;
pub mod field;
pub mod generator;
pub mod linalg;
pub mod qstate;

pub use error::{Error, Result};
