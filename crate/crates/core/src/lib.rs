#![allow(clippy::needless_range_loop)]
//! Certified local randomness for two-player nonlocal games.
//!
//! The crate models finite games and quantum strategies, computes the
//! discrimination quantity `Dist` with dual certificates, and checks the
//! measurement-disturbance, declassicalization and score-gap inequalities
//! that relate superclassical scores to the unpredictability of Alice's
//! output from Bob's side.

pub mod certify;
pub mod cli;
pub mod discrimination;
pub mod error;
pub mod games;
pub mod io;
pub mod linalg;
pub mod random;
pub mod strategies;
pub mod sweep;
pub mod tolerances;

pub use error::{Error, Result};
