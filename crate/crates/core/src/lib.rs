//! Decides whether a coding of a fixed point of a primitive substitution is
//! automatic, with exact-integer certificates, and compiles automatic inputs
//! into a constant-length substitution and a base-k automaton.
//!
//! The pipeline:
//!
//! 1. [`words`]: substitutions, primitivity, fixed-point seeds, factor languages
//!    and a bounded Morse–Hedlund periodicity probe.
//! 2. [`returns`]: return words to the seed letter and the return substitution.
//! 3. [`linalg`]: exact rank, nilpotency index and left-eigenvector tests.
//! 4. [`automaticity`]: the eigenvector criterion and its left-proper and
//!    nonsingular fast paths.
//! 5. [`dekking`]: the constant-length presentation, letter merging and the DFAO.
//!
//! [`spectral`] reports rational dynamical eigenvalues and [`oracle`] holds
//! brute-force cross-checks.

pub mod automaticity;
pub mod dekking;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod returns;
pub mod spectral;
pub mod words;

pub use error::{Error, Result};
