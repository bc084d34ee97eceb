//! Randomized-measurement analysis of small quantum systems.
//!
//! The crate simulates the full pipeline used in randomized-measurement
//! entanglement experiments at desk scale:
//!
//! * dense complex linear algebra for multi-qudit operators ([`linalg`]),
//! * constructors for GHZ/W mixtures, chessboard states and their
//!   preparation unitaries ([`states`]),
//! * Pauli and generalized Bloch decompositions ([`bloch`]),
//! * analytic correlation moments, concurrence and the three-tangle
//!   ([`invariants`]),
//! * the randomized-measurement protocol with unbiased finite-shot moment
//!   estimators ([`protocol`]),
//! * entanglement criteria, including the constrained fourth-moment bound
//!   used to certify bound entanglement ([`criteria`]),
//! * simulated two-qutrit tomography with iterative maximum-likelihood
//!   reconstruction and bootstrap error bars ([`tomography`]).
//!
//! All operations are pure functions of their inputs; random procedures are
//! driven by explicit 64-bit seeds and are bit-reproducible regardless of
//! thread count.

#![forbid(unsafe_code)]

pub mod bloch;
pub mod criteria;
pub mod invariants;
pub mod linalg;
pub mod protocol;
pub mod states;
pub mod tomography;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
