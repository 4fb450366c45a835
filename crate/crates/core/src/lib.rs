//! Exact, machine-checkable models of a family of related constructions:
//!
//! * [`nested`] — nested collections of subsets, stable rooted trees, and the
//!   stratification poset they index;
//! * [`direction`] and [`points`] — rational points of compactified
//!   configuration spaces presented through their sphere coordinates, with
//!   operadic composition, symmetric-group actions, and an exact circle-framed
//!   variant ([`circle`]);
//! * [`screen`] — difference modules and simple screens: the linear-algebra
//!   functor of points of the moduli spaces of rooted trees of projective
//!   spaces, with composition, decomposition and vanishing conditions;
//! * [`logdf`] — divisor-lattice models of log structures with bundle-indexed
//!   exponent matrices for their (strict and virtual) morphisms;
//! * [`kn`] — floating-point chart verifications of real oriented blow-ups
//!   and the circle bundles they produce (the only module that leaves exact
//!   arithmetic).
//!
//! [`verify`] packages the exhaustive/seeded campaigns shared by the test
//! suite and the `fmlog` command line tool.

pub mod circle;
pub mod direction;
pub mod json;
pub mod kn;
pub mod logdf;
pub mod nested;
pub mod points;
pub mod qmat;
pub mod ratio;
pub mod sample;
pub mod screen;
pub mod sets;
pub mod verify;

use thiserror::Error as ThisError;

/// Error vocabulary shared by all modules.
#[derive(Debug, ThisError)]
pub enum Error {
    /// Malformed arguments, out-of-range labels, mismatched arities, …
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A configured bound (arity, sample count, …) was exceeded.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    /// A direction class degenerated (all points equal) where the contract
    /// requires a non-degenerate one.
    #[error("degenerate direction: {0}")]
    Degenerate(String),
    /// An internal consistency assertion failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid_input(msg: impl Into<String>) -> Error {
        Error::InvalidInput(msg.into())
    }
    pub fn resource_limit(msg: impl Into<String>) -> Error {
        Error::ResourceLimit(msg.into())
    }
    pub fn degenerate(msg: impl Into<String>) -> Error {
        Error::Degenerate(msg.into())
    }
    pub fn internal(msg: impl Into<String>) -> Error {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
