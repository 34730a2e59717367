//! Exact-arithmetic toolkit for canonical heights on elliptic curves over
//! abelian extensions of Q: local and global heights, Frobenius
//! annihilation, formal-group congruences, ramified inertia congruences,
//! and the explicit lower-bound constants derived from them.

pub mod arith;
pub mod curve;
pub mod error;
pub mod fields;
pub mod formal;
pub mod frobenius;
pub mod heights;
pub mod pipeline;
pub mod ramified;

pub use error::{Error, Result};
