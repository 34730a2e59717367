//! Exact arithmetic: rationals and p-adic valuations, integer polynomials
//! with resultants and Bezout identities, small-prime helpers, and the
//! periodic Bernoulli polynomial.

pub mod bernoulli;
pub mod poly;
pub mod primes;
pub mod rational;

pub use bernoulli::{bernoulli2_periodic, bernoulli2_periodic_f64};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use poly::{bezout_integer, resultant, Bezout, IntPolynomial};
pub use rational::{valuation_p, Valuation};
