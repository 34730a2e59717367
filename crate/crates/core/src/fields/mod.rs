//! Quadratic fields, cyclotomic rings, their Galois automorphisms, residue
//! fields, and the coordinate-field interface used by curve arithmetic.

pub mod cyclotomic;
pub mod galois;
pub mod quadratic;
pub mod residue;
pub mod scalar;

pub use cyclotomic::{cyclotomic_polynomial, divides_in_cyclotomic, CyclotomicElement};
pub use galois::{apply_automorphism, GaloisAction, GaloisAutomorphism};
pub use quadratic::{quad_valuation, QuadraticElement, QuadraticField, QuadraticPrime, Splitting};
pub use residue::{ResidueElem, ResidueField};
pub use scalar::{ArchPlace, BaseField, PrimeIdeal, Scalar};
