//! Galois automorphisms of quadratic fields and cyclotomic rings.

use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;

use super::cyclotomic::CyclotomicElement;
use super::quadratic::QuadraticElement;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GaloisAutomorphism {
    Identity,
    QuadraticConjugation,
    CyclotomicPower { m: usize, k: usize },
}

impl GaloisAutomorphism {
    pub fn cyclotomic_power(m: usize, k: usize) -> Result<Self> {
        if m == 0 || k.gcd(&m) != 1 {
            return invalid(format!("ζ ↦ ζ^{k} is not an automorphism of Z[ζ_{m}]"));
        }
        Ok(GaloisAutomorphism::CyclotomicPower { m, k: k % m })
    }

    pub fn order(&self) -> usize {
        match *self {
            GaloisAutomorphism::Identity => 1,
            GaloisAutomorphism::QuadraticConjugation => 2,
            GaloisAutomorphism::CyclotomicPower { m, k } => multiplicative_order(k, m),
        }
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        use GaloisAutomorphism::*;
        match (*self, *other) {
            (Identity, g) | (g, Identity) => Ok(g),
            (QuadraticConjugation, QuadraticConjugation) => Ok(Identity),
            (CyclotomicPower { m, k }, CyclotomicPower { m: m2, k: k2 }) if m == m2 => {
                Self::cyclotomic_power(m, k * k2 % m)
            }
            _ => invalid("automorphisms of different rings"),
        }
    }

    pub fn is_identity(&self) -> bool {
        match *self {
            GaloisAutomorphism::Identity => true,
            GaloisAutomorphism::QuadraticConjugation => false,
            GaloisAutomorphism::CyclotomicPower { m, k } => k % m == 1 % m,
        }
    }
}

impl fmt::Display for GaloisAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaloisAutomorphism::Identity => f.write_str("identity"),
            GaloisAutomorphism::QuadraticConjugation => f.write_str("conjugation"),
            GaloisAutomorphism::CyclotomicPower { m, k } => write!(f, "zeta_{m} -> zeta_{m}^{k}"),
        }
    }
}

/// Order of k in (Z/m)^*.
pub fn multiplicative_order(k: usize, m: usize) -> usize {
    if m == 1 {
        return 1;
    }
    let mut x = k % m;
    let mut n = 1;
    while x != 1 {
        x = x * k % m;
        n += 1;
    }
    n
}

/// Things a Galois automorphism acts on.
pub trait GaloisAction: Sized {
    fn apply(&self, g: &GaloisAutomorphism) -> Result<Self>;
}

impl GaloisAction for BigRational {
    fn apply(&self, _g: &GaloisAutomorphism) -> Result<Self> {
        Ok(self.clone())
    }
}

impl GaloisAction for QuadraticElement {
    fn apply(&self, g: &GaloisAutomorphism) -> Result<Self> {
        match g {
            GaloisAutomorphism::Identity => Ok(self.clone()),
            GaloisAutomorphism::QuadraticConjugation => Ok(self.conjugate()),
            GaloisAutomorphism::CyclotomicPower { .. } => invalid("cyclotomic automorphism applied to a quadratic element"),
        }
    }
}

impl GaloisAction for CyclotomicElement {
    fn apply(&self, g: &GaloisAutomorphism) -> Result<Self> {
        match *g {
            GaloisAutomorphism::Identity => Ok(self.clone()),
            GaloisAutomorphism::CyclotomicPower { m, k } if m == self.modulus() => Ok(self.power_map(k)),
            GaloisAutomorphism::CyclotomicPower { m, .. } => {
                invalid(format!("automorphism of Z[ζ_{m}] applied in Z[ζ_{}]", self.modulus()))
            }
            GaloisAutomorphism::QuadraticConjugation => invalid("quadratic conjugation applied to a cyclotomic element"),
        }
    }
}

pub fn apply_automorphism<T: GaloisAction>(x: &T, g: &GaloisAutomorphism) -> Result<T> {
    x.apply(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::fields::quadratic::QuadraticField;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let k = QuadraticField::new(5).unwrap();
        let x = k.element(int(1), int(2));
        let y = apply_automorphism(&x, &GaloisAutomorphism::QuadraticConjugation).unwrap();
        assert_eq!(y, k.element(int(1), int(-2)));

        let i = CyclotomicElement::zeta_pow(4, 1).unwrap();
        let g = GaloisAutomorphism::cyclotomic_power(4, 3).unwrap();
        assert_eq!(apply_automorphism(&i, &g).unwrap(), -&i);

        let z9 = CyclotomicElement::zeta_pow(9, 1).unwrap();
        let g4 = GaloisAutomorphism::cyclotomic_power(9, 4).unwrap();
        let twice = apply_automorphism(&apply_automorphism(&z9, &g4).unwrap(), &g4).unwrap();
        assert_eq!(twice, CyclotomicElement::zeta_pow(9, 7).unwrap());

        assert!(apply_automorphism(&x, &g4).is_err());
        assert!(apply_automorphism(&i, &g4).is_err());
        assert!(GaloisAutomorphism::cyclotomic_power(9, 3).is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(GaloisAutomorphism::QuadraticConjugation.order(), 2);
        assert_eq!(GaloisAutomorphism::cyclotomic_power(9, 4).unwrap().order(), 3);
        assert_eq!(GaloisAutomorphism::cyclotomic_power(9, 2).unwrap().order(), 6);
        assert_eq!(GaloisAutomorphism::cyclotomic_power(12, 5).unwrap().order(), 2);
        // applying g order-many times returns every element to itself
        let x = CyclotomicElement::from_i64(25, &[3, -1, 4, 1, -5, 9, 2, -6]).unwrap();
        for k in [2usize, 6, 7, 24] {
            let g = GaloisAutomorphism::cyclotomic_power(25, k).unwrap();
            let mut y = x.clone();
            for n in 1..=g.order() {
                y = y.apply(&g).unwrap();
                assert_eq!(y == x, n == g.order(), "k={k} n={n}");
            }
        }
    }

    fn elem(m: usize) -> impl Strategy<Value = CyclotomicElement> {
        proptest::collection::vec(-20i64..20, m).prop_map(move |c| CyclotomicElement::from_i64(m, &c).unwrap())
    }

    proptest! {
        #[test]
        fn cyclotomic_action_is_a_ring_homomorphism(x in elem(9), y in elem(9), ki in 0usize..6) {
            let k = [1usize, 2, 4, 5, 7, 8][ki];
            let g = GaloisAutomorphism::cyclotomic_power(9, k).unwrap();
            prop_assert_eq!(x.apply(&g).unwrap() + y.apply(&g).unwrap(), (&x + &y).apply(&g).unwrap());
            prop_assert_eq!(&x.apply(&g).unwrap() * &y.apply(&g).unwrap(), (&x * &y).apply(&g).unwrap());
        }

        #[test]
        fn conjugation_is_a_ring_homomorphism(a in -50i64..50, b in -50i64..50, c in -50i64..50, e in -50i64..50) {
            let k = QuadraticField::new(-3).unwrap();
            let g = GaloisAutomorphism::QuadraticConjugation;
            let x = k.element(int(a), int(b));
            let y = k.element(int(c), int(e));
            prop_assert_eq!((&x * &y).apply(&g).unwrap(), &x.apply(&g).unwrap() * &y.apply(&g).unwrap());
            prop_assert_eq!((&x + &y).apply(&g).unwrap(), &x.apply(&g).unwrap() + &y.apply(&g).unwrap());
        }
    }
}
