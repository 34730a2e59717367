//! Common interface for the coordinate fields of points: Q itself and
//! quadratic fields, together with their finite and archimedean places.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::quadratic::{QuadraticElement, QuadraticField, QuadraticPrime};
use super::residue::{ResidueElem, ResidueField};
use crate::arith::primes::{bigint_mod, inv_mod, is_prime, mul_mod};
use crate::arith::rational::{ln_abs, to_f64, valuation_unchecked};
use crate::arith::Valuation;
use crate::error::{invalid, Result};

/// The field a point's coordinates live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseField {
    Rational,
    Quadratic(QuadraticField),
}

impl BaseField {
    pub fn degree(&self) -> u32 {
        match self {
            BaseField::Rational => 1,
            BaseField::Quadratic(_) => 2,
        }
    }

    pub fn archimedean_places(&self) -> Vec<ArchPlace> {
        match self {
            BaseField::Rational => vec![ArchPlace::Real { conjugate: false }],
            BaseField::Quadratic(k) if k.is_real() => {
                vec![ArchPlace::Real { conjugate: false }, ArchPlace::Real { conjugate: true }]
            }
            BaseField::Quadratic(_) => vec![ArchPlace::Complex],
        }
    }

    pub fn primes_above(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        match self {
            BaseField::Rational => {
                if !is_prime(p) {
                    return invalid(format!("{p} is not prime"));
                }
                Ok(vec![PrimeIdeal::Rational(p)])
            }
            BaseField::Quadratic(k) => Ok(k.primes_above(p)?.into_iter().map(PrimeIdeal::Quadratic).collect()),
        }
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rational => f.write_str("Q"),
            BaseField::Quadratic(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for BaseField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A finite prime of Q or of a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeIdeal {
    Rational(u64),
    Quadratic(QuadraticPrime),
}

impl PrimeIdeal {
    pub fn p(&self) -> u64 {
        match self {
            PrimeIdeal::Rational(p) => *p,
            PrimeIdeal::Quadratic(q) => q.p(),
        }
    }

    pub fn e(&self) -> u32 {
        match self {
            PrimeIdeal::Rational(_) => 1,
            PrimeIdeal::Quadratic(q) => q.e(),
        }
    }

    pub fn f(&self) -> u32 {
        match self {
            PrimeIdeal::Rational(_) => 1,
            PrimeIdeal::Quadratic(q) => q.f(),
        }
    }

    pub fn local_degree(&self) -> u32 {
        self.e() * self.f()
    }

    pub fn residue_field(&self) -> ResidueField {
        match self {
            PrimeIdeal::Rational(p) => ResidueField::prime(*p),
            PrimeIdeal::Quadratic(q) => q.residue_field(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PrimeIdeal::Rational(p) => p.to_string(),
            PrimeIdeal::Quadratic(q) => q.label(),
        }
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// An archimedean place: a real embedding (the identity, or √d ↦ -√d) or
/// the complex place of an imaginary quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArchPlace {
    Real { conjugate: bool },
    Complex,
}

impl ArchPlace {
    pub fn local_degree(&self) -> u32 {
        match self {
            ArchPlace::Real { .. } => 1,
            ArchPlace::Complex => 2,
        }
    }

    pub fn label(&self, base: BaseField) -> String {
        match (self, base) {
            (ArchPlace::Real { .. }, BaseField::Rational) => "inf".into(),
            (ArchPlace::Real { conjugate: false }, _) => "inf+".into(),
            (ArchPlace::Real { conjugate: true }, _) => "inf-".into(),
            (ArchPlace::Complex, _) => "inf".into(),
        }
    }
}

/// Field elements usable as point coordinates.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn base(&self) -> BaseField;
    /// A rational number viewed in the same field as `self`.
    fn lift(&self, r: &BigRational) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn recip(&self) -> Option<Self>;
    /// Nontrivial Galois conjugate (identity on Q).
    fn conjugate(&self) -> Self;
    fn as_rational(&self) -> Option<BigRational>;
    /// (a, b) with x = a + b√d; b = 0 over Q.
    fn sqrt_d_coords(&self) -> (BigRational, BigRational);
    /// Order at a prime in units of a uniformizer.
    fn ord(&self, prime: &PrimeIdeal) -> Valuation;
    /// Image in the residue field, `None` if not integral at the prime.
    fn residue(&self, prime: &PrimeIdeal) -> Option<ResidueElem>;
    /// Positive integer D with D·x integral.
    fn denominator(&self) -> BigInt;
    fn complex_value(&self, place: ArchPlace) -> Complex64;
    /// log|x| at the place, stable for huge coordinates; -inf for zero.
    fn ln_abs_at(&self, place: ArchPlace) -> f64;
    /// Size of the largest numerator or denominator in bits.
    fn bits(&self) -> u64;

    fn real_value(&self, place: ArchPlace) -> f64 {
        self.complex_value(place).re
    }

    fn zero_like(&self) -> Self {
        self.lift(&BigRational::zero())
    }

    fn from_i64_like(&self, n: i64) -> Self {
        self.lift(&BigRational::from_integer(n.into()))
    }
}

impl Scalar for BigRational {
    fn base(&self) -> BaseField {
        BaseField::Rational
    }

    fn lift(&self, r: &BigRational) -> Self {
        r.clone()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn plus(&self, o: &Self) -> Self {
        self + o
    }

    fn minus(&self, o: &Self) -> Self {
        self - o
    }

    fn times(&self, o: &Self) -> Self {
        self * o
    }

    fn negated(&self) -> Self {
        -self
    }

    fn recip(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| num_traits::Inv::inv(self))
    }

    fn conjugate(&self) -> Self {
        self.clone()
    }

    fn as_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn sqrt_d_coords(&self) -> (BigRational, BigRational) {
        (self.clone(), BigRational::zero())
    }

    fn ord(&self, prime: &PrimeIdeal) -> Valuation {
        match valuation_unchecked(self, prime.p()) {
            Valuation::Finite(v) => Valuation::Finite(v * prime.e() as i64),
            Valuation::Infinity => Valuation::Infinity,
        }
    }

    fn residue(&self, prime: &PrimeIdeal) -> Option<ResidueElem> {
        let p = prime.p();
        if valuation_unchecked(self, p) < Valuation::Finite(0) {
            return None;
        }
        let n = bigint_mod(self.numer(), p);
        let d = bigint_mod(self.denom(), p);
        Some(prime.residue_field().from_u64(mul_mod(n, inv_mod(d, p).unwrap(), p)))
    }

    fn denominator(&self) -> BigInt {
        self.denom().clone()
    }

    fn complex_value(&self, _place: ArchPlace) -> Complex64 {
        Complex64::new(to_f64(self), 0.0)
    }

    fn ln_abs_at(&self, _place: ArchPlace) -> f64 {
        if Zero::is_zero(self) {
            f64::NEG_INFINITY
        } else {
            ln_abs(self.numer()) - ln_abs(self.denom())
        }
    }

    fn bits(&self) -> u64 {
        self.numer().bits().max(self.denom().bits())
    }
}

impl Scalar for QuadraticElement {
    fn base(&self) -> BaseField {
        BaseField::Quadratic(self.field())
    }

    fn lift(&self, r: &BigRational) -> Self {
        self.field().from_rational(r.clone())
    }

    fn is_zero(&self) -> bool {
        QuadraticElement::is_zero(self)
    }

    fn plus(&self, o: &Self) -> Self {
        self + o
    }

    fn minus(&self, o: &Self) -> Self {
        self - o
    }

    fn times(&self, o: &Self) -> Self {
        self * o
    }

    fn negated(&self) -> Self {
        -self
    }

    fn recip(&self) -> Option<Self> {
        self.inv()
    }

    fn conjugate(&self) -> Self {
        QuadraticElement::conjugate(self)
    }

    fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.a().clone())
    }

    fn sqrt_d_coords(&self) -> (BigRational, BigRational) {
        (self.a().clone(), self.b().clone())
    }

    fn ord(&self, prime: &PrimeIdeal) -> Valuation {
        match prime {
            PrimeIdeal::Quadratic(q) => {
                assert_eq!(q.field(), self.field(), "prime of a different field");
                q.ord(self)
            }
            PrimeIdeal::Rational(_) => panic!("rational prime used for a quadratic element"),
        }
    }

    fn residue(&self, prime: &PrimeIdeal) -> Option<ResidueElem> {
        match prime {
            PrimeIdeal::Quadratic(q) => q.residue(self),
            PrimeIdeal::Rational(_) => panic!("rational prime used for a quadratic element"),
        }
    }

    fn denominator(&self) -> BigInt {
        QuadraticElement::denominator(self)
    }

    fn complex_value(&self, place: ArchPlace) -> Complex64 {
        match place {
            ArchPlace::Real { conjugate } => {
                let e = self.real_embeddings().expect("real place of an imaginary field");
                Complex64::new(e[conjugate as usize], 0.0)
            }
            ArchPlace::Complex => self.complex_embedding(),
        }
    }

    fn ln_abs_at(&self, place: ArchPlace) -> f64 {
        match place {
            ArchPlace::Real { conjugate } => self.ln_abs_real_embeddings().expect("real place of an imaginary field")[conjugate as usize],
            ArchPlace::Complex => {
                let n = self.norm();
                if Zero::is_zero(&n) {
                    f64::NEG_INFINITY
                } else {
                    0.5 * (ln_abs(n.numer()) - ln_abs(n.abs().denom()))
                }
            }
        }
    }

    fn bits(&self) -> u64 {
        super::quadratic::bits_of(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn places_of_fields() {
        assert_eq!(BaseField::Rational.archimedean_places().len(), 1);
        let real = BaseField::Quadratic(QuadraticField::new(5).unwrap());
        let imag = BaseField::Quadratic(QuadraticField::new(-1).unwrap());
        for base in [BaseField::Rational, real, imag] {
            let total: u32 = base.archimedean_places().iter().map(|v| v.local_degree()).sum();
            assert_eq!(total, base.degree());
            for p in [2u64, 3, 5, 7] {
                let total: u32 = base.primes_above(p).unwrap().iter().map(|q| q.local_degree()).sum();
                assert_eq!(total, base.degree());
            }
        }
    }

    #[test]
    fn rational_scalar_behaviour() {
        let x = rat(3, 8);
        let p2 = PrimeIdeal::Rational(2);
        assert_eq!(x.ord(&p2), Valuation::Finite(-3));
        assert!(x.residue(&p2).is_none());
        assert_eq!(x.residue(&PrimeIdeal::Rational(5)).unwrap().c0, 1); // 3·8^-1 = 3·2 = 6 ≡ 1
        assert!((x.ln_abs_at(ArchPlace::Real { conjugate: false }) - (0.375f64).ln()).abs() < 1e-15);
        // a rational seen at a ramified prime has doubled order
        let k = QuadraticField::new(5).unwrap();
        let ram = PrimeIdeal::Quadratic(k.splitting_type(5).unwrap());
        assert_eq!(int(25).ord(&ram), Valuation::Finite(4));
    }

    #[test]
    fn imaginary_absolute_value() {
        let k = QuadraticField::new(-1).unwrap();
        let x = k.element(int(3), int(4));
        assert!((x.ln_abs_at(ArchPlace::Complex) - 5f64.ln()).abs() < 1e-15);
        assert!((x.complex_value(ArchPlace::Complex).norm() - 5.0).abs() < 1e-12);
    }
}
