use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::weierstrass::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::arith::rational::parse_rational;
use crate::fields::{BaseField, GaloisAction, GaloisAutomorphism, QuadraticElement, QuadraticField, Scalar};

/// A point of E over the coordinate field F.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F: Scalar> CurvePoint<F> {
    pub fn affine(x: F, y: F) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            CurvePoint::Affine { x, .. } => Some(x),
            CurvePoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            CurvePoint::Affine { y, .. } => Some(y),
            CurvePoint::Infinity => None,
        }
    }

    pub fn base(&self) -> Option<BaseField> {
        self.x().map(Scalar::base)
    }

    /// Galois conjugate (coordinatewise).
    pub fn conjugate(&self) -> Self {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.conjugate(), y: y.conjugate() },
        }
    }

    /// Largest numerator or denominator size among the coordinates, in bits.
    pub fn bits(&self) -> u64 {
        match self {
            CurvePoint::Infinity => 0,
            CurvePoint::Affine { x, y } => x.bits().max(y.bits()),
        }
    }
}

impl CurvePoint<BigRational> {
    pub fn from_i64(x: i64, y: i64) -> Self {
        CurvePoint::affine(BigRational::from_integer(x.into()), BigRational::from_integer(y.into()))
    }
}

/// Splits "x,y" or "(x, y)" into its two coordinate strings.
fn split_coordinates(s: &str) -> Result<(&str, &str)> {
    let t = s.trim();
    let t = t.strip_prefix('(').and_then(|u| u.strip_suffix(')')).unwrap_or(t);
    if t == "O" {
        return Err(Error::Parse("the identity has no affine coordinates".into()));
    }
    t.split_once(',').map(|(x, y)| (x.trim(), y.trim())).ok_or_else(|| Error::Parse(format!("{s:?}: expected \"x,y\"")))
}

/// Parses "x,y" with rational coordinates; "O" is the identity.
pub fn parse_rational_point(s: &str) -> Result<CurvePoint<BigRational>> {
    if s.trim() == "O" {
        return Ok(CurvePoint::Infinity);
    }
    let (x, y) = split_coordinates(s)?;
    Ok(CurvePoint::affine(parse_rational(x)?, parse_rational(y)?))
}

/// Parses "x,y" with coordinates of the form a+b*sqrt(d) in the given field.
pub fn parse_quadratic_point(s: &str, k: QuadraticField) -> Result<CurvePoint<QuadraticElement>> {
    if s.trim() == "O" {
        return Ok(CurvePoint::Infinity);
    }
    let (x, y) = split_coordinates(s)?;
    Ok(CurvePoint::affine(QuadraticElement::parse(x, k)?, QuadraticElement::parse(y, k)?))
}

impl<F: Scalar> fmt::Display for CurvePoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => f.write_str("O"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl<F: Scalar> Serialize for CurvePoint<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<F: Scalar + GaloisAction> GaloisAction for CurvePoint<F> {
    fn apply(&self, g: &GaloisAutomorphism) -> Result<Self> {
        match self {
            CurvePoint::Infinity => Ok(CurvePoint::Infinity),
            CurvePoint::Affine { x, y } => Ok(CurvePoint::Affine { x: x.apply(g)?, y: y.apply(g)? }),
        }
    }
}

/// The curve coefficients lifted into the coordinate field of a point.
struct Lifted<F> {
    a1: F,
    a2: F,
    a3: F,
    a4: F,
    a6: F,
}

impl WeierstrassCurve {
    fn lifted<F: Scalar>(&self, like: &F) -> Lifted<F> {
        Lifted {
            a1: like.lift(self.a1()),
            a2: like.lift(self.a2()),
            a3: like.lift(self.a3()),
            a4: like.lift(self.a4()),
            a6: like.lift(self.a6()),
        }
    }

    /// Whether P satisfies the Weierstrass equation.
    pub fn contains<F: Scalar>(&self, p: &CurvePoint<F>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                let c = self.lifted(x);
                let lhs = y.times(&y.plus(&c.a1.times(x)).plus(&c.a3));
                let rhs = x.times(&x.times(&x.plus(&c.a2)).plus(&c.a4)).plus(&c.a6);
                lhs == rhs
            }
        }
    }

    pub fn check<F: Scalar>(&self, p: &CurvePoint<F>) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::NotOnCurve)
        }
    }

    /// -(x, y) = (x, -y - a1 x - a3).
    pub fn negate<F: Scalar>(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let c = self.lifted(x);
                CurvePoint::Affine { x: x.clone(), y: y.negated().minus(&c.a1.times(x)).minus(&c.a3) }
            }
        }
    }

    /// Chord-tangent sum of points assumed to lie on the curve.
    pub fn add_points<F: Scalar>(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let c = self.lifted(x1);
        let (lambda, nu) = if x1 == x2 {
            let denom = y1.plus(y2).plus(&c.a1.times(x2)).plus(&c.a3);
            if denom.is_zero() {
                return CurvePoint::Infinity;
            }
            // tangent at P (y1 = y2 here)
            let two = x1.from_i64_like(2);
            let three = x1.from_i64_like(3);
            let d = two.times(y1).plus(&c.a1.times(x1)).plus(&c.a3);
            let inv = d.recip().expect("nonzero tangent denominator");
            let x1sq = x1.times(x1);
            let num_l = three.times(&x1sq).plus(&two.times(&c.a2).times(x1)).plus(&c.a4).minus(&c.a1.times(y1));
            let num_n = x1sq.times(x1).negated().plus(&c.a4.times(x1)).plus(&two.times(&c.a6)).minus(&c.a3.times(y1));
            (num_l.times(&inv), num_n.times(&inv))
        } else {
            let inv = x2.minus(x1).recip().expect("distinct x");
            let lambda = y2.minus(y1).times(&inv);
            let nu = y1.times(x2).minus(&y2.times(x1)).times(&inv);
            (lambda, nu)
        };
        let x3 = lambda.times(&lambda).plus(&c.a1.times(&lambda)).minus(&c.a2).minus(x1).minus(x2);
        let y3 = lambda.plus(&c.a1).times(&x3).negated().minus(&nu).minus(&c.a3);
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub fn double_point<F: Scalar>(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        self.add_points(p, p)
    }

    pub fn sub_points<F: Scalar>(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
        self.add_points(p, &self.negate(q))
    }

    /// [n]P by a left-to-right signed binary (non-adjacent form) ladder.
    pub fn multiply<F: Scalar>(&self, n: &BigInt, p: &CurvePoint<F>) -> CurvePoint<F> {
        if n.is_zero() || p.is_infinity() {
            return CurvePoint::Infinity;
        }
        let base = if n.is_negative() { self.negate(p) } else { p.clone() };
        let neg_base = self.negate(&base);
        let digits = naf(&n.abs());
        let mut acc = CurvePoint::Infinity;
        for d in digits.iter().rev() {
            acc = self.double_point(&acc);
            match d {
                1 => acc = self.add_points(&acc, &base),
                -1 => acc = self.add_points(&acc, &neg_base),
                _ => {}
            }
        }
        acc
    }

    pub fn multiply_i64<F: Scalar>(&self, n: i64, p: &CurvePoint<F>) -> CurvePoint<F> {
        self.multiply(&BigInt::from(n), p)
    }
}

/// Non-adjacent form digits in {-1, 0, 1}, least significant first.
fn naf(n: &BigInt) -> Vec<i8> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let four = BigInt::from(4);
    while !n.is_zero() {
        if n.is_odd() {
            let m = n.mod_floor(&four);
            let d: i8 = if m == BigInt::from(1) { 1 } else { -1 };
            n -= d;
            out.push(d);
        } else {
            out.push(0);
        }
        n >>= 1;
    }
    out
}

/// P + Q with on-curve validation.
pub fn group_op<F: Scalar>(e: &WeierstrassCurve, p: &CurvePoint<F>, q: &CurvePoint<F>) -> Result<CurvePoint<F>> {
    e.check(p)?;
    e.check(q)?;
    Ok(e.add_points(p, q))
}

/// [n]P with on-curve validation.
pub fn scalar_mul<F: Scalar>(e: &WeierstrassCurve, n: &BigInt, p: &CurvePoint<F>) -> Result<CurvePoint<F>> {
    e.check(p)?;
    Ok(e.multiply(n, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};
    use crate::fields::{QuadraticElement, QuadraticField};
    use proptest::prelude::*;

    fn e37() -> WeierstrassCurve {
        WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap()
    }

    fn q(x: BigRational, y: BigRational) -> CurvePoint<BigRational> {
        CurvePoint::affine(x, y)
    }

    #[test]
    fn multiples_of_the_generator() {
        // chord-tangent by hand: 2P = (1,0), 3P = (-1,-1), 5P = (1/4,-5/8)
        let e = e37();
        let p = CurvePoint::from_i64(0, 0);
        let expected = [
            q(int(0), int(0)),
            q(int(1), int(0)),
            q(int(-1), int(-1)),
            q(int(2), int(-3)),
            q(rat(1, 4), rat(-5, 8)),
            q(int(6), int(14)),
            q(rat(-5, 9), rat(8, 27)),
            q(rat(21, 25), rat(-69, 125)),
        ];
        for (k, want) in expected.iter().enumerate() {
            let got = scalar_mul(&e, &BigInt::from(k + 1), &p).unwrap();
            assert_eq!(&got, want, "[{}]P", k + 1);
            assert!(e.contains(&got));
        }
        // 5P satisfies the equation: both sides are -15/64
        let five = &expected[4];
        let (x, y) = (five.x().unwrap(), five.y().unwrap());
        assert_eq!(y * y + y, rat(-15, 64));
        assert_eq!(x * x * x - x, rat(-15, 64));
        assert_eq!(e.multiply_i64(-5, &p), e.negate(five));
    }

    #[test]
    fn two_torsion_and_identity() {
        let e = WeierstrassCurve::from_i64([0, 0, 0, -1, 0]).unwrap();
        let t = CurvePoint::from_i64(0, 0);
        assert!(e.double_point(&t).is_infinity());
        assert!(e.multiply_i64(0, &t).is_infinity());
        assert!(group_op(&e, &t, &CurvePoint::from_i64(1, 1)).is_err());
        assert_eq!(e.add_points(&CurvePoint::Infinity, &t), t);
    }

    #[test]
    fn quadratic_points() {
        let e = e37();
        let k = QuadraticField::new(481).unwrap();
        let p = CurvePoint::affine(k.from_rational(int(5)), k.element(rat(-1, 2), rat(1, 2)));
        assert!(e.contains(&p));
        assert!(e.contains(&p.conjugate()));
        let s = e.add_points(&p, &p.conjugate());
        // the sum of a point and its conjugate is rational
        assert!(s.x().is_none_or(|x| x.is_rational()));
        let two = e.double_point(&p);
        assert!(e.contains(&two));
        assert_eq!(e.multiply_i64(3, &p), e.add_points(&two, &p));
        let bad = CurvePoint::affine(k.from_rational(int(5)), k.from_rational(int(1)));
        assert!(group_op::<QuadraticElement>(&e, &bad, &p).is_err());
    }

    fn multiple() -> impl Strategy<Value = i64> {
        -9i64..10
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn group_axioms_on_multiples(a in multiple(), b in multiple(), c in multiple()) {
            let e = e37();
            let p = CurvePoint::from_i64(0, 0);
            let (pa, pb, pc) = (e.multiply_i64(a, &p), e.multiply_i64(b, &p), e.multiply_i64(c, &p));
            prop_assert_eq!(e.add_points(&pa, &pb), e.add_points(&pb, &pa));
            prop_assert_eq!(
                e.add_points(&e.add_points(&pa, &pb), &pc),
                e.add_points(&pa, &e.add_points(&pb, &pc))
            );
            prop_assert_eq!(e.add_points(&pa, &pb), e.multiply_i64(a + b, &p));
            prop_assert_eq!(e.multiply_i64(a * b, &p), e.multiply_i64(a, &pb));
        }

        #[test]
        fn group_axioms_over_a_quadratic_field(a in -4i64..5, b in -4i64..5, c in -4i64..5) {
            let e = e37();
            let k = QuadraticField::new(97).unwrap();
            let p = CurvePoint::affine(k.from_rational(int(3)), k.element(rat(-1, 2), rat(1, 2)));
            let r = CurvePoint::affine(k.from_rational(int(0)), k.from_rational(int(0)));
            let pa = e.multiply_i64(a, &p);
            let pb = e.add_points(&e.multiply_i64(b, &p), &e.multiply_i64(c, &r));
            let pc = e.multiply_i64(c, &p.conjugate());
            prop_assert_eq!(e.add_points(&pa, &pb), e.add_points(&pb, &pa));
            prop_assert_eq!(
                e.add_points(&e.add_points(&pa, &pb), &pc),
                e.add_points(&pa, &e.add_points(&pb, &pc))
            );
            prop_assert!(e.contains(&e.add_points(&pa, &pc)));
        }
    }
}
