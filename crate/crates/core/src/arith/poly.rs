//! Dense univariate polynomials over the integers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Integer polynomial, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c.into();
        Self::new(coeffs)
    }

    /// X^m - 1
    pub fn x_pow_minus_one(m: usize) -> Self {
        &Self::monomial(1, m) - &Self::constant(1)
    }

    /// X^2 - aX + p, the characteristic polynomial shape of Frobenius.
    pub fn frobenius(a: i64, p: u64) -> Self {
        Self::new(vec![BigInt::from(p), BigInt::from(-a), BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    fn div_exact(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x / c).collect())
    }

    /// Pseudo-remainder: lc(d)^(deg self - deg d + 1) * self mod d.
    pub fn pseudo_rem(&self, d: &IntPolynomial) -> IntPolynomial {
        let dd = d.degree().expect("pseudo-division by zero polynomial");
        let lc = d.leading().unwrap();
        let Some(deg) = self.degree() else {
            return IntPolynomial::zero();
        };
        if deg < dd {
            return self.clone();
        }
        let mut remaining = deg - dd + 1;
        let mut r = self.clone();
        while let Some(dr) = r.degree().filter(|&k| k >= dd) {
            let top = r.leading().unwrap().clone();
            let shifted = &IntPolynomial::monomial(top, dr - dd) * d;
            r = &r.scale(lc) - &shifted;
            remaining -= 1;
        }
        r.scale(&Pow::pow(lc.clone(), remaining))
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, d: &IntPolynomial) -> (IntPolynomial, IntPolynomial) {
        let dd = d.degree().expect("division by zero polynomial");
        assert!(d.leading().unwrap().is_one(), "divisor must be monic");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (IntPolynomial::zero(), self.clone());
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
        }
        r.truncate(dd);
        (IntPolynomial::new(q), IntPolynomial::new(r))
    }

    fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs.iter().cloned().map(BigRational::from_integer).collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (k, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => f.write_str("X")?,
                (1, false) => write!(f, "{a}*X")?,
                (_, true) => write!(f, "X^{k}")?,
                (_, false) => write!(f, "{a}*X^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntPolynomial {
            type Output = IntPolynomial;
            fn $m(self, rhs: IntPolynomial) -> IntPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Resultant of two nonzero polynomials (Sylvester convention, rows of `f`
/// first), computed by the subresultant pseudo-remainder sequence.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> Result<BigInt> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::InvalidArgument("resultant of the zero polynomial".into()));
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    let mut sign = BigInt::one();
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
        if a.degree().unwrap() % 2 == 1 && b.degree().unwrap() % 2 == 1 {
            sign = -sign;
        }
    }
    let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
    if db == 0 {
        return Ok(sign * Pow::pow(b.coeffs[0].clone(), da));
    }
    let ca = a.content();
    let cb = b.content();
    let t = Pow::pow(ca.clone(), db) * Pow::pow(cb.clone(), da);
    a = a.div_exact(&ca);
    b = b.div_exact(&cb);
    let mut g_ = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        b = r.div_exact(&(&g_ * Pow::pow(h.clone(), delta)));
        g_ = a.leading().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            Pow::pow(g_.clone(), delta) / Pow::pow(h.clone(), delta - 1)
        };
        match b.degree() {
            None => return Ok(BigInt::zero()),
            Some(0) => {
                let da = a.degree().unwrap();
                let lb = b.coeffs[0].clone();
                let hh = if da == 0 { lb.clone() } else { Pow::pow(lb, da) / Pow::pow(h, da - 1) };
                return Ok(sign * t * hh);
            }
            Some(_) => {}
        }
    }
}

use num_traits::Pow;

/// Integer Bezout identity `a*f + b*g = r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bezout {
    pub a: IntPolynomial,
    pub b: IntPolynomial,
    #[serde(serialize_with = "crate::arith::rational::serialize_bigint")]
    pub r: BigInt,
}

impl Bezout {
    pub fn holds_for(&self, f: &IntPolynomial, g: &IntPolynomial) -> bool {
        &(&self.a * f) + &(&self.b * g) == IntPolynomial::constant(self.r.clone())
    }
}

/// Finds integer polynomials with `a*f + b*g = r`, r a positive integer
/// dividing the resultant. Runs the extended Euclidean algorithm over Q and
/// clears denominators; the identity is re-checked before returning.
pub fn bezout_integer(f: &IntPolynomial, g: &IntPolynomial) -> Result<Bezout> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::InvalidArgument("Bezout identity with the zero polynomial".into()));
    }
    if f.degree() == Some(0) && g.degree() == Some(0) {
        // constants: plain integer extended gcd
        let e = f.coeff(0).extended_gcd(&g.coeff(0));
        let sign = if e.gcd.is_negative() { -BigInt::one() } else { BigInt::one() };
        return Ok(Bezout {
            a: IntPolynomial::constant(e.x * &sign),
            b: IntPolynomial::constant(e.y * &sign),
            r: e.gcd * sign,
        });
    }
    let mut r0 = f.to_rational();
    let mut r1 = g.to_rational();
    let mut s0 = vec![BigRational::one()];
    let mut s1: Vec<BigRational> = Vec::new();
    let mut t0: Vec<BigRational> = Vec::new();
    let mut t1 = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = qpoly::divrem(&r0, &r1);
        let s2 = qpoly::sub(&s0, &qpoly::mul(&q, &s1));
        let t2 = qpoly::sub(&t0, &qpoly::mul(&q, &t1));
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s2);
        (t0, t1) = (t1, t2);
    }
    if r0.len() != 1 {
        return Err(Error::Degenerate(format!("{f} and {g} share a root")));
    }
    let c = r0[0].clone();
    let scale = |p: &[BigRational]| -> Vec<BigRational> { p.iter().map(|x| x / &c).collect() };
    let (s, t) = (scale(&s0), scale(&t0));
    let den = crate::arith::rational::common_denominator(s.iter().chain(t.iter()));
    let lift = |p: &[BigRational]| {
        IntPolynomial::new(p.iter().map(|x| (x * &den).to_integer()).collect())
    };
    let out = Bezout { a: lift(&s), b: lift(&t), r: den };
    if !out.holds_for(f, g) {
        return Err(Error::Invariant("Bezout identity failed re-verification".into()));
    }
    Ok(out)
}

mod qpoly {
    use num_rational::BigRational;
    use num_traits::Zero;

    pub fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        p
    }

    pub fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let n = a.len().max(b.len());
        let zero = BigRational::zero();
        trim((0..n).map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).collect())
    }

    pub fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    pub fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let lc = &b[db];
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![BigRational::zero(); r.len() - db];
        while r.len() > db {
            let k = r.len() - 1 - db;
            let c = &r[r.len() - 1] / lc;
            for (i, bc) in b.iter().enumerate() {
                r[k + i] -= &c * bc;
            }
            q[k] = c;
            r.pop();
            r = trim(r);
        }
        (trim(q), r)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Sylvester matrix with the rows of `f` first.
    pub(crate) fn sylvester(f: &IntPolynomial, g: &IntPolynomial) -> Vec<Vec<BigInt>> {
        let (m, n) = (f.degree().unwrap(), g.degree().unwrap());
        let size = m + n;
        let mut rows = Vec::new();
        for i in 0..n {
            let mut row = vec![BigInt::zero(); size];
            for k in 0..=m {
                row[i + k] = f.coeff(m - k);
            }
            rows.push(row);
        }
        for i in 0..m {
            let mut row = vec![BigInt::zero(); size];
            for k in 0..=n {
                row[i + k] = g.coeff(n - k);
            }
            rows.push(row);
        }
        rows
    }

    /// Fraction-free Bareiss elimination.
    pub(crate) fn determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
        let n = a.len();
        if n == 0 {
            return BigInt::one();
        }
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    fn sylvester_resultant(f: &IntPolynomial, g: &IntPolynomial) -> BigInt {
        match (f.degree().unwrap(), g.degree().unwrap()) {
            (0, n) => Pow::pow(f.coeff(0), n),
            (m, 0) => Pow::pow(g.coeff(0), m),
            _ => determinant(sylvester(f, g)),
        }
    }

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&p(&[3, 3, 1]), &p(&[-1, 1])).unwrap(), BigInt::from(7));
        assert_eq!(resultant(&p(&[-5, 1]), &p(&[-2, 1])).unwrap(), BigInt::from(3));
        let f = p(&[2, 2, 1]);
        let g = p(&[-1, 0, 1]);
        // 4x4 Sylvester determinant; equals prod f(roots of g) = f(1) f(-1) = 5 * 1
        let oracle = sylvester_resultant(&f, &g);
        assert_eq!(oracle, BigInt::from(5));
        assert_eq!(resultant(&f, &g).unwrap(), oracle);
        assert!(resultant(&IntPolynomial::zero(), &g).is_err());
    }

    #[test]
    fn resultant_vanishes_on_common_roots() {
        let common = p(&[-3, 1]);
        let f = &common * &p(&[1, 1, 1]);
        let g = &common * &p(&[7, 0, 2]);
        assert!(resultant(&f, &g).unwrap().is_zero());
        assert!(!resultant(&p(&[1, 1, 1]), &p(&[7, 0, 2])).unwrap().is_zero());
    }

    #[test]
    fn bezout_examples() {
        let bz = bezout_integer(&p(&[3, 3, 1]), &p(&[-1, 1])).unwrap();
        assert_eq!(bz.a, p(&[1]));
        assert_eq!(bz.b, p(&[-4, -1]));
        assert_eq!(bz.r, BigInt::from(7));
        assert!(matches!(bezout_integer(&p(&[-1, 1]), &p(&[-1, 1])), Err(Error::Degenerate(_))));

        let f = p(&[2, 2, 1]);
        let g = p(&[-1, 0, 1]);
        let bz = bezout_integer(&f, &g).unwrap();
        assert!(bz.holds_for(&f, &g));
        let res = resultant(&f, &g).unwrap();
        assert!((&res % &bz.r).is_zero());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[3, -3, 1]).to_string(), "X^2 - 3*X + 3");
        assert_eq!(IntPolynomial::x_pow_minus_one(4).to_string(), "X^4 - 1");
    }

    fn small_poly() -> impl Strategy<Value = IntPolynomial> {
        proptest::collection::vec(-9i64..10, 1..6)
            .prop_map(|mut c| {
                if *c.last().unwrap() == 0 {
                    *c.last_mut().unwrap() = 1;
                }
                IntPolynomial::from_i64(&c)
            })
    }

    proptest! {
        #[test]
        fn subresultant_matches_sylvester(f in small_poly(), g in small_poly()) {
            prop_assert_eq!(resultant(&f, &g).unwrap(), sylvester_resultant(&f, &g));
        }

        #[test]
        fn bezout_identity_always_holds(f in small_poly(), g in small_poly()) {
            let res = resultant(&f, &g).unwrap();
            match bezout_integer(&f, &g) {
                Ok(bz) => {
                    prop_assert!(!res.is_zero());
                    prop_assert!(bz.holds_for(&f, &g));
                    prop_assert!(bz.r.is_positive());
                    if f.degree() > Some(0) || g.degree() > Some(0) {
                        prop_assert!((&res % &bz.r).is_zero());
                    }
                }
                Err(_) => prop_assert!(res.is_zero()),
            }
        }
    }
}
