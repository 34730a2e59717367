//! The cyclotomic ring Z[ζ_m] in the redundant exponent basis ζ^0..ζ^(m-1).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::IntPolynomial;
use crate::error::{invalid, Result};

#[derive(Clone, Debug)]
pub struct CyclotomicElement {
    m: usize,
    coeffs: Vec<BigInt>,
}

impl CyclotomicElement {
    /// Builds Σ c_i ζ^i, folding exponents modulo m.
    pub fn new(m: usize, coeffs: Vec<BigInt>) -> Result<Self> {
        if m == 0 {
            return invalid("cyclotomic modulus must be positive");
        }
        let mut folded = vec![BigInt::zero(); m];
        for (i, c) in coeffs.into_iter().enumerate() {
            folded[i % m] += c;
        }
        Ok(CyclotomicElement { m, coeffs: folded })
    }

    pub fn from_i64(m: usize, coeffs: &[i64]) -> Result<Self> {
        Self::new(m, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zeta_pow(m: usize, k: usize) -> Result<Self> {
        let mut c = vec![BigInt::zero(); m.max(1)];
        if m == 0 {
            return invalid("cyclotomic modulus must be positive");
        }
        c[k % m] = BigInt::one();
        Self::new(m, c)
    }

    pub fn constant(m: usize, c: i64) -> Result<Self> {
        Self::from_i64(m, &[c])
    }

    pub fn modulus(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = CyclotomicElement { m: self.m, coeffs: one_vec(self.m) };
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Image of ζ ↦ ζ^k; exponent i moves to i·k mod m.
    pub fn power_map(&self, k: usize) -> Self {
        let mut out = vec![BigInt::zero(); self.m];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[(i * k) % self.m] += c;
        }
        CyclotomicElement { m: self.m, coeffs: out }
    }

    /// Coordinates in the integral basis ζ^0..ζ^(φ(m)-1), i.e. the remainder
    /// modulo the m-th cyclotomic polynomial.
    pub fn reduced(&self) -> Vec<BigInt> {
        let phi = cyclotomic_polynomial(self.m);
        let n = phi.degree().unwrap();
        let (_, r) = IntPolynomial::new(self.coeffs.clone()).div_rem_monic(&phi);
        (0..n).map(|k| r.coeff(k)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(Zero::is_zero)
    }
}

fn one_vec(m: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); m];
    v[0] = BigInt::one();
    v
}

impl PartialEq for CyclotomicElement {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.reduced() == other.reduced()
    }
}

impl Eq for CyclotomicElement {}

impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .reduced()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{i}"),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn check_same(x: &CyclotomicElement, y: &CyclotomicElement) -> usize {
    assert_eq!(x.m, y.m, "mixing cyclotomic rings of different level");
    x.m
}

impl Add for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn add(self, o: &CyclotomicElement) -> CyclotomicElement {
        let m = check_same(self, o);
        CyclotomicElement { m, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn sub(self, o: &CyclotomicElement) -> CyclotomicElement {
        let m = check_same(self, o);
        CyclotomicElement { m, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn mul(self, o: &CyclotomicElement) -> CyclotomicElement {
        let m = check_same(self, o);
        let mut out = vec![BigInt::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in o.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                out[(i + j) % m] += a * b;
            }
        }
        CyclotomicElement { m, coeffs: out }
    }
}

impl Neg for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn neg(self) -> CyclotomicElement {
        CyclotomicElement { m: self.m, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for CyclotomicElement {
            type Output = CyclotomicElement;
            fn $m(self, o: CyclotomicElement) -> CyclotomicElement {
                (&self).$m(&o)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

pub fn euler_phi(m: usize) -> usize {
    (1..=m).filter(|k| k.gcd(&m) == 1).count()
}

/// Φ_m(X), obtained by dividing X^m - 1 by Φ_d for the proper divisors d.
pub fn cyclotomic_polynomial(m: usize) -> IntPolynomial {
    let mut num = IntPolynomial::x_pow_minus_one(m);
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        let (q, r) = num.div_rem_monic(&cyclotomic_polynomial(d));
        debug_assert!(r.is_zero());
        num = q;
    }
    num
}

/// Whether n divides every coordinate of x in the integral basis.
pub fn divides_in_cyclotomic(x: &CyclotomicElement, n: &BigInt) -> Result<bool> {
    if n.is_zero() {
        return invalid("divisibility by zero");
    }
    Ok(x.reduced().iter().all(|c| (c % n).is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1).to_string(), "X - 1");
        assert_eq!(cyclotomic_polynomial(4).to_string(), "X^2 + 1");
        assert_eq!(cyclotomic_polynomial(9).to_string(), "X^6 + X^3 + 1");
        assert_eq!(cyclotomic_polynomial(12).to_string(), "X^4 - X^2 + 1");
        for m in 1..40 {
            assert_eq!(cyclotomic_polynomial(m).degree().unwrap(), euler_phi(m));
        }
    }

    #[test]
    fn divisibility_examples() {
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        let minus_four_i = CyclotomicElement::from_i64(4, &[0, -4]).unwrap();
        assert!(divides_in_cyclotomic(&minus_four_i, &two).unwrap());
        let z9m1 = CyclotomicElement::from_i64(9, &[-1, 1]).unwrap();
        assert!(!divides_in_cyclotomic(&z9m1, &three).unwrap());
        let x = CyclotomicElement::from_i64(9, &[9, 0, 3]).unwrap();
        assert!(divides_in_cyclotomic(&x, &three).unwrap());
        assert!(divides_in_cyclotomic(&x, &BigInt::zero()).is_err());
        // ζ_9^6 reduces to -ζ^3 - 1, so 1 + ζ^3 + ζ^6 = 0
        let s = CyclotomicElement::from_i64(9, &[1, 0, 0, 1, 0, 0, 1]).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn redundant_basis_equality() {
        // i^2 = -1 in Z[ζ_4]
        let i = CyclotomicElement::zeta_pow(4, 1).unwrap();
        assert_eq!(&i * &i, CyclotomicElement::constant(4, -1).unwrap());
        assert_eq!(i.pow(4), CyclotomicElement::constant(4, 1).unwrap());
    }

    fn elem(m: usize) -> impl Strategy<Value = CyclotomicElement> {
        proptest::collection::vec(-20i64..20, m).prop_map(move |c| CyclotomicElement::from_i64(m, &c).unwrap())
    }

    proptest! {
        #[test]
        fn ring_axioms(x in elem(12), y in elem(12), z in elem(12)) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x - &x, CyclotomicElement::constant(12, 0).unwrap());
        }
    }
}
