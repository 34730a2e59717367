use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::primes::require_prime;
use crate::error::{Error, Result};

/// Exponent of a prime in a number; `Infinity` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("+inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinity => s.serialize_str("+inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer (`None` for zero).
///
/// Divides by p^(2^k) greedily, so huge inputs with large valuations cost
/// O(log v) big divisions instead of v.
pub fn int_valuation(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let bp = BigInt::from(p);
    if !(n % &bp).is_zero() {
        return Some(0);
    }
    let mut m = n.abs();
    let mut powers = vec![bp];
    loop {
        let last = powers.last().unwrap();
        if last.bits() * 2 > m.bits() + 1 {
            break;
        }
        let next = last * last;
        if !(&m % &next).is_zero() {
            break;
        }
        powers.push(next);
    }
    let mut v = 0u64;
    for (k, pw) in powers.iter().enumerate().rev() {
        if (&m % pw).is_zero() {
            m /= pw;
            v += 1 << k;
        }
    }
    Some(v)
}

/// Exponent of the prime `p` in the rational `r`; `+inf` for zero.
pub fn valuation_p(r: &BigRational, p: u64) -> Result<Valuation> {
    require_prime(p)?;
    Ok(valuation_unchecked(r, p))
}

pub(crate) fn valuation_unchecked(r: &BigRational, p: u64) -> Valuation {
    if r.is_zero() {
        return Valuation::Infinity;
    }
    let num = int_valuation(r.numer(), p).unwrap() as i64;
    let den = int_valuation(r.denom(), p).unwrap() as i64;
    Valuation::Finite(num - den)
}

/// Natural logarithm of |n| for arbitrarily large nonzero integers.
pub fn ln_abs(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Floating-point value of a rational that may be far outside `f64` range
/// in its parts but not in its ratio.
pub fn to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * (ln_abs(r.numer()) - ln_abs(r.denom())).exp()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses "num/den" or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{s:?}: zero denominator")));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(BigRational::from_integer(n))
    }
}

/// "num/den" in lowest terms, or just "num" for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn serialize_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn serialize_bigint<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    use num_integer::Integer;
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
