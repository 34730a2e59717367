use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::rational::{format_rational, parse_rational, serialize_rational, valuation_unchecked};
use crate::arith::Valuation;
use crate::error::{invalid, Error, Result};

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q, with the usual
/// derived invariants cached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeierstrassCurve {
    #[serde(serialize_with = "serialize_coeffs")]
    a: [BigRational; 5],
    #[serde(serialize_with = "serialize_rational")]
    b2: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    b4: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    b6: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    b8: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    c4: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    c6: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    discriminant: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    j: BigRational,
}

fn serialize_coeffs<S: serde::Serializer>(a: &[BigRational; 5], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(5))?;
    for c in a {
        seq.serialize_element(&format_rational(c))?;
    }
    seq.end()
}

impl WeierstrassCurve {
    pub fn new(a1: BigRational, a2: BigRational, a3: BigRational, a4: BigRational, a6: BigRational) -> Result<Self> {
        let two = BigRational::from_integer(2.into());
        let four = BigRational::from_integer(4.into());
        let b2 = &a1 * &a1 + &four * &a2;
        let b4 = &two * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + &four * &a6;
        let b8 = &a1 * &a1 * &a6 + &four * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        let k = |n: i64| BigRational::from_integer(n.into());
        let c4 = &b2 * &b2 - k(24) * &b4;
        let c6 = -(&b2 * &b2 * &b2) + k(36) * &b2 * &b4 - k(216) * &b6;
        let disc = -(&b2 * &b2 * &b8) - k(8) * &b4 * &b4 * &b4 - k(27) * &b6 * &b6 + k(9) * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(Error::Degenerate("discriminant is zero".into()));
        }
        let j = &c4 * &c4 * &c4 / &disc;
        Ok(WeierstrassCurve { a: [a1, a2, a3, a4, a6], b2, b4, b6, b8, c4, c6, discriminant: disc, j })
    }

    pub fn from_i64(a: [i64; 5]) -> Result<Self> {
        let r = |n: i64| BigRational::from_integer(n.into());
        Self::new(r(a[0]), r(a[1]), r(a[2]), r(a[3]), r(a[4]))
    }

    /// (a1, a2, a3, a4, a6).
    pub fn a_invariants(&self) -> &[BigRational; 5] {
        &self.a
    }

    pub fn a1(&self) -> &BigRational {
        &self.a[0]
    }
    pub fn a2(&self) -> &BigRational {
        &self.a[1]
    }
    pub fn a3(&self) -> &BigRational {
        &self.a[2]
    }
    pub fn a4(&self) -> &BigRational {
        &self.a[3]
    }
    pub fn a6(&self) -> &BigRational {
        &self.a[4]
    }
    pub fn b2(&self) -> &BigRational {
        &self.b2
    }
    pub fn b4(&self) -> &BigRational {
        &self.b4
    }
    pub fn b6(&self) -> &BigRational {
        &self.b6
    }
    pub fn b8(&self) -> &BigRational {
        &self.b8
    }
    pub fn c4(&self) -> &BigRational {
        &self.c4
    }
    pub fn c6(&self) -> &BigRational {
        &self.c6
    }
    pub fn discriminant(&self) -> &BigRational {
        &self.discriminant
    }
    pub fn j_invariant(&self) -> &BigRational {
        &self.j
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.is_integer())
    }

    /// Integer a-invariants, or an error for non-integral models.
    pub fn integer_coeffs(&self) -> Result<[BigInt; 5]> {
        if !self.is_integral() {
            return invalid("model has non-integral coefficients");
        }
        Ok(self.a.clone().map(|c| c.to_integer()))
    }

    pub fn v_disc(&self, p: u64) -> i64 {
        valuation_unchecked(&self.discriminant, p).finite().unwrap()
    }

    pub fn v_c4(&self, p: u64) -> Valuation {
        valuation_unchecked(&self.c4, p)
    }

    /// Primes dividing the numerator of the discriminant.
    pub fn bad_primes(&self) -> Result<Vec<u64>> {
        Ok(crate::arith::primes::factor(self.discriminant.numer())?.into_iter().map(|(p, _)| p).collect())
    }

    /// Whether j is one of the 13 rational CM j-invariants.
    pub fn has_rational_cm_j(&self) -> bool {
        const CM_J: [i64; 12] = [
            0,
            1728,
            -3375,
            8000,
            -32768,
            54000,
            287496,
            -884736,
            -12288000,
            16581375,
            -884736000,
            -147197952000,
        ];
        if !self.j.is_integer() {
            return false;
        }
        let j = self.j.to_integer();
        CM_J.iter().any(|&c| j == BigInt::from(c)) || j == "-262537412640768000".parse::<BigInt>().unwrap()
    }

    /// Left and right sides of the equation at (x, y) are equal.
    pub fn contains_rational(&self, x: &BigRational, y: &BigRational) -> bool {
        let [a1, a2, a3, a4, a6] = &self.a;
        y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.a.iter().map(format_rational).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// Textual curve description {"a1": "0", ..., "a6": "0"}; missing
/// coefficients are zero and integers may be given as JSON numbers.
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
pub struct CurveSpec {
    #[serde(default)]
    pub a1: Coefficient,
    #[serde(default)]
    pub a2: Coefficient,
    #[serde(default)]
    pub a3: Coefficient,
    #[serde(default)]
    pub a4: Coefficient,
    #[serde(default)]
    pub a6: Coefficient,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Text(String),
}

impl Default for Coefficient {
    fn default() -> Self {
        Coefficient::Int(0)
    }
}

impl Coefficient {
    fn value(&self) -> Result<BigRational> {
        match self {
            Coefficient::Int(n) => Ok(BigRational::from_integer((*n).into())),
            Coefficient::Text(s) => parse_rational(s),
        }
    }
}

impl CurveSpec {
    pub fn build(&self) -> Result<WeierstrassCurve> {
        WeierstrassCurve::new(self.a1.value()?, self.a2.value()?, self.a3.value()?, self.a4.value()?, self.a6.value()?)
    }

    pub fn from_curve(e: &WeierstrassCurve) -> Self {
        let c = |r: &BigRational| Coefficient::Text(format_rational(r));
        CurveSpec { a1: c(e.a1()), a2: c(e.a2()), a3: c(e.a3()), a4: c(e.a4()), a6: c(e.a6()) }
    }
}
