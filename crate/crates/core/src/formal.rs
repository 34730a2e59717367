//! Truncated power series and formal group laws: the elliptic law in the
//! parameter z = -x/y, the multiplicative and additive laws,
//! multiplication-by-m series and the mod-p congruences they satisfy.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::arith::primes::{bigint_mod, inv_mod, mul_mod, require_prime};
use crate::arith::rational::{format_rational, to_f64};
use crate::curve::{in_kernel_of_reduction, CurvePoint, WeierstrassCurve};
use crate::error::{invalid, Error, Result};
use crate::fields::PrimeIdeal;

pub use crate::curve::z_coordinate;

/// Largest precision accepted by [`elliptic_formal_group`].
pub const DEFAULT_PRECISION_CAP: usize = 16;

fn is_int(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Power series in one variable modulo t^(N+1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries1 {
    coeffs: Vec<BigRational>,
}

impl TruncSeries1 {
    pub fn zero(n: usize) -> Self {
        TruncSeries1 { coeffs: vec![BigRational::zero(); n + 1] }
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = c;
        s
    }

    /// The series t.
    pub fn t(n: usize) -> Self {
        let mut s = Self::zero(n);
        if n >= 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    /// Coefficients listed from degree 0; terms past `n` are dropped.
    pub fn from_coeffs(n: usize, cs: &[BigRational]) -> Self {
        let mut s = Self::zero(n);
        for (k, c) in cs.iter().enumerate().take(n + 1) {
            s.coeffs[k] = c.clone();
        }
        s
    }

    pub fn from_i64(n: usize, cs: &[i64]) -> Self {
        Self::from_coeffs(n, &cs.iter().map(|&c| BigRational::from_integer(c.into())).collect::<Vec<_>>())
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(is_int)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::from_coeffs(n, &self.coeffs)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.precision().min(o.precision());
        TruncSeries1 { coeffs: (0..=n).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.precision().min(o.precision());
        TruncSeries1 { coeffs: (0..=n).map(|k| &self.coeffs[k] - &o.coeffs[k]).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncSeries1 { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.precision().min(o.precision());
        let mut out = Self::zero(n);
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }

    /// 1/self for a series with nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return invalid("series with zero constant term is not invertible");
        }
        let n = self.precision();
        let mut out = Self::zero(n);
        out.coeffs[0] = c0.recip();
        for k in 1..=n {
            let mut s = BigRational::zero();
            for i in 1..=k {
                s += &self.coeffs[i] * &out.coeffs[k - i];
            }
            out.coeffs[k] = -s / &c0;
        }
        Ok(out)
    }

    /// self(inner) for inner without constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return invalid("inner series must vanish at 0");
        }
        let n = self.precision().min(inner.precision());
        let mut out = Self::constant(n, self.coeffs[0].clone());
        let mut pow = Self::constant(n, BigRational::one());
        for k in 1..=n {
            pow = pow.mul(inner);
            if !self.coeffs[k].is_zero() {
                out = out.add(&pow.scale(&self.coeffs[k]));
            }
        }
        Ok(out)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + to_f64(c))
    }
}

impl fmt::Display for TruncSeries1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                write!(f, "{}", if sign == "-" { "-" } else { "" })?;
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{k}"),
            };
            if mag.is_one() && k > 0 {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}{mono}", format_rational(&mag))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.precision() + 1)
    }
}

/// Coefficients as a JSON array of strings indexed by degree.
impl Serialize for TruncSeries1 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&format_rational(c))?;
        }
        seq.end()
    }
}

/// Power series in two variables modulo terms of total degree > N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries2 {
    n: usize,
    /// Graded by total degree d = i + j, then by j.
    coeffs: Vec<BigRational>,
}

fn idx(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

impl TruncSeries2 {
    pub fn zero(n: usize) -> Self {
        TruncSeries2 { n, coeffs: vec![BigRational::zero(); (n + 1) * (n + 2) / 2] }
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = c;
        s
    }

    pub fn x(n: usize) -> Self {
        let mut s = Self::zero(n);
        if n >= 1 {
            s.set(1, 0, BigRational::one());
        }
        s
    }

    pub fn y(n: usize) -> Self {
        let mut s = Self::zero(n);
        if n >= 1 {
            s.set(0, 1, BigRational::one());
        }
        s
    }

    pub fn from_terms(n: usize, terms: &[(usize, usize, i64)]) -> Self {
        let mut s = Self::zero(n);
        for &(i, j, c) in terms {
            if i + j <= n {
                s.coeffs[idx(i, j)] += BigRational::from_integer(c.into());
            }
        }
        s
    }

    /// A one-variable series placed in x (or in y when `in_y`).
    pub fn from_series1(s: &TruncSeries1, n: usize, in_y: bool) -> Self {
        let mut out = Self::zero(n);
        for k in 0..=n.min(s.precision()) {
            let (i, j) = if in_y { (0, k) } else { (k, 0) };
            out.coeffs[idx(i, j)] = s.coeffs[k].clone();
        }
        out
    }

    pub fn precision(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, i: usize, j: usize) -> BigRational {
        if i + j > self.n {
            return BigRational::zero();
        }
        self.coeffs[idx(i, j)].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, c: BigRational) {
        self.coeffs[idx(i, j)] = c;
    }

    /// Nonzero terms as (i, j, c) for x^i y^j.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> {
        (0..=self.n).flat_map(move |d| (0..=d).map(move |j| (d - j, j))).filter_map(move |(i, j)| {
            let c = &self.coeffs[idx(i, j)];
            (!c.is_zero()).then_some((i, j, c))
        })
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(is_int)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.n.min(o.n);
        let len = (n + 1) * (n + 2) / 2;
        TruncSeries2 { n, coeffs: (0..len).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.n.min(o.n);
        let len = (n + 1) * (n + 2) / 2;
        TruncSeries2 { n, coeffs: (0..len).map(|k| &self.coeffs[k] - &o.coeffs[k]).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncSeries2 { n: self.n, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn neg(&self) -> Self {
        TruncSeries2 { n: self.n, coeffs: self.coeffs.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n.min(o.n);
        let mut out = Self::zero(n);
        let a: Vec<_> = self.terms().filter(|t| t.0 + t.1 <= n).collect();
        let b: Vec<_> = o.terms().filter(|t| t.0 + t.1 <= n).collect();
        for &(i1, j1, c1) in &a {
            for &(i2, j2, c2) in &b {
                if i1 + j1 + i2 + j2 <= n {
                    out.coeffs[idx(i1 + i2, j1 + j2)] += c1 * c2;
                }
            }
        }
        out
    }

    /// 1/self for a series with nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return invalid("series with zero constant term is not invertible");
        }
        // 1/(c0 (1 + h)) = c0⁻¹ Σ (-h)^k
        let inv0 = c0.recip();
        let mut h = self.scale(&inv0);
        h.coeffs[0] = BigRational::zero();
        let minus_h = h.neg();
        let mut out = Self::constant(self.n, BigRational::one());
        let mut pow = Self::constant(self.n, BigRational::one());
        for _ in 1..=self.n {
            pow = pow.mul(&minus_h);
            out = out.add(&pow);
        }
        Ok(out.scale(&inv0))
    }

    /// self(u, v) for u, v without constant terms.
    pub fn substitute(&self, u: &Self, v: &Self) -> Result<Self> {
        if !u.coeffs[0].is_zero() || !v.coeffs[0].is_zero() {
            return invalid("substituted series must vanish at 0");
        }
        let n = self.n.min(u.n).min(v.n);
        let powers = |s: &Self| {
            let mut ps = vec![Self::constant(n, BigRational::one())];
            for k in 1..=n {
                let next = ps[k - 1].mul(s);
                ps.push(next);
            }
            ps
        };
        let (pu, pv) = (powers(u), powers(v));
        let mut out = Self::zero(n);
        for (i, j, c) in self.terms() {
            if i + j <= n {
                out = out.add(&pu[i].mul(&pv[j]).scale(c));
            }
        }
        Ok(out)
    }

    /// self(u(t), v(t)) for one-variable u, v without constant terms.
    pub fn substitute1(&self, u: &TruncSeries1, v: &TruncSeries1) -> Result<TruncSeries1> {
        if !u.coeffs[0].is_zero() || !v.coeffs[0].is_zero() {
            return invalid("substituted series must vanish at 0");
        }
        let n = self.n.min(u.precision()).min(v.precision());
        let powers = |s: &TruncSeries1| {
            let mut ps = vec![TruncSeries1::constant(n, BigRational::one())];
            for k in 1..=n {
                let next = ps[k - 1].mul(s);
                ps.push(next);
            }
            ps
        };
        let (pu, pv) = (powers(u), powers(v));
        let mut out = TruncSeries1::zero(n);
        for (i, j, c) in self.terms() {
            if i + j <= n {
                out = out.add(&pu[i].mul(&pv[j]).scale(c));
            }
        }
        Ok(out)
    }

    /// g(self) for a one-variable g, self without constant term.
    pub fn apply(&self, g: &TruncSeries1) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return invalid("series must vanish at 0");
        }
        let n = self.n.min(g.precision());
        let mut out = Self::constant(n, g.coeffs[0].clone());
        let mut pow = Self::constant(n, BigRational::one());
        for k in 1..=n {
            pow = pow.mul(self);
            if !g.coeffs[k].is_zero() {
                out = out.add(&pow.scale(&g.coeffs[k]));
            }
        }
        Ok(out)
    }

    /// F(y, x).
    pub fn swapped(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (i, j, c) in self.terms() {
            out.coeffs[idx(j, i)] = c.clone();
        }
        out
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms().map(|(i, j, c)| to_f64(c) * x.powi(i as i32) * y.powi(j as i32)).sum()
    }
}

impl Serialize for TruncSeries2 {
    /// Nonzero terms as [i, j, "c"] for c x^i y^j.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<_> = self.terms().collect();
        let mut seq = s.serialize_seq(Some(terms.len()))?;
        for (i, j, c) in terms {
            seq.serialize_element(&(i, j, format_rational(c)))?;
        }
        seq.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Elliptic,
    Multiplicative,
    Additive,
    Custom,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormalGroupLaw {
    pub kind: LawKind,
    pub precision: usize,
    pub law: TruncSeries2,
    pub inverse: TruncSeries1,
    pub integral: bool,
}

impl FormalGroupLaw {
    pub fn new(kind: LawKind, law: TruncSeries2, inverse: TruncSeries1) -> Self {
        let precision = law.precision().min(inverse.precision());
        let integral = law.is_integral() && inverse.is_integral();
        FormalGroupLaw { kind, precision, law, inverse, integral }
    }

    /// F(x, y) = x + y.
    pub fn additive(n: usize) -> Self {
        Self::new(LawKind::Additive, TruncSeries2::from_terms(n, &[(1, 0, 1), (0, 1, 1)]), TruncSeries1::from_i64(n, &[0, -1]))
    }

    /// F(x, y) = x + y + xy with inverse 1/(1+t) - 1.
    pub fn multiplicative(n: usize) -> Self {
        let inv: Vec<i64> = (0..=n).map(|k| if k == 0 { 0 } else if k % 2 == 1 { -1 } else { 1 }).collect();
        Self::new(
            LawKind::Multiplicative,
            TruncSeries2::from_terms(n, &[(1, 0, 1), (0, 1, 1), (1, 1, 1)]),
            TruncSeries1::from_i64(n, &inv),
        )
    }

    /// F(t, G) for a one-variable series G.
    pub fn add_series(&self, a: &TruncSeries1, b: &TruncSeries1) -> Result<TruncSeries1> {
        self.law.substitute1(a, b)
    }
}

/// Power series w(z) = z³ + ... with w = z³ + a1 z w + a2 z² w + a3 w² +
/// a4 z w² + a6 w³, to degree `n`.
pub fn weierstrass_w(e: &WeierstrassCurve, n: usize) -> Result<TruncSeries1> {
    if !e.is_integral() {
        return invalid("formal group needs an integral model");
    }
    let [a1, a2, a3, a4, a6] = e.a_invariants().clone();
    let z = TruncSeries1::t(n);
    let z2 = z.mul(&z);
    let z3 = z2.mul(&z);
    let mut w = z3.clone();
    // each pass fixes at least one more coefficient
    for _ in 0..=n {
        let w2 = w.mul(&w);
        let next = z3
            .add(&z.mul(&w).scale(&a1))
            .add(&z2.mul(&w).scale(&a2))
            .add(&w2.scale(&a3))
            .add(&z.mul(&w2).scale(&a4))
            .add(&w2.mul(&w).scale(&a6));
        if next == w {
            return Ok(w);
        }
        w = next;
    }
    Err(Error::Invariant("w(z) recursion did not stabilize".into()))
}

/// The formal group of the curve in z = -x/y, to total degree `n`.
pub fn elliptic_formal_group(e: &WeierstrassCurve, n: usize) -> Result<FormalGroupLaw> {
    elliptic_formal_group_capped(e, n, DEFAULT_PRECISION_CAP)
}

pub fn elliptic_formal_group_capped(e: &WeierstrassCurve, n: usize, cap: usize) -> Result<FormalGroupLaw> {
    if n == 0 || n > cap {
        return invalid(format!("precision {n} outside 1..={cap}"));
    }
    let [a1, a2, a3, a4, a6] = e.a_invariants().clone();
    let w = weierstrass_w(e, n + 3)?;
    let one = TruncSeries2::constant(n, BigRational::one());
    let (z1, z2) = (TruncSeries2::x(n), TruncSeries2::y(n));
    // slope (w(z2) - w(z1))/(z2 - z1) = Σ A_k Σ_{i+j=k-1} z1^i z2^j
    let mut lambda = TruncSeries2::zero(n);
    for k in 1..=n + 1 {
        let ak = w.coeff(k);
        if ak.is_zero() {
            continue;
        }
        for i in 0..k {
            let j = k - 1 - i;
            lambda.coeffs[idx(i, j)] += &ak;
        }
    }
    let w1 = TruncSeries2::from_series1(&w, n, false);
    let nu = w1.sub(&lambda.mul(&z1));
    let l2 = lambda.mul(&lambda);
    let l3 = l2.mul(&lambda);
    // third root of the line w = λz + ν on the curve: z1 + z2 + z3 = -B/A
    let b = lambda
        .scale(&a1)
        .add(&nu.scale(&a2))
        .add(&l2.scale(&a3))
        .add(&lambda.mul(&nu).scale(&(&a4 * BigRational::from_integer(2.into()))))
        .add(&l2.mul(&nu).scale(&(&a6 * BigRational::from_integer(3.into()))));
    let a = one.add(&lambda.scale(&a2)).add(&l2.scale(&a4)).add(&l3.scale(&a6));
    let z3 = z1.neg().sub(&z2).sub(&b.mul(&a.recip()?));
    let w3 = lambda.mul(&z3).add(&nu);
    // F = ι(z3) with ι(z) = z/(-1 + a1 z + a3 w)
    let minus_one = TruncSeries2::constant(n, -BigRational::one());
    let law = z3.mul(&minus_one.add(&z3.scale(&a1)).add(&w3.scale(&a3)).recip()?);
    let t = TruncSeries1::t(n);
    let inverse = t.mul(
        &TruncSeries1::constant(n, -BigRational::one()).add(&t.scale(&a1)).add(&w.truncate(n).scale(&a3)).recip()?,
    );
    let law = FormalGroupLaw::new(LawKind::Elliptic, law, inverse);
    if !law.integral {
        return Err(Error::Invariant("formal group of an integral model has a nonintegral coefficient".into()));
    }
    Ok(law)
}

/// [m](t): M₁ = t, M_m = F(t, M_{m-1}).
pub fn mult_by_m(f: &FormalGroupLaw, m: u64) -> Result<TruncSeries1> {
    if m == 0 {
        return invalid("m must be at least 1");
    }
    let t = TruncSeries1::t(f.precision);
    let mut acc = t.clone();
    for _ in 1..m {
        acc = f.add_series(&t, &acc)?;
    }
    Ok(acc)
}

fn p_integral(r: &BigRational, p: u64) -> bool {
    bigint_mod(r.denom(), p) != 0
}

fn reduce_mod_p(r: &BigRational, p: u64) -> Option<u64> {
    let num = bigint_mod(r.numer(), p);
    let den = inv_mod(bigint_mod(r.denom(), p), p)?;
    Some(mul_mod(num, den, p))
}

/// Every coefficient of [p](t) at an exponent prime to p is divisible by
/// p, i.e. [p](t) = a(t^p) + p b(t) to the available precision.
pub fn verify_structure_ap_pb(f: &FormalGroupLaw, p: u64) -> Result<bool> {
    require_prime(p)?;
    let mp = mult_by_m(f, p)?;
    check_ap_pb(&mp, p)
}

pub fn check_ap_pb(mp: &TruncSeries1, p: u64) -> Result<bool> {
    if !mp.coeffs.iter().all(|c| p_integral(c, p)) {
        return invalid(format!("series is not {p}-integral"));
    }
    Ok(mp.coeffs.iter().enumerate().all(|(k, c)| (k as u64).is_multiple_of(p) || reduce_mod_p(c, p) == Some(0)))
}

/// Splits [p](t) into (a, b) with [p](t) = a(t^p) + p b(t).
pub fn split_ap_pb(mp: &TruncSeries1, p: u64) -> Result<(TruncSeries1, TruncSeries1)> {
    if !check_ap_pb(mp, p)? {
        return Err(Error::VerificationFailed(format!("[{p}](t) has a coefficient prime to p at an exponent prime to p")));
    }
    let n = mp.precision();
    let pb = BigRational::from_integer(BigInt::from(p));
    let mut a = TruncSeries1::zero(n / p as usize);
    let mut b = TruncSeries1::zero(n);
    for (k, c) in mp.coeffs.iter().enumerate() {
        if (k as u64).is_multiple_of(p) {
            // keep the part of c that is not a multiple of p in a
            let r = reduce_mod_p(c, p).expect("p-integral");
            let r = BigRational::from_integer(BigInt::from(r));
            a.coeffs[k / p as usize] = r.clone();
            b.coeffs[k] = (c - r) / &pb;
        } else {
            b.coeffs[k] = c / &pb;
        }
    }
    Ok((a, b))
}

/// Homogeneous part of degree d of a mod-p series, as a polynomial in x/y
/// (coefficient of x^i y^(d-i) at index i).
fn homogeneous_mod_p(g: &TruncSeries2, d: usize, p: u64) -> Option<Vec<u64>> {
    (0..=d).map(|i| reduce_mod_p(&g.coeff(i, d - i), p)).collect()
}

/// Whether (X - 1)^k divides the polynomial over F_p, by repeated
/// synthetic division.
fn divisible_by_x_minus_one_pow(mut c: Vec<u64>, k: usize, p: u64) -> bool {
    for _ in 0..k {
        if c.iter().all(|&v| v == 0) {
            return true;
        }
        if c.len() < 2 {
            return false;
        }
        // c(X) = (X - 1) q(X) + r, q_{n-1} = c_n, q_{i-1} = c_i + q_i
        let n = c.len() - 1;
        let mut q = vec![0u64; n];
        q[n - 1] = c[n];
        for i in (1..n).rev() {
            q[i - 1] = (c[i] + q[i]) % p;
        }
        let r = (c[0] + q[0]) % p;
        if r != 0 {
            return false;
        }
        c = q;
    }
    true
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealMembership {
    pub p: u64,
    pub precision: usize,
    pub holds: bool,
    /// Total degrees whose homogeneous part fails the test.
    pub failing_degrees: Vec<usize>,
}

/// [p](F(x, ι(y))) lies in (x^p - y^p) + p to total degree N: each
/// homogeneous part reduced mod p is divisible by (x - y)^p.
pub fn verify_ideal_membership(f: &FormalGroupLaw, p: u64) -> Result<bool> {
    Ok(ideal_membership_report(f, p)?.holds)
}

pub fn ideal_membership_report(f: &FormalGroupLaw, p: u64) -> Result<IdealMembership> {
    require_prime(p)?;
    let n = f.precision;
    if (n as u64) < p + 2 {
        return invalid(format!("precision {n} is below p + 2 = {}", p + 2));
    }
    let mp = mult_by_m(f, p)?;
    let diff = f.law.substitute(&TruncSeries2::x(n), &TruncSeries2::from_series1(&f.inverse, n, true))?;
    let g = diff.apply(&mp)?;
    if !g.coeffs.iter().all(|c| p_integral(c, p)) {
        return invalid(format!("series is not {p}-integral"));
    }
    let mut failing = Vec::new();
    for d in 1..=n {
        let h = homogeneous_mod_p(&g, d, p).expect("p-integral");
        if !divisible_by_x_minus_one_pow(h, p as usize, p) {
            failing.push(d);
        }
    }
    Ok(IdealMembership { p, precision: n, holds: failing.is_empty(), failing_degrees: failing })
}

/// v(z(P)) at a prime of good reduction where P reduces to O, normalized
/// so that v(p) = 1.
pub fn kernel_valuation<F: crate::fields::Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>, prime: &PrimeIdeal) -> Result<BigRational> {
    if pt.is_infinity() {
        return invalid("kernel valuation at the identity");
    }
    let w = in_kernel_of_reduction(e, pt, prime)?;
    if !w.in_kernel {
        return invalid(format!("point does not reduce to O modulo {prime}"));
    }
    w.normalized().ok_or_else(|| Error::Invariant("z has a pole at a point in the kernel".into()))
}

/// Coefficient of x^i y^j as an integer, for integral series.
pub fn integer_coeff(s: &TruncSeries2, i: usize, j: usize) -> Option<BigInt> {
    let c = s.coeff(i, j);
    c.is_integer().then(|| c.to_integer())
}
