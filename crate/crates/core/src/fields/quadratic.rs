//! Quadratic fields Q(√d): elements a + b√d with rational a, b, splitting of
//! rational primes, normalized valuations and residue maps.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::residue::{ResidueElem, ResidueField};
use crate::arith::primes::{bigint_mod, inv_mod, is_prime, legendre, mul_mod, smallest_nonresidue, sqrt_mod, squarefree_part};
use crate::arith::rational::{format_rational, int_valuation, ln_abs, parse_rational, to_f64};
use crate::arith::Valuation;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticField {
    d: i64,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 {
            return invalid(format!("d = {d} does not define a quadratic field"));
        }
        if squarefree_part(&BigInt::from(d))? != BigInt::from(d) {
            return invalid(format!("d = {d} is not squarefree"));
        }
        Ok(QuadraticField { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn discriminant(&self) -> i64 {
        if self.d.rem_euclid(4) == 1 {
            self.d
        } else {
            4 * self.d
        }
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    pub fn element(&self, a: BigRational, b: BigRational) -> QuadraticElement {
        QuadraticElement { a, b, field: *self }
    }

    pub fn from_rational(&self, a: BigRational) -> QuadraticElement {
        self.element(a, BigRational::zero())
    }

    pub fn sqrt_d(&self) -> QuadraticElement {
        self.element(BigRational::zero(), BigRational::one())
    }

    /// The generator ω of the ring of integers Z[ω].
    pub fn omega(&self) -> QuadraticElement {
        let half = BigRational::new(1.into(), 2.into());
        if self.d.rem_euclid(4) == 1 {
            self.element(half.clone(), half)
        } else {
            self.sqrt_d()
        }
    }

    /// (c1, c0) with ω^2 = c1·ω + c0.
    pub fn omega_relation(&self) -> (i64, i64) {
        if self.d.rem_euclid(4) == 1 {
            (1, (self.d - 1) / 4)
        } else {
            (0, self.d)
        }
    }

    /// Coordinates (u, v) of x = u + v·ω.
    pub fn omega_coords(&self, x: &QuadraticElement) -> (BigRational, BigRational) {
        if self.d.rem_euclid(4) == 1 {
            // √d = 2ω - 1
            (&x.a - &x.b, &x.b * BigRational::from_integer(2.into()))
        } else {
            (x.a.clone(), x.b.clone())
        }
    }

    /// The first prime above p (the one indexed by the smallest square root).
    pub fn splitting_type(&self, p: u64) -> Result<QuadraticPrime> {
        Ok(self.primes_above(p)?.remove(0))
    }

    /// All primes above p; for split p the first one is the deterministic
    /// choice belonging to the smallest square root of the discriminant.
    pub fn primes_above(&self, p: u64) -> Result<Vec<QuadraticPrime>> {
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        let disc = self.discriminant();
        let (c1, _) = self.omega_relation();
        let c1m = c1.rem_euclid(p as i64) as u64;
        let mk = |splitting, root| QuadraticPrime { field: *self, p, splitting, root };
        if disc.rem_euclid(p as i64) == 0 {
            // double root of X^2 - c1 X - c0 mod p
            let root = if p == 2 { self.d.rem_euclid(2) as u64 } else { c1m * inv_mod(2, p).unwrap() % p };
            return Ok(vec![mk(Splitting::Ramified, root)]);
        }
        let split = if p == 2 {
            disc.rem_euclid(8) == 1
        } else {
            legendre(disc.rem_euclid(p as i64) as u64, p) == 1
        };
        if !split {
            return Ok(vec![mk(Splitting::Inert, 0)]);
        }
        let roots = if p == 2 {
            // X^2 - X - (d-1)/4 with (d-1)/4 even factors as X(X-1)
            [0, 1]
        } else {
            let s = sqrt_mod(disc.rem_euclid(p as i64) as u64, p).unwrap();
            let half = inv_mod(2, p).unwrap();
            // ω = (c1 + √disc)/2
            [mul_mod((c1m + s) % p, half, p), mul_mod((c1m + p - s) % p, half, p)]
        };
        Ok(roots.iter().map(|&r| mk(Splitting::Split, r)).collect())
    }
}

impl fmt::Display for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// A prime of Q(√d) above the rational prime p. For split and ramified p
/// the prime is the kernel of ω ↦ `root` mod p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticPrime {
    field: QuadraticField,
    p: u64,
    splitting: Splitting,
    root: u64,
}

impl QuadraticPrime {
    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn splitting(&self) -> Splitting {
        self.splitting
    }

    pub fn e(&self) -> u32 {
        if self.splitting == Splitting::Ramified {
            2
        } else {
            1
        }
    }

    pub fn f(&self) -> u32 {
        if self.splitting == Splitting::Inert {
            2
        } else {
            1
        }
    }

    pub fn local_degree(&self) -> u32 {
        self.e() * self.f()
    }

    /// Residue of ω for split and ramified primes.
    pub fn omega_residue(&self) -> Option<u64> {
        (self.splitting != Splitting::Inert).then_some(self.root)
    }

    pub fn residue_field(&self) -> ResidueField {
        if self.splitting == Splitting::Inert {
            ResidueField::quadratic(self.p)
        } else {
            ResidueField::prime(self.p)
        }
    }

    pub fn label(&self) -> String {
        match self.splitting {
            Splitting::Split => format!("{}[w={}]", self.p, self.root),
            _ => self.p.to_string(),
        }
    }

    /// Order of x at this prime in units of a uniformizer.
    pub fn ord(&self, x: &QuadraticElement) -> Valuation {
        if x.is_zero() {
            return Valuation::Infinity;
        }
        let ((u, v), den) = integral_omega_coords(x);
        let e = self.e() as i64;
        Valuation::Finite(self.ord_integral(&u, &v).unwrap() - e * int_valuation(&den, self.p).unwrap() as i64)
    }

    /// Order of the algebraic integer u + v·ω; `None` for zero.
    pub fn ord_integral(&self, u: &BigInt, v: &BigInt) -> Option<i64> {
        if u.is_zero() && v.is_zero() {
            return None;
        }
        let p = self.p;
        let (c1, c0) = self.field.omega_relation();
        let norm = |u: &BigInt, v: &BigInt| u * u + BigInt::from(c1) * u * v - BigInt::from(c0) * v * v;
        let ord = match self.splitting {
            Splitting::Ramified => int_valuation(&norm(u, v), p).unwrap() as i64,
            Splitting::Inert => int_valuation(&norm(u, v), p).unwrap() as i64 / 2,
            Splitting::Split => {
                let k = [u, v].iter().filter(|c| !c.is_zero()).map(|c| int_valuation(c, p).unwrap()).min().unwrap();
                let pk = BigInt::from(p).pow(k as u32);
                let (u1, v1) = (u / &pk, v / &pk);
                let r = BigInt::from(self.root);
                let extra = if bigint_mod(&(&u1 + &v1 * &r), p) == 0 { int_valuation(&norm(&u1, &v1), p).unwrap() } else { 0 };
                (k + extra) as i64
            }
        };
        Some(ord)
    }

    /// Image of x in the residue field, or `None` when x is not integral here.
    pub fn residue(&self, x: &QuadraticElement) -> Option<ResidueElem> {
        if x.is_zero() {
            return Some(ResidueElem::ZERO);
        }
        if self.ord(x) < Valuation::Finite(0) {
            return None;
        }
        let p = self.p;
        let ((u, v), den) = integral_omega_coords(x);
        let k = int_valuation(&den, p).unwrap();
        let kf = self.residue_field();
        match self.splitting {
            Splitting::Split => {
                // evaluate at the p-adic lift of the root to enough precision
                let prec = k as u32 + 1;
                let modulus = BigInt::from(p).pow(prec);
                let r = hensel_root(self.field.omega_relation(), self.root, p, prec);
                let val = (&u + &v * &r).mod_floor(&modulus);
                let pk = BigInt::from(p).pow(k as u32);
                debug_assert!((&val % &pk).is_zero());
                let top = bigint_mod(&(&val / &pk), p);
                let unit = bigint_mod(&(&den / &pk), p);
                Some(kf.from_u64(mul_mod(top, inv_mod(unit, p).unwrap(), p)))
            }
            Splitting::Ramified | Splitting::Inert => {
                // integral here forces p^k to divide both coordinates
                let pk = BigInt::from(p).pow(k as u32);
                let unit = bigint_mod(&(&den / &pk), p);
                let ui = kf.from_u64(inv_mod(unit, p).unwrap());
                let us = kf.from_u64(bigint_mod(&(&u / &pk), p));
                let vs = kf.from_u64(bigint_mod(&(&v / &pk), p));
                let w = self.omega_image();
                Some(kf.mul(kf.add(us, kf.mul(vs, w)), ui))
            }
        }
    }

    /// Image of ω in the residue field.
    pub fn omega_image(&self) -> ResidueElem {
        let kf = self.residue_field();
        match self.splitting {
            Splitting::Inert if self.p == 2 => kf.generator(),
            Splitting::Inert => {
                let p = self.p;
                let (c1, c0) = self.field.omega_relation();
                let disc = (c1 * c1 + 4 * c0).rem_euclid(p as i64) as u64;
                let n = smallest_nonresidue(p);
                let s = sqrt_mod(disc * inv_mod(n, p).unwrap() % p, p).expect("disc/n is a square");
                let half = inv_mod(2, p).unwrap();
                let c1m = c1.rem_euclid(p as i64) as u64;
                ResidueElem { c0: c1m * half % p, c1: s * half % p }
            }
            _ => kf.from_u64(self.root),
        }
    }
}

impl fmt::Display for QuadraticPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// ((U, V), D) with x = (U + V·ω)/D, D > 0.
fn integral_omega_coords(x: &QuadraticElement) -> ((BigInt, BigInt), BigInt) {
    let (u, v) = x.field.omega_coords(x);
    let den = u.denom().lcm(v.denom());
    let uu = u.numer() * (&den / u.denom());
    let vv = v.numer() * (&den / v.denom());
    ((uu, vv), den)
}

/// Lift of a simple root of X^2 - c1 X - c0 from mod p to mod p^prec.
fn hensel_root((c1, c0): (i64, i64), root: u64, p: u64, prec: u32) -> BigInt {
    let (c1, c0) = (BigInt::from(c1), BigInt::from(c0));
    let mut r = BigInt::from(root);
    let mut k = 1u32;
    while k < prec {
        k = (2 * k).min(prec);
        let m = BigInt::from(p).pow(k);
        let f = &r * &r - &c1 * &r - &c0;
        let df = (BigInt::from(2) * &r - &c1).mod_floor(&m);
        let inv = df.modinv(&m).expect("simple root");
        r = (&r - f * inv).mod_floor(&m);
    }
    r
}

/// Valuation of x at P normalized so that w(x) = value·log p.
pub fn quad_valuation(x: &QuadraticElement, prime: &QuadraticPrime) -> Result<BigRational> {
    if x.is_zero() {
        return invalid("valuation of zero");
    }
    if x.field != prime.field {
        return invalid(format!("element of {} but prime of {}", x.field, prime.field));
    }
    let ord = prime.ord(x).finite().unwrap();
    Ok(BigRational::new(ord.into(), (prime.e() as i64).into()))
}

/// a + b√d.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticElement {
    a: BigRational,
    b: BigRational,
    field: QuadraticField,
}

impl QuadraticElement {
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QuadraticElement { a: self.a.clone(), b: -&self.b, field: self.field }
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.field.d.into())
    }

    pub fn trace(&self) -> BigRational {
        &self.a * BigRational::from_integer(2.into())
    }

    pub fn is_integral(&self) -> bool {
        self.trace().is_integer() && self.norm().is_integer()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conjugate();
        Some(QuadraticElement { a: &c.a / &n, b: &c.b / &n, field: self.field })
    }

    /// Lowest common denominator of the coordinates in the integral basis.
    pub fn denominator(&self) -> BigInt {
        integral_omega_coords(self).1
    }

    /// Real images under √d ↦ +√d and √d ↦ -√d, computed without
    /// cancellation.
    pub fn real_embeddings(&self) -> Option<[f64; 2]> {
        if !self.field.is_real() {
            return None;
        }
        Some([self.real_embedding(false), self.real_embedding(true)])
    }

    fn real_embedding(&self, conj: bool) -> f64 {
        let sd = (self.field.d as f64).sqrt();
        let b = if conj { -to_f64(&self.b) } else { to_f64(&self.b) };
        let a = to_f64(&self.a);
        if a == 0.0 || b == 0.0 || a.signum() == b.signum() {
            a + b * sd
        } else {
            to_f64(&self.norm()) / (a - b * sd)
        }
    }

    /// log|σ(x)| for each real embedding, stable for huge coordinates.
    pub fn ln_abs_real_embeddings(&self) -> Option<[f64; 2]> {
        if !self.field.is_real() {
            return None;
        }
        Some([self.ln_abs_real(false), self.ln_abs_real(true)])
    }

    fn ln_abs_real(&self, conj: bool) -> f64 {
        let la = ln_abs_rational(&self.a);
        let lb = ln_abs_rational(&self.b) + 0.5 * (self.field.d as f64).ln();
        if self.b.is_zero() {
            return la;
        }
        if self.a.is_zero() {
            return lb;
        }
        let bsign = if conj { -self.b.signum() } else { self.b.signum() };
        let same = self.a.signum() == bsign;
        let log_sum = la.max(lb) + (-(la - lb).abs()).exp().ln_1p();
        if same {
            log_sum
        } else {
            ln_abs_rational(&self.norm()) - log_sum
        }
    }

    pub fn complex_embedding(&self) -> Complex64 {
        let sd = (self.field.d.unsigned_abs() as f64).sqrt();
        if self.field.is_real() {
            Complex64::new(self.real_embedding(false), 0.0)
        } else {
            Complex64::new(to_f64(&self.a), to_f64(&self.b) * sd)
        }
    }

    /// Parses "a+b*sqrt(d)" and its shortened forms in the given field.
    pub fn parse(s: &str, field: QuadraticField) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(idx) = s.find("sqrt(") else {
            return Ok(field.from_rational(parse_rational(&s)?));
        };
        let close = s[idx..].find(')').map(|i| i + idx).ok_or_else(|| Error::Parse(format!("{s:?}: unclosed sqrt")))?;
        let inner: i64 = s[idx + 5..close].parse().map_err(|_| Error::Parse(format!("{s:?}: bad radicand")))?;
        if inner != field.d || close + 1 != s.len() {
            return Err(Error::Parse(format!("{s:?}: expected a+b*sqrt({})", field.d)));
        }
        let head = &s[..idx];
        let split = head.rfind(['+', '-']).filter(|&i| i > 0 && !head[..i].ends_with('/'));
        let (a_str, b_str) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("0", head),
        };
        let a = parse_rational(a_str)?;
        let b_str = b_str.strip_suffix('*').unwrap_or(b_str);
        let b = match b_str {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            t => parse_rational(t.strip_prefix('+').unwrap_or(t))?,
        };
        Ok(field.element(a, b))
    }
}

fn ln_abs_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_abs(r.numer()) - ln_abs(r.denom())
    }
}

impl fmt::Display for QuadraticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.field.d;
        if self.b.is_zero() {
            return f.write_str(&format_rational(&self.a));
        }
        let b_abs = self.b.abs();
        let coef = if b_abs.is_one() { String::new() } else { format!("{}*", format_rational(&b_abs)) };
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.a.is_zero() {
            let lead = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{lead}{coef}sqrt({d})")
        } else {
            write!(f, "{}{sign}{coef}sqrt({d})", format_rational(&self.a))
        }
    }
}

impl Serialize for QuadraticElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn same_field(x: &QuadraticElement, y: &QuadraticElement) -> QuadraticField {
    assert_eq!(x.field, y.field, "mixing elements of different quadratic fields");
    x.field
}

impl Add for &QuadraticElement {
    type Output = QuadraticElement;
    fn add(self, o: &QuadraticElement) -> QuadraticElement {
        let field = same_field(self, o);
        QuadraticElement { a: &self.a + &o.a, b: &self.b + &o.b, field }
    }
}

impl Sub for &QuadraticElement {
    type Output = QuadraticElement;
    fn sub(self, o: &QuadraticElement) -> QuadraticElement {
        let field = same_field(self, o);
        QuadraticElement { a: &self.a - &o.a, b: &self.b - &o.b, field }
    }
}

impl Mul for &QuadraticElement {
    type Output = QuadraticElement;
    fn mul(self, o: &QuadraticElement) -> QuadraticElement {
        let field = same_field(self, o);
        let d = BigRational::from_integer(field.d.into());
        QuadraticElement {
            a: &self.a * &o.a + &self.b * &o.b * d,
            b: &self.a * &o.b + &self.b * &o.a,
            field,
        }
    }
}

impl Neg for &QuadraticElement {
    type Output = QuadraticElement;
    fn neg(self) -> QuadraticElement {
        QuadraticElement { a: -&self.a, b: -&self.b, field: self.field }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for QuadraticElement {
            type Output = QuadraticElement;
            fn $m(self, o: QuadraticElement) -> QuadraticElement {
                (&self).$m(&o)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for QuadraticElement {
    type Output = QuadraticElement;
    fn neg(self) -> QuadraticElement {
        -&self
    }
}

/// Floor of log2 of an integer, for digit-budget checks.
pub(crate) fn bits_of(x: &QuadraticElement) -> u64 {
    [x.a.numer(), x.a.denom(), x.b.numer(), x.b.denom()].iter().map(|n| n.bits()).max().unwrap_or(0)
}
