//! Canonical height as the limit of naive heights along the doubling
//! sequence, computed with exact projective x-coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::primes::bigint_mod;
use crate::arith::rational::{int_valuation, ln_abs};
use crate::curve::{CurvePoint, WeierstrassCurve};
use crate::error::{invalid, Error, Result};
use crate::fields::{ArchPlace, BaseField, PrimeIdeal, QuadraticField, Scalar};

use super::naive::naive_height;

/// Default cap on the size of a projective coordinate, in bits.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 22;

#[derive(Clone, Copy, Debug)]
pub struct DoublingConfig {
    /// Fixed number of doublings; chosen from `target_error` when `None`.
    pub iterations: Option<u32>,
    pub target_error: f64,
    pub bit_budget: u64,
}

impl Default for DoublingConfig {
    fn default() -> Self {
        DoublingConfig { iterations: None, target_error: 1e-8, bit_budget: DEFAULT_BIT_BUDGET }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DoublingHeight {
    pub value: f64,
    pub iterations: u32,
    /// Proven bound on |value - ĥ(P)|.
    pub error_bound: f64,
    /// Some 2^k P is the identity.
    pub hit_identity: bool,
    pub final_bits: u64,
}

/// Constant B with |ĥ(Q) - h(x(Q))/2| ≤ B for every Q, from the
/// difference bounds between naive and canonical heights.
pub fn height_difference_bound(e: &WeierstrassCurve) -> f64 {
    let hj = naive_height(e.j_invariant());
    let hd = naive_height(e.discriminant());
    let slack = if Zero::is_zero(e.b2()) { 0.0 } else { 0.5 * std::f64::consts::LN_2 };
    let lower = hj / 8.0 + hd / 12.0 + 0.973;
    let upper = hj / 12.0 + hd / 12.0 + 1.07;
    lower.max(upper) + slack
}

/// ĥ(P) = lim 4^-n h(x(2^n P)) / 2.
pub fn canonical_height_doubling<F: Scalar>(
    e: &WeierstrassCurve,
    pt: &CurvePoint<F>,
    cfg: &DoublingConfig,
) -> Result<DoublingHeight> {
    e.check(pt)?;
    if !e.is_integral() {
        return invalid("doubling needs an integral model");
    }
    let (x, _) = match pt {
        CurvePoint::Infinity => {
            return Ok(DoublingHeight { value: 0.0, iterations: 0, error_bound: 0.0, hit_identity: true, final_bits: 0 })
        }
        CurvePoint::Affine { x, y } => (x, y),
    };
    let bound = height_difference_bound(e);
    if !(cfg.target_error > 0.0) {
        return invalid("target error must be positive");
    }
    let wanted = match cfg.iterations {
        Some(n) => n,
        None => ((bound / cfg.target_error).ln() / 4f64.ln()).ceil().max(0.0) as u32,
    };
    let base = x.base();
    let ring = Ring::new(base);
    let (a, bb) = x.sqrt_d_coords();
    let den = a.denom().lcm(bb.denom());
    let mut xs = ring.make(a.numer() * (&den / a.denom()), bb.numer() * (&den / bb.denom()));
    let mut ws = ring.make(den, BigInt::zero());
    let bad = e.bad_primes()?;
    let initial_common = ring.good_common_log_norm(&xs, &ws, &bad);
    let [b2, b4, b6, b8] = [e.b2(), e.b4(), e.b6(), e.b8()].map(|c| c.to_integer());

    let mut n = 0u32;
    while n < wanted {
        let bits = xs.bits().max(ws.bits());
        if bits.saturating_mul(4) > cfg.bit_budget {
            if cfg.iterations.is_some() {
                return Err(Error::Resource(format!(
                    "doubling step {} would exceed the budget of {} bits",
                    n + 1,
                    cfg.bit_budget
                )));
            }
            break;
        }
        let (nx, nw) = ring.double(&xs, &ws, &b2, &b4, &b6, &b8);
        if nw.is_zero() {
            return Ok(DoublingHeight { value: 0.0, iterations: n + 1, error_bound: 0.0, hit_identity: true, final_bits: 0 });
        }
        xs = nx;
        ws = nw;
        ring.strip(&mut xs, &mut ws, &bad);
        n += 1;
    }
    let h = ring.projective_height(&xs, &ws, &bad, initial_common * 4f64.powi(n as i32))?;
    let scale = 4f64.powi(-(n as i32));
    Ok(DoublingHeight {
        value: 0.5 * h * scale,
        iterations: n,
        error_bound: bound * scale,
        hit_identity: false,
        final_bits: xs.bits().max(ws.bits()),
    })
}

/// Element u + v√d of Z[√d] (v = 0 over Q).
#[derive(Clone, Debug)]
struct Elem {
    u: BigInt,
    v: BigInt,
}

impl Elem {
    fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    fn bits(&self) -> u64 {
        self.u.bits().max(self.v.bits())
    }
}

struct Ring {
    base: BaseField,
    d: BigInt,
}

impl Ring {
    fn new(base: BaseField) -> Self {
        let d = match base {
            BaseField::Rational => 0,
            BaseField::Quadratic(k) => k.d(),
        };
        Ring { base, d: d.into() }
    }

    fn make(&self, u: BigInt, v: BigInt) -> Elem {
        Elem { u, v }
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        if a.v.is_zero() && b.v.is_zero() {
            return Elem { u: &a.u * &b.u, v: BigInt::zero() };
        }
        Elem { u: &a.u * &b.u + &self.d * &a.v * &b.v, v: &a.u * &b.v + &a.v * &b.u }
    }

    fn sq(&self, a: &Elem) -> Elem {
        if a.v.is_zero() {
            return Elem { u: &a.u * &a.u, v: BigInt::zero() };
        }
        Elem { u: &a.u * &a.u + &self.d * &a.v * &a.v, v: BigInt::from(2) * &a.u * &a.v }
    }

    fn lin(terms: &[(&BigInt, &Elem)]) -> Elem {
        let mut u = BigInt::zero();
        let mut v = BigInt::zero();
        for (c, t) in terms {
            if c.is_zero() {
                continue;
            }
            u += *c * &t.u;
            if !t.v.is_zero() {
                v += *c * &t.v;
            }
        }
        Elem { u, v }
    }

    /// x-only doubling on (X : W):
    /// X' = X^4 - b4 X^2 W^2 - 2 b6 X W^3 - b8 W^4,
    /// W' = 4 X^3 W + b2 X^2 W^2 + 2 b4 X W^3 + b6 W^4.
    fn double(&self, x: &Elem, w: &Elem, b2: &BigInt, b4: &BigInt, b6: &BigInt, b8: &BigInt) -> (Elem, Elem) {
        let x2 = self.sq(x);
        let w2 = self.sq(w);
        let xw = self.mul(x, w);
        let x4 = self.sq(&x2);
        let x2w2 = self.sq(&xw);
        let w4 = self.sq(&w2);
        let x3w = self.mul(&x2, &xw);
        let xw3 = self.mul(&xw, &w2);
        let one = BigInt::one();
        let four = BigInt::from(4);
        let (nb4, nb6x2, nb8) = (-b4, BigInt::from(-2) * b6, -b8);
        let b4x2 = BigInt::from(2) * b4;
        let nx = Self::lin(&[(&one, &x4), (&nb4, &x2w2), (&nb6x2, &xw3), (&nb8, &w4)]);
        let nw = Self::lin(&[(&four, &x3w), (b2, &x2w2), (&b4x2, &xw3), (b6, &w4)]);
        (nx, nw)
    }

    /// Removes rational powers of bad primes common to every coordinate.
    fn strip(&self, x: &mut Elem, w: &mut Elem, bad: &[u64]) {
        for &p in bad {
            let bp = BigInt::from(p);
            loop {
                let all = [&x.u, &x.v, &w.u, &w.v].iter().all(|c| c.is_zero() || bigint_mod(c, p) == 0);
                if !all {
                    break;
                }
                for c in [&mut x.u, &mut x.v, &mut w.u, &mut w.v] {
                    *c /= &bp;
                }
            }
        }
    }

    fn ord(&self, a: &Elem, prime: &PrimeIdeal) -> Option<i64> {
        if a.is_zero() {
            return None;
        }
        match prime {
            PrimeIdeal::Rational(p) => Some(int_valuation(&a.u, *p).unwrap() as i64),
            PrimeIdeal::Quadratic(q) => {
                let (u, v) = if q.field().d().rem_euclid(4) == 1 { (&a.u - &a.v, BigInt::from(2) * &a.v) } else { (a.u.clone(), a.v.clone()) };
                q.ord_integral(&u, &v)
            }
        }
    }

    /// log|σ(a)| at an archimedean place, without cancellation.
    fn ln_abs_at(&self, a: &Elem, place: ArchPlace) -> f64 {
        if a.is_zero() {
            return f64::NEG_INFINITY;
        }
        if a.v.is_zero() {
            return ln_abs(&a.u);
        }
        let norm = || &a.u * &a.u - &self.d * &a.v * &a.v;
        match place {
            ArchPlace::Complex => 0.5 * ln_abs(&norm()),
            ArchPlace::Real { conjugate } => {
                let lb = ln_abs(&a.v) + 0.5 * ln_abs(&self.d);
                if a.u.is_zero() {
                    return lb;
                }
                let la = ln_abs(&a.u);
                let log_sum = la.max(lb) + (-(la - lb).abs()).exp().ln_1p();
                let vsign = if conjugate { -a.v.signum() } else { a.v.signum() };
                if a.u.signum() == vsign {
                    log_sum
                } else {
                    ln_abs(&norm()) - log_sum
                }
            }
        }
    }

    /// log N of the ideal (X, W) with the bad primes removed.
    fn good_common_log_norm(&self, x: &Elem, w: &Elem, bad: &[u64]) -> f64 {
        let mut norm = match self.base {
            BaseField::Rational => x.u.gcd(&w.u),
            BaseField::Quadratic(k) => ideal_norm(k, &[x, w]),
        };
        for &p in bad {
            while !norm.is_zero() && bigint_mod(&norm, p) == 0 {
                norm /= p;
            }
        }
        ln_abs(&norm)
    }

    /// h(X/W) given the log norm of the common ideal at good primes.
    fn projective_height(&self, x: &Elem, w: &Elem, bad: &[u64], good_common: f64) -> Result<f64> {
        let deg = self.base.degree() as f64;
        let mut total = 0.0;
        for place in self.base.archimedean_places() {
            let lx = self.ln_abs_at(x, place);
            let lw = self.ln_abs_at(w, place);
            total += place.local_degree() as f64 * lx.max(lw);
        }
        total -= good_common;
        for &p in bad {
            for prime in self.base.primes_above(p)? {
                let ox = self.ord(x, &prime);
                let ow = self.ord(w, &prime).expect("W is nonzero");
                let m = ox.map_or(ow, |o| o.min(ow));
                total -= (prime.f() as i64 * m) as f64 * (p as f64).ln();
            }
        }
        Ok(total / deg)
    }
}

/// Index in the maximal order of the ideal generated by the given
/// integral elements (u + v√d), via the gcd of 2x2 minors of a Z-basis
/// spanning set in the basis (1, ω).
fn ideal_norm(k: QuadraticField, gens: &[&Elem]) -> BigInt {
    let (c1, c0) = k.omega_relation();
    let (c1, c0) = (BigInt::from(c1), BigInt::from(c0));
    let mut cols: Vec<(BigInt, BigInt)> = Vec::new();
    for g in gens {
        let el = k.element(BigRational::from_integer(g.u.clone()), BigRational::from_integer(g.v.clone()));
        let (a, b) = k.omega_coords(&el);
        let (a, b) = (a.to_integer(), b.to_integer());
        // α·ω = c0 b + (a + c1 b) ω
        let (a2, b2) = (&c0 * &b, &a + &c1 * &b);
        cols.push((a, b));
        cols.push((a2, b2));
    }
    let mut g = BigInt::zero();
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let m = &cols[i].0 * &cols[j].1 - &cols[i].1 * &cols[j].0;
            g = g.gcd(&m);
        }
    }
    g.abs()
}
