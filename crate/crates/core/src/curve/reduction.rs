//! Reduction of curves and points modulo primes.

use num_rational::BigRational;
use serde::Serialize;

use super::point::CurvePoint;
use super::weierstrass::WeierstrassCurve;
use crate::arith::primes::{bigint_mod, inv_mod, is_square_mod, legendre, mul_mod, require_prime};
use crate::arith::rational::valuation_unchecked;
use crate::arith::Valuation;
use crate::error::{Error, Result};
use crate::fields::{PrimeIdeal, ResidueElem, ResidueField, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl ReductionKind {
    pub fn is_multiplicative(self) -> bool {
        matches!(self, ReductionKind::SplitMultiplicative | ReductionKind::NonsplitMultiplicative)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionInfo {
    pub p: u64,
    #[serde(rename = "type")]
    pub kind: ReductionKind,
    pub v_disc: i64,
    pub v_c4: Valuation,
    pub v_j: Valuation,
}

fn require_integral_at(e: &WeierstrassCurve, p: u64) -> Result<()> {
    if e.a_invariants().iter().any(|a| valuation_unchecked(a, p) < Valuation::Finite(0)) {
        return Err(Error::InvalidArgument(format!("model is not integral at {p}")));
    }
    Ok(())
}

/// Reduction type at p of a p-minimal model.
pub fn reduction_type(e: &WeierstrassCurve, p: u64) -> Result<ReductionInfo> {
    require_prime(p)?;
    require_integral_at(e, p)?;
    let v_disc = e.v_disc(p);
    let v_c4 = e.v_c4(p);
    if v_disc >= 12 && v_c4 >= Valuation::Finite(4) {
        let v_c4 = v_c4.finite().unwrap_or(i64::MAX);
        return Err(Error::NonMinimal { p, v_disc, v_c4 });
    }
    let v_j = match v_c4 {
        Valuation::Finite(c) => Valuation::Finite(3 * c - v_disc),
        Valuation::Infinity => Valuation::Infinity,
    };
    let kind = if v_disc == 0 {
        ReductionKind::Good
    } else if v_c4 == Valuation::Finite(0) {
        if multiplicative_is_split(e, p)? {
            ReductionKind::SplitMultiplicative
        } else {
            ReductionKind::NonsplitMultiplicative
        }
    } else {
        ReductionKind::Additive
    };
    Ok(ReductionInfo { p, kind, v_disc, v_c4, v_j })
}

fn multiplicative_is_split(e: &WeierstrassCurve, p: u64) -> Result<bool> {
    if p >= 5 {
        let c6 = e.c6();
        let r = mul_mod(bigint_mod(&-c6.numer(), p), inv_mod(bigint_mod(c6.denom(), p), p).unwrap(), p);
        return Ok(legendre(r, p) == 1);
    }
    // tangent slopes t at the node solve t^2 + a1 t - (3 x0 + a2) = 0
    let red = ReducedCurve::new(e, &PrimeIdeal::Rational(p))?;
    let (x0, _) = red.singular_point().ok_or_else(|| Error::Invariant("no singular point at a bad prime".into()))?;
    let a = red.a;
    let c = (3 * x0.c0 + a[1].c0) % p;
    Ok((0..p).any(|t| (t * t + a[0].c0 * t + p - c).is_multiple_of(p)))
}

/// A curve over a residue field; coefficients (a1, a2, a3, a4, a6).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedCurve {
    pub k: ResidueField,
    pub a: [ResidueElem; 5],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ReducedPoint {
    Infinity,
    Affine(ResidueElem, ResidueElem),
}

impl ReducedCurve {
    pub fn new(e: &WeierstrassCurve, prime: &PrimeIdeal) -> Result<Self> {
        require_integral_at(e, prime.p())?;
        let k = prime.residue_field();
        let a = e.a_invariants().clone().map(|c| c.residue(prime).expect("integral coefficient"));
        Ok(ReducedCurve { k, a })
    }

    /// F(x, y) = y^2 + a1 xy + a3 y - x^3 - a2 x^2 - a4 x - a6.
    fn equation(&self, x: ResidueElem, y: ResidueElem) -> ResidueElem {
        let k = &self.k;
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = k.mul(y, k.add(k.add(y, k.mul(a1, x)), a3));
        let rhs = k.add(k.mul(x, k.add(k.mul(x, k.add(x, a2)), a4)), a6);
        k.sub(lhs, rhs)
    }

    fn partials(&self, x: ResidueElem, y: ResidueElem) -> (ResidueElem, ResidueElem) {
        let k = &self.k;
        let [a1, a2, a3, a4, _] = self.a;
        // dF/dx = a1 y - 3x^2 - 2 a2 x - a4, dF/dy = 2y + a1 x + a3
        let fx = k.sub(k.mul(a1, y), k.add(k.add(k.scale(k.mul(x, x), 3), k.scale(k.mul(a2, x), 2)), a4));
        let fy = k.add(k.add(k.scale(y, 2), k.mul(a1, x)), a3);
        (fx, fy)
    }

    pub fn contains(&self, p: &ReducedPoint) -> bool {
        match *p {
            ReducedPoint::Infinity => true,
            ReducedPoint::Affine(x, y) => self.equation(x, y).is_zero(),
        }
    }

    pub fn is_singular_at(&self, x: ResidueElem, y: ResidueElem) -> bool {
        let (fx, fy) = self.partials(x, y);
        self.equation(x, y).is_zero() && fx.is_zero() && fy.is_zero()
    }

    /// The singular point, if the reduction is singular. It is always
    /// defined over the prime field.
    pub fn singular_point(&self) -> Option<(ResidueElem, ResidueElem)> {
        let p = self.k.characteristic();
        let base: Vec<u64> = self.a.iter().map(|a| a.c0).collect();
        if self.a.iter().any(|a| a.c1 != 0) {
            return None;
        }
        let lifted = |x: u64, y: u64| (self.k.from_u64(x), self.k.from_u64(y));
        if p <= 3 {
            return (0..p)
                .flat_map(|x| (0..p).map(move |y| (x, y)))
                .map(|(x, y)| lifted(x, y))
                .find(|&(x, y)| self.is_singular_at(x, y));
        }
        // (2y + a1 x + a3)^2 = f(x) with f = 4x^3 + b2 x^2 + 2 b4 x + b6
        let [a1, a2, a3, a4, a6] = [base[0], base[1], base[2], base[3], base[4]];
        let b2 = (mul_mod(a1, a1, p) + 4 * a2) % p;
        let b4 = (2 * a4 + mul_mod(a1, a3, p)) % p;
        let b6 = (mul_mod(a3, a3, p) + 4 * a6) % p;
        let f = vec![b6, 2 * b4 % p, b2, 4 % p];
        let df = vec![2 * b4 % p, 2 * b2 % p, 12 % p];
        let g = gcd_mod(f, df, p);
        let x0 = match g.len() {
            2 => (p - g[0]) % p,
            3 => mul_mod((p - g[1]) % p, inv_mod(2, p).unwrap(), p),
            _ => return None,
        };
        let y0 = mul_mod((2 * p - mul_mod(a1, x0, p) - a3) % p, inv_mod(2, p).unwrap(), p);
        let (x, y) = lifted(x0, y0);
        self.is_singular_at(x, y).then_some((x, y))
    }

    pub fn negate(&self, p: &ReducedPoint) -> ReducedPoint {
        let k = &self.k;
        match *p {
            ReducedPoint::Infinity => ReducedPoint::Infinity,
            ReducedPoint::Affine(x, y) => ReducedPoint::Affine(x, k.sub(k.sub(k.neg(y), k.mul(self.a[0], x)), self.a[2])),
        }
    }

    /// Group law on the nonsingular points.
    pub fn add(&self, p: &ReducedPoint, q: &ReducedPoint) -> ReducedPoint {
        let k = &self.k;
        let [a1, a2, a3, a4, a6] = self.a;
        let (x1, y1, x2, y2) = match (*p, *q) {
            (ReducedPoint::Infinity, _) => return *q,
            (_, ReducedPoint::Infinity) => return *p,
            (ReducedPoint::Affine(x1, y1), ReducedPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let (lambda, nu) = if x1 == x2 {
            let d = k.add(k.add(k.add(y1, y2), k.mul(a1, x2)), a3);
            if d.is_zero() {
                return ReducedPoint::Infinity;
            }
            let inv = k.inv(d).unwrap();
            let x1sq = k.mul(x1, x1);
            let nl = k.sub(k.add(k.add(k.scale(x1sq, 3), k.scale(k.mul(a2, x1), 2)), a4), k.mul(a1, y1));
            let nn = k.sub(k.add(k.add(k.neg(k.mul(x1sq, x1)), k.mul(a4, x1)), k.scale(a6, 2)), k.mul(a3, y1));
            (k.mul(nl, inv), k.mul(nn, inv))
        } else {
            let inv = k.inv(k.sub(x2, x1)).unwrap();
            (k.mul(k.sub(y2, y1), inv), k.mul(k.sub(k.mul(y1, x2), k.mul(y2, x1)), inv))
        };
        let x3 = k.sub(k.sub(k.sub(k.add(k.mul(lambda, lambda), k.mul(a1, lambda)), a2), x1), x2);
        let y3 = k.sub(k.sub(k.neg(k.mul(k.add(lambda, a1), x3)), nu), a3);
        ReducedPoint::Affine(x3, y3)
    }

    pub fn multiply(&self, mut n: u64, p: &ReducedPoint) -> ReducedPoint {
        let mut acc = ReducedPoint::Infinity;
        let mut base = *p;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// All nonsingular points, by enumeration.
    pub fn points(&self) -> Vec<ReducedPoint> {
        let mut out = vec![ReducedPoint::Infinity];
        let elems: Vec<ResidueElem> = self.k.elements().collect();
        for &x in &elems {
            for &y in &elems {
                if self.equation(x, y).is_zero() && !self.is_singular_at(x, y) {
                    out.push(ReducedPoint::Affine(x, y));
                }
            }
        }
        out
    }
}

/// Euclid's algorithm over F_p on coefficient vectors (lowest degree first);
/// the result is monic.
fn gcd_mod(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    fn trim(mut v: Vec<u64>) -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let lead_inv = inv_mod(*b.last().unwrap(), p).unwrap();
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let c = mul_mod(*a.last().unwrap(), lead_inv, p);
            for (i, bc) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + p - mul_mod(c, *bc, p)) % p;
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(&l) = a.last() {
        let li = inv_mod(l, p).unwrap();
        a.iter_mut().for_each(|c| *c = mul_mod(*c, li, p));
    }
    a
}

/// Result of reducing a point modulo a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PointReduction {
    Point { point: ReducedPoint },
    Singular,
}

/// Image of P modulo a prime of good or multiplicative reduction.
pub fn reduce_point<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>, prime: &PrimeIdeal) -> Result<PointReduction> {
    let info = reduction_type(e, prime.p())?;
    if info.kind == ReductionKind::Additive {
        return Err(Error::Unsupported { p: prime.p(), reason: "additive reduction".into() });
    }
    let red = ReducedCurve::new(e, prime)?;
    let (x, y) = match pt {
        CurvePoint::Infinity => return Ok(PointReduction::Point { point: ReducedPoint::Infinity }),
        CurvePoint::Affine { x, y } => (x, y),
    };
    // for an integral model x and y are integral together
    let (Some(xr), Some(yr)) = (x.residue(prime), y.residue(prime)) else {
        return Ok(PointReduction::Point { point: ReducedPoint::Infinity });
    };
    if info.kind != ReductionKind::Good && red.is_singular_at(xr, yr) {
        return Ok(PointReduction::Singular);
    }
    Ok(PointReduction::Point { point: ReducedPoint::Affine(xr, yr) })
}

/// Parameter z = -x/y of the formal group at P. Where y vanishes the curve
/// relation x/y = (y + a1 x + a3)/(x^2 + a2 x + a4) (valid when a6 = 0 at
/// x = y = 0) is used; `None` means z has a pole at P.
pub fn z_coordinate<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>) -> Result<Option<F>> {
    let (x, y) = match pt {
        CurvePoint::Infinity => return Err(Error::InvalidArgument("z is not defined at the identity".into())),
        CurvePoint::Affine { x, y } => (x, y),
    };
    if let Some(yi) = y.recip() {
        return Ok(Some(x.times(&yi).negated()));
    }
    if !x.is_zero() {
        return Ok(None);
    }
    // x = y = 0
    let num = x.lift(e.a3());
    let den = x.lift(e.a4());
    Ok(den.recip().map(|di| num.times(&di).negated()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelWitness {
    pub in_kernel: bool,
    /// Order of z(P) in uniformizer units; `None` when z has a pole at P.
    pub z_ord: Option<Valuation>,
    pub e: u32,
}

impl KernelWitness {
    /// Order of z normalized so that the value of p is 1.
    pub fn normalized(&self) -> Option<BigRational> {
        match self.z_ord? {
            Valuation::Finite(v) => Some(BigRational::new(v.into(), (self.e as i64).into())),
            Valuation::Infinity => None,
        }
    }
}

/// Whether P reduces to the identity modulo a prime of good reduction.
pub fn in_kernel_of_reduction<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>, prime: &PrimeIdeal) -> Result<KernelWitness> {
    let info = reduction_type(e, prime.p())?;
    if info.kind != ReductionKind::Good {
        return Err(Error::Unsupported { p: prime.p(), reason: "kernel test needs good reduction".into() });
    }
    let ep = prime.e();
    let x = match pt {
        CurvePoint::Infinity => return Ok(KernelWitness { in_kernel: true, z_ord: Some(Valuation::Infinity), e: ep }),
        CurvePoint::Affine { x, .. } => x,
    };
    let z_ord = z_coordinate(e, pt)?.map(|z| z.ord(prime));
    let in_kernel = x.ord(prime) < Valuation::Finite(0);
    Ok(KernelWitness { in_kernel, z_ord, e: ep })
}

/// #E(F_p) for a prime of good reduction, by enumeration over x.
pub fn count_points_mod_p(e: &WeierstrassCurve, p: u64) -> Result<u64> {
    let info = reduction_type(e, p)?;
    if info.kind != ReductionKind::Good {
        return Err(Error::Unsupported { p, reason: "point count needs good reduction".into() });
    }
    let red = ReducedCurve::new(e, &PrimeIdeal::Rational(p))?;
    let a: Vec<u64> = red.a.iter().map(|c| c.c0).collect();
    let mut n = 1u64;
    if p == 2 {
        n += (0..2u64)
            .flat_map(|x| (0..2u64).map(move |y| (x, y)))
            .filter(|&(x, y)| (y * y + a[0] * x * y + a[2] * y + x * x * x + a[1] * x * x + a[3] * x + a[4]).is_multiple_of(2))
            .count() as u64;
    } else {
        for x in 0..p {
            // (2y + a1 x + a3)^2 = 4 (x^3 + a2 x^2 + a4 x + a6) + (a1 x + a3)^2
            let l = (mul_mod(a[0], x, p) + a[2]) % p;
            let cubic = (mul_mod(mul_mod(x, x, p), (x + a[1]) % p, p) + mul_mod(a[3], x, p) + a[4]) % p;
            let disc = (mul_mod(4, cubic, p) + mul_mod(l, l, p)) % p;
            n += if disc == 0 {
                1
            } else if is_square_mod(disc, p) {
                2
            } else {
                0
            };
        }
    }
    let a_p = p as i128 + 1 - n as i128;
    if (a_p * a_p) as f64 > 4.0 * p as f64 + 1e-9 {
        return Err(Error::Invariant(format!("Hasse bound violated at p = {p}: a = {a_p}")));
    }
    Ok(n)
}
