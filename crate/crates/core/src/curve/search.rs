//! Small points: rational points with bounded x, and quadratic points
//! obtained by solving for y at integer x.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::point::CurvePoint;
use super::weierstrass::WeierstrassCurve;
use crate::arith::primes::{exact_sqrt, squarefree_part};
use crate::error::Result;
use crate::fields::{QuadraticElement, QuadraticField};

/// (a1 x + a3)^2 + 4 (x^3 + a2 x^2 + a4 x + a6): the discriminant of the
/// equation as a quadratic in y.
pub fn y_discriminant(e: &WeierstrassCurve, x: &BigRational) -> BigRational {
    let [a1, a2, a3, a4, a6] = e.a_invariants();
    let lin = a1 * x + a3;
    let f = x * x * x + a2 * x * x + a4 * x + a6;
    &lin * &lin + BigRational::from_integer(4.into()) * f
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    Some(BigRational::new(exact_sqrt(r.numer())?, exact_sqrt(r.denom())?))
}

/// Affine rational points with x = n/d, |n| ≤ `numer_bound`,
/// 1 ≤ d ≤ `denom_bound`, sorted by x then y.
pub fn search_rational_points(e: &WeierstrassCurve, numer_bound: i64, denom_bound: i64) -> Vec<CurvePoint<BigRational>> {
    let two = BigRational::from_integer(2.into());
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for d in 1..=denom_bound {
        for n in -numer_bound..=numer_bound {
            if n.gcd(&d) != 1 {
                continue;
            }
            let x = BigRational::new(n.into(), d.into());
            let Some(s) = rational_sqrt(&y_discriminant(e, &x)) else { continue };
            let lin = e.a1() * &x + e.a3();
            for y in [(-&lin + &s) / &two, (-&lin - &s) / &two] {
                if seen.insert((x.clone(), y.clone())) {
                    out.push(CurvePoint::affine(x.clone(), y));
                }
            }
        }
    }
    out.sort_by(|a, b| (a.x(), a.y()).cmp(&(b.x(), b.y())));
    out
}

/// For each integer x in the range whose y-discriminant is not a rational
/// square, the point (x, (-(a1 x + a3) + √D)/2) over Q(√D).
pub fn quadratic_x_scan(e: &WeierstrassCurve, lo: i64, hi: i64) -> Result<Vec<CurvePoint<QuadraticElement>>> {
    let mut out = Vec::new();
    for xi in lo..=hi {
        let x = BigRational::from_integer(xi.into());
        let disc = y_discriminant(e, &x);
        if disc.is_zero() || rational_sqrt(&disc).is_some() {
            continue;
        }
        // disc = num/den = (num·den)/den^2
        let m: BigInt = disc.numer() * disc.denom();
        let d = squarefree_part(&m)?;
        let s2 = BigRational::new(&m / &d, BigInt::from(1));
        let s = rational_sqrt(&s2).expect("square cofactor") / BigRational::from_integer(disc.denom().clone());
        let Ok(d) = i64::try_from(&d) else { continue };
        let k = QuadraticField::new(d)?;
        let lin = e.a1() * &x + e.a3();
        let half = BigRational::new(1.into(), 2.into());
        let y = k.element(-&lin * &half, s * &half);
        out.push(CurvePoint::affine(k.from_rational(x), y));
    }
    Ok(out)
}
