//! Local canonical heights at finite and archimedean places.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::arith::rational::{format_rational, ln_abs};
use crate::arith::Valuation;
use crate::curve::{reduction_type, CurvePoint, ReductionKind, WeierstrassCurve};
use crate::error::{invalid, Error, Result};
use crate::fields::{ArchPlace, BaseField, PrimeIdeal, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlaceKind {
    Archimedean,
    Finite { p: u64, e: u32, f: u32 },
    /// Several finite places whose contributions are only known in total.
    Aggregate,
}

/// A place of the coordinate field together with its local degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Place {
    pub label: String,
    #[serde(flatten)]
    pub kind: PlaceKind,
    pub local_degree: u32,
    pub field_degree: u32,
}

impl Place {
    pub fn archimedean(v: ArchPlace, base: BaseField) -> Self {
        Place { label: v.label(base), kind: PlaceKind::Archimedean, local_degree: v.local_degree(), field_degree: base.degree() }
    }

    pub fn finite(prime: &PrimeIdeal, base: BaseField) -> Self {
        Place {
            label: prime.label(),
            kind: PlaceKind::Finite { p: prime.p(), e: prime.e(), f: prime.f() },
            local_degree: prime.local_degree(),
            field_degree: base.degree(),
        }
    }

    /// [L_w:Q_w]/[L:Q].
    pub fn weight(&self) -> f64 {
        self.local_degree as f64 / self.field_degree as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeightMethod {
    GoodFormula,
    BadNonsingular,
    DuplicationSeries,
    Qseries,
    Residual,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalHeightValue {
    #[serde(serialize_with = "serialize_place_label")]
    pub place: Place,
    pub value: f64,
    pub method: HeightMethod,
    pub weight: f64,
    /// value / log p as an exact rational, at finite places.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt_rational")]
    pub log_p_multiple: Option<BigRational>,
    pub error_bound: f64,
}

fn serialize_place_label<S: Serializer>(p: &Place, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.label)
}

fn serialize_opt_rational<S: Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

impl LocalHeightValue {
    pub fn weighted(&self) -> f64 {
        self.weight * self.value
    }
}

/// λ_w(P) = ½ max(w(1/x), 0) + (1/12) w(Δ) for P reducing to a
/// nonsingular point, where w(t) = (ord(t)/e) log p.
pub fn local_height_finite<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>, prime: &PrimeIdeal) -> Result<LocalHeightValue> {
    e.check(pt)?;
    let (x, y) = match pt {
        CurvePoint::Infinity => return invalid("local height at the identity"),
        CurvePoint::Affine { x, y } => (x, y),
    };
    let base = x.base();
    let p = prime.p();
    let info = reduction_type(e, p)?;
    let ee = prime.e() as i64;
    let ord_x = x.ord(prime);
    if info.kind != ReductionKind::Good && reduces_to_singular(e, x, y, prime) {
        return Err(Error::ResidualRequired { p });
    }
    let pole = match ord_x {
        Valuation::Finite(o) if o < 0 => BigRational::new((-o).into(), (2 * ee).into()),
        _ => BigRational::zero(),
    };
    let disc = BigRational::new(info.v_disc.into(), 12.into());
    let multiple = pole + disc;
    let method = if info.kind == ReductionKind::Good { HeightMethod::GoodFormula } else { HeightMethod::BadNonsingular };
    let value = crate::arith::rational::to_f64(&multiple) * (p as f64).ln();
    let place = Place::finite(prime, base);
    Ok(LocalHeightValue { weight: place.weight(), place, value, method, log_p_multiple: Some(multiple), error_bound: 0.0 })
}

/// P is integral at the prime and both partial derivatives of the
/// equation vanish at its reduction.
pub fn reduces_to_singular<F: Scalar>(e: &WeierstrassCurve, x: &F, y: &F, prime: &PrimeIdeal) -> bool {
    if x.ord(prime) < Valuation::Finite(0) {
        return false;
    }
    let l = |r: &BigRational| x.lift(r);
    let [a1, a2, a3, a4, _] = e.a_invariants();
    let three = x.from_i64_like(3);
    let two = x.from_i64_like(2);
    // 3x^2 + 2 a2 x + a4 - a1 y and 2y + a1 x + a3
    let fx = three.times(x).times(x).plus(&two.times(&l(a2)).times(x)).plus(&l(a4)).minus(&l(a1).times(y));
    let fy = two.times(y).plus(&l(a1).times(x)).plus(&l(a3));
    fx.ord(prime) > Valuation::Finite(0) && fy.ord(prime) > Valuation::Finite(0)
}

/// Archimedean local heights, one per archimedean place of the coordinate
/// field, each within `tolerance`.
pub fn local_height_archimedean<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>, tolerance: f64) -> Result<Vec<LocalHeightValue>> {
    e.check(pt)?;
    let x = match pt {
        CurvePoint::Infinity => return invalid("local height at the identity"),
        CurvePoint::Affine { x, .. } => x,
    };
    let base = x.base();
    let disc_term = (ln_abs(e.discriminant().numer()) - ln_abs(e.discriminant().denom())) / 12.0;
    let mut out = Vec::new();
    for v in base.archimedean_places() {
        let (lam0, err) = archimedean_lambda0(e, x.complex_value(v), x.ln_abs_at(v), tolerance)?;
        let place = Place::archimedean(v, base);
        out.push(LocalHeightValue {
            weight: place.weight(),
            place,
            value: lam0 - disc_term,
            method: HeightMethod::DuplicationSeries,
            log_p_multiple: None,
            error_bound: err,
        });
    }
    Ok(out)
}

const MAX_DOUBLINGS: u32 = 80;

/// λ₀(P) = ½ lim 4^-n log max(|X_n|, |W_n|) along the projective doubling
/// sequence started at (x : 1), evaluated with renormalization at every
/// step. Returns the value and a bound on the truncation error.
pub fn archimedean_lambda0(e: &WeierstrassCurve, x: Complex64, ln_abs_x: f64, tolerance: f64) -> Result<(f64, f64)> {
    if !(tolerance > 0.0) {
        return invalid("tolerance must be positive");
    }
    let b = [e.b2(), e.b4(), e.b6(), e.b8()].map(crate::arith::rational::to_f64);
    let (b2, b4, b6, b8) = (b[0], b[1], b[2], b[3]);
    let s0 = ln_abs_x.max(0.0);
    let (mut cx, mut cw) = if ln_abs_x <= 0.0 {
        (x, Complex64::new(1.0, 0.0))
    } else if x.is_finite() && x.norm() > 0.0 {
        (x / x.norm(), Complex64::new((-ln_abs_x).exp(), 0.0))
    } else {
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    };
    let mut sum = s0;
    let mut smax: f64 = 1.0;
    let mut scale = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        let x2 = cx * cx;
        let w2 = cw * cw;
        let xw = cx * cw;
        let nx = x2 * x2 - b4 * xw * xw - 2.0 * b6 * xw * w2 - b8 * w2 * w2;
        let nw = 4.0 * x2 * xw + b2 * xw * xw + 2.0 * b4 * xw * w2 + b6 * w2 * w2;
        let m = nx.norm().max(nw.norm());
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::Numeric("doubling series lost precision".into()));
        }
        let s = m.ln();
        scale *= 0.25;
        sum += scale * s;
        smax = smax.max(s.abs());
        cx = nx / m;
        cw = nw / m;
        // remaining terms are at most smax·scale/3 in total
        let tail = 0.5 * smax * scale / 3.0;
        if tail < tolerance * 0.1 {
            return Ok((0.5 * sum, tail + 1e-15 * (1.0 + sum.abs())));
        }
    }
    Err(Error::Numeric(format!("doubling series did not reach tolerance {tolerance:e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{rat, to_f64};
    use crate::fields::QuadraticField;

    fn e37() -> WeierstrassCurve {
        WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap()
    }

    /// Tate's series after shifting x so that every real point has x' ≥ 1:
    /// λ₀ = ½ log x' + (1/8) Σ 4^-n log z(t_n), t = 1/x'.
    fn tate_series(e: &WeierstrassCurve, x: f64) -> f64 {
        let [b2, b4, b6, b8] = [e.b2(), e.b4(), e.b6(), e.b8()].map(to_f64);
        // all real roots of 4x^3 + b2 x^2 + 2 b4 x + b6 exceed -10 for the test curves
        let r = -10.0f64;
        let bb2 = b2 + 12.0 * r;
        let bb4 = b4 + r * b2 + 6.0 * r * r;
        let bb6 = b6 + 2.0 * r * b4 + r * r * b2 + 4.0 * r.powi(3);
        let bb8 = b8 + 3.0 * r * b6 + 3.0 * r * r * b4 + r.powi(3) * b2 + 3.0 * r.powi(4);
        let mut t = 1.0 / (x - r);
        let mut sum = 0.0;
        let mut scale = 1.0;
        for _ in 0..40 {
            let w = 4.0 * t + bb2 * t * t + 2.0 * bb4 * t.powi(3) + bb6 * t.powi(4);
            let z = 1.0 - bb4 * t * t - 2.0 * bb6 * t.powi(3) - bb8 * t.powi(4);
            sum += scale * z.ln();
            scale *= 0.25;
            t = w / z;
        }
        0.5 * (x - r).ln() + sum / 8.0
    }

    #[test]
    fn duplication_series_matches_shifted_tate_series() {
        let e = e37();
        for x in [rat(0, 1), rat(1, 1), rat(-1, 1), rat(1, 4), rat(6, 1), rat(-5, 9), rat(21, 25), rat(1000, 1)] {
            let xf = to_f64(&x);
            let (lam, err) = archimedean_lambda0(&e, Complex64::new(xf, 0.0), xf.abs().ln(), 1e-12).unwrap();
            assert!(err < 1e-12);
            assert!((lam - tate_series(&e, xf)).abs() < 1e-10, "x={x}: {lam} vs {}", tate_series(&e, xf));
        }
    }

    #[test]
    fn lambda0_at_generator() {
        let (lam, _) = archimedean_lambda0(&e37(), Complex64::new(0.0, 0.0), f64::NEG_INFINITY, 1e-12).unwrap();
        assert!((lam - 0.0255557041).abs() < 1e-9, "{lam}");
    }

    #[test]
    fn finite_examples() {
        let e = e37();
        let p = CurvePoint::from_i64(0, 0);
        let v5 = local_height_finite(&e, &p, &PrimeIdeal::Rational(5)).unwrap();
        assert_eq!(v5.value, 0.0);
        assert_eq!(v5.method, HeightMethod::GoodFormula);
        let v37 = local_height_finite(&e, &p, &PrimeIdeal::Rational(37)).unwrap();
        assert_eq!(v37.method, HeightMethod::BadNonsingular);
        assert_eq!(v37.log_p_multiple, Some(rat(1, 12)));
        let five_p = CurvePoint::affine(rat(1, 4), rat(-5, 8));
        let v2 = local_height_finite(&e, &five_p, &PrimeIdeal::Rational(2)).unwrap();
        assert_eq!(v2.log_p_multiple, Some(rat(1, 1)));
        assert!((v2.value - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn singular_reduction_requires_residual() {
        let e = e37();
        let k = QuadraticField::new(481).unwrap();
        let pt = CurvePoint::affine(k.from_rational(rat(5, 1)), k.element(rat(-1, 2), rat(1, 2)));
        let primes = BaseField::Quadratic(k).primes_above(37).unwrap();
        assert!(primes.iter().any(|q| matches!(local_height_finite(&e, &pt, q), Err(Error::ResidualRequired { p: 37 }))));
    }

    #[test]
    fn quadratic_points_get_one_value_per_embedding() {
        let e = e37();
        let k = QuadraticField::new(97).unwrap();
        let pt = CurvePoint::affine(k.from_rational(rat(3, 1)), k.element(rat(-1, 2), rat(1, 2)));
        let vals = local_height_archimedean(&e, &pt, 1e-10).unwrap();
        assert_eq!(vals.len(), 2);
        assert!((vals.iter().map(|v| v.weight).sum::<f64>() - 1.0).abs() < 1e-15);
        // x = 3 is rational, so both embeddings see the same x
        assert!((vals[0].value - vals[1].value).abs() < 1e-12);
        let k = QuadraticField::new(-3).unwrap();
        let pt = CurvePoint::affine(k.from_rational(rat(1, 4)), k.from_rational(rat(-5, 8)));
        let vals = local_height_archimedean(&e, &pt, 1e-10).unwrap();
        assert_eq!(vals.len(), 1);
        assert_eq!(vals[0].weight, 1.0);
        let direct = local_height_archimedean(&e, &CurvePoint::affine(rat(1, 4), rat(-5, 8)), 1e-10).unwrap();
        assert!((vals[0].value - direct[0].value).abs() < 1e-12);
    }
}
