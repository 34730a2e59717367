//! Frobenius at primes of good reduction: the characteristic polynomial
//! X² − aX + p, its action on points through the group ring, annihilation
//! modulo p and the resultant certificate that keeps nontorsion points
//! nontorsion.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::poly::{bezout_integer, resultant, Bezout, IntPolynomial};
use crate::arith::primes::require_prime;
use crate::curve::{count_points_mod_p, in_kernel_of_reduction, reduction_type, torsion_test, CurvePoint, ReductionKind, TorsionConfig, TorsionOutcome, WeierstrassCurve};
use crate::error::{invalid, Error, Result};
use crate::fields::{BaseField, GaloisAutomorphism, Scalar, Splitting};
use crate::heights::local_height_finite;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusData {
    pub p: u64,
    pub a: i64,
    pub phi: IntPolynomial,
    #[serde(rename = "Np")]
    pub n_p: u64,
}

pub fn char_poly_frobenius(e: &WeierstrassCurve, p: u64) -> Result<FrobeniusData> {
    require_prime(p)?;
    let n_p = count_points_mod_p(e, p)?;
    let a = p as i64 + 1 - n_p as i64;
    if (a * a) as u128 > 4 * p as u128 {
        return Err(Error::Invariant(format!("Hasse bound violated at p = {p}: a = {a}")));
    }
    let phi = IntPolynomial::frobenius(a, p);
    debug_assert_eq!(phi.eval(&BigInt::from(1)), BigInt::from(n_p));
    Ok(FrobeniusData { p, a, phi, n_p })
}

/// Largest modulus of a complex root of X² − aX + p.
pub fn root_modulus(f: &FrobeniusData) -> f64 {
    let (a, p) = (f.a as f64, f.p as f64);
    let disc = a * a - 4.0 * p;
    if disc < 0.0 {
        p.sqrt()
    } else {
        (a.abs() + disc.sqrt()) / 2.0
    }
}

/// An element Σ cᵢ σⁱ of Z[⟨σ⟩].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupRingAction {
    pub polynomial: IntPolynomial,
    pub automorphism: GaloisAutomorphism,
}

impl GroupRingAction {
    pub fn new(polynomial: IntPolynomial, automorphism: GaloisAutomorphism) -> Self {
        GroupRingAction { polynomial, automorphism }
    }
}

fn act<F: Scalar>(g: &GaloisAutomorphism, pt: &CurvePoint<F>) -> Result<CurvePoint<F>> {
    match g {
        GaloisAutomorphism::Identity => Ok(pt.clone()),
        GaloisAutomorphism::QuadraticConjugation => Ok(pt.conjugate()),
        GaloisAutomorphism::CyclotomicPower { .. } => invalid("cyclotomic automorphism applied to a point over a quadratic field"),
    }
}

/// Σ cᵢ σⁱ(P) by the group law.
pub fn apply_group_ring<F: Scalar>(e: &WeierstrassCurve, action: &GroupRingAction, pt: &CurvePoint<F>) -> Result<CurvePoint<F>> {
    e.check(pt)?;
    let mut acc = CurvePoint::Infinity;
    let mut conj = pt.clone();
    for c in action.polynomial.coeffs() {
        if !c.is_zero() {
            acc = e.add_points(&acc, &e.multiply(c, &conj));
        }
        conj = act(&action.automorphism, &conj)?;
    }
    Ok(acc)
}

/// Frobenius at the primes above p on the field of definition of P:
/// identity over Q and at split primes, conjugation at inert ones.
pub fn frobenius_automorphism(base: BaseField, p: u64) -> Result<GaloisAutomorphism> {
    match base {
        BaseField::Rational => Ok(GaloisAutomorphism::Identity),
        BaseField::Quadratic(k) => match k.splitting_type(p)?.splitting() {
            Splitting::Split => Ok(GaloisAutomorphism::Identity),
            Splitting::Inert => Ok(GaloisAutomorphism::QuadraticConjugation),
            Splitting::Ramified => Err(Error::Unsupported { p, reason: format!("{p} ramifies in {k}; use the ramified verifier") }),
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaceCheck {
    pub place: String,
    pub e: u32,
    pub in_kernel: bool,
    pub lambda: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum AnnihilationOutcome {
    /// Φ(σ)P is a nonzero point in the kernel of reduction everywhere above p.
    Kernel,
    /// Φ(σ)P = O, so P is torsion.
    Torsion { order: u32 },
    /// Φ(σ)P is nonzero but fails the kernel test or the height bound.
    Violation,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilationReport {
    pub p: u64,
    pub a: i64,
    #[serde(rename = "Np")]
    pub n_p: u64,
    pub automorphism: GaloisAutomorphism,
    pub image: String,
    #[serde(rename = "kernel")]
    pub in_kernel: bool,
    /// Smallest local height of Φ(σ)P at the primes above p.
    #[serde(rename = "lambda")]
    pub local_value: f64,
    /// (log p)/e.
    pub bound: f64,
    #[serde(flatten)]
    pub outcome: AnnihilationOutcome,
    pub places: Vec<PlaceCheck>,
}

impl AnnihilationReport {
    pub fn passed(&self) -> bool {
        !matches!(self.outcome, AnnihilationOutcome::Violation)
    }
}

/// Computes Q = Φ_p(σ)P and checks that Q lies in the kernel of reduction
/// at every prime above p with λ(Q) ≥ (log p)/e there.
pub fn verify_annihilation<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>, p: u64) -> Result<AnnihilationReport> {
    e.check(pt)?;
    let Some(base) = pt.base() else { return invalid("annihilation test at the identity") };
    let frob = char_poly_frobenius(e, p)?;
    let sigma = frobenius_automorphism(base, p)?;
    let q = apply_group_ring(e, &GroupRingAction::new(frob.phi.clone(), sigma), pt)?;
    let mut report = AnnihilationReport {
        p,
        a: frob.a,
        n_p: frob.n_p,
        automorphism: sigma,
        image: q.to_string(),
        in_kernel: true,
        local_value: f64::INFINITY,
        bound: (p as f64).ln(),
        outcome: AnnihilationOutcome::Kernel,
        places: Vec::new(),
    };
    if q.is_infinity() {
        let order = match torsion_test(e, pt, &TorsionConfig::default())? {
            TorsionOutcome::Torsion { order } => order,
            other => return Err(Error::Invariant(format!("Φ(σ)P = O but the torsion search gave {other:?}"))),
        };
        report.outcome = AnnihilationOutcome::Torsion { order };
        return Ok(report);
    }
    let mut ok = true;
    for prime in base.primes_above(p)? {
        let witness = in_kernel_of_reduction(e, &q, &prime)?;
        let lambda = local_height_finite(e, &q, &prime)?.value;
        let bound = (p as f64).ln() / prime.e() as f64;
        ok &= witness.in_kernel && lambda >= bound - 1e-12;
        report.in_kernel &= witness.in_kernel;
        report.local_value = report.local_value.min(lambda);
        report.bound = report.bound.min(bound);
        report.places.push(PlaceCheck { place: prime.label(), e: prime.e(), in_kernel: witness.in_kernel, lambda, bound });
    }
    if !ok {
        report.outcome = AnnihilationOutcome::Violation;
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct NontorsionCertificate {
    pub p: u64,
    pub m: usize,
    #[serde(serialize_with = "crate::arith::rational::serialize_bigint")]
    pub resultant: BigInt,
    /// a Φ + b (X^m − 1) = r with r dividing the resultant.
    pub bezout: Bezout,
    pub identity_holds: bool,
    /// Whether Φ(σ)P = O, in which case P is killed by r.
    pub image_is_identity: bool,
}

/// Checks rP = a(σ)Φ(σ)P + b(σ)(σ^m − 1)P for σ the Frobenius at p on the
/// field of definition of P, whose order divides m.
pub fn nontorsion_certificate<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>, p: u64, m: usize) -> Result<NontorsionCertificate> {
    e.check(pt)?;
    if m == 0 {
        return invalid("m must be positive");
    }
    let base = pt.base().unwrap_or(BaseField::Rational);
    let sigma = frobenius_automorphism(base, p)?;
    if !m.is_multiple_of(sigma.order()) {
        return invalid(format!("σ has order {} which does not divide m = {m}", sigma.order()));
    }
    let frob = char_poly_frobenius(e, p)?;
    let cyc = IntPolynomial::x_pow_minus_one(m);
    let res = resultant(&frob.phi, &cyc)?;
    if res.is_zero() {
        return Err(Error::Invariant(format!("resultant(Φ_{p}, X^{m} - 1) vanished")));
    }
    let bez = bezout_integer(&frob.phi, &cyc)?;
    if !(&res % &bez.r).is_zero() {
        return Err(Error::Invariant("Bezout constant does not divide the resultant".into()));
    }
    let image = apply_group_ring(e, &GroupRingAction::new(frob.phi.clone(), sigma), pt)?;
    let moved = apply_group_ring(e, &GroupRingAction::new(cyc, sigma), pt)?;
    let lhs = e.multiply(&bez.r, pt);
    let rhs = e.add_points(
        &apply_group_ring(e, &GroupRingAction::new(bez.a.clone(), sigma), &image)?,
        &apply_group_ring(e, &GroupRingAction::new(bez.b.clone(), sigma), &moved)?,
    );
    Ok(NontorsionCertificate {
        p,
        m,
        resultant: res.abs(),
        identity_holds: lhs == rhs,
        image_is_identity: image.is_infinity(),
        bezout: bez,
    })
}

/// Good primes up to `bound` for the curve.
pub fn good_primes(e: &WeierstrassCurve, bound: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for p in crate::arith::primes::primes_up_to(bound) {
        if reduction_type(e, p)?.kind == ReductionKind::Good {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use crate::curve::ReducedCurve;
    use crate::fields::{PrimeIdeal, QuadraticField};
    use proptest::prelude::*;

    fn e37() -> WeierstrassCurve {
        WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap()
    }

    /// #E(F_p) by testing every pair (x, y).
    fn brute_count(a: [i64; 5], p: i64) -> i64 {
        let m = |v: i64| v.rem_euclid(p);
        let mut n = 1;
        for x in 0..p {
            for y in 0..p {
                if m(y * y + a[0] * x * y + a[2] * y - x * x * x - a[1] * x * x - a[3] * x - a[4]) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn traces_match_exhaustive_counts() {
        let f = char_poly_frobenius(&e37(), 2).unwrap();
        assert_eq!((f.a, f.n_p), (-2, 5));
        assert_eq!(f.phi, IntPolynomial::from_i64(&[2, 2, 1]));
        let f = char_poly_frobenius(&e37(), 3).unwrap();
        assert_eq!((f.a, f.n_p), (-3, 7));
        assert_eq!(f.phi, IntPolynomial::from_i64(&[3, 3, 1]));
        let e = WeierstrassCurve::from_i64([0, 0, 0, -1, 0]).unwrap();
        let f = char_poly_frobenius(&e, 3).unwrap();
        assert_eq!((f.a, f.n_p), (0, 4));
        assert_eq!(f.phi, IntPolynomial::from_i64(&[3, 0, 1]));
        for a in [[0, 0, 1, -1, 0], [0, -1, 1, -10, -20], [1, 0, 0, -1, 0], [0, 0, 0, -1, 0]] {
            let e = WeierstrassCurve::from_i64(a).unwrap();
            for p in good_primes(&e, 60).unwrap() {
                assert_eq!(char_poly_frobenius(&e, p).unwrap().n_p as i64, brute_count(a, p as i64), "{a:?} p={p}");
            }
        }
        assert!(char_poly_frobenius(&e37(), 37).is_err());
    }

    #[test]
    fn roots_have_modulus_sqrt_p() {
        let e = e37();
        for p in good_primes(&e, 200).unwrap() {
            let f = char_poly_frobenius(&e, p).unwrap();
            assert!((f.a as f64).abs() <= 2.0 * (p as f64).sqrt());
            assert!((root_modulus(&f) - (p as f64).sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn group_ring_examples() {
        let e = e37();
        let g = CurvePoint::from_i64(0, 0);
        let phi = char_poly_frobenius(&e, 2).unwrap().phi;
        let q = apply_group_ring(&e, &GroupRingAction::new(phi, GaloisAutomorphism::Identity), &g).unwrap();
        assert_eq!(q, CurvePoint::affine(rat(1, 4), rat(-5, 8)));
        let x_minus_1 = GroupRingAction::new(IntPolynomial::from_i64(&[-1, 1]), GaloisAutomorphism::Identity);
        assert!(apply_group_ring(&e, &x_minus_1, &g).unwrap().is_infinity());

        let k = QuadraticField::new(97).unwrap();
        let pt = CurvePoint::affine(k.from_rational(rat(3, 1)), k.element(rat(-1, 2), rat(1, 2)));
        let sigma = GroupRingAction::new(IntPolynomial::from_i64(&[0, 1]), GaloisAutomorphism::QuadraticConjugation);
        assert_eq!(apply_group_ring(&e, &sigma, &pt).unwrap(), pt.conjugate());
        let cyc = GroupRingAction::new(IntPolynomial::from_i64(&[0, 1]), GaloisAutomorphism::cyclotomic_power(5, 2).unwrap());
        assert!(apply_group_ring(&e, &cyc, &pt).is_err());
    }

    #[test]
    fn annihilation_over_q() {
        let e = e37();
        let g = CurvePoint::from_i64(0, 0);
        let r = verify_annihilation(&e, &g, 2).unwrap();
        assert!(r.in_kernel && r.passed());
        assert_eq!(r.image, "(1/4, -5/8)");
        assert!((r.local_value - 2f64.ln()).abs() < 1e-15);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["Np"], 5);
        assert_eq!(json["kernel"], true);
        let r = verify_annihilation(&e, &g, 3).unwrap();
        assert!(r.in_kernel && r.local_value >= 3f64.ln());
        let e = WeierstrassCurve::from_i64([0, 0, 0, -1, 0]).unwrap();
        let r = verify_annihilation(&e, &CurvePoint::from_i64(0, 0), 3).unwrap();
        assert!(matches!(r.outcome, AnnihilationOutcome::Torsion { order: 2 }));
    }

    #[test]
    fn annihilation_over_quadratic_fields() {
        let e = e37();
        let k = QuadraticField::new(97).unwrap();
        let pt = CurvePoint::affine(k.from_rational(rat(3, 1)), k.element(rat(-1, 2), rat(1, 2)));
        // 5 is inert in Q(√97), 3 splits
        for (p, sigma) in [(5, GaloisAutomorphism::QuadraticConjugation), (3, GaloisAutomorphism::Identity)] {
            let r = verify_annihilation(&e, &pt, p).unwrap();
            assert_eq!(r.automorphism, sigma);
            assert!(r.passed() && r.in_kernel, "p={p}: {r:?}");
            assert!(r.local_value >= (p as f64).ln());
        }
        // 97 ramifies
        assert!(matches!(verify_annihilation(&e, &pt, 97), Err(Error::Unsupported { .. })));
    }

    /// The reduction of Φ(σ)P is the identity in E(F_q), checked with the
    /// reduced group law.
    #[test]
    fn reduction_of_image_is_identity() {
        let e = e37();
        let g = CurvePoint::from_i64(0, 0);
        for p in good_primes(&e, 50).unwrap() {
            let red = ReducedCurve::new(&e, &PrimeIdeal::Rational(p)).unwrap();
            let f = char_poly_frobenius(&e, p).unwrap();
            let gp = match crate::curve::reduce_point(&e, &g, &PrimeIdeal::Rational(p)).unwrap() {
                crate::curve::PointReduction::Point { point } => point,
                _ => unreachable!(),
            };
            assert_eq!(red.multiply(f.n_p, &gp), crate::curve::ReducedPoint::Infinity, "p={p}");
        }
    }

    #[test]
    fn certificates() {
        let e = e37();
        let g = CurvePoint::from_i64(0, 0);
        let c = nontorsion_certificate(&e, &g, 3, 1).unwrap();
        assert_eq!(c.resultant, 7.into());
        assert_eq!(c.bezout.r, 7.into());
        assert!(c.identity_holds && !c.image_is_identity);

        let k5 = QuadraticField::new(5).unwrap();
        let lifted = CurvePoint::affine(k5.from_rational(rat(0, 1)), k5.from_rational(rat(0, 1)));
        let c = nontorsion_certificate(&e, &lifted, 2, 2).unwrap();
        // resultant(X² + 2X + 2, X² − 1) = Φ(1)Φ(−1) = 5
        assert_eq!(c.resultant, 5.into());
        assert!(c.identity_holds);

        let k = QuadraticField::new(97).unwrap();
        let pt = CurvePoint::affine(k.from_rational(rat(3, 1)), k.element(rat(-1, 2), rat(1, 2)));
        let c = nontorsion_certificate(&e, &pt, 5, 2).unwrap();
        assert!(c.identity_holds);
        assert!(nontorsion_certificate(&e, &pt, 5, 3).is_err());

        let e = WeierstrassCurve::from_i64([0, 0, 0, -1, 0]).unwrap();
        let c = nontorsion_certificate(&e, &CurvePoint::from_i64(0, 0), 3, 1).unwrap();
        assert!(c.identity_holds && c.image_is_identity);
    }

    #[test]
    fn resultants_never_vanish() {
        let e = e37();
        for p in good_primes(&e, 50).unwrap() {
            let f = char_poly_frobenius(&e, p).unwrap();
            for m in 1..=24 {
                assert!(!resultant(&f.phi, &IntPolynomial::x_pow_minus_one(m)).unwrap().is_zero(), "p={p} m={m}");
            }
        }
    }

    proptest! {
        #[test]
        fn group_ring_action_is_additive(f in proptest::collection::vec(-3i64..4, 0..4), g in proptest::collection::vec(-3i64..4, 0..4)) {
            let e = e37();
            let k = QuadraticField::new(97).unwrap();
            let pt = CurvePoint::affine(k.from_rational(rat(3, 1)), k.element(rat(-1, 2), rat(1, 2)));
            let s = GaloisAutomorphism::QuadraticConjugation;
            let (fp, gp) = (IntPolynomial::from_i64(&f), IntPolynomial::from_i64(&g));
            let sum = apply_group_ring(&e, &GroupRingAction::new(&fp + &gp, s), &pt).unwrap();
            let parts = e.add_points(
                &apply_group_ring(&e, &GroupRingAction::new(fp, s), &pt).unwrap(),
                &apply_group_ring(&e, &GroupRingAction::new(gp, s), &pt).unwrap(),
            );
            prop_assert_eq!(sum, parts);
        }
    }
}
