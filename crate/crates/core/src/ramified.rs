//! Ramified primes: the inertia congruence (τα)^p ≡ α^p mod p in
//! cyclotomic rings, the [p](τ - 1)² valuation bound for points over
//! ramified quadratic fields, and the polynomial identity that moves
//! torsion out of the way in the main argument.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::poly::IntPolynomial;
use crate::arith::primes::require_prime;
use crate::arith::Valuation;
use crate::curve::{in_kernel_of_reduction, reduction_type, z_coordinate, CurvePoint, ReductionKind, WeierstrassCurve};
use crate::curve::torsion::DEFAULT_TORSION_BOUND;
use crate::error::{invalid, Error, Result};
use crate::fields::cyclotomic::euler_phi;
use crate::fields::{divides_in_cyclotomic, CyclotomicElement, GaloisAutomorphism, PrimeIdeal, QuadraticElement, QuadraticField, Scalar, Splitting};
use crate::heights::local_height_finite;

/// Largest coordinate size, in decimal digits, allowed for [p](τ-1)²P.
pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;

/// Exhaustive sweeps run when φ(m) is at most this.
const EXHAUSTIVE_MAX_PHI: usize = 6;

/// Coefficient range for random samples.
const SAMPLE_RANGE: i64 = 50;

/// τ: ζ_m ↦ ζ_m^k with k the smallest integer > 1 such that τ fixes
/// ζ_{m/p} and moves ζ_m, so τ(ζ_m) = ω ζ_m with ω a primitive p-th root of
/// unity.
pub fn inertia_tau(m: usize, p: u64) -> Result<GaloisAutomorphism> {
    require_prime(p)?;
    let pu = p as usize;
    if !m.is_multiple_of(pu) {
        return invalid(format!("{p} does not divide m = {m}"));
    }
    if m <= pu {
        return invalid(format!("m = {m} must exceed p = {p}"));
    }
    let step = m / pu;
    (2..m)
        .find(|&k| k % step == 1 % step && k.gcd(&m) == 1)
        .map(|k| GaloisAutomorphism::CyclotomicPower { m, k })
        .ok_or_else(|| Error::Invariant(format!("no inertia element for m = {m}, p = {p}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceFailure {
    pub element: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceWitness {
    pub m: usize,
    pub p: u64,
    pub tau: GaloisAutomorphism,
    pub exhaustive_checked: usize,
    pub random_checked: usize,
    pub seed: u64,
    pub failures: Vec<CongruenceFailure>,
    pub all_pass: bool,
}

fn congruence_holds(alpha: &CyclotomicElement, k: usize, p: u64) -> Result<bool> {
    let lhs = alpha.power_map(k).pow(p);
    let rhs = alpha.pow(p);
    divides_in_cyclotomic(&(&lhs - &rhs), &BigInt::from(p))
}

/// Checks p | (τα)^p - α^p on every α with coefficients in {0,1,2} in the
/// integral basis (when φ(m) is small) and on `sample_count` seeded random
/// α with coefficients in [-50, 50].
pub fn verify_power_congruence(m: usize, p: u64, sample_count: usize, seed: u64) -> Result<CongruenceWitness> {
    let tau = inertia_tau(m, p)?;
    let GaloisAutomorphism::CyclotomicPower { k, .. } = tau else { unreachable!() };
    let n = euler_phi(m);
    let mut failures = Vec::new();
    let mut check = |coeffs: Vec<i64>| -> Result<()> {
        let alpha = CyclotomicElement::from_i64(m, &coeffs)?;
        if !congruence_holds(&alpha, k, p)? {
            failures.push(CongruenceFailure { element: alpha.to_string() });
        }
        Ok(())
    };
    let mut exhaustive = 0;
    if n <= EXHAUSTIVE_MAX_PHI {
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let coeffs: Vec<i64> = (0..n)
                .map(|_| {
                    let d = (c % 3) as i64;
                    c /= 3;
                    d
                })
                .collect();
            check(coeffs)?;
            exhaustive += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_count {
        let coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(-SAMPLE_RANGE..=SAMPLE_RANGE)).collect();
        check(coeffs)?;
    }
    Ok(CongruenceWitness {
        m,
        p,
        tau,
        exhaustive_checked: exhaustive,
        random_checked: sample_count,
        seed,
        all_pass: failures.is_empty(),
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum RamifiedOutcome {
    /// P' ≠ O; `bound_met` says whether v(z(P')) ≥ e.
    Checked { bound_met: bool },
    /// τP = P: the point is defined over Q and P' = O.
    Descent,
    /// P has finite order, found before the check.
    Torsion { order: u32 },
    /// (τ - 1)P ≠ O but P' = O: (τ - 1)²P has p-power order.
    PPowerOrder,
}

#[derive(Clone, Debug, Serialize)]
pub struct RamifiedCheckReport {
    pub curve: String,
    pub field: String,
    pub point: String,
    pub p: u64,
    /// (τ - 1)P reduces to O at the ramified prime.
    pub difference_in_kernel: Option<bool>,
    /// v(z((τ - 1)P)) in uniformizer units.
    pub difference_valuation: Option<i64>,
    #[serde(rename = "Pprime")]
    pub p_prime: Option<String>,
    pub p_prime_digits: Option<u64>,
    /// v(z(P')) in uniformizer units.
    pub valuation: Option<i64>,
    /// λ(P') at the ramified prime, compared with log p.
    pub lambda: Option<f64>,
    pub bound: f64,
    #[serde(flatten)]
    pub outcome: RamifiedOutcome,
}

impl RamifiedCheckReport {
    pub fn bound_met(&self) -> bool {
        match self.outcome {
            RamifiedOutcome::Checked { bound_met } => bound_met,
            _ => true,
        }
    }
}

fn digits<F: Scalar>(pt: &CurvePoint<F>) -> u64 {
    // bits · log10(2), rounded up
    (pt.bits() as f64 * std::f64::consts::LOG10_2).ceil() as u64
}

/// [n]P by double-and-add, failing once a coordinate passes the digit
/// budget.
fn multiply_within_budget<F: Scalar>(e: &WeierstrassCurve, n: u64, pt: &CurvePoint<F>, budget: u64) -> Result<CurvePoint<F>> {
    let mut acc = CurvePoint::Infinity;
    for i in (0..64 - n.leading_zeros()).rev() {
        acc = e.double_point(&acc);
        if (n >> i) & 1 == 1 {
            acc = e.add_points(&acc, pt);
        }
        if digits(&acc) > budget {
            return Err(Error::Resource(format!("[{n}]P exceeds {budget} digits")));
        }
    }
    Ok(acc)
}

fn small_order<F: Scalar>(e: &WeierstrassCurve, pt: &CurvePoint<F>) -> Option<u32> {
    let mut q = pt.clone();
    for n in 1..=DEFAULT_TORSION_BOUND {
        if q.is_infinity() {
            return Some(n);
        }
        q = e.add_points(&q, pt);
    }
    None
}

fn uniformizer_ord(v: Valuation) -> Option<i64> {
    match v {
        Valuation::Finite(o) => Some(o),
        Valuation::Infinity => None,
    }
}

/// Checks that P' = [p](τ - 1)²P has v(z(P')) ≥ 2 at the prime above a
/// ramified p, τ the conjugation of Q(√d).
pub fn ramified_point_check(e: &WeierstrassCurve, pt: &CurvePoint<QuadraticElement>, p: u64) -> Result<RamifiedCheckReport> {
    ramified_point_check_with_budget(e, pt, p, DEFAULT_DIGIT_BUDGET)
}

pub fn ramified_point_check_with_budget(
    e: &WeierstrassCurve,
    pt: &CurvePoint<QuadraticElement>,
    p: u64,
    digit_budget: u64,
) -> Result<RamifiedCheckReport> {
    e.check(pt)?;
    let Some(x) = pt.x() else { return invalid("ramified check at the identity") };
    let k: QuadraticField = x.field();
    let prime = k.splitting_type(p)?;
    if prime.splitting() != Splitting::Ramified {
        return invalid(format!("{p} is not ramified in {k}"));
    }
    if reduction_type(e, p)?.kind != ReductionKind::Good {
        return invalid(format!("the curve has bad reduction at {p}"));
    }
    let prime = PrimeIdeal::Quadratic(prime);
    let mut report = RamifiedCheckReport {
        curve: e.to_string(),
        field: k.to_string(),
        point: pt.to_string(),
        p,
        difference_in_kernel: None,
        difference_valuation: None,
        p_prime: None,
        p_prime_digits: None,
        valuation: None,
        lambda: None,
        bound: (p as f64).ln(),
        outcome: RamifiedOutcome::Descent,
    };
    if let Some(order) = small_order(e, pt) {
        report.outcome = RamifiedOutcome::Torsion { order };
        return Ok(report);
    }
    let diff = e.sub_points(pt, &pt.conjugate());
    if diff.is_infinity() {
        return Ok(report);
    }
    let w = in_kernel_of_reduction(e, &diff, &prime)?;
    report.difference_in_kernel = Some(w.in_kernel);
    report.difference_valuation = w.z_ord.and_then(uniformizer_ord);
    if !w.in_kernel {
        return Err(Error::VerificationFailed(format!("(τ - 1)P does not reduce to O at {prime}")));
    }
    let second = e.sub_points(&diff, &diff.conjugate());
    let p_prime = multiply_within_budget(e, p, &second, digit_budget)?;
    if p_prime.is_infinity() {
        report.outcome = RamifiedOutcome::PPowerOrder;
        return Ok(report);
    }
    report.p_prime_digits = Some(digits(&p_prime));
    report.p_prime = Some(p_prime.to_string());
    let z = z_coordinate(e, &p_prime)?.ok_or_else(|| Error::Invariant("z has a pole at P'".into()))?;
    let v = uniformizer_ord(z.ord(&prime));
    report.valuation = v;
    let lambda = local_height_finite(e, &p_prime, &prime)?.value;
    report.lambda = Some(lambda);
    let bound_met = v.is_some_and(|v| v >= prime.e() as i64) && lambda >= report.bound - 1e-12;
    report.outcome = RamifiedOutcome::Checked { bound_met };
    Ok(report)
}

/// A rational point viewed over Q(√d).
pub fn lift_point(k: QuadraticField, pt: &CurvePoint<num_rational::BigRational>) -> CurvePoint<QuadraticElement> {
    match pt {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine { x, y } => CurvePoint::affine(k.from_rational(x.clone()), k.from_rational(y.clone())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionEscape {
    pub m: usize,
    pub p: u64,
    pub a: IntPolynomial,
    pub b: IntPolynomial,
    pub holds: bool,
}

/// a(X)(X^m - 1) + b(X) p (X - 1)² = m p (X - 1) with a = p and
/// b = -Σ_{i=0}^{m-2} (m - 1 - i) X^i, checked by expansion.
pub fn torsion_escape_identity(m: usize, p: u64) -> Result<TorsionEscape> {
    require_prime(p)?;
    if m == 0 {
        return invalid("m must be positive");
    }
    let pb = BigInt::from(p);
    let a = IntPolynomial::constant(pb.clone());
    let b = IntPolynomial::new((0..m.saturating_sub(1)).map(|i| -BigInt::from(m - 1 - i)).collect());
    let x_minus_1 = IntPolynomial::from_i64(&[-1, 1]);
    let lhs = &(&a * &IntPolynomial::x_pow_minus_one(m)) + &(&(&b * &x_minus_1) * &x_minus_1).scale(&pb);
    let rhs = x_minus_1.scale(&(BigInt::from(m) * &pb));
    let holds = lhs == rhs;
    if !holds {
        return Err(Error::Invariant(format!("torsion escape identity fails for m = {m}, p = {p}")));
    }
    Ok(TorsionEscape { m, p, a, b, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use std::time::Instant;

    fn e37() -> WeierstrassCurve {
        WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap()
    }

    fn k_of(tau: GaloisAutomorphism) -> usize {
        match tau {
            GaloisAutomorphism::CyclotomicPower { k, .. } => k,
            _ => unreachable!(),
        }
    }

    /// Smallest k > 1 with ζ_m^k = ω ζ_m for a primitive p-th root ω,
    /// found by testing the action on ζ_m directly.
    fn tau_oracle(m: usize, p: usize) -> usize {
        (2..m)
            .find(|&k| {
                if k.gcd(&m) != 1 {
                    return false;
                }
                // ζ^(k-1) has order exactly p
                let e = (k - 1) % m;
                let order = m / e.gcd(&m);
                order == p
            })
            .unwrap()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(k_of(inertia_tau(4, 2).unwrap()), 3);
        assert_eq!(k_of(inertia_tau(9, 3).unwrap()), 4);
        assert_eq!(k_of(inertia_tau(12, 3).unwrap()), 5);
        for (m, p) in [(4, 2), (8, 2), (12, 2), (9, 3), (12, 3), (25, 5), (18, 3), (20, 5), (45, 3)] {
            assert_eq!(k_of(inertia_tau(m, p as u64).unwrap()), tau_oracle(m, p), "m={m} p={p}");
        }
        assert!(inertia_tau(9, 2).is_err());
        assert!(inertia_tau(3, 3).is_err());
    }

    #[test]
    fn congruence_examples() {
        // (a - bi)² - (a + bi)² = -4abi
        for (a, b) in [(1, 1), (3, -2), (5, 7)] {
            assert!(congruence_holds(&CyclotomicElement::from_i64(4, &[a, b]).unwrap(), 3, 2).unwrap());
        }
        let z9 = CyclotomicElement::zeta_pow(9, 1).unwrap();
        let d = &z9.power_map(4).pow(3) - &z9.pow(3);
        assert!(d.is_zero());
        // a non-inertia automorphism breaks the congruence for some α
        let alpha = CyclotomicElement::from_i64(12, &[1, 1]).unwrap();
        assert!(!congruence_holds(&alpha, 5, 2).unwrap());
    }

    #[test]
    fn congruence_sweeps() {
        let start = Instant::now();
        for (m, p) in [(4, 2), (8, 2), (12, 2), (9, 3), (12, 3), (25, 5)] {
            let w = verify_power_congruence(m, p, 500, 7).unwrap();
            assert!(w.all_pass, "m={m} p={p}: {:?}", w.failures.first());
            assert_eq!(w.random_checked, 500);
            if euler_phi(m) <= 6 {
                assert_eq!(w.exhaustive_checked, 3usize.pow(euler_phi(m) as u32));
            }
        }
        assert!(start.elapsed().as_secs_f64() < 10.0);
    }

    #[test]
    fn torsion_escape_examples() {
        let t = torsion_escape_identity(2, 7).unwrap();
        assert_eq!(t.b, IntPolynomial::from_i64(&[-1]));
        let t = torsion_escape_identity(3, 5).unwrap();
        assert_eq!(t.b, IntPolynomial::from_i64(&[-2, -1]));
        for m in 1..=24 {
            for p in [2, 3, 5, 7, 11, 13] {
                let t = torsion_escape_identity(m, p).unwrap();
                assert!(t.holds);
                // independent check at integer points: evaluate both sides
                for x in [-3i64, 2, 5] {
                    let xb = BigInt::from(x);
                    let lhs = t.a.eval(&xb) * (xb.pow(m as u32) - 1) + t.b.eval(&xb) * p * (&xb - 1) * (&xb - 1);
                    assert_eq!(lhs, BigInt::from(m) * p * (xb - 1));
                }
            }
        }
    }

    #[test]
    fn ramified_point_481() {
        let e = e37();
        let k = QuadraticField::new(481).unwrap();
        let pt = CurvePoint::affine(k.from_rational(rat(5, 1)), k.element(rat(-1, 2), rat(1, 2)));
        let start = Instant::now();
        let r = ramified_point_check(&e, &pt, 13).unwrap();
        let secs = start.elapsed().as_secs_f64();
        assert_eq!(r.difference_in_kernel, Some(true));
        assert!(r.difference_valuation.unwrap() >= 1);
        assert!(matches!(r.outcome, RamifiedOutcome::Checked { bound_met: true }), "{r:?}");
        assert!(r.valuation.unwrap() >= 2);
        assert!(r.lambda.unwrap() >= 13f64.ln());
        assert!(secs < 10.0, "{secs}");
    }

    #[test]
    fn ramified_guards() {
        let e = e37();
        let k5 = QuadraticField::new(5).unwrap();
        let r = ramified_point_check(&e, &lift_point(k5, &CurvePoint::from_i64(0, 0)), 5).unwrap();
        assert!(matches!(r.outcome, RamifiedOutcome::Descent));
        // 2-torsion of y² = x³ - x viewed over Q(√5)
        let e2 = WeierstrassCurve::from_i64([0, 0, 0, -1, 0]).unwrap();
        // 5 is good for y² = x³ - x
        let r = ramified_point_check(&e2, &lift_point(k5, &CurvePoint::from_i64(1, 0)), 5).unwrap();
        assert!(matches!(r.outcome, RamifiedOutcome::Torsion { order: 2 }));
        let k = QuadraticField::new(481).unwrap();
        let pt = CurvePoint::affine(k.from_rational(rat(5, 1)), k.element(rat(-1, 2), rat(1, 2)));
        assert!(ramified_point_check(&e, &pt, 3).is_err());
        assert!(ramified_point_check(&e, &pt, 37).is_err());
        assert!(matches!(ramified_point_check_with_budget(&e, &pt, 13, 50), Err(Error::Resource(_))));
    }
}
