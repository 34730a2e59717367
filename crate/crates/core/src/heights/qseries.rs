//! Evaluation of the local height from Tate parameters (u, q):
//! λ = ½ B₂(log|u| / log|q|) log|1/q| - log|1 - u| - Σ_{n≥1} log|(1 - qⁿu)(1 - qⁿ/u)|.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::bernoulli::{bernoulli2_periodic, bernoulli2_periodic_f64};
use crate::arith::primes::require_prime;
use crate::arith::rational::{format_rational, to_f64};
use crate::error::{invalid, Result};

#[derive(Clone, Debug)]
pub enum TateParameters {
    /// Complex u and q for an archimedean place.
    Archimedean { u: Complex64, q: Complex64 },
    /// Valuations in uniformizer units; `v_one_minus_u` is only consulted
    /// when v(u) = 0.
    Nonarchimedean { v_u: BigRational, v_q: BigRational, v_one_minus_u: Option<BigRational> },
}

#[derive(Clone, Copy, Debug)]
pub enum QseriesMode {
    Archimedean,
    /// Residue characteristic p and ramification index e.
    Nonarchimedean { p: u64, e: u32 },
}

#[derive(Clone, Debug, Serialize)]
pub struct QseriesValue {
    pub value: f64,
    /// value = log_p_multiple · log p at nonarchimedean places.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt")]
    pub log_p_multiple: Option<BigRational>,
    pub terms: u32,
}

fn serialize_opt<S: serde::Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

const TERM_CUTOFF: f64 = 1e-15;
const MAX_TERMS: u32 = 10_000;

pub fn qseries_evaluate(params: &TateParameters, mode: QseriesMode) -> Result<QseriesValue> {
    match (params, mode) {
        (TateParameters::Archimedean { u, q }, QseriesMode::Archimedean) => archimedean(*u, *q),
        (TateParameters::Nonarchimedean { v_u, v_q, v_one_minus_u }, QseriesMode::Nonarchimedean { p, e }) => {
            nonarchimedean(v_u, v_q, v_one_minus_u.as_ref(), p, e)
        }
        _ => invalid("parameters and evaluation mode disagree"),
    }
}

fn archimedean(u: Complex64, q: Complex64) -> Result<QseriesValue> {
    let aq = q.norm();
    let au = u.norm();
    if !(aq > 0.0 && aq < (-PI).exp()) {
        return invalid(format!("|q| = {aq} outside (0, e^-pi)"));
    }
    if !(au > aq && au <= 1.0 + 1e-15) {
        return invalid(format!("|u| = {au} outside the annulus |q| < |u| <= 1"));
    }
    if (Complex64::new(1.0, 0.0) - u).norm() == 0.0 {
        return invalid("u = 1 is the identity");
    }
    let log_inv_q = -aq.ln();
    let t = au.ln() / aq.ln();
    let mut value = 0.5 * bernoulli2_periodic_f64(t) * log_inv_q - (Complex64::new(1.0, 0.0) - u).norm().ln();
    let mut qn = Complex64::new(1.0, 0.0);
    let mut terms = 0;
    for n in 1..=MAX_TERMS {
        qn *= q;
        let term = ((Complex64::new(1.0, 0.0) - qn * u).norm() * (Complex64::new(1.0, 0.0) - qn / u).norm()).ln();
        value -= term;
        terms = n;
        if term.abs() < TERM_CUTOFF && qn.norm() / au < TERM_CUTOFF {
            break;
        }
    }
    Ok(QseriesValue { value, log_p_multiple: None, terms })
}

fn nonarchimedean(v_u: &BigRational, v_q: &BigRational, v_one_minus_u: Option<&BigRational>, p: u64, e: u32) -> Result<QseriesValue> {
    require_prime(p)?;
    if e == 0 {
        return invalid("ramification index must be positive");
    }
    if !v_q.is_positive() {
        return invalid("v(q) must be positive");
    }
    if v_u.is_negative() || v_u >= v_q {
        return invalid("v(u) outside [0, v(q))");
    }
    let t = v_u / v_q;
    let mut multiple = bernoulli2_periodic(&t) * v_q / BigRational::from_integer(2.into());
    if v_u.is_zero() {
        // |1 - u| ≤ 1 when u is a unit; it contributes only when 1 - u is not
        if let Some(w) = v_one_minus_u {
            if w.is_negative() {
                return invalid("v(1 - u) cannot be negative for a unit u");
            }
            multiple += w;
        }
    }
    let multiple = multiple / BigRational::from_integer(e.into());
    let value = to_f64(&multiple) * (p as f64).ln();
    Ok(QseriesValue { value, log_p_multiple: Some(multiple), terms: 0 })
}

/// c₂ bounding the two log-product series and the -log|1-u| term from
/// below, after replacing u by q/u when needed so that |q|^½ ≤ |u| ≤ 1:
/// -log|1-u| ≥ -log 2, Σ log|1-qⁿu| ≤ Σ |q|ⁿ ≤ |q|/(1-|q|) and
/// Σ log|1-qⁿ/u| ≤ Σ |q|^(n-½) ≤ |q|^½/(1-|q|). With |q| < e^-π this gives
/// c₂ = log 2 + (e^-π + e^-π/2)/(1 - e^-π) ≈ 0.9556.
pub fn c2_constant() -> f64 {
    let q = (-PI).exp();
    std::f64::consts::LN_2 + (q + q.sqrt()) / (1.0 - q)
}

/// λ ≥ -(1/24) log|1/q| - c₂, using min B₂ = -1/12.
pub fn archimedean_lower_bound(q_magnitude: f64) -> f64 {
    -(1.0 / 24.0) * (-q_magnitude.ln()) - c2_constant()
}

/// (E4(τ), E6(τ), ∏(1 - qⁿ)) as q-expansions, q = e^{2πiτ}.
fn eisenstein_and_product(tau: Complex64) -> (Complex64, Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    let (mut e4, mut e6, mut prod, mut qn) = (one, one, one, one);
    for n in 1..400 {
        qn *= q;
        if qn.norm() < 1e-18 {
            break;
        }
        let nf = n as f64;
        let r = qn / (one - qn);
        e4 += 240.0 * nf.powi(3) * r;
        e6 -= 504.0 * nf.powi(5) * r;
        prod *= one - qn;
    }
    (e4, e6, prod)
}

/// j(τ) = E4(τ)^3 / Δ(τ).
fn j_of_tau(tau: Complex64) -> Complex64 {
    let (e4, _, prod) = eisenstein_and_product(tau);
    let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    e4 * e4 * e4 / (q * prod.powi(24))
}

/// E6/η^12, a square root of j - 1728 with a simple zero at τ = i.
fn sqrt_j_minus_1728(tau: Complex64) -> Complex64 {
    let (_, e6, prod) = eisenstein_and_product(tau);
    let q_half = (Complex64::new(0.0, PI) * tau).exp();
    e6 / (q_half * prod.powi(12))
}

/// E4/η^8, a cube root of j with a simple zero at τ = e^{2πi/3}.
fn cbrt_j(tau: Complex64) -> Complex64 {
    let (e4, _, prod) = eisenstein_and_product(tau);
    let q_third = (Complex64::new(0.0, 2.0 * PI / 3.0) * tau).exp();
    e4 / (q_third * prod.powi(8))
}

fn newton(f: impl Fn(Complex64) -> Complex64, target: Complex64, mut tau: Complex64) -> Complex64 {
    let h = Complex64::new(1e-7, 0.0);
    for _ in 0..100 {
        let df = (f(tau + h) - f(tau - h)) / (2.0 * h);
        let step = (f(tau) - target) / df;
        if !step.is_finite() {
            break;
        }
        tau -= step;
        if tau.im <= 0.0 {
            tau.im = 1e-3;
        }
        if step.norm() < 1e-14 {
            break;
        }
    }
    tau
}

/// log|1/q| for the Tate period of a curve with the given j-invariant,
/// with τ in the standard fundamental domain.
pub fn log_inverse_q_from_j(j: f64) -> Result<f64> {
    if !j.is_finite() {
        return invalid("j must be finite");
    }
    if j.abs() > 1e15 {
        // 1/q = j - 744 - 196884 q - ...
        return Ok((j - 744.0).abs().ln());
    }
    if j == 0.0 {
        return Ok(PI * 3f64.sqrt());
    }
    if j == 1728.0 {
        return Ok(2.0 * PI);
    }
    let target = Complex64::new(j, 0.0);
    let rel = |t: Complex64| (j_of_tau(t) - target).norm() / j.abs().max(1.0);
    let mut best = Complex64::new(0.0, 1.0);
    let mut best_err = f64::INFINITY;
    let ymax = (j.abs().max(1.0).ln() / (2.0 * PI)) + 2.0;
    for ix in 0..=40 {
        for iy in 0..=200 {
            let t = Complex64::new(-0.5 + ix as f64 / 40.0, 0.85 + (ymax - 0.85) * iy as f64 / 200.0);
            if t.norm() < 1.0 {
                continue;
            }
            let err = rel(t);
            if err < best_err {
                best_err = err;
                best = t;
            }
        }
    }
    // near the elliptic points j has a multiple root; solve for a root of it instead
    let tau = if (j - 1728.0).abs() < 200.0 {
        let s = Complex64::new(j - 1728.0, 0.0).sqrt();
        let a = newton(sqrt_j_minus_1728, s, best);
        if rel(a) < 1e-8 { a } else { newton(sqrt_j_minus_1728, -s, best) }
    } else if j.abs() < 200.0 {
        newton(cbrt_j, Complex64::new(j.cbrt(), 0.0), best)
    } else {
        newton(j_of_tau, target, best)
    };
    if rel(tau) > 1e-8 || tau.im <= 0.0 {
        return Err(crate::Error::Numeric(format!("no Tate period found for j = {j}")));
    }
    // move into the fundamental domain; Im τ is what matters
    let mut t = tau;
    for _ in 0..50 {
        t.re -= t.re.round();
        if t.norm_sqr() < 1.0 {
            t = -Complex64::new(1.0, 0.0) / t;
        } else {
            break;
        }
    }
    Ok(2.0 * PI * t.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    fn nonarch(vu: BigRational, vq: BigRational, w: Option<BigRational>, p: u64, e: u32) -> QseriesValue {
        qseries_evaluate(&TateParameters::Nonarchimedean { v_u: vu, v_q: vq, v_one_minus_u: w }, QseriesMode::Nonarchimedean { p, e }).unwrap()
    }

    #[test]
    fn midpoint_gives_minus_one_twentyfourth() {
        for n in [2i64, 6, 10] {
            let v = nonarch(rat(n, 2), rat(n, 1), None, 7, 1);
            assert_eq!(v.log_p_multiple, Some(rat(-n, 24)));
            let v = nonarch(rat(n, 2), rat(n, 1), None, 7, 2);
            assert_eq!(v.log_p_multiple, Some(rat(-n, 48)));
        }
    }

    #[test]
    fn unit_u_branch() {
        let v = nonarch(rat(0, 1), rat(5, 1), None, 3, 1);
        assert_eq!(v.log_p_multiple, Some(rat(5, 12)));
        let v = nonarch(rat(0, 1), rat(5, 1), Some(rat(2, 1)), 3, 1);
        assert_eq!(v.log_p_multiple, Some(rat(5, 12) + rat(2, 1)));
        assert!((v.value - (29.0 / 12.0) * 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn domain_checks() {
        let bad = TateParameters::Nonarchimedean { v_u: rat(3, 1), v_q: rat(3, 1), v_one_minus_u: None };
        assert!(qseries_evaluate(&bad, QseriesMode::Nonarchimedean { p: 5, e: 1 }).is_err());
        let bad = TateParameters::Archimedean { u: Complex64::new(0.5, 0.0), q: Complex64::new(0.1, 0.0) };
        assert!(qseries_evaluate(&bad, QseriesMode::Archimedean).is_err());
        let bad = TateParameters::Archimedean { u: Complex64::new(1e-3, 0.0), q: Complex64::new(1e-2, 0.0) };
        assert!(qseries_evaluate(&bad, QseriesMode::Archimedean).is_err());
        let ok = TateParameters::Archimedean { u: Complex64::new(0.5, 0.0), q: Complex64::new(0.01, 0.0) };
        assert!(qseries_evaluate(&ok, QseriesMode::Nonarchimedean { p: 5, e: 1 }).is_err());
    }

    #[test]
    fn archimedean_matches_direct_partial_sum() {
        for arg in [0.0, 0.7, 2.0, 3.1] {
            let q = Complex64::from_polar((-4.0f64).exp(), 0.3);
            let u = Complex64::from_polar((-2.0f64).exp(), arg);
            let got = qseries_evaluate(&TateParameters::Archimedean { u, q }, QseriesMode::Archimedean).unwrap().value;
            let one = Complex64::new(1.0, 0.0);
            let t: f64 = 0.5;
            let mut direct = 0.5 * (t * t - t + 1.0 / 6.0) * 4.0 - (one - u).norm().ln();
            for n in 1..=50 {
                let qn = q.powi(n);
                direct -= (one - qn * u).norm().ln() + (one - qn / u).norm().ln();
            }
            assert!((got - direct).abs() < 1e-13, "{got} vs {direct}");
        }
    }

    #[test]
    fn tate_period_from_j() {
        assert!((log_inverse_q_from_j(1728.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        // 0 ≤ j ≤ 1728 lies on the arc |τ| = 1
        for j in [1727.9, 3.0, 150.0, 1000.0] {
            let l = log_inverse_q_from_j(j).unwrap();
            assert!(l >= PI * 3f64.sqrt() - 1e-9 && l <= 2.0 * PI + 1e-9, "{j}: {l}");
        }
        for j in [1730.0, 1800.0, -2.0] {
            assert!(log_inverse_q_from_j(j).unwrap() >= PI * 3f64.sqrt() - 1e-9);
        }
        assert!((log_inverse_q_from_j(1727.9).unwrap() - 2.0 * PI).abs() < 1e-2);
        assert!((log_inverse_q_from_j(0.0).unwrap() - PI * 3f64.sqrt()).abs() < 1e-12);
        for j in [110592.0 / 37.0, -4096.0 / 11.0, 1000.0, -1e6, 5.0e9, 1e20] {
            let l = log_inverse_q_from_j(j).unwrap();
            assert!(l >= PI * 3f64.sqrt() - 1e-9);
            let q = (-l).exp();
            // j = 1/q + 744 + 196884 q + 21493760 q^2 + ... for real q of either sign
            let jp = 1.0 / q + 744.0 + 196884.0 * q + 21493760.0 * q * q;
            let jm = -1.0 / q + 744.0 - 196884.0 * q + 21493760.0 * q * q;
            let close = |a: f64| ((a - j) / j).abs() < 1e-3;
            assert!(close(jp) || close(jm) || j.abs() < 1728.0, "{j}: {jp} {jm}");
        }
    }

    #[test]
    fn lower_bound_holds_on_a_grid() {
        assert!(c2_constant() > 0.0);
        assert!((c2_constant() - 0.9556).abs() < 1e-3);
        for &lq in &[-3.5f64, -5.0, -9.0, -20.0] {
            let aq = lq.exp();
            let bound = archimedean_lower_bound(aq);
            for i in 1..40 {
                for j in 0..24 {
                    let au = aq.powf(i as f64 / 40.0);
                    let u = Complex64::from_polar(au, j as f64 * PI / 12.0 + 0.01);
                    for q in [Complex64::new(aq, 0.0), Complex64::new(-aq, 0.0), Complex64::from_polar(aq, 1.0)] {
                        let v = qseries_evaluate(&TateParameters::Archimedean { u, q }, QseriesMode::Archimedean).unwrap().value;
                        assert!(v >= bound, "{v} < {bound}");
                    }
                }
            }
        }
        let tiny = 1e-40f64;
        assert!((archimedean_lower_bound(tiny) + tiny.ln().abs() / 24.0 + c2_constant()).abs() < 1e-12);
    }
}
