//! Absolute logarithmic Weil height of rationals and quadratic numbers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::rational::ln_abs;
use crate::fields::{QuadraticElement, Scalar};

/// h(x) = (1/[L:Q]) Σ_w [L_w:Q_w] log max(|x|_w, 1).
pub fn naive_height<F: Scalar>(x: &F) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_rational() {
        Some(r) => ln_abs(r.numer()).max(ln_abs(r.denom())),
        None => quadratic_height(x),
    }
}

/// Mahler measure of the primitive minimal polynomial a0 X^2 + a1 X + a2,
/// halved: h(x) = (log a0 + Σ_σ log max(|σx|, 1)) / 2.
fn quadratic_height<F: Scalar>(x: &F) -> f64 {
    let base = x.base();
    let places = base.archimedean_places();
    let (trace, norm) = trace_and_norm(x);
    let a0 = trace.denom().lcm(norm.denom());
    let arch: f64 = places.iter().map(|&v| v.local_degree() as f64 * x.ln_abs_at(v).max(0.0)).sum();
    0.5 * (ln_abs(&a0) + arch)
}

fn trace_and_norm<F: Scalar>(x: &F) -> (BigRational, BigRational) {
    let conj = x.conjugate();
    let t = x.plus(&conj).as_rational().expect("trace is rational");
    let n = x.times(&conj).as_rational().expect("norm is rational");
    (t, n)
}

/// Height of a quadratic number computed place by place from its prime
/// factorization; used to cross-check the Mahler-measure formula.
pub fn naive_height_by_places(x: &QuadraticElement) -> crate::Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    let base = Scalar::base(x);
    let mut total = 0.0;
    for v in base.archimedean_places() {
        total += v.local_degree() as f64 * Scalar::ln_abs_at(x, v).max(0.0);
    }
    let den: BigInt = Scalar::denominator(x);
    if !den.is_zero() {
        for (p, _) in crate::arith::primes::factor(&den)? {
            for prime in base.primes_above(p)? {
                let ord = Scalar::ord(x, &prime).finite().unwrap();
                if ord < 0 {
                    // n_w · (-ord/e) · log p with n_w = e f
                    total += (prime.f() as i64 * -ord) as f64 * (p as f64).ln();
                }
            }
        }
    }
    Ok(total / base.degree() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};
    use crate::fields::QuadraticField;
    use proptest::prelude::*;

    #[test]
    fn rational_examples() {
        assert!((naive_height(&rat(3, 2)) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(naive_height(&int(0)), 0.0);
        assert!((naive_height(&rat(-7, 100)) - 100f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn golden_ratio() {
        // both embeddings: (1+√5)/2 > 1 and |(1-√5)/2| < 1, norm -1
        let k = QuadraticField::new(5).unwrap();
        let g = k.element(rat(1, 2), rat(1, 2));
        let expect = 0.5 * ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((naive_height(&g) - expect).abs() < 1e-15);
        assert!((naive_height_by_places(&g).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn galois_invariance_and_inverse() {
        let k = QuadraticField::new(-7).unwrap();
        let x = k.element(rat(3, 4), rat(5, 6));
        assert!((naive_height(&x) - naive_height(&x.conjugate())).abs() < 1e-14);
        assert!((naive_height(&x) - naive_height(&x.inv().unwrap())).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn mahler_formula_matches_place_sum(a in -40i64..40, da in 1i64..40, b in -40i64..40, db in 1i64..40, di in 0usize..5) {
            let d = [5i64, -1, 13, -3, 481][di];
            let k = QuadraticField::new(d).unwrap();
            let x = k.element(rat(a, da), rat(b, db));
            let h1 = naive_height(&x);
            let h2 = naive_height_by_places(&x).unwrap();
            prop_assert!((h1 - h2).abs() < 1e-10, "{} vs {}", h1, h2);
        }
    }
}
