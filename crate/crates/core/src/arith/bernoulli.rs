use num_rational::BigRational;
use num_traits::One;

use super::rational::rat;

/// Fractional part in [0, 1).
pub fn frac(t: &BigRational) -> BigRational {
    t - t.floor()
}

/// Second Bernoulli polynomial t^2 - t + 1/6 on [0, 1), extended with
/// period 1.
pub fn bernoulli2_periodic(t: &BigRational) -> BigRational {
    let u = frac(t);
    &u * &u - &u + rat(1, 6)
}

/// Floating-point counterpart of [`bernoulli2_periodic`].
pub fn bernoulli2_periodic_f64(t: f64) -> f64 {
    let u = t - t.floor();
    u * u - u + 1.0 / 6.0
}

/// Minimum of the periodic polynomial, attained at t = 1/2.
pub fn bernoulli2_minimum() -> BigRational {
    -BigRational::one() / BigRational::from_integer(12.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(bernoulli2_periodic(&int(0)), rat(1, 6));
        assert_eq!(bernoulli2_periodic(&rat(1, 2)), rat(-1, 12));
        assert_eq!(bernoulli2_periodic(&rat(7, 3)), rat(-1, 18));
        assert_eq!(bernoulli2_periodic(&rat(-2, 3)), rat(-1, 18));
        assert_eq!(bernoulli2_minimum(), rat(-1, 12));
    }

    proptest! {
        #[test]
        fn periodic_and_bounded_below(n in -1000i64..1000, d in 1i64..200) {
            let t = rat(n, d);
            let b = bernoulli2_periodic(&t);
            prop_assert_eq!(&b, &bernoulli2_periodic(&(&t + int(1))));
            prop_assert!(b >= bernoulli2_minimum());
            let f = bernoulli2_periodic_f64(n as f64 / d as f64);
            prop_assert!((f - crate::arith::rational::to_f64(&b)).abs() < 1e-12);
        }
    }
}
