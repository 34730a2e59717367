//! Small-prime utilities over machine integers: primality, modular
//! arithmetic, quadratic residues and square roots, factoring of
//! moderately sized integers.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    while !is_prime(k) {
        k += 1;
    }
    k
}

/// Residue of an arbitrary integer modulo `p`, in `0..p`.
pub fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

/// Legendre symbol (a | p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: u64, p: u64) -> i32 {
    debug_assert!(p > 2);
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Whether `a` is a square modulo the prime `p` (zero counts as a square).
pub fn is_square_mod(a: u64, p: u64) -> bool {
    if p == 2 {
        return true;
    }
    legendre(a, p) >= 0
}

/// Smallest nonnegative square root of `a` modulo the prime `p`.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    // Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = smallest_nonresidue(p);
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r.min(p - r))
}

/// Smallest quadratic nonresidue modulo an odd prime.
pub fn smallest_nonresidue(p: u64) -> u64 {
    debug_assert!(p > 2);
    (2..p).find(|&n| legendre(n, p) == -1).expect("odd prime has a nonresidue")
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_u64_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Prime factorisation of a nonzero integer as sorted (prime, exponent)
/// pairs. Cofactors beyond 64 bits after trial division are rejected.
pub fn factor(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("cannot factor zero".into()));
    }
    let mut m = n.abs();
    let mut primes = Vec::new();
    for p in primes_up_to(10_000) {
        let bp = BigInt::from(p);
        while (&m % &bp).is_zero() {
            m /= &bp;
            primes.push(p);
        }
        if m.is_one() {
            break;
        }
    }
    if !m.is_one() {
        let rest = m.to_u64().ok_or_else(|| Error::Unsupported {
            p: 0,
            reason: format!("cofactor {m} too large to factor"),
        })?;
        factor_u64_into(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// Squarefree part of a nonzero integer, sign preserved.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt> {
    let mut out = if n.sign() == Sign::Minus { -BigInt::one() } else { BigInt::one() };
    for (p, e) in factor(n)? {
        if e % 2 == 1 {
            out *= p;
        }
    }
    Ok(out)
}

/// Exact integer square root of a nonnegative integer, if it is a square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_up_to(2000);
        let by_test: Vec<u64> = (0..=2000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, by_test);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn square_roots_mod_p() {
        for p in primes_up_to(200).into_iter().skip(1) {
            for a in 0..p {
                match sqrt_mod(a, p) {
                    Some(r) => {
                        assert_eq!(mul_mod(r, r, p), a);
                        assert!(r <= p - r || r == 0);
                    }
                    None => assert_eq!(legendre(a, p), -1),
                }
            }
        }
        assert_eq!(sqrt_mod(5, 11), Some(4));
    }

    #[test]
    fn factoring() {
        assert_eq!(factor(&BigInt::from(-161051)).unwrap(), vec![(11, 5)]);
        assert_eq!(factor(&BigInt::from(481)).unwrap(), vec![(13, 1), (37, 1)]);
        assert_eq!(squarefree_part(&BigInt::from(-40)).unwrap(), BigInt::from(-10));
        let big = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64);
        assert_eq!(factor(&big).unwrap(), vec![(998_244_353, 1), (1_000_000_007, 1)]);
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(4, 8), None);
    }
}
