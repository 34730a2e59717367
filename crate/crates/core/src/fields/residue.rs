//! Finite residue fields F_p and F_{p^2} with small characteristic.

use serde::Serialize;

use crate::arith::primes::{inv_mod, mul_mod, pow_mod, smallest_nonresidue};

/// Element c0 + c1·t of F_p or F_p[t]/(t^2 - s1·t - s0); `c1 = 0` in F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueElem {
    pub c0: u64,
    pub c1: u64,
}

impl ResidueElem {
    pub const ZERO: ResidueElem = ResidueElem { c0: 0, c1: 0 };
    pub const ONE: ResidueElem = ResidueElem { c0: 1, c1: 0 };

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }
}

/// F_p, or F_{p^2} presented with a fixed quadratic modulus: t^2 = n for odd
/// p with n the smallest nonresidue, t^2 = t + 1 for p = 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueField {
    p: u64,
    ext: Option<(u64, u64)>,
}

impl ResidueField {
    pub fn prime(p: u64) -> Self {
        ResidueField { p, ext: None }
    }

    pub fn quadratic(p: u64) -> Self {
        let ext = if p == 2 { (1, 1) } else { (0, smallest_nonresidue(p)) };
        ResidueField { p, ext: Some(ext) }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        if self.ext.is_some() {
            2
        } else {
            1
        }
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.degree())
    }

    /// Square of the generator t, as (s1, s0) with t^2 = s1·t + s0.
    pub fn modulus(&self) -> Option<(u64, u64)> {
        self.ext
    }

    pub fn from_u64(&self, a: u64) -> ResidueElem {
        ResidueElem { c0: a % self.p, c1: 0 }
    }

    pub fn from_i64(&self, a: i64) -> ResidueElem {
        ResidueElem { c0: a.rem_euclid(self.p as i64) as u64, c1: 0 }
    }

    pub fn generator(&self) -> ResidueElem {
        assert!(self.ext.is_some(), "prime field has no extension generator");
        ResidueElem { c0: 0, c1: 1 }
    }

    pub fn elements(&self) -> impl Iterator<Item = ResidueElem> + '_ {
        let p = self.p;
        let c1_range = if self.ext.is_some() { p } else { 1 };
        (0..c1_range).flat_map(move |c1| (0..p).map(move |c0| ResidueElem { c0, c1 }))
    }

    pub fn add(&self, a: ResidueElem, b: ResidueElem) -> ResidueElem {
        let p = self.p;
        ResidueElem { c0: (a.c0 + b.c0) % p, c1: (a.c1 + b.c1) % p }
    }

    pub fn neg(&self, a: ResidueElem) -> ResidueElem {
        let p = self.p;
        ResidueElem { c0: (p - a.c0) % p, c1: (p - a.c1) % p }
    }

    pub fn sub(&self, a: ResidueElem, b: ResidueElem) -> ResidueElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: ResidueElem, b: ResidueElem) -> ResidueElem {
        let p = self.p;
        match self.ext {
            None => ResidueElem { c0: mul_mod(a.c0, b.c0, p), c1: 0 },
            Some((s1, s0)) => {
                // (a0 + a1 t)(b0 + b1 t) with t^2 = s1 t + s0
                let hi = mul_mod(a.c1, b.c1, p);
                let c0 = (mul_mod(a.c0, b.c0, p) + mul_mod(hi, s0, p)) % p;
                let c1 = (mul_mod(a.c0, b.c1, p) + mul_mod(a.c1, b.c0, p) + mul_mod(hi, s1, p)) % p;
                ResidueElem { c0, c1 }
            }
        }
    }

    pub fn scale(&self, a: ResidueElem, k: u64) -> ResidueElem {
        self.mul(a, self.from_u64(k))
    }

    pub fn inv(&self, a: ResidueElem) -> Option<ResidueElem> {
        if a.is_zero() {
            return None;
        }
        let p = self.p;
        match self.ext {
            None => inv_mod(a.c0, p).map(|c0| ResidueElem { c0, c1: 0 }),
            Some((s1, _)) => {
                // the conjugate of t is s1 - t
                let conj = ResidueElem { c0: (a.c0 + mul_mod(a.c1, s1, p)) % p, c1: (p - a.c1) % p };
                let norm = self.mul(a, conj);
                debug_assert_eq!(norm.c1, 0);
                let ni = inv_mod(norm.c0, p)?;
                Some(self.scale(conj, ni))
            }
        }
    }

    pub fn pow(&self, a: ResidueElem, mut e: u64) -> ResidueElem {
        let mut acc = ResidueElem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Whether `a` is a square in this field.
    pub fn is_square(&self, a: ResidueElem) -> bool {
        if a.is_zero() || self.p == 2 {
            return true;
        }
        match self.ext {
            None => pow_mod(a.c0, (self.p - 1) / 2, self.p) == 1,
            Some(_) => self.pow(a, (self.size() - 1) / 2) == ResidueElem::ONE,
        }
    }
}
