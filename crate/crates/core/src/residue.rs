//! The residue rings `Z/p` and `Z/p^2`.

use num_bigint::BigInt;

use crate::arith::Rat;
use crate::modp::{big_mod, is_prime};

/// `Z/N` with `N = p` or `N = p^2`, `p` prime and `p^2 < 2^64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueRing {
    p: u64,
    n: u64,
}

impl ResidueRing {
    pub fn modulo_p(p: u64) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        ResidueRing { p, n: p }
    }

    pub fn modulo_p2(p: u64) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        let n = p.checked_mul(p).expect("p^2 overflows u64");
        ResidueRing { p, n }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn from_bigint(&self, x: &BigInt) -> u64 {
        big_mod(x, self.n)
    }

    /// Image of a rational number whose denominator is prime to `p`.
    pub fn from_rat(&self, r: &Rat) -> Option<u64> {
        let d = big_mod(r.denom(), self.n);
        if d.is_multiple_of(self.p) {
            return None;
        }
        Some(self.mul(big_mod(r.numer(), self.n), self.inv(d)?))
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.n as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + self.n as u128 - b as u128) % self.n as u128) as u64
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.n as u128) as u64
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.n;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.p)
    }

    /// Inverse of a unit via Euler: `a^(phi(N) - 1)`.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        let phi = if self.n == self.p {
            self.p - 1
        } else {
            self.p * (self.p - 1)
        };
        Some(self.pow(a, phi - 1))
    }

    /// `min(ord_p(a), k)` where `N = p^k`.
    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return if self.n == self.p { 1 } else { 2 };
        }
        if !a.is_multiple_of(self.p) {
            0
        } else {
            1
        }
    }

    /// Horner evaluation of a homogeneous form of degree `d` given by its
    /// ascending coefficients in `X`, at `(a, b)`.
    pub fn eval_hom(&self, coeffs: &[u64], d: usize, a: u64, b: u64) -> u64 {
        let mut acc = 0;
        let mut bpow = 1 % self.n;
        let mut terms = vec![0u64; d + 1];
        for i in 0..=d {
            terms[i] = bpow;
            bpow = self.mul(bpow, b);
        }
        // sum c_i a^i b^(d-i)
        let mut apow = 1 % self.n;
        for i in 0..=d {
            let c = coeffs.get(i).copied().unwrap_or(0);
            if c != 0 {
                acc = self.add(acc, self.mul(c, self.mul(apow, terms[d - i])));
            }
            apow = self.mul(apow, a);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn arithmetic_mod_p2() {
        let r = ResidueRing::modulo_p2(5);
        assert_eq!(r.modulus(), 25);
        assert_eq!(r.from_rat(&rat(1, 2)), Some(13));
        assert_eq!(r.from_rat(&rat(1, 5)), None);
        assert_eq!(r.mul(r.inv(7).unwrap(), 7), 1);
        assert_eq!(r.valuation(10), 1);
        assert_eq!(r.valuation(0), 2);
        assert_eq!(r.valuation(3), 0);
        // X^2 + Z^2 at (2, 1)
        assert_eq!(r.eval_hom(&[1, 0, 1], 2, 2, 1), 5);
    }
}
