//! Field abstraction and rational numbers.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::Poly;

/// Arbitrary-precision rational number; always stored in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

/// A commutative field with exact arithmetic.
///
/// Binary operators take the left operand by value and the right one either by
/// value or by reference, which keeps generic polynomial code clone-light.
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + Sub<Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + Mul<Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rat(r: &Rat) -> Self;

    fn div(&self, other: &Self) -> Self {
        self.clone() * &other.inv()
    }

    /// Cheap one-sided coprimality test. Returning `true` must imply
    /// `gcd(a, b) = 1`; `false` means "unknown".
    fn coprime_hint(_a: &Poly<Self>, _b: &Poly<Self>) -> bool {
        false
    }
}

impl Field for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn inv(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero");
        self.recip()
    }
    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn coprime_hint(a: &Poly<Self>, b: &Poly<Self>) -> bool {
        crate::modp::coprime_mod_p(a, b)
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: BigInt) -> Rat {
    Rat::from_integer(n)
}

/// Natural log of `|n|` for a nonzero big integer, accurate to double precision
/// regardless of the size of `n`.
pub fn log_abs(n: &BigInt) -> f64 {
    assert!(!n.is_zero(), "log of zero");
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// `log max(1, |n|)`.
pub fn log_plus(n: &BigInt) -> f64 {
    if n.is_zero() {
        0.0
    } else {
        log_abs(n).max(0.0)
    }
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn denominator_lcm(v: &[Rat]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

/// Scales a vector of rationals to coprime integers (not sign-normalized).
/// The zero vector maps to itself.
pub fn primitive_integers(v: &[Rat]) -> Vec<BigInt> {
    let l = denominator_lcm(v);
    let ints: Vec<BigInt> = v.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

pub fn sign_of(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Möbius function for small arguments.
pub fn mobius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|k| n.is_multiple_of(*k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_abs_large() {
        let n = BigInt::from(3).pow(2000);
        let expected = 2000.0 * 3f64.ln();
        assert!((log_abs(&n) - expected).abs() < 1e-9 * expected);
        assert!((log_abs(&BigInt::from(-7)) - 7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![rat(1, 2), rat(-3, 4), rat(0, 1)];
        assert_eq!(
            primitive_integers(&v),
            vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]
        );
    }

    #[test]
    fn mobius_values() {
        let mu: Vec<i32> = (1..=10).map(mobius).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }
}
