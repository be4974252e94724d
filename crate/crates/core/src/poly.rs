//! Dense univariate polynomials over an exact field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::arith::Field;
use crate::error::{Error, Result};

/// Dense polynomial, coefficients in ascending degree. The zero polynomial
/// has no coefficients; otherwise the leading coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate.
    pub fn x() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn monomial(c: F, k: usize) -> Self {
        let mut v = vec![F::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&c| F::from_i64(c)).collect())
    }

    /// `x - r`.
    pub fn linear_root(r: &F) -> Self {
        Self::new(vec![-r.clone(), F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    /// Degree, with `0` for the zero polynomial.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().inv();
        self.scale(&inv)
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * &F::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Evaluates the homogenization of formal degree `d` at `(a, b)`:
    /// `sum_i c_i a^i b^(d-i)`.
    pub fn eval_hom(&self, a: &F, b: &F, d: usize) -> F {
        debug_assert!(self.coeffs.len() <= d + 1);
        let mut acc = F::zero();
        let mut bpow = F::one();
        // Horner in a with b-powers: sum c_i a^i b^(d-i)
        let mut terms: Vec<F> = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            terms.push(bpow.clone());
            bpow = bpow * b;
        }
        let mut apow = F::one();
        for i in 0..=d {
            let c = self.coeff(i);
            if !c.is_zero() {
                acc = acc + &(c * &apow * &terms[d - i]);
            }
            if i < d {
                apow = apow * a;
            }
        }
        acc
    }

    /// Homogeneous substitution of polynomials: `sum_i c_i P^i Q^(d-i)`.
    pub fn subst_hom(&self, p: &Poly<F>, q: &Poly<F>, d: usize) -> Poly<F> {
        let mut qpows = Vec::with_capacity(d + 1);
        let mut cur = Poly::one();
        for _ in 0..=d {
            qpows.push(cur.clone());
            cur = &cur * q;
        }
        let mut acc = Poly::zero();
        let mut ppow = Poly::one();
        for i in 0..=d {
            let c = self.coeff(i);
            if !c.is_zero() {
                acc = &acc + &(&ppow * &qpows[d - i]).scale(&c);
            }
            if i < d {
                ppow = &ppow * p;
            }
        }
        acc
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Poly<F>) -> Poly<F> {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, mut k: u32) -> Poly<F> {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn divrem(&self, d: &Poly<F>) -> (Poly<F>, Poly<F>) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.degree() < d.degree() {
            return (Poly::zero(), self.clone());
        }
        let dd = d.deg();
        let lc_inv = d.lc().inv();
        let mut r = self.coeffs.clone();
        let mut q = vec![F::zero(); self.deg() - dd + 1];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].clone() * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] = r[i + j].clone() - &(c.clone() * dc);
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly<F>) -> Poly<F> {
        self.divrem(d).1
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly<F>) -> Option<Poly<F>> {
        let (q, r) = self.divrem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn divides(&self, other: &Poly<F>) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() || F::coprime_hint(a, b) {
            return Poly::one();
        }
        let (mut x, mut y) = (a.monic(), b.monic());
        if x.degree() < y.degree() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_zero() {
            let r = x.rem(&y).monic();
            x = y;
            y = r;
        }
        x
    }

    /// Extended Euclid: returns `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn xgcd(a: &Poly<F>, b: &Poly<F>) -> (Poly<F>, Poly<F>, Poly<F>) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn is_squarefree(&self) -> bool {
        if self.deg() <= 1 {
            return !self.is_zero();
        }
        Poly::gcd(self, &self.derivative()).is_one()
    }

    /// Monic squarefree part (product of the distinct monic irreducible factors).
    pub fn squarefree_part(&self) -> Poly<F> {
        if self.is_zero() {
            return Poly::zero();
        }
        let g = Poly::gcd(self, &self.derivative());
        self.div_exact(&g).expect("gcd divides").monic()
    }

    /// Yun's squarefree decomposition in characteristic zero: monic, pairwise
    /// coprime, squarefree `a_i` with strictly increasing multiplicities and
    /// `f = lc(f) * prod a_i^m_i`.
    pub fn squarefree_decompose(&self) -> Result<Vec<(Poly<F>, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPoly("squarefree_decompose"));
        }
        let f = self.monic();
        let mut out = Vec::new();
        if f.deg() == 0 {
            return Ok(out);
        }
        let fp = f.derivative();
        let a0 = Poly::gcd(&f, &fp);
        let mut b = f.div_exact(&a0).expect("gcd divides f");
        let c = fp.div_exact(&a0).expect("gcd divides f'");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while !b.is_constant() {
            let a = Poly::gcd(&b, &d);
            let nb = b.div_exact(&a).expect("gcd divides b");
            let nc = d.div_exact(&a).expect("gcd divides d");
            if !a.is_constant() {
                out.push((a, i));
            }
            d = &nc - &nb.derivative();
            b = nb;
            i += 1;
        }
        Ok(out)
    }

    /// Resultant `lc(a)^deg(b) prod_{a(r)=0} b(r)`.
    pub fn resultant(a: &Poly<F>, b: &Poly<F>) -> Result<F> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroPoly("resultant"));
        }
        Ok(resultant_nonzero(a.clone(), b.clone()))
    }

    /// Newton interpolation through `(xs[i], ys[i])` with distinct nodes.
    pub fn interpolate(xs: &[F], ys: &[F]) -> Poly<F> {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                let num = dd[i].clone() - &dd[i - 1];
                let den = xs[i].clone() - &xs[i - j];
                dd[i] = num.div(&den);
            }
        }
        let mut acc = Poly::zero();
        for i in (0..n).rev() {
            acc = &(&acc * &Poly::linear_root(&xs[i])) + &Poly::constant(dd[i].clone());
        }
        acc
    }

    /// Renders the polynomial in the variable `var`.
    pub fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let simple = is_simple_number(&s);
            let (neg, body) = if simple && s.starts_with('-') {
                (true, s[1..].to_string())
            } else {
                (false, s.clone())
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let body = if simple { body } else { format!("({})", body) };
            match i {
                0 => out.push_str(&body),
                _ => {
                    if body != "1" {
                        out.push_str(&body);
                        out.push('*');
                    }
                    out.push_str(var);
                    if i > 1 {
                        out.push_str(&format!("^{}", i));
                    }
                }
            }
        }
        out
    }
}

fn is_simple_number(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    !body.is_empty() && body.chars().all(|c| c.is_ascii_digit() || c == '/')
}

fn resultant_nonzero<F: Field>(a: Poly<F>, b: Poly<F>) -> F {
    let (da, db) = (a.deg(), b.deg());
    if db == 0 {
        return pow_f(&b.lc(), da);
    }
    if da == 0 {
        return pow_f(&a.lc(), db);
    }
    let r = a.rem(&b);
    if r.is_zero() {
        return F::zero();
    }
    let sign = if (da * db) % 2 == 1 { -F::one() } else { F::one() };
    let factor = pow_f(&b.lc(), da - r.deg());
    sign * &factor * &resultant_nonzero(b, r)
}

pub fn pow_f<F: Field>(x: &F, k: usize) -> F {
    let mut acc = F::one();
    for _ in 0..k {
        acc = acc * x;
    }
    acc
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("x"))
    }
}

impl<'a, F: Field> Add<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn add(self, o: &Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + &o.coeff(i)).collect())
    }
}

impl<'a, F: Field> Sub<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn sub(self, o: &Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - &o.coeff(i)).collect())
    }
}

impl<'a, F: Field> Mul<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn mul(self, o: &Poly<F>) -> Poly<F> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = std::mem::replace(&mut out[i + j], F::zero()) + &(a.clone() * b);
            }
        }
        Poly::new(out)
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<F: Field> Add for Poly<F> {
    type Output = Poly<F>;
    fn add(self, o: Poly<F>) -> Poly<F> {
        &self + &o
    }
}

impl<F: Field> Sub for Poly<F> {
    type Output = Poly<F>;
    fn sub(self, o: Poly<F>) -> Poly<F> {
        &self - &o
    }
}

impl<F: Field> Mul for Poly<F> {
    type Output = Poly<F>;
    fn mul(self, o: Poly<F>) -> Poly<F> {
        &self * &o
    }
}

impl<F: Field> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        -&self
    }
}
