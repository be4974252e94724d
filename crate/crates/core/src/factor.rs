//! Factorization of univariate polynomials over `Q`.
//!
//! Squarefree decomposition, then factorization modulo a well-chosen prime,
//! multifactor Hensel lifting and Zassenhaus subset recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{primitive_integers, rat_int, Rat};
use crate::error::{Error, Result};
use crate::modp::{self, PolyP};
use crate::poly::Poly;

pub const DEFAULT_FACTOR_CAP: usize = 64;

/// `f = content * prod factor^multiplicity` with monic irreducible factors.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFactorization {
    pub content: Rat,
    pub factors: Vec<(Poly<Rat>, usize)>,
}

impl RationalFactorization {
    pub fn expand(&self) -> Poly<Rat> {
        self.factors
            .iter()
            .fold(Poly::constant(self.content.clone()), |acc, (f, m)| {
                &acc * &f.pow(*m as u32)
            })
    }
}

/// Complete irreducible factorization over `Q`.
pub fn factor_rational_poly(f: &Poly<Rat>, cap: usize) -> Result<RationalFactorization> {
    if f.is_zero() {
        return Err(Error::ZeroPoly("factor_rational_poly"));
    }
    if f.deg() > cap {
        return Err(Error::Cap {
            name: "factor degree",
            limit: cap,
            requested: f.deg(),
        });
    }
    let mut factors = Vec::new();
    for (block, mult) in f.squarefree_decompose()? {
        for g in factor_squarefree_rational(&block, None).0 {
            factors.push((g, mult));
        }
    }
    factors.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())));
    Ok(RationalFactorization {
        content: f.lc(),
        factors,
    })
}

/// Factors of degree at most `max_deg` of a squarefree rational polynomial,
/// plus the (monic) unfactored cofactor. Works beyond the usual degree cap.
pub fn small_degree_factors(f: &Poly<Rat>, max_deg: usize) -> (Vec<Poly<Rat>>, Poly<Rat>) {
    let (found, rest) = factor_squarefree_rational(&f.monic(), Some(max_deg));
    (found, rest)
}

/// True iff `f` is irreducible over `Q` (nonconstant).
pub fn is_irreducible(f: &Poly<Rat>, cap: usize) -> Result<bool> {
    if f.deg() == 0 {
        return Ok(false);
    }
    let fac = factor_rational_poly(f, cap)?;
    Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
}

fn to_monic_rat(g: &[BigInt]) -> Poly<Rat> {
    Poly::new(g.iter().cloned().map(rat_int).collect()).monic()
}

/// Factors a monic squarefree rational polynomial. With `max_deg`, only
/// factors up to that degree are split off and the rest is returned as the
/// cofactor; without it the cofactor is always `1`.
fn factor_squarefree_rational(f: &Poly<Rat>, max_deg: Option<usize>) -> (Vec<Poly<Rat>>, Poly<Rat>) {
    let ints = primitive_integers(f.coeffs());
    let (found, rest) = zassenhaus(&ints, max_deg);
    let rest_poly = to_monic_rat(&rest);
    (found.iter().map(|g| to_monic_rat(g)).collect(), rest_poly)
}

// ---------------------------------------------------------------------------
// Integer polynomial helpers (ascending BigInt coefficient vectors).
// ---------------------------------------------------------------------------

type IntPoly = Vec<BigInt>;

fn itrim(mut a: IntPoly) -> IntPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn imul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    itrim(out)
}

fn imod(a: &IntPoly, m: &BigInt) -> IntPoly {
    itrim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn isub(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    itrim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn iadd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    itrim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn iscale(a: &IntPoly, c: &BigInt) -> IntPoly {
    itrim(a.iter().map(|x| x * c).collect())
}

/// Division by a monic polynomial modulo `m`.
fn idivrem_monic_mod(a: &IntPoly, b: &IntPoly, m: &BigInt) -> (IntPoly, IntPoly) {
    let a = imod(a, m);
    if a.len() < b.len() {
        return (Vec::new(), a);
    }
    let db = b.len() - 1;
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].mod_floor(m);
        if c.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            r[i + j] = (&r[i + j] - &c * bc).mod_floor(m);
        }
        q[i] = c;
    }
    r.truncate(db);
    (imod(&q, m), imod(&r, m))
}

/// Exact division over `Z`, or `None`.
fn idiv_exact(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    if a.len() < b.len() {
        return if a.is_empty() { Some(Vec::new()) } else { None };
    }
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let top = &r[i + db];
        if top.is_zero() {
            continue;
        }
        let (c, rm) = top.div_rem(lb);
        if !rm.is_zero() {
            return None;
        }
        for (j, bc) in b.iter().enumerate() {
            r[i + j] -= &c * bc;
        }
        q[i] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(itrim(q))
}

fn content(a: &IntPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

fn primitive_part(a: &IntPoly) -> IntPoly {
    let c = content(a);
    let mut out: IntPoly = a.iter().map(|x| x / &c).collect();
    if out.last().is_some_and(|l| l.is_negative()) {
        out = out.into_iter().map(|x| -x).collect();
    }
    out
}

fn symmetric(a: &IntPoly, m: &BigInt) -> IntPoly {
    let half = m / 2;
    itrim(
        a.iter()
            .map(|c| {
                let c = c.mod_floor(m);
                if c > half {
                    c - m
                } else {
                    c
                }
            })
            .collect(),
    )
}

fn to_modp(a: &IntPoly, p: u64) -> PolyP {
    modp::trim(a.iter().map(|c| modp::big_mod(c, p)).collect())
}

fn from_modp(a: &PolyP) -> IntPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

// ---------------------------------------------------------------------------
// Hensel lifting
// ---------------------------------------------------------------------------

/// One quadratic Hensel step (h monic): lifts `f = g h`, `s g + t h = 1`
/// from modulus `m` to `m^2`.
fn hensel_step(
    f: &IntPoly,
    g: &IntPoly,
    h: &IntPoly,
    s: &IntPoly,
    t: &IntPoly,
    m: &BigInt,
) -> (IntPoly, IntPoly, IntPoly, IntPoly) {
    let m2 = m * m;
    let e = imod(&isub(f, &imul(g, h)), &m2);
    let (q, r) = idivrem_monic_mod(&imul(s, &e), h, &m2);
    let g1 = imod(&iadd(&iadd(g, &imul(t, &e)), &imul(&q, g)), &m2);
    let h1 = imod(&iadd(h, &r), &m2);
    let b = imod(&isub(&iadd(&imul(s, &g1), &imul(t, &h1)), &vec![BigInt::one()]), &m2);
    let (c, d) = idivrem_monic_mod(&imul(s, &b), &h1, &m2);
    let s1 = imod(&isub(s, &d), &m2);
    let t1 = imod(&isub(&isub(t, &imul(t, &b)), &imul(&c, &g1)), &m2);
    (g1, h1, s1, t1)
}

/// Lifts the monic modular factorization `f = lc(f) prod factors (mod p)` to
/// monic factors modulo `pk`.
fn multi_lift(f: &IntPoly, factors: &[PolyP], p: u64, pk: &BigInt) -> Vec<IntPoly> {
    let lc = f.last().unwrap().mod_floor(pk);
    if factors.len() == 1 {
        let inv = lc.modinv(pk).expect("leading coefficient is a unit");
        return vec![imod(&iscale(f, &inv), pk)];
    }
    let (left, right) = factors.split_at(factors.len() / 2);
    let lcp = modp::big_mod(&lc, p);
    let g0 = left.iter().fold(vec![lcp], |acc, x| modp::mul(&acc, x, p));
    let h0 = right.iter().fold(vec![1u64], |acc, x| modp::mul(&acc, x, p));
    let (_, s0, t0) = modp::xgcd(&g0, &h0, p);
    let (mut g, mut h, mut s, mut t) = (from_modp(&g0), from_modp(&h0), from_modp(&s0), from_modp(&t0));
    let mut m = BigInt::from(p);
    while &m < pk {
        let fm = imod(f, &(&m * &m));
        let next = hensel_step(&fm, &g, &h, &s, &t, &m);
        g = next.0;
        h = next.1;
        s = next.2;
        t = next.3;
        m = &m * &m;
    }
    let g = imod(&g, pk);
    let h = imod(&h, pk);
    let mut out = multi_lift(&g, left, p, pk);
    out.extend(multi_lift(&h, right, p, pk));
    out
}

// ---------------------------------------------------------------------------
// Zassenhaus
// ---------------------------------------------------------------------------

struct PrimeChoice {
    p: u64,
    factors: Vec<PolyP>,
}

/// Tries a handful of good primes and picks the one with the fewest modular
/// factors. Also returns the intersection of the achievable factor-degree sets,
/// which certifies irreducibility when it is `{0, n}`.
fn choose_prime(f: &IntPoly) -> (PrimeChoice, Vec<bool>) {
    let n = f.len() - 1;
    let mut possible = vec![true; n + 1];
    let mut best: Option<PrimeChoice> = None;
    let mut tried = 0;
    let mut p = 2u64;
    while tried < 7 {
        p = modp::next_prime(p);
        let fp = to_modp(f, p);
        if fp.len() != f.len() {
            continue;
        }
        let fm = modp::monic(&fp, p);
        if modp::gcd(&fm, &modp::derivative(&fm, p), p).len() != 1 {
            continue;
        }
        if p < 2 * n as u64 && p < 50 {
            // very small primes give many spurious linear factors
            continue;
        }
        tried += 1;
        let factors = modp::factor_squarefree(&fm, p);
        let mut sums = vec![false; n + 1];
        sums[0] = true;
        for g in &factors {
            let d = g.len() - 1;
            for k in (d..=n).rev() {
                if sums[k - d] {
                    sums[k] = true;
                }
            }
        }
        for k in 0..=n {
            possible[k] &= sums[k];
        }
        if best.as_ref().is_none_or(|b| factors.len() < b.factors.len()) {
            best = Some(PrimeChoice { p, factors });
        }
        if best.as_ref().unwrap().factors.len() == 1 {
            break;
        }
    }
    (best.unwrap(), possible)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Factors a primitive squarefree integer polynomial. Returns primitive
/// irreducible factors and the unsplit cofactor (`[1]` when complete).
fn zassenhaus(f: &IntPoly, max_deg: Option<usize>) -> (Vec<IntPoly>, IntPoly) {
    let f = primitive_part(f);
    let n = f.len() - 1;
    if n <= 1 {
        return (if n == 1 { vec![f] } else { vec![] }, vec![BigInt::one()]);
    }
    let (choice, possible) = choose_prime(&f);
    let limit = max_deg.unwrap_or(n);
    if choice.factors.len() == 1 || (1..n).all(|k| !possible[k]) {
        return if limit >= n {
            (vec![f], vec![BigInt::one()])
        } else {
            (vec![], f)
        };
    }
    let p = choice.p;

    // coefficient bound for lc(f) * (any factor)
    let norm2 = f.iter().map(|c| c * c).fold(BigInt::zero(), |a, b| a + b).sqrt() + 1;
    let lc_abs = f.last().unwrap().abs();
    let bound = (BigInt::one() << n) * norm2 * &lc_abs * 2;
    let mut pk = BigInt::from(p);
    while pk <= bound {
        pk *= p;
    }
    let lifted = multi_lift(&f, &choice.factors, p, &pk);

    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut cur = f.clone();
    let mut found = Vec::new();
    let mut s = 1;
    while 2 * s <= remaining.len() {
        let mut idx: Vec<usize> = (0..s).collect();
        let mut hit = false;
        loop {
            let degsum: usize = idx.iter().map(|&i| lifted[remaining[i]].len() - 1).sum();
            if degsum <= limit && possible[degsum] {
                let lc = cur.last().unwrap().clone();
                let mut cand = vec![lc.clone()];
                for &i in &idx {
                    cand = imod(&imul(&cand, &lifted[remaining[i]]), &pk);
                }
                let cand = symmetric(&cand, &pk);
                // constant-term divisibility filter
                let c0 = &cand[0];
                let f0 = &cur[0] * &lc;
                let quick = if c0.is_zero() {
                    f0.is_zero()
                } else {
                    (&f0 % c0).is_zero()
                };
                if quick {
                    let g = primitive_part(&cand);
                    if let Some(q) = idiv_exact(&cur, &g) {
                        found.push(g);
                        cur = primitive_part(&q);
                        let chosen: Vec<usize> = idx.iter().map(|&i| remaining[i]).collect();
                        remaining.retain(|r| !chosen.contains(r));
                        hit = true;
                        break;
                    }
                }
            }
            if !next_combination(&mut idx, remaining.len()) {
                break;
            }
        }
        if !hit {
            s += 1;
        }
    }
    if cur.len() > 1 && cur.len() - 1 <= limit && (max_deg.is_none() || remaining.len() <= 2 * s) {
        // what remains has no proper recombination: irreducible
        found.push(cur);
        cur = vec![BigInt::one()];
    }
    (found, cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn p(v: &[i64]) -> Poly<Rat> {
        Poly::from_i64s(v)
    }

    #[test]
    fn small_examples() {
        let f = factor_rational_poly(&p(&[-1, 0, 1]), 64).unwrap();
        assert_eq!(f.factors, vec![(p(&[-1, 1]), 1), (p(&[1, 1]), 1)]);
        let f = factor_rational_poly(&p(&[1, 0, 1]), 64).unwrap();
        assert_eq!(f.factors, vec![(p(&[1, 0, 1]), 1)]);
        // t^4 + 2t^3 + t^2 + t = t (t^3 + 2t^2 + t + 1)
        let f = factor_rational_poly(&p(&[0, 1, 1, 2, 1]), 64).unwrap();
        assert_eq!(f.factors, vec![(p(&[0, 1]), 1), (p(&[1, 1, 2, 1]), 1)]);
    }

    #[test]
    fn content_and_multiplicity() {
        // 6 (x-1)^2 (x^2+x+1)
        let g = &(&p(&[-1, 1]).pow(2) * &p(&[1, 1, 1])) * &p(&[6]);
        let f = factor_rational_poly(&g, 64).unwrap();
        assert_eq!(f.content, rat(6, 1));
        assert_eq!(f.expand(), g);
        assert_eq!(f.factors.len(), 2);
    }

    #[test]
    fn swinnerton_dyer_like() {
        // x^4 - 10x^2 + 1 is irreducible but splits mod every prime
        let f = factor_rational_poly(&p(&[1, 0, -10, 0, 1]), 64).unwrap();
        assert_eq!(f.factors.len(), 1);
        // (x^2-2)(x^2-3)
        let f = factor_rational_poly(&p(&[6, 0, -5, 0, 1]), 64).unwrap();
        assert_eq!(f.factors, vec![(p(&[-3, 0, 1]), 1), (p(&[-2, 0, 1]), 1)]);
    }

    #[test]
    fn cap_error() {
        let f = Poly::<Rat>::monomial(rat(1, 1), 70);
        assert!(matches!(factor_rational_poly(&f, 64), Err(Error::Cap { .. })));
    }
}
