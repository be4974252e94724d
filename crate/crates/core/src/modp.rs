//! Word-size prime arithmetic: primality, integer factoring, and dense
//! polynomials over `F_p` (including distinct/equal-degree factorization).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Rat;
use crate::poly::Poly;

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for all 64-bit integers.
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

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

pub fn next_prime(mut n: u64) -> u64 {
    loop {
        n += 1;
        if is_prime(n) {
            return n;
        }
    }
}

fn pollard_rho(n: u64, seed: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = seed % (n - 1) + 1;
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
        c = c % (n - 1) + 1;
    }
}

/// Prime factorization of a 64-bit integer, sorted by prime.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.iter_mut().find(|e| e.0 == p) {
        Some(e) => e.1 += 1,
        None => out.push((p, 1)),
    };
    for p in [2u64, 3, 5, 7, 11, 13] {
        while n.is_multiple_of(p) {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut stack = vec![];
    if n > 1 {
        stack.push(n);
    }
    let mut seed = 1;
    while let Some(m) = stack.pop() {
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        let d = pollard_rho(m, seed);
        seed += 1;
        stack.push(d);
        stack.push(m / d);
    }
    out.sort();
    out
}

/// Factors a big integer whose prime factors above `10^6` fit in 64 bits
/// after trial division. Returns `None` if the cofactor is too large.
pub fn factor_bigint(n: &BigInt) -> Option<Vec<(BigInt, u32)>> {
    static TRIAL: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    let mut n = n.abs();
    assert!(!n.is_zero());
    let mut out = Vec::new();
    let mut primes = TRIAL.get_or_init(|| primes_up_to(1_000_000)).iter();
    while !n.is_one() && n.bits() > 64 {
        let Some(&p) = primes.next() else { break };
        let bp = BigInt::from(p);
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
    }
    if !n.is_one() {
        let small = n.to_u64()?;
        out.extend(factor_u64(small).into_iter().map(|(p, e)| (BigInt::from(p), e)));
    }
    out.sort();
    Some(out)
}

/// Reduces `n` modulo `p` into `[0, p)`.
pub fn big_mod(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Reduces a rational modulo `p`; `None` when `p` divides the denominator.
pub fn rat_mod(r: &Rat, p: u64) -> Option<u64> {
    let d = big_mod(r.denom(), p);
    if d == 0 {
        return None;
    }
    Some(mul_mod(big_mod(r.numer(), p), inv_mod(d, p), p))
}

// ---------------------------------------------------------------------------
// Polynomials over F_p as ascending coefficient vectors.
// ---------------------------------------------------------------------------

pub type PolyP = Vec<u64>;

pub fn trim(mut a: PolyP) -> PolyP {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn deg(a: &PolyP) -> isize {
    a.len() as isize - 1
}

pub fn add(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn sub(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn mul(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    let pm = p as u128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % pm;
        }
    }
    trim(out.into_iter().map(|c| c as u64).collect())
}

pub fn scale(a: &PolyP, c: u64, p: u64) -> PolyP {
    trim(a.iter().map(|&x| mul_mod(x, c, p)).collect())
}

pub fn monic(a: &PolyP, p: u64) -> PolyP {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(a, inv_mod(l, p), p),
    }
}

pub fn divrem(a: &PolyP, b: &PolyP, p: u64) -> (PolyP, PolyP) {
    assert!(!b.is_empty(), "division by zero polynomial mod p");
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let db = b.len() - 1;
    let inv = inv_mod(*b.last().unwrap(), p);
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = mul_mod(r[i + db], inv, p);
        if c == 0 {
            continue;
        }
        q[i] = c;
        for (j, &bc) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + p - mul_mod(c, bc, p)) % p;
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

pub fn rem(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    divrem(a, b, p).1
}

pub fn gcd(a: &PolyP, b: &PolyP, p: u64) -> PolyP {
    let (mut x, mut y) = (trim(a.clone()), trim(b.clone()));
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// Extended gcd: `(g, s, t)` with `s a + t b = g` monic.
pub fn xgcd(a: &PolyP, b: &PolyP, p: u64) -> (PolyP, PolyP, PolyP) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (PolyP, PolyP) = (vec![1], vec![]);
    let (mut t0, mut t1): (PolyP, PolyP) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        s0 = std::mem::replace(&mut s1, s);
        let t = sub(&t0, &mul(&q, &t1, p), p);
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = inv_mod(*r0.last().unwrap(), p);
    (scale(&r0, inv, p), scale(&s0, inv, p), scale(&t0, inv, p))
}

pub fn derivative(a: &PolyP, p: u64) -> PolyP {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect(),
    )
}

pub fn eval(a: &PolyP, x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

/// `base^e mod (modulus, p)`.
pub fn powmod_poly(base: &PolyP, mut e: u128, modulus: &PolyP, p: u64) -> PolyP {
    let mut result: PolyP = rem(&vec![1], modulus, p);
    let mut b = rem(base, modulus, p);
    while e > 0 {
        if e & 1 == 1 {
            result = rem(&mul(&result, &b, p), modulus, p);
        }
        b = rem(&mul(&b, &b, p), modulus, p);
        e >>= 1;
    }
    result
}

/// Reduces a rational polynomial mod `p`, failing when `p` divides a
/// denominator.
pub fn reduce_poly(f: &Poly<Rat>, p: u64) -> Option<PolyP> {
    let mut out = Vec::with_capacity(f.coeffs().len());
    for c in f.coeffs() {
        out.push(rat_mod(c, p)?);
    }
    Some(trim(out))
}

/// One-sided coprimality test: `true` proves `gcd(a, b) = 1` over `Q`.
pub fn coprime_mod_p(a: &Poly<Rat>, b: &Poly<Rat>) -> bool {
    const PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];
    for p in PRIMES {
        let (ra, rb) = match (reduce_poly(a, p), reduce_poly(b, p)) {
            (Some(x), Some(y)) => (x, y),
            _ => continue,
        };
        if deg(&ra) != a.degree() || deg(&rb) != b.degree() {
            continue;
        }
        if gcd(&ra, &rb, p).len() == 1 {
            return true;
        }
    }
    false
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// returns `(product of irreducible factors of degree k, k)`.
pub fn distinct_degree(f: &PolyP, p: u64) -> Vec<(PolyP, usize)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x: PolyP = vec![0, 1];
    let mut h = x.clone();
    let mut k = 0;
    while deg(&rest) >= 2 * (k as isize + 1) {
        k += 1;
        h = powmod_poly(&h, p as u128, &rest, p);
        let g = gcd(&rest, &sub(&h, &x, p), p);
        if g.len() > 1 {
            out.push((g.clone(), k));
            rest = divrem(&rest, &g, p).0;
            h = rem(&h, &rest, p);
        }
    }
    if rest.len() > 1 {
        let d = rest.len() - 1;
        out.push((rest, d));
    }
    out
}

/// Equal-degree splitting (Cantor-Zassenhaus) for odd `p`.
pub fn equal_degree(f: &PolyP, k: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<PolyP> {
    let n = f.len() - 1;
    if n == k {
        return vec![f.clone()];
    }
    assert!(p % 2 == 1, "equal-degree splitting needs odd p");
    loop {
        let a: PolyP = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() < 2 {
            continue;
        }
        // a^((p^k - 1)/2) = (a^(1 + p + ... + p^(k-1)))^((p - 1)/2)
        let mut frob = a.clone();
        let mut norm = a.clone();
        for _ in 1..k {
            frob = powmod_poly(&frob, p as u128, f, p);
            norm = rem(&mul(&norm, &frob, p), f, p);
        }
        let b = sub(&powmod_poly(&norm, (p as u128 - 1) / 2, f, p), &vec![1], p);
        let g = gcd(f, &b, p);
        if g.len() > 1 && g.len() < f.len() {
            let h = divrem(f, &g, p).0;
            let mut out = equal_degree(&g, k, p, rng);
            out.extend(equal_degree(&monic(&h, p), k, p, rng));
            return out;
        }
    }
}

/// Complete factorization of a monic squarefree polynomial over `F_p`, odd `p`.
/// Factors are monic and sorted by (degree, coefficients).
pub fn factor_squarefree(f: &PolyP, p: u64) -> Vec<PolyP> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p);
    let mut out = Vec::new();
    for (g, k) in distinct_degree(f, p) {
        out.extend(equal_degree(&g, k, p, &mut rng));
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(561));
        assert!(is_prime(1_000_003));
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn integer_factoring() {
        assert_eq!(factor_u64(675), vec![(3, 3), (5, 2)]);
        assert_eq!(factor_u64(1_000_003 * 999_983), vec![(999_983, 1), (1_000_003, 1)]);
        let f = factor_bigint(&BigInt::from(-12)).unwrap();
        assert_eq!(f, vec![(BigInt::from(2), 2), (BigInt::from(3), 1)]);
    }

    #[test]
    fn factor_mod_p_product() {
        let p = 101;
        // (x+1)(x+2)(x^2+3) with x^2+3 irreducible mod 101? check by product
        let f = mul(&mul(&vec![1, 1], &vec![2, 1], p), &vec![3, 0, 1], p);
        let fs = factor_squarefree(&f, p);
        let prod = fs.iter().fold(vec![1], |acc, g| mul(&acc, g, p));
        assert_eq!(prod, f);
        for g in &fs {
            assert_eq!(distinct_degree(g, p).len(), 1);
        }
    }
}
