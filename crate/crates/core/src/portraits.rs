//! Portraits of orbits modulo primes, the squarefree condition at a prime,
//! and the search for primes where both hold.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::Rat;
use crate::dynamics::{ProjPoint, RationalMap};
use crate::error::{Error, Result};
use crate::heights::{classify_orbit, cross, OrbitType, DEFAULT_ORBIT_STEPS};
use crate::modp::{big_mod, factor_bigint, inv_mod, is_prime, primes_up_to};
use crate::residue::ResidueRing;

/// Preperiod and period of an orbit in a finite set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Portrait {
    pub m: usize,
    pub n: usize,
}

impl Portrait {
    pub fn new(m: usize, n: usize) -> Self {
        Portrait { m, n }
    }
}

impl fmt::Display for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// A point of `P^1(F_p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Residue {
    Affine(u64),
    Infinity,
}

/// `ord_p` of the difference of two points, truncated at 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValuationClass {
    Zero,
    One,
    AtLeastTwo,
}

impl ValuationClass {
    fn from_ord(v: u32) -> Self {
        match v {
            0 => ValuationClass::Zero,
            1 => ValuationClass::One,
            _ => ValuationClass::AtLeastTwo,
        }
    }
}

impl fmt::Display for ValuationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValuationClass::Zero => "0",
            ValuationClass::One => "1",
            ValuationClass::AtLeastTwo => ">=2",
        })
    }
}

impl Serialize for ValuationClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Integer coefficients of the map forms, reduced once per prime.
struct MapMod {
    ring: ResidueRing,
    f: Vec<u64>,
    g: Vec<u64>,
    d: usize,
}

impl MapMod {
    fn new(map: &RationalMap<Rat>, ring: ResidueRing) -> Self {
        let red = |c: Rat| ring.from_bigint(c.numer());
        MapMod {
            ring,
            f: (0..=map.degree()).map(|i| red(map.f().coeff(i))).collect(),
            g: (0..=map.degree()).map(|i| red(map.g().coeff(i))).collect(),
            d: map.degree(),
        }
    }

    fn apply(&self, (a, b): (u64, u64)) -> (u64, u64) {
        (
            self.ring.eval_hom(&self.f, self.d, a, b),
            self.ring.eval_hom(&self.g, self.d, a, b),
        )
    }
}

fn integer(r: &Rat) -> &BigInt {
    debug_assert!(r.denom() == &BigInt::from(1));
    r.numer()
}

/// Homogeneous coordinates of a point, reduced into `ring`.
fn coords(p: &ProjPoint<Rat>, ring: &ResidueRing) -> (u64, u64) {
    (ring.from_bigint(integer(p.a())), ring.from_bigint(integer(p.b())))
}

fn to_residue((a, b): (u64, u64), p: u64) -> Residue {
    let (a, b) = (a % p, b % p);
    if b == 0 {
        Residue::Infinity
    } else {
        Residue::Affine(((a as u128 * inv_mod(b, p) as u128) % p as u128) as u64)
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) || p > u32::MAX as u64 {
        return Err(Error::Invalid(format!("{p} is not a prime below 2^32")));
    }
    Ok(())
}

fn check_good(map: &RationalMap<Rat>, p: u64) -> Result<()> {
    if big_mod(integer(&map.homogeneous_resultant()), p) == 0 {
        return Err(Error::BadReduction(p.to_string()));
    }
    Ok(())
}

/// Reduction of a rational point into `P^1(F_p)`.
pub fn reduce_point(x: &ProjPoint<Rat>, p: u64) -> Result<Residue> {
    check_prime(p)?;
    Ok(to_residue(coords(x, &ResidueRing::modulo_p(p)), p))
}

/// Portrait of the reduction of `alpha` under the reduction of the map.
pub fn portrait_mod_p(map: &RationalMap<Rat>, alpha: &ProjPoint<Rat>, p: u64) -> Result<Portrait> {
    check_prime(p)?;
    check_good(map, p)?;
    let ring = ResidueRing::modulo_p(p);
    Ok(walk(&MapMod::new(map, ring), coords(alpha, &ring)))
}

/// Full orbit walk with a table of visited residues.
fn walk(mm: &MapMod, start: (u64, u64)) -> Portrait {
    let p = mm.ring.prime();
    let mut seen: HashMap<Residue, usize> = HashMap::new();
    let mut x = start;
    let mut k = 0;
    loop {
        let r = to_residue(x, p);
        if let Some(&j) = seen.get(&r) {
            return Portrait::new(j, k - j);
        }
        seen.insert(r, k);
        // normalize before iterating so the walk never sees (0, 0)
        x = match r {
            Residue::Affine(v) => mm.apply((v, 1)),
            Residue::Infinity => mm.apply((1, 0)),
        };
        k += 1;
    }
}

/// The valuation of `phi^(m+n)(alpha) - phi^m(alpha)` at `p`, computed from
/// the homogeneous cross product modulo `p^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationReport {
    pub prime: u64,
    pub valuation: ValuationClass,
}

pub fn valuation_of_difference(
    map: &RationalMap<Rat>,
    alpha: &ProjPoint<Rat>,
    m: usize,
    n: usize,
    p: u64,
) -> Result<ValuationReport> {
    check_prime(p)?;
    check_good(map, p)?;
    if n == 0 {
        return Err(Error::Invalid("period must be positive".into()));
    }
    let ring = ResidueRing::modulo_p2(p);
    let mm = MapMod::new(map, ring);
    let orbit = homogeneous_orbit(&mm, coords(alpha, &ring), m + n);
    let (x, y) = (orbit[m], orbit[m + n]);
    if x.1 % p == 0 || y.1 % p == 0 {
        return Err(Error::AtInfinity(format!("an endpoint reduces to infinity modulo {p}")));
    }
    Ok(ValuationReport {
        prime: p,
        valuation: cross_class(&ring, x, y),
    })
}

fn homogeneous_orbit(mm: &MapMod, start: (u64, u64), len: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(len + 1);
    out.push(start);
    for _ in 0..len {
        let next = mm.apply(*out.last().unwrap());
        out.push(next);
    }
    out
}

fn cross_class(ring: &ResidueRing, x: (u64, u64), y: (u64, u64)) -> ValuationClass {
    let c = ring.sub(ring.mul(x.0, y.1), ring.mul(y.0, x.1));
    ValuationClass::from_ord(ring.valuation(c))
}

/// Second, independent route to the valuation: affine arithmetic modulo `p^2`
/// with the coordinates rescaled to `(x, 1)` or `(1, y)` after every step.
fn affine_valuation(mm: &MapMod, alpha: (u64, u64), m: usize, n: usize) -> Option<ValuationClass> {
    let ring = &mm.ring;
    let rescale = |(a, b): (u64, u64)| -> (u64, u64) {
        match ring.inv(b) {
            Some(ib) => (ring.mul(a, ib), 1),
            None => (1, ring.mul(b, ring.inv(a).expect("a unit coordinate"))),
        }
    };
    let mut x = rescale(alpha);
    let mut first = None;
    for k in 0..=m + n {
        if k == m {
            first = Some(x);
        }
        if k == m + n {
            break;
        }
        x = rescale(mm.apply(x));
    }
    let (u, v) = (first?, x);
    if u.1 != 1 || v.1 != 1 {
        return None;
    }
    Some(ValuationClass::from_ord(ring.valuation(ring.sub(v.0, u.0))))
}

/// The orbit must wander, and the two endpoints must be finite.
fn global_preconditions(map: &RationalMap<Rat>, alpha: &ProjPoint<Rat>, m: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("period must be positive".into()));
    }
    if let OrbitType::Preperiodic { m: pm, n: pn } = classify_orbit(map, alpha, DEFAULT_ORBIT_STEPS.max(m + n + 1))? {
        return Err(Error::Preperiodic(format!("{alpha} has portrait ({pm}, {pn})")));
    }
    for k in [m, m + n] {
        if !globally_finite(map, alpha, k)? {
            return Err(Error::AtInfinity(format!("phi^{k}({alpha}) is infinity")));
        }
    }
    Ok(())
}

/// Whether `phi^k(alpha)` is a finite point. A good prime at which the
/// iterate reduces to a finite point settles it; exact iteration is the
/// fallback.
pub fn globally_finite(map: &RationalMap<Rat>, alpha: &ProjPoint<Rat>, k: usize) -> Result<bool> {
    if map.g().deg() == 0 {
        return Ok(!alpha.is_infinity());
    }
    let res = integer(&map.homogeneous_resultant()).clone();
    let mut p = (1u64 << 31) - 1;
    let mut tried = 0;
    while tried < 8 {
        if is_prime(p) && big_mod(&res, p) != 0 {
            tried += 1;
            let ring = ResidueRing::modulo_p(p);
            let mm = MapMod::new(map, ring);
            let end = *homogeneous_orbit(&mm, coords(alpha, &ring), k).last().unwrap();
            if end.1 != 0 {
                return Ok(true);
            }
        }
        p -= 2;
    }
    Ok(!map.iterate(alpha, k).is_infinity())
}

/// `true` iff `alpha` has portrait `(m, n)` modulo `p` and the
/// difference `phi^(m+n)(alpha) - phi^m(alpha)` has valuation exactly one.
pub fn is_squarefree_portrait(
    map: &RationalMap<Rat>,
    alpha: &ProjPoint<Rat>,
    m: usize,
    n: usize,
    p: u64,
) -> Result<bool> {
    global_preconditions(map, alpha, m, n)?;
    if portrait_mod_p(map, alpha, p)? != Portrait::new(m, n) {
        return Ok(false);
    }
    Ok(valuation_of_difference(map, alpha, m, n, p)?.valuation == ValuationClass::One)
}

/// The independent checks run on each witness before it is reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    /// Portrait from a full orbit walk with a visited-set.
    pub walk_portrait: Portrait,
    /// Valuation from rescaled affine arithmetic modulo `p^2`.
    pub affine_valuation: ValuationClass,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub prime: u64,
    pub portrait: Portrait,
    pub squarefree: bool,
    pub verification: Verification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkippedPrime {
    pub prime: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub m: usize,
    pub n: usize,
    pub p_max: u64,
    pub primes_scanned: usize,
    pub bad_primes: Vec<u64>,
    pub witnesses: Vec<Witness>,
    pub skipped: Vec<SkippedPrime>,
}

const BLOCK: usize = 2048;

/// All primes `p <= p_max` at which `alpha` has portrait `(m, n)` and the
/// squarefree condition holds. Primes of bad reduction and those in
/// `exclude` are passed over; the result does not depend on `threads`.
pub fn search_witnesses(
    map: &RationalMap<Rat>,
    alpha: &ProjPoint<Rat>,
    m: usize,
    n: usize,
    p_max: u64,
    exclude: &[u64],
    threads: usize,
) -> Result<SearchOutcome> {
    if p_max > u32::MAX as u64 {
        return Err(Error::Cap {
            name: "p_max",
            limit: u32::MAX as usize,
            requested: p_max as usize,
        });
    }
    global_preconditions(map, alpha, m, n)?;
    let res = integer(&map.homogeneous_resultant()).clone();
    let primes = primes_up_to(p_max);
    let mut bad = Vec::new();
    let candidates: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| {
            if big_mod(&res, p) == 0 {
                bad.push(p);
                return false;
            }
            !exclude.contains(&p)
        })
        .collect();
    let target = Portrait::new(m, n);
    let blocks: Vec<(Vec<Witness>, Vec<SkippedPrime>)> = crate::workers::with_pool(threads.max(1), || {
        candidates
            .par_chunks(BLOCK)
            .map(|chunk| {
                let mut found = Vec::new();
                let mut skipped = Vec::new();
                for &p in chunk {
                    match test_prime(map, alpha, target, p) {
                        PrimeResult::Witness(w) => found.push(w),
                        PrimeResult::Skip(reason) => skipped.push(SkippedPrime { prime: p, reason }),
                        PrimeResult::No => {}
                    }
                }
                (found, skipped)
            })
            .collect()
    });
    let mut witnesses = Vec::new();
    let mut skipped = Vec::new();
    for (w, s) in blocks {
        witnesses.extend(w);
        skipped.extend(s);
    }
    Ok(SearchOutcome {
        m,
        n,
        p_max,
        primes_scanned: primes.len(),
        bad_primes: bad,
        witnesses,
        skipped,
    })
}

enum PrimeResult {
    Witness(Witness),
    Skip(String),
    No,
}

fn test_prime(map: &RationalMap<Rat>, alpha: &ProjPoint<Rat>, target: Portrait, p: u64) -> PrimeResult {
    let (m, n) = (target.m, target.n);
    let ring = ResidueRing::modulo_p2(p);
    let mm = MapMod::new(map, ring);
    let start = coords(alpha, &ring);
    let orbit = homogeneous_orbit(&mm, start, m + n);
    let (x, y) = (orbit[m], orbit[m + n]);
    if x.1 % p == 0 || y.1 % p == 0 {
        return PrimeResult::Skip("endpoint reduces to infinity".into());
    }
    let red: Vec<Residue> = orbit.iter().map(|&c| to_residue(c, p)).collect();
    let exact =
        red[m + n] == red[m] && (1..n).all(|j| red[m + j] != red[m]) && (m == 0 || red[m - 1 + n] != red[m - 1]);
    if !exact {
        return PrimeResult::No;
    }
    let valuation = cross_class(&ring, x, y);
    if valuation != ValuationClass::One {
        return PrimeResult::No;
    }
    let walk_portrait = walk(
        &MapMod::new(map, ResidueRing::modulo_p(p)),
        coords(alpha, &ResidueRing::modulo_p(p)),
    );
    let affine = affine_valuation(&mm, start, m, n).unwrap_or(ValuationClass::Zero);
    let passed = walk_portrait == target && affine == ValuationClass::One;
    if !passed {
        return PrimeResult::Skip(format!(
            "re-verification disagreed: walk {walk_portrait}, affine valuation {affine}"
        ));
    }
    PrimeResult::Witness(Witness {
        prime: p,
        portrait: target,
        squarefree: valuation == ValuationClass::One,
        verification: Verification {
            walk_portrait,
            affine_valuation: affine,
            passed,
        },
    })
}

/// Primes at which two distinct rational points have the same reduction.
pub fn common_reduction_primes(x: &ProjPoint<Rat>, y: &ProjPoint<Rat>) -> Result<Vec<BigInt>> {
    if x == y {
        return Err(Error::Invalid("points must differ".into()));
    }
    let c = cross(x, y);
    let c = integer(&c).abs();
    debug_assert!(!c.is_zero());
    if c.is_one_abs() {
        return Ok(Vec::new());
    }
    let f = factor_bigint(&c).ok_or(Error::Cap {
        name: "integer factorization",
        limit: 0,
        requested: c.bits() as usize,
    })?;
    Ok(f.into_iter().map(|(p, _)| p).collect())
}

/// Full factorization of the cross product of `phi^m(alpha)` and
/// `phi^(m+n)(alpha)`, when trial division finishes it. Once every prime
/// found is at most `p_max`, a search up to `p_max` has seen every prime
/// where the two iterates can meet.
pub fn difference_factorization(
    map: &RationalMap<Rat>,
    alpha: &ProjPoint<Rat>,
    m: usize,
    n: usize,
) -> Result<Option<Vec<(BigInt, u32)>>> {
    let orbit = map.orbit(alpha, m + n);
    if orbit[m] == orbit[m + n] {
        return Err(Error::Preperiodic(format!("{alpha} repeats at step {m}")));
    }
    let c = integer(&cross(&orbit[m + n], &orbit[m])).abs();
    if c.is_one_abs() {
        return Ok(Some(Vec::new()));
    }
    Ok(factor_bigint(&c))
}

trait OneAbs {
    fn is_one_abs(&self) -> bool;
}

impl OneAbs for BigInt {
    fn is_one_abs(&self) -> bool {
        self.abs() == BigInt::from(1)
    }
}

/// `ord_p(x)` for a nonzero integer.
pub fn ord_p(x: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while !x.is_zero() && x.is_multiple_of(&p) {
        x /= &p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn map(v: &[i64]) -> RationalMap<Rat> {
        RationalMap::polynomial(&Poly::from_i64s(v)).unwrap()
    }

    fn pt(v: i64) -> ProjPoint<Rat> {
        ProjPoint::affine(crate::arith::rat(v, 1))
    }

    #[test]
    fn reductions() {
        assert_eq!(reduce_point(&pt(2), 5).unwrap(), Residue::Affine(2));
        assert_eq!(reduce_point(&pt(5), 5).unwrap(), Residue::Affine(0));
        let p = ProjPoint::new(crate::arith::rat(1, 1), crate::arith::rat(5, 1)).unwrap();
        assert_eq!(reduce_point(&p, 5).unwrap(), Residue::Infinity);
    }

    #[test]
    fn walks() {
        let m = map(&[1, 0, 1]);
        assert_eq!(portrait_mod_p(&m, &pt(2), 5).unwrap(), Portrait::new(0, 3));
        assert_eq!(portrait_mod_p(&m, &pt(0), 3).unwrap(), Portrait::new(2, 1));
        assert_eq!(
            portrait_mod_p(&map(&[0, 0, 1]), &pt(1), 7).unwrap(),
            Portrait::new(0, 1)
        );
        assert!(matches!(portrait_mod_p(&m, &pt(2), 4), Err(Error::Invalid(_))));
    }

    #[test]
    fn valuations() {
        let sq = map(&[0, 0, 1]);
        assert_eq!(
            valuation_of_difference(&sq, &pt(2), 0, 1, 2).unwrap().valuation,
            ValuationClass::One
        );
        let m = map(&[1, 0, 1]);
        // phi^3(2) - 2 = 675 = 3^3 5^2
        assert_eq!(
            valuation_of_difference(&m, &pt(2), 0, 3, 5).unwrap().valuation,
            ValuationClass::AtLeastTwo
        );
        assert_eq!(
            valuation_of_difference(&m, &pt(2), 0, 3, 7).unwrap().valuation,
            ValuationClass::Zero
        );
    }

    #[test]
    fn squarefree_portraits() {
        let m = map(&[1, 0, 1]);
        assert!(is_squarefree_portrait(&m, &pt(2), 0, 1, 3).unwrap());
        assert!(!is_squarefree_portrait(&m, &pt(2), 0, 3, 5).unwrap());
        assert!(is_squarefree_portrait(&map(&[0, 0, 1]), &pt(2), 0, 1, 2).unwrap());
    }

    #[test]
    fn small_searches() {
        let m = map(&[1, 0, 1]);
        let out = search_witnesses(&m, &pt(2), 0, 1, 100, &[], 1).unwrap();
        assert!(out.witnesses.iter().any(|w| w.prime == 3));
        let x = map(&[0, 1, 1]);
        for mm in 0..3 {
            assert!(search_witnesses(&x, &pt(1), mm, 1, 3000, &[], 2)
                .unwrap()
                .witnesses
                .is_empty());
        }
    }

    #[test]
    fn search_matches_brute_force() {
        let m = map(&[1, 0, 1]);
        let out = search_witnesses(&m, &pt(0), 1, 2, 2000, &[], 2).unwrap();
        for w in &out.witnesses {
            assert!(is_squarefree_portrait(&m, &pt(0), 1, 2, w.prime).unwrap());
        }
        let brute: Vec<u64> = primes_up_to(2000)
            .into_iter()
            .filter(|&p| is_squarefree_portrait(&m, &pt(0), 1, 2, p).unwrap_or(false))
            .collect();
        let got: Vec<u64> = out.witnesses.iter().map(|w| w.prime).collect();
        assert_eq!(got, brute);
    }

    #[test]
    fn preperiodic_is_rejected() {
        let m = map(&[0, 0, 1]);
        assert!(matches!(
            search_witnesses(&m, &pt(1), 0, 1, 100, &[], 1),
            Err(Error::Preperiodic(_))
        ));
    }

    #[test]
    fn common_primes() {
        let a = ProjPoint::affine(crate::arith::rat(1, 3));
        let b = ProjPoint::affine(crate::arith::rat(2, 3));
        assert_eq!(common_reduction_primes(&a, &b).unwrap(), vec![BigInt::from(3)]);
        assert!(common_reduction_primes(&pt(0), &ProjPoint::infinity())
            .unwrap()
            .is_empty());
        assert_eq!(common_reduction_primes(&pt(5), &pt(0)).unwrap(), vec![BigInt::from(5)]);
        assert!(common_reduction_primes(&pt(5), &pt(5)).is_err());
        assert_eq!(ord_p(&BigInt::from(50), 5), 2);
    }
}
