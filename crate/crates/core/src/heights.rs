//! Weil and canonical heights, the height gap constant of a map, and bounds
//! on the heights of algebraic points given by a polynomial.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{log_abs, Rat};
use crate::base::Base;
use crate::dynamics::{ProjPoint, RationalMap};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

/// Largest height (in bits) an iterate may reach during canonical height
/// evaluation before the computation is abandoned.
pub const DEFAULT_BIT_CAP: f64 = 4_000_000.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub iterations: usize,
}

/// `|h(phi(P)) - d h(P)| <= c_map` for all `P`; the two one-sided constants
/// are kept since several arguments need only one direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapConstant {
    /// `h(phi(P)) <= d h(P) + c_up`
    pub c_up: f64,
    /// `d h(P) <= h(phi(P)) + c_low`
    pub c_low: f64,
    pub c_map: f64,
}

impl GapConstant {
    /// Every point whose height exceeds this value has strictly increasing
    /// heights along its forward orbit, hence wanders.
    pub fn escape_height(&self, d: usize) -> f64 {
        self.c_low / (d as f64 - 1.0)
    }
}

pub fn weil_height<K: Base>(p: &ProjPoint<K>) -> f64 {
    p.height()
}

/// Gap constant from the coefficient size (upper direction) and from the
/// Nullstellensatz cofactors `A F + B G = X^(2d-1)`, `A' F + B' G = Z^(2d-1)`
/// (lower direction).
pub fn height_gap_constant<K: Base>(map: &RationalMap<K>) -> GapConstant {
    let d = map.degree();
    let c_up = K::upper_gap(&map.coefficients(), d);
    let sets: Vec<Vec<K>> = [true, false]
        .iter()
        .map(|&top| {
            let (a, b) = map.nullstellensatz(top);
            (0..d).map(|i| a.coeff(i)).chain((0..d).map(|i| b.coeff(i))).collect()
        })
        .collect();
    let c_low = K::cofactor_size(&sets).max(0.0);
    GapConstant {
        c_up,
        c_low,
        c_map: c_up.max(c_low),
    }
}

/// `h(phi^N(P)) / d^N` with `N` large enough that the telescoping error
/// `C / (d^N (d - 1))` is at most `tol`.
pub fn canonical_height<K: Base>(map: &RationalMap<K>, p: &ProjPoint<K>, tol: f64) -> Result<HeightEstimate> {
    canonical_height_capped(map, p, tol, DEFAULT_BIT_CAP)
}

pub fn canonical_height_capped<K: Base>(
    map: &RationalMap<K>,
    p: &ProjPoint<K>,
    tol: f64,
    bit_cap: f64,
) -> Result<HeightEstimate> {
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let d = map.degree() as f64;
    let c = height_gap_constant(map).c_map;
    let mut n = 0usize;
    let mut scale = 1.0f64;
    while c / (scale * (d - 1.0)) > tol {
        n += 1;
        scale *= d;
    }
    let mut q = p.clone();
    let mut dk = 1.0f64;
    for k in 0..n {
        // refuse a step whose result would already be too large to hold
        let h = q.height();
        if K::storage_bits(d * h) > bit_cap {
            return Err(Error::Precision {
                steps: k,
                partial: h / dk,
            });
        }
        q = map.apply(&q);
        dk *= d;
    }
    Ok(HeightEstimate {
        value: q.height() / scale,
        error_bound: c / (scale * (d - 1.0)),
        iterations: n,
    })
}

/// Height bounds for the roots of a polynomial over the base.
pub fn root_height_bounds<K: Base>(f: &Poly<K>, irreducible: bool) -> (f64, f64) {
    K::root_height_bounds(f, irreducible)
}

/// One instance of the inequality bounding the primes where two points meet.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeetingBound {
    /// Sum of the weights of the places where the reductions agree.
    pub lhs: f64,
    /// `min(h(x), h(y)) + h(x) + h(y) + c_K`.
    pub rhs: f64,
}

impl MeetingBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-9 * self.rhs.abs().max(1.0)
    }
}

/// `a_x b_y - a_y b_x` on normalized primitive coordinates.
pub fn cross<K: Base>(x: &ProjPoint<K>, y: &ProjPoint<K>) -> K {
    x.a().clone() * y.b() - &(y.a().clone() * x.b())
}

/// Over `Q`: `sum_{p : r_p(x) = r_p(y)} log p` against the height bound.
pub fn meeting_bound_q(x: &ProjPoint<Rat>, y: &ProjPoint<Rat>) -> Result<MeetingBound> {
    let primes = crate::portraits::common_reduction_primes(x, y)?;
    let lhs = primes.iter().map(|p: &BigInt| log_abs(p)).sum();
    let (hx, hy) = (x.height(), y.height());
    Ok(MeetingBound {
        lhs,
        rhs: hx.min(hy) + hx + hy + std::f64::consts::LN_2,
    })
}

/// Over `Q(t)`: the finite places where the points meet weighted by degree,
/// plus the infinite place when they meet there; `c_K = 0`.
pub fn meeting_bound_ff(x: &ProjPoint<RatFunc>, y: &ProjPoint<RatFunc>) -> Result<MeetingBound> {
    if x == y {
        return Err(Error::Invalid("points must differ".into()));
    }
    let c = cross(x, y);
    let num = c.num();
    let finite = if num.deg() == 0 { 0 } else { num.squarefree_part().deg() };
    let dx = x.a().num().deg().max(x.b().num().deg());
    let dy = y.a().num().deg().max(y.b().num().deg());
    let at_inf = (num.deg() < dx + dy) as usize;
    let (hx, hy) = (x.height(), y.height());
    Ok(MeetingBound {
        lhs: (finite + at_inf) as f64,
        rhs: hx.min(hy) + hx + hy,
    })
}

/// How the forward orbit of a point behaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitType {
    /// The iterate with this index has height above the escape height.
    Wandering {
        certified_at: usize,
    },
    Preperiodic {
        m: usize,
        n: usize,
    },
}

pub const DEFAULT_ORBIT_STEPS: usize = 64;

/// Decides whether `p` is preperiodic by iterating until a repeat, or until
/// an iterate passes the escape height of the map.
pub fn classify_orbit<K: Base>(map: &RationalMap<K>, p: &ProjPoint<K>, step_cap: usize) -> Result<OrbitType> {
    let bound = height_gap_constant(map).escape_height(map.degree());
    let mut seen = std::collections::HashMap::new();
    let mut q = p.clone();
    for k in 0..=step_cap {
        if let Some(&j) = seen.get(&q) {
            return Ok(OrbitType::Preperiodic { m: j, n: k - j });
        }
        if q.height() > bound + 1e-12 {
            return Ok(OrbitType::Wandering { certified_at: k });
        }
        let next = map.apply(&q);
        seen.insert(q, k);
        q = next;
    }
    Err(Error::Cap {
        name: "orbit classification steps",
        limit: step_cap,
        requested: step_cap + 1,
    })
}

/// Exact `h(x)` for a rational point, used by tests and the CLI.
pub fn rational_height(r: &Rat) -> f64 {
    let n = if r.numer().is_zero() { 0.0 } else { log_abs(r.numer()) };
    n.max(log_abs(r.denom()))
}

impl<K: Base> ProjPoint<K> {
    /// Applies `phi` `k` times and divides the height by `d^k`.
    pub fn normalized_height_after(&self, map: &RationalMap<K>, k: usize) -> f64 {
        let q = map.iterate(self, k);
        q.height() / (map.degree() as f64).powi(k as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, Field};

    fn map(v: &[i64]) -> RationalMap<Rat> {
        RationalMap::polynomial(&Poly::from_i64s(v)).unwrap()
    }

    fn pt(n: i64, d: i64) -> ProjPoint<Rat> {
        ProjPoint::affine(rat(n, d))
    }

    #[test]
    fn weil_examples() {
        assert!((weil_height(&pt(3, 2)) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(weil_height(&ProjPoint::<Rat>::infinity()), 0.0);
        let p = ProjPoint::new(rat(6, 1), rat(4, 1)).unwrap();
        assert!((weil_height(&p) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn power_map_gap_is_zero() {
        let g = height_gap_constant(&map(&[0, 0, 1]));
        assert_eq!(g.c_low, 0.0);
        let e = canonical_height(&map(&[0, 0, 1]), &pt(2, 1), 1e-9).unwrap();
        assert!((e.value - 2f64.ln()).abs() <= 1e-9);
        let e = canonical_height(&map(&[0, 0, 1]), &pt(1, 1), 1e-9).unwrap();
        assert!(e.value.abs() <= 1e-9);
    }

    #[test]
    fn gap_for_x2_plus_1() {
        let g = height_gap_constant(&map(&[1, 0, 1]));
        assert!((g.c_low - 2f64.ln()).abs() < 1e-12);
        assert!((g.c_up - 2f64.ln()).abs() < 1e-12);
        assert!(g.c_up <= 3f64.ln());
    }

    #[test]
    fn canonical_height_is_consistent() {
        let m = map(&[1, 0, 1]);
        let e = canonical_height(&m, &pt(0, 1), 1e-3).unwrap();
        assert!(e.value > 0.0 && e.error_bound <= 1e-3);
        let finer = pt(0, 1).normalized_height_after(&m, e.iterations + 4);
        let c = height_gap_constant(&m).c_map;
        let bound = e.error_bound + c / (2f64.powi(e.iterations as i32 + 4));
        assert!((finer - e.value).abs() <= bound);
    }

    #[test]
    fn meeting_examples() {
        let b = meeting_bound_q(&pt(1, 3), &pt(2, 3)).unwrap();
        assert!((b.lhs - 3f64.ln()).abs() < 1e-12 && b.holds());
        let t = RatFunc::t();
        let x = ProjPoint::affine(t.clone());
        let y = ProjPoint::affine(t.clone() * &t + &RatFunc::one());
        assert!(meeting_bound_ff(&x, &y).unwrap().holds());
    }
}
