//! The function-field track over `Q(t)`: places, valuations, multiplicity
//! profiles, orbits over residue fields `Q[t]/(pi)`, Gleason polynomials and
//! the witness-place search.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{Field, Rat};
use crate::dynamics::{nullstellensatz_forms, ProjPoint, RationalMap};
use crate::error::{Error, Result};
use crate::factor::{factor_rational_poly, small_degree_factors, DEFAULT_FACTOR_CAP};
use crate::heights::{classify_orbit, OrbitType, DEFAULT_ORBIT_STEPS};
use crate::modp::{self, is_prime};
use crate::poly::Poly;
use crate::portraits::Portrait;
use crate::quot::{QElem, QuotField};
use crate::ratfunc::RatFunc;

/// Default number of residue-field iterations before giving up on a place.
pub const DEFAULT_PLACE_STEPS: usize = 64;
/// Largest `m + n` accepted by the witness-place search.
pub const DEFAULT_FF_ORBIT_CAP: usize = 12;

/// A place of `Q(t)` trivial on `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FFPlace {
    /// A monic irreducible `pi`, standing for `deg pi` conjugate places.
    Finite(Poly<Rat>),
    Infinity,
}

impl FFPlace {
    /// Checks that `pi` is irreducible and makes it monic.
    pub fn finite(pi: &Poly<Rat>) -> Result<Self> {
        QuotField::new(pi)?;
        Ok(FFPlace::Finite(pi.monic()))
    }

    pub fn weight(&self) -> usize {
        match self {
            FFPlace::Finite(p) => p.deg(),
            FFPlace::Infinity => 1,
        }
    }

    fn key(&self) -> (usize, Vec<Rat>) {
        match self {
            FFPlace::Finite(p) => (p.deg(), p.coeffs().to_vec()),
            FFPlace::Infinity => (usize::MAX, Vec::new()),
        }
    }
}

impl Ord for FFPlace {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl PartialOrd for FFPlace {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for FFPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FFPlace::Finite(p) => f.write_str(&p.fmt_var("t")),
            FFPlace::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for FFPlace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FFPlace", 2)?;
        st.serialize_field("place", &self.to_string())?;
        st.serialize_field("weight", &self.weight())?;
        st.end()
    }
}

fn poly_ord(f: &Poly<Rat>, pi: &Poly<Rat>) -> i64 {
    let mut f = f.clone();
    let mut v = 0;
    while let Some(q) = f.div_exact(pi) {
        f = q;
        v += 1;
    }
    v
}

/// `ord_v(f)` for nonzero `f`.
pub fn ff_ord(f: &RatFunc, place: &FFPlace) -> Result<i64> {
    if f.is_zero() {
        return Err(Error::Invalid("the valuation of 0 is infinite".into()));
    }
    Ok(match place {
        FFPlace::Finite(pi) => poly_ord(f.num(), pi) - poly_ord(f.den(), pi),
        FFPlace::Infinity => f.den().deg() as i64 - f.num().deg() as i64,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProfileEntry {
    Place(FFPlace),
    /// A squarefree product of irreducibles left unsplit.
    Block(Poly<Rat>),
}

impl ProfileEntry {
    fn poly(&self) -> Poly<Rat> {
        match self {
            ProfileEntry::Place(FFPlace::Finite(p)) | ProfileEntry::Block(p) => p.clone(),
            ProfileEntry::Place(FFPlace::Infinity) => Poly::one(),
        }
    }
}

impl Serialize for ProfileEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ProfileEntry::Place(p) => p.serialize(s),
            ProfileEntry::Block(b) => {
                let mut st = s.serialize_struct("Block", 1)?;
                st.serialize_field("block", &b.fmt_var("t"))?;
                st.end()
            }
        }
    }
}

/// Factorization data of a polynomial in `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityProfile {
    pub entries: Vec<(ProfileEntry, usize)>,
    /// Every entry is a place.
    pub complete: bool,
}

impl MultiplicityProfile {
    /// Product of `entry^multiplicity`, monic.
    pub fn expand(&self) -> Poly<Rat> {
        self.entries
            .iter()
            .fold(Poly::one(), |acc, (e, k)| &acc * &e.poly().pow(*k as u32))
    }

    /// Irreducible factors of multiplicity one.
    pub fn simple_places(&self) -> Vec<Poly<Rat>> {
        self.entries
            .iter()
            .filter_map(|(e, k)| match (e, k) {
                (ProfileEntry::Place(FFPlace::Finite(p)), 1) => Some(p.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn has_simple_part(&self) -> bool {
        self.entries.iter().any(|(_, k)| *k == 1)
    }
}

pub fn ff_squarefree_profile(f: &Poly<Rat>) -> Result<MultiplicityProfile> {
    if f.is_zero() {
        return Err(Error::ZeroPoly("profile input"));
    }
    let mut entries = Vec::new();
    let mut complete = true;
    if f.deg() > 0 {
        for (block, mult) in f.squarefree_decompose()? {
            match factor_rational_poly(&block, DEFAULT_FACTOR_CAP) {
                Ok(fac) => {
                    for (p, _) in fac.factors {
                        entries.push((ProfileEntry::Place(FFPlace::Finite(p.monic())), mult));
                    }
                }
                Err(_) => {
                    let (small, rest) = small_degree_factors(&block, 2);
                    for p in small {
                        entries.push((ProfileEntry::Place(FFPlace::Finite(p.monic())), mult));
                    }
                    if rest.deg() > 0 {
                        complete = false;
                        entries.push((ProfileEntry::Block(rest.monic()), mult));
                    }
                }
            }
        }
    }
    entries.sort_by_key(|(a, _)| entry_key(a));
    Ok(MultiplicityProfile { entries, complete })
}

fn entry_key(e: &ProfileEntry) -> (usize, Vec<Rat>) {
    let p = e.poly();
    (p.deg(), p.coeffs().to_vec())
}

/// Number of distinct roots in `Q-bar`: the degree of the squarefree part.
pub fn distinct_factor_count(g: &Poly<Rat>) -> usize {
    if g.deg() == 0 {
        0
    } else {
        g.squarefree_part().deg()
    }
}

/// Proves squarefreeness from a prime where the reduction keeps its degree
/// and is squarefree, falling back to the exact gcd.
pub fn is_squarefree_certified(f: &Poly<Rat>) -> bool {
    if f.deg() <= 1 {
        return true;
    }
    let mut p = (1u64 << 31) - 1;
    let mut tried = 0;
    while tried < 6 {
        if is_prime(p) {
            if let Some(fp) = modp::reduce_poly(f, p) {
                if modp::deg(&fp) == f.deg() as isize {
                    tried += 1;
                    let g = modp::gcd(&fp, &modp::derivative(&fp, p), p);
                    if modp::deg(&g) == 0 {
                        return true;
                    }
                }
            }
        }
        p -= 2;
    }
    f.is_squarefree()
}

/// `g_n = phi^n(0)` for `n = 1..=n_max` and whether each is squarefree.
///
/// The iteration runs in `F_p[t]` for a few large primes. A prime certifies
/// `g_n` when the reduction reaches the formal degree bound of `g_n` and is
/// squarefree; anything left uncertified is decided exactly over `Q`.
pub fn gleason_check(map: &RationalMap<RatFunc>, n_max: usize) -> Result<Vec<(usize, bool)>> {
    if !map.g().is_one() {
        return Err(Error::Invalid("Gleason polynomials need a polynomial map".into()));
    }
    let coeffs: Vec<Poly<Rat>> = (0..=map.degree())
        .map(|i| {
            let c = map.f().coeff(i);
            if c.is_poly() {
                Ok(c.num().clone())
            } else {
                Err(Error::Invalid("map coefficients must be polynomials in t".into()))
            }
        })
        .collect::<Result<_>>()?;
    let mut bounds: Vec<Option<usize>> = Vec::with_capacity(n_max);
    let mut prev: Option<usize> = None;
    for _ in 0..n_max {
        let next = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .filter_map(|(i, c)| match (i, prev) {
                (0, _) => Some(c.deg()),
                (_, Some(b)) => Some(c.deg() + i * b),
                (_, None) => None,
            })
            .max();
        bounds.push(next);
        prev = next;
    }
    let mut certified = vec![false; n_max];
    let mut p = (1u64 << 31) - 1;
    let mut tried = 0;
    while tried < 6 && certified.iter().any(|c| !c) {
        p -= 2;
        if !is_prime(p + 2) {
            continue;
        }
        let q = p + 2;
        let Some(red) = coeffs
            .iter()
            .map(|c| modp::reduce_poly(c, q))
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        tried += 1;
        let mut g: Vec<u64> = Vec::new();
        for n in 0..n_max {
            let mut acc: Vec<u64> = Vec::new();
            for c in red.iter().rev() {
                acc = modp::add(&modp::mul(&acc, &g, q), c, q);
            }
            g = acc;
            if !certified[n] && bounds[n].is_some_and(|b| modp::deg(&g) == b as isize) {
                certified[n] = modp::deg(&modp::gcd(&g, &modp::derivative(&g, q), q)) == 0;
            }
        }
    }
    let mut out = Vec::with_capacity(n_max);
    let mut x = RatFunc::zero();
    let mut exact_steps = 0;
    for n in 1..=n_max {
        if certified[n - 1] {
            out.push((n, true));
            continue;
        }
        while exact_steps < n {
            x = map.f().eval(&x);
            exact_steps += 1;
        }
        out.push((n, is_squarefree_certified(x.num())));
    }
    Ok(out)
}

/// `phi^n(0)` as a polynomial in `t`.
pub fn gleason_poly(map: &RationalMap<RatFunc>, n: usize) -> Poly<Rat> {
    map.iterate(&ProjPoint::affine(RatFunc::zero()), n)
        .value()
        .map(|v| v.num().clone())
        .unwrap_or_else(Poly::zero)
}

/// The map and a point reduced modulo a finite place.
struct Reduced {
    field: Arc<QuotField>,
    f: Poly<QElem>,
    g: Poly<QElem>,
    d: usize,
}

impl Reduced {
    fn new(map: &RationalMap<RatFunc>, pi: &Poly<Rat>) -> Result<Self> {
        let field = QuotField::new(pi)?;
        let res = map.homogeneous_resultant();
        if res.num().rem(pi).is_zero() {
            return Err(Error::BadReduction(pi.fmt_var("t")));
        }
        let red = |p: &Poly<RatFunc>| -> Result<Poly<QElem>> {
            Ok(Poly::new(
                (0..=map.degree())
                    .map(|i| reduce(&field, &p.coeff(i)))
                    .collect::<Result<Vec<_>>>()?,
            ))
        };
        Ok(Reduced {
            f: red(map.f())?,
            g: red(map.g())?,
            d: map.degree(),
            field,
        })
    }

    fn point(&self, p: &ProjPoint<RatFunc>) -> Result<Option<QElem>> {
        let a = reduce(&self.field, p.a())?;
        let b = reduce(&self.field, p.b())?;
        Ok(normalize(a, b))
    }

    fn apply(&self, x: &Option<QElem>) -> Option<QElem> {
        let (a, b) = match x {
            Some(v) => (v.clone(), QElem::one()),
            None => (QElem::one(), QElem::zero()),
        };
        normalize(self.f.eval_hom(&a, &b, self.d), self.g.eval_hom(&a, &b, self.d))
    }

    /// `log(2d)` plus the height upper bounds of the cofactor coefficients.
    fn escape_height(&self) -> f64 {
        let mut c = ((2 * self.d) as f64).ln();
        for top in [true, false] {
            let (a, b) = nullstellensatz_forms(&self.f, &self.g, self.d, top).expect("good reduction");
            for q in a.coeffs().iter().chain(b.coeffs()) {
                if !q.is_zero() {
                    c += self.field.elem(q.rep()).height_bounds().1;
                }
            }
        }
        c / (self.d as f64 - 1.0)
    }
}

fn reduce(field: &Arc<QuotField>, c: &RatFunc) -> Result<QElem> {
    let den = field.elem(c.den());
    if den.is_zero() {
        return Err(Error::BadReduction(format!(
            "{c} has a pole at {}",
            field.modulus().fmt_var("t")
        )));
    }
    Ok(field.elem(c.num()) * &den.inv())
}

fn normalize(a: QElem, b: QElem) -> Option<QElem> {
    if b.is_zero() {
        None
    } else {
        Some(a * &b.inv())
    }
}

/// Result of following an orbit over a residue field.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaceOrbit {
    Portrait {
        m: usize,
        n: usize,
    },
    /// The iterate at `step` has height at least `lower`, above the escape
    /// height of the reduced map, so the reduced point is not preperiodic.
    Escapes {
        step: usize,
        lower: f64,
        escape_height: f64,
    },
    Undecided {
        steps: usize,
    },
}

impl PlaceOrbit {
    pub fn portrait(&self) -> Option<Portrait> {
        match self {
            PlaceOrbit::Portrait { m, n } => Some(Portrait::new(*m, *n)),
            _ => None,
        }
    }
}

pub fn ff_portrait_at_place(
    map: &RationalMap<RatFunc>,
    alpha: &ProjPoint<RatFunc>,
    pi: &Poly<Rat>,
    step_cap: usize,
) -> Result<PlaceOrbit> {
    let red = Reduced::new(map, pi)?;
    let mut x = red.point(alpha)?;
    let mut seen: HashMap<Option<QElem>, usize> = HashMap::new();
    let mut escape = None;
    for k in 0..=step_cap {
        if let Some(&j) = seen.get(&x) {
            return Ok(PlaceOrbit::Portrait { m: j, n: k - j });
        }
        if let Some(v) = &x {
            let e = *escape.get_or_insert_with(|| red.escape_height());
            let lower = v.height_bounds().0;
            if lower > e + 1e-9 {
                return Ok(PlaceOrbit::Escapes {
                    step: k,
                    lower,
                    escape_height: e,
                });
            }
        }
        let next = red.apply(&x);
        seen.insert(x, k);
        x = next;
    }
    Ok(PlaceOrbit::Undecided { steps: step_cap })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FFWitness {
    pub place: FFPlace,
    pub valuation: i64,
    pub portrait: Portrait,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FFSearch {
    pub m: usize,
    pub n: usize,
    /// Numerator of `phi^(m+n)(alpha) - phi^m(alpha)`.
    pub difference: String,
    pub profile: MultiplicityProfile,
    pub witnesses: Vec<FFWitness>,
    /// Simple places of bad reduction, passed over.
    pub bad_places: Vec<FFPlace>,
    /// Simple places whose orbit was not settled within the step cap.
    pub undecided: Vec<FFPlace>,
    pub complete: bool,
    pub note: Option<String>,
}

pub fn ff_search_witnesses(
    map: &RationalMap<RatFunc>,
    alpha: &ProjPoint<RatFunc>,
    m: usize,
    n: usize,
    threads: usize,
) -> Result<FFSearch> {
    if n == 0 {
        return Err(Error::Invalid("period must be positive".into()));
    }
    if m + n > DEFAULT_FF_ORBIT_CAP {
        return Err(Error::Cap {
            name: "m + n over Q(t)",
            limit: DEFAULT_FF_ORBIT_CAP,
            requested: m + n,
        });
    }
    if let OrbitType::Preperiodic { m: pm, n: pn } = classify_orbit(map, alpha, DEFAULT_ORBIT_STEPS.max(m + n + 1))? {
        return Err(Error::Preperiodic(format!("{alpha} has portrait ({pm}, {pn})")));
    }
    let orbit = map.orbit(alpha, m + n);
    let (x, y) = match (orbit[m + n].value(), orbit[m].value()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::AtInfinity("an endpoint of the difference is infinity".into())),
    };
    let diff = x - &y;
    let g = diff.num().clone();
    let profile = ff_squarefree_profile(&g)?;
    let simple = profile.simple_places();
    let target = Portrait::new(m, n);
    let tested: Vec<(Poly<Rat>, Result<PlaceOrbit>)> = crate::workers::with_pool(threads.max(1), || {
        simple
            .par_iter()
            .map(|pi| (pi.clone(), ff_portrait_at_place(map, alpha, pi, DEFAULT_PLACE_STEPS)))
            .collect()
    });
    let mut witnesses = Vec::new();
    let mut bad_places = Vec::new();
    let mut undecided = Vec::new();
    for (pi, r) in tested {
        let place = FFPlace::Finite(pi);
        match r {
            Ok(PlaceOrbit::Portrait { m: pm, n: pn }) if Portrait::new(pm, pn) == target => {
                let valuation = ff_ord(&diff, &place)?;
                witnesses.push(FFWitness {
                    place,
                    valuation,
                    portrait: target,
                });
            }
            Ok(PlaceOrbit::Undecided { .. }) => undecided.push(place),
            Ok(_) => {}
            Err(Error::BadReduction(_)) => bad_places.push(place),
            Err(e) => return Err(e),
        }
    }
    witnesses.sort_by(|a, b| a.place.cmp(&b.place));
    let note = if !profile.has_simple_part() {
        Some("the difference has no multiplicity-one factor".into())
    } else {
        None
    };
    Ok(FFSearch {
        m,
        n,
        difference: g.fmt_var("t"),
        complete: profile.complete,
        profile,
        witnesses,
        bad_places,
        undecided,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(v: &[i64]) -> Poly<Rat> {
        Poly::from_i64s(v)
    }

    fn rf(v: &[i64]) -> RatFunc {
        RatFunc::from_poly(tp(v))
    }

    fn x2_plus_t() -> RationalMap<RatFunc> {
        RationalMap::polynomial(&Poly::new(vec![RatFunc::t(), RatFunc::zero(), RatFunc::one()])).unwrap()
    }

    #[test]
    fn valuations() {
        let t = FFPlace::finite(&tp(&[0, 1])).unwrap();
        assert_eq!(ff_ord(&rf(&[0, 1, 1]), &t).unwrap(), 1);
        let f = RatFunc::new(tp(&[1, 2, 1]), tp(&[0, 0, 0, 1]));
        assert_eq!(ff_ord(&f, &FFPlace::finite(&tp(&[1, 1])).unwrap()).unwrap(), 2);
        assert_eq!(ff_ord(&f, &FFPlace::Infinity).unwrap(), 1);
        assert!(ff_ord(&RatFunc::zero(), &t).is_err());
        assert!(FFPlace::finite(&tp(&[-1, 0, 1])).is_err());
    }

    #[test]
    fn profiles() {
        let p = ff_squarefree_profile(&tp(&[0, 0, 1, 1])).unwrap();
        assert_eq!(
            p.entries,
            vec![
                (ProfileEntry::Place(FFPlace::Finite(tp(&[0, 1]))), 2),
                (ProfileEntry::Place(FFPlace::Finite(tp(&[1, 1]))), 1)
            ]
        );
        let sq = tp(&[0, 1, 1]).pow(2);
        let p = ff_squarefree_profile(&sq).unwrap();
        assert!(!p.has_simple_part());
        assert_eq!(p.expand(), sq);
        let g3 = gleason_poly(&x2_plus_t(), 3);
        let p = ff_squarefree_profile(&g3).unwrap();
        assert!(p.entries.iter().all(|(_, k)| *k == 1));
    }

    #[test]
    fn counts() {
        assert_eq!(distinct_factor_count(&(&tp(&[0, 0, 0, 1]) * &tp(&[2, 1]))), 2);
        assert_eq!(distinct_factor_count(&tp(&[0, 1, 1]).pow(2)), 2);
        assert_eq!(distinct_factor_count(&gleason_poly(&x2_plus_t(), 4)), 8);
    }

    #[test]
    fn place_portraits() {
        let m = x2_plus_t();
        let a = ProjPoint::affine(RatFunc::t());
        assert_eq!(
            ff_portrait_at_place(&m, &a, &tp(&[0, 1]), 64).unwrap().portrait(),
            Some(Portrait::new(0, 1))
        );
        assert_eq!(
            ff_portrait_at_place(&m, &a, &tp(&[1, 1]), 64).unwrap().portrait(),
            Some(Portrait::new(0, 2))
        );
        let r = ff_portrait_at_place(&m, &a, &tp(&[-1, 1]), 64).unwrap();
        assert!(matches!(r, PlaceOrbit::Escapes { .. }), "{r:?}");
        assert!(matches!(
            ff_portrait_at_place(&m, &a, &tp(&[-1, 1]), 128).unwrap(),
            PlaceOrbit::Escapes { .. }
        ));
    }

    #[test]
    fn witness_places() {
        let m = x2_plus_t();
        let a = ProjPoint::affine(RatFunc::t());
        let s = ff_search_witnesses(&m, &a, 1, 1, 2).unwrap();
        assert!(s
            .witnesses
            .iter()
            .any(|w| w.place == FFPlace::Finite(tp(&[2, 1])) && w.valuation == 1 && w.portrait == Portrait::new(1, 1)));
        let s = ff_search_witnesses(&m, &a, 0, 2, 1).unwrap();
        assert!(s.witnesses.is_empty() && s.note.is_some());
        let s = ff_search_witnesses(&m, &a, 0, 1, 1).unwrap();
        assert!(s.witnesses.is_empty());
    }

    #[test]
    fn gleason_small() {
        let g = gleason_check(&x2_plus_t(), 6).unwrap();
        assert!(g.iter().all(|(_, sq)| *sq));
        for n in 1..=6 {
            assert!(gleason_poly(&x2_plus_t(), n).is_squarefree());
        }
        assert!(!is_squarefree_certified(&tp(&[0, 1, 1]).pow(2)));
    }

    #[test]
    fn gleason_detects_repeated_roots() {
        // phi(0) = t^2 has a double root; phi^2(0) = t^4 + t^2 = t^2 (t^2 + 1)
        let m = RationalMap::polynomial(&Poly::new(vec![
            RatFunc::from_poly(tp(&[0, 0, 1])),
            RatFunc::zero(),
            RatFunc::one(),
        ]))
        .unwrap();
        let g = gleason_check(&m, 3).unwrap();
        assert_eq!(g, vec![(1, false), (2, false), (3, false)]);
        for (n, sq) in g {
            assert_eq!(gleason_poly(&m, n).is_squarefree(), sq);
        }
    }
}
