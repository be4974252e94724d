//! Three-valued decisions for `m in A_1(phi, alpha)` and `n in A_2(phi)`.
//!
//! Both sets are defined through backward orbits made of unramified points.
//! The search works with Galois-stable point sets given by squarefree
//! polynomials: `U_0` is the target set and `U_(k+1)` the set of points at
//! which `phi` is unramified and whose image lies in `U_k`. An empty level
//! proves that no infinite unramified backward orbit exists. A level that
//! contains points outside every forward critical orbit proves the opposite,
//! because the whole backward tree of such a point is unramified.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::base::Base;
use crate::dynamics::{CriticalData, PointSet, ProjPoint, RationalMap};
use crate::error::{Error, Result};
use crate::heights::{classify_orbit, height_gap_constant, OrbitType, DEFAULT_ORBIT_STEPS};
use crate::poly::Poly;

pub const DEFAULT_DEGREE_CAP: usize = 64;
pub const DEFAULT_ORBIT_CAP: usize = 40;
pub const DEFAULT_PREPERIODIC_STEPS: usize = 24;

/// Slack added to height comparisons made in floating point.
const HEIGHT_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Backward depth; `None` means `2 d^3`.
    pub depth: Option<usize>,
    /// Largest number of points allowed in one level of the backward tree.
    pub degree: usize,
    /// Largest forward index examined on a critical orbit.
    pub orbit: usize,
    pub preperiodic_steps: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            depth: None,
            degree: DEFAULT_DEGREE_CAP,
            orbit: DEFAULT_ORBIT_CAP,
            preperiodic_steps: DEFAULT_PREPERIODIC_STEPS,
        }
    }
}

impl Caps {
    fn depth_for(&self, d: usize) -> usize {
        self.depth.unwrap_or(2 * d * d * d)
    }
}

/// Which route `a1_verdict` may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Pigeonhole shortcut when it applies, then the direct search.
    #[default]
    Auto,
    Direct,
    /// Only the shortcut; never answers `No`.
    FastOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Yes => "yes",
            Status::No => "no",
            Status::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Reason {
    NoSquarefreeFactor,
    SmallerPeriodOnly,
    AllPreimagesRamified,
    PointEqualsExcludedBranch,
    PrunedTreeExhausted,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("plain enum");
        f.write_str(s.as_str().unwrap_or_default())
    }
}

/// The question a verdict answers.
#[derive(Clone, Debug, PartialEq)]
pub enum Query<K: Base> {
    DynamicallyUnramified { target: ProjPoint<K> },
    A1 { alpha: ProjPoint<K>, m: usize },
    A2 { n: usize },
}

impl<K: Base> Serialize for Query<K> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Query::DynamicallyUnramified { target } => {
                let mut st = s.serialize_struct("Query", 2)?;
                st.serialize_field("kind", "dynamically_unramified")?;
                st.serialize_field("target", &target.to_string())?;
                st.end()
            }
            Query::A1 { alpha, m } => {
                let mut st = s.serialize_struct("Query", 3)?;
                st.serialize_field("kind", "a1")?;
                st.serialize_field("alpha", &alpha.to_string())?;
                st.serialize_field("m", m)?;
                st.end()
            }
            Query::A2 { n } => {
                let mut st = s.serialize_struct("Query", 2)?;
                st.serialize_field("kind", "a2")?;
                st.serialize_field("n", n)?;
                st.end()
            }
        }
    }
}

/// Why forward indices beyond the checked range cannot meet the node.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Termination {
    /// Every point of `phi^index(class)` has height above `threshold`, which
    /// is at least the escape height, so later iterates are higher still.
    HeightDominance { index: usize, lower: f64 },
    /// `phi^repeat(class) = phi^first(class)`: the orbit sets cycle.
    CriticalCycleClosed { first: usize, repeat: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TerminationKind {
    HeightDominance,
    CriticalCycleClosed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassCheck<K: Base> {
    pub class: PointSet<K>,
    /// `phi^j(class)` is disjoint from the node for `1 <= j <= checked_up_to`.
    pub checked_up_to: usize,
    pub termination: Termination,
}

/// Evidence that some point of `target` has an infinite unramified backward
/// orbit: the node maps into `target` under `phi^depth`, `phi^depth` is
/// unramified along the way, and the node misses every forward critical
/// orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct AvoidanceCertificate<K: Base> {
    pub map: RationalMap<K>,
    pub query: Query<K>,
    pub target: PointSet<K>,
    pub depth: usize,
    pub node: PointSet<K>,
    /// Upper bound used for the heights of the node's points.
    pub threshold: f64,
    /// The node was shown preperiodic, capping its heights by the escape height.
    pub node_preperiodic: bool,
    pub classes: Vec<ClassCheck<K>>,
}

impl<K: Base> AvoidanceCertificate<K> {
    pub fn checked_orbit_range(&self) -> usize {
        self.classes.iter().map(|c| c.checked_up_to).max().unwrap_or(0)
    }

    pub fn termination_reason(&self) -> TerminationKind {
        if self
            .classes
            .iter()
            .any(|c| matches!(c.termination, Termination::HeightDominance { .. }))
        {
            TerminationKind::HeightDominance
        } else {
            TerminationKind::CriticalCycleClosed
        }
    }
}

#[derive(Serialize)]
struct SetJson {
    poly: String,
    infinity: bool,
}

impl SetJson {
    fn of<K: Base>(s: &PointSet<K>) -> Self {
        SetJson {
            poly: s.poly().to_string(),
            infinity: s.has_infinity(),
        }
    }
}

impl<K: Base> Serialize for AvoidanceCertificate<K> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct ClassJson<'a> {
            class: SetJson,
            checked_up_to: usize,
            termination: &'a Termination,
        }
        let classes: Vec<ClassJson> = self
            .classes
            .iter()
            .map(|c| ClassJson {
                class: SetJson::of(&c.class),
                checked_up_to: c.checked_up_to,
                termination: &c.termination,
            })
            .collect();
        let mut st = s.serialize_struct("AvoidanceCertificate", 11)?;
        st.serialize_field("base", &K::KIND)?;
        st.serialize_field("map", &self.map.expression())?;
        st.serialize_field("query", &self.query)?;
        st.serialize_field("target", &SetJson::of(&self.target))?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("node", &SetJson::of(&self.node))?;
        st.serialize_field("threshold", &self.threshold)?;
        st.serialize_field("node_preperiodic", &self.node_preperiodic)?;
        st.serialize_field("checked_orbit_range", &self.checked_orbit_range())?;
        st.serialize_field("termination_reason", &self.termination_reason())?;
        st.serialize_field("classes", &classes)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict<K: Base> {
    pub status: Status,
    pub certificate: Option<AvoidanceCertificate<K>>,
    pub reason: Option<Reason>,
    pub bound_hit: Option<String>,
}

impl<K: Base> Verdict<K> {
    fn yes(c: AvoidanceCertificate<K>) -> Self {
        Verdict {
            status: Status::Yes,
            certificate: Some(c),
            reason: None,
            bound_hit: None,
        }
    }

    fn no(r: Reason) -> Self {
        Verdict {
            status: Status::No,
            certificate: None,
            reason: Some(r),
            bound_hit: None,
        }
    }

    fn unknown(bound: String) -> Self {
        Verdict {
            status: Status::Unknown,
            certificate: None,
            reason: None,
            bound_hit: Some(bound),
        }
    }
}

impl<K: Base> Serialize for Verdict<K> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Verdict", 4)?;
        st.serialize_field("status", &self.status)?;
        st.serialize_field("reason", &self.reason)?;
        st.serialize_field("bound_hit", &self.bound_hit)?;
        st.serialize_field("certificate", &self.certificate)?;
        st.end()
    }
}

/// Upper bound for the heights of the points of a set.
fn set_upper<K: Base>(s: &PointSet<K>) -> f64 {
    if s.poly().deg() == 0 {
        0.0
    } else {
        K::root_height_bounds(s.poly(), s.poly().deg() == 1).1
    }
}

/// Lower bound for the heights of the points of `phi^j(class)`.
fn set_lower<K: Base>(s: &PointSet<K>, irreducible: bool) -> f64 {
    if s.has_infinity() || s.poly().deg() == 0 {
        0.0
    } else {
        K::root_height_bounds(s.poly(), irreducible || s.poly().deg() == 1).0
    }
}

/// Points of `phi^(-1)(s)` at which `phi` is unramified, found by stripping
/// the critical points from the preimage polynomial.
pub fn unramified_preimage<K: Base>(map: &RationalMap<K>, w: &Poly<K>, s: &PointSet<K>) -> PointSet<K> {
    let pre = map.preimage(s);
    let mut poly = pre.poly.clone();
    if poly.deg() > 0 && w.deg() > 0 {
        loop {
            let c = Poly::gcd(&poly, w);
            if c.deg() == 0 {
                break;
            }
            poly = poly.div_exact(&c).expect("gcd divides");
        }
    }
    PointSet::from_squarefree(&poly, pre.inf_mult == 1)
}

/// Iterates images of `s` until a set repeats.
fn set_is_preperiodic<K: Base>(map: &RationalMap<K>, s: &PointSet<K>, steps: usize) -> bool {
    let mut seen = vec![s.clone()];
    for _ in 0..steps {
        let next = map.image(seen.last().unwrap());
        if seen.contains(&next) {
            return true;
        }
        seen.push(next);
    }
    false
}

struct Engine<'a, K: Base> {
    map: &'a RationalMap<K>,
    crit: CriticalData<K>,
    escape: f64,
    caps: Caps,
}

enum Avoid<K: Base> {
    Found {
        node: PointSet<K>,
        threshold: f64,
        preperiodic: bool,
        classes: Vec<ClassCheck<K>>,
    },
    Inside,
    Capped(String),
}

enum Search<K: Base> {
    Found(usize, Avoid<K>),
    Exhausted,
    Capped(String),
}

impl<'a, K: Base> Engine<'a, K> {
    fn new(map: &'a RationalMap<K>, caps: Caps) -> Self {
        Engine {
            map,
            crit: map.critical_data(),
            escape: height_gap_constant(map).escape_height(map.degree()),
            caps,
        }
    }

    /// Removes the forward critical orbits from `u`, with enough indices
    /// examined that the rest provably misses them.
    fn avoid(&self, u: &PointSet<K>) -> Avoid<K> {
        let mut threshold = set_upper(u).max(self.escape);
        let mut preperiodic = false;
        for _round in 0..4 {
            match self.avoid_with(u, threshold) {
                Ok(Some((node, classes))) => {
                    let need = if preperiodic {
                        self.escape
                    } else {
                        set_upper(&node).max(self.escape)
                    };
                    if need <= threshold {
                        return Avoid::Found {
                            node,
                            threshold,
                            preperiodic,
                            classes,
                        };
                    }
                    threshold = need;
                }
                Ok(None) => return Avoid::Inside,
                Err(bound) => {
                    if preperiodic || threshold <= self.escape {
                        return Avoid::Capped(bound);
                    }
                    if !set_is_preperiodic(self.map, u, self.caps.preperiodic_steps) {
                        return Avoid::Capped(bound);
                    }
                    preperiodic = true;
                    threshold = self.escape;
                }
            }
        }
        Avoid::Capped("height threshold did not settle".into())
    }

    #[allow(clippy::type_complexity)]
    fn avoid_with(
        &self,
        u: &PointSet<K>,
        threshold: f64,
    ) -> std::result::Result<Option<(PointSet<K>, Vec<ClassCheck<K>>)>, String> {
        let mut rest = u.clone();
        let mut checks = Vec::new();
        for (i, class) in self.crit.classes().iter().enumerate() {
            let mut j = 1;
            let termination = loop {
                if j > self.caps.orbit {
                    return Err(format!("critical orbit index {}", self.caps.orbit));
                }
                let o = self.crit.class_orbit(i, j);
                rest = rest.minus(&o);
                if rest.is_empty() {
                    return Ok(None);
                }
                if let Some(first) = (0..j).find(|&t| self.crit.class_orbit(i, t) == o) {
                    break Termination::CriticalCycleClosed { first, repeat: j };
                }
                let lower = set_lower(&o, class.irreducible);
                if lower > threshold + HEIGHT_MARGIN {
                    break Termination::HeightDominance { index: j, lower };
                }
                j += 1;
            };
            checks.push(ClassCheck {
                class: class.set.clone(),
                checked_up_to: j,
                termination,
            });
        }
        Ok(Some((rest, checks)))
    }

    /// Walks the pruned backward tree of `start`, looking for an avoiding
    /// node at depths `min_depth..`.
    fn search(&self, start: &PointSet<K>, min_depth: usize, only_depth: Option<usize>) -> Search<K> {
        let max_depth = self.caps.depth_for(self.map.degree());
        let w = self.crit.finite_critical_poly().clone();
        let mut u = start.clone();
        let mut capped: Option<String> = None;
        for k in 0..=max_depth {
            if u.is_empty() {
                return Search::Exhausted;
            }
            let check = match only_depth {
                Some(t) => k == t,
                None => k >= min_depth,
            };
            if check {
                match self.avoid(&u) {
                    found @ Avoid::Found { .. } => return Search::Found(k, found),
                    Avoid::Inside => {}
                    Avoid::Capped(b) => capped = Some(b),
                }
                if only_depth == Some(k) {
                    return Search::Capped(capped.unwrap_or_else(|| "shortcut level meets the critical orbits".into()));
                }
            }
            if k == max_depth {
                break;
            }
            let next = unramified_preimage(self.map, &w, &u);
            if next.size() > self.caps.degree {
                return if next.is_empty() {
                    Search::Exhausted
                } else {
                    Search::Capped(format!("tree level degree {} > {}", next.size(), self.caps.degree))
                };
            }
            u = next;
        }
        Search::Capped(capped.unwrap_or_else(|| format!("depth {max_depth}")))
    }

    fn verdict(&self, query: Query<K>, target: &PointSet<K>, s: Search<K>) -> Verdict<K> {
        match s {
            Search::Found(
                depth,
                Avoid::Found {
                    node,
                    threshold,
                    preperiodic,
                    classes,
                },
            ) => Verdict::yes(AvoidanceCertificate {
                map: self.map.clone(),
                query,
                target: target.clone(),
                depth,
                node,
                threshold,
                node_preperiodic: preperiodic,
                classes,
            }),
            Search::Found(..) => unreachable!("search only reports found nodes"),
            Search::Exhausted => Verdict::no(Reason::PrunedTreeExhausted),
            Search::Capped(b) => Verdict::unknown(b),
        }
    }
}

fn check_wandering<K: Base>(map: &RationalMap<K>, alpha: &ProjPoint<K>) -> Result<()> {
    match classify_orbit(map, alpha, DEFAULT_ORBIT_STEPS)? {
        OrbitType::Wandering { .. } => Ok(()),
        OrbitType::Preperiodic { m, n } => Err(Error::Preperiodic(format!("{alpha} has portrait ({m}, {n})"))),
    }
}

/// Whether `target` has an infinite backward orbit of unramified points.
pub fn is_dynamically_unramified<K: Base>(map: &RationalMap<K>, target: &ProjPoint<K>, caps: Caps) -> Verdict<K> {
    let engine = Engine::new(map, caps);
    let start = PointSet::point(target);
    let s = engine.search(&start, 1, None);
    engine.verdict(Query::DynamicallyUnramified { target: target.clone() }, &start, s)
}

/// `A_1` candidates for `m >= 1`: unramified preimages of `phi^m(alpha)`
/// other than `phi^(m-1)(alpha)`, or the structural reason there are none.
pub fn a1_candidates<K: Base>(
    map: &RationalMap<K>,
    alpha: &ProjPoint<K>,
    m: usize,
) -> std::result::Result<PointSet<K>, Reason> {
    let branch = map.iterate(alpha, m - 1);
    let beta = map.apply(&branch);
    let pre = map.preimage(&PointSet::point(&beta));
    let excluded = PointSet::point(&branch);
    let cands = pre.unramified().minus(&excluded);
    if !cands.is_empty() {
        return Ok(cands);
    }
    if pre.all().minus(&excluded).is_empty() {
        Err(Reason::PointEqualsExcludedBranch)
    } else {
        Err(Reason::AllPreimagesRamified)
    }
}

pub fn a1_verdict<K: Base>(map: &RationalMap<K>, alpha: &ProjPoint<K>, m: usize) -> Result<Verdict<K>> {
    a1_verdict_with(map, alpha, m, Caps::default(), Strategy::Auto)
}

pub fn a1_verdict_with<K: Base>(
    map: &RationalMap<K>,
    alpha: &ProjPoint<K>,
    m: usize,
    caps: Caps,
    strategy: Strategy,
) -> Result<Verdict<K>> {
    check_wandering(map, alpha)?;
    let query = Query::A1 {
        alpha: alpha.clone(),
        m,
    };
    let engine = Engine::new(map, caps);
    if m == 0 {
        let start = PointSet::point(alpha);
        let s = engine.search(&start, 1, None);
        return Ok(engine.verdict(query, &start, s));
    }
    let cands = match a1_candidates(map, alpha, m) {
        Ok(c) => c,
        Err(r) => {
            return Ok(if strategy == Strategy::FastOnly {
                Verdict::unknown("shortcut needs candidates".into())
            } else {
                Verdict::no(r)
            })
        }
    };
    if strategy != Strategy::Direct {
        let beta = map.iterate(alpha, m);
        let shortcut = !engine.crit.critical_value_poly(3, 3)?.contains(&beta);
        if shortcut {
            let s = engine.search(&cands, 2, Some(2));
            if matches!(s, Search::Found(..)) || strategy == Strategy::FastOnly {
                return Ok(engine.verdict(query, &cands, s));
            }
        } else if strategy == Strategy::FastOnly {
            return Ok(Verdict::unknown("target is a critical value of phi^3".into()));
        }
    }
    let s = engine.search(&cands, 0, None);
    Ok(engine.verdict(query, &cands, s))
}

/// Periodic points of exact period `n` that are simple roots of
/// `phi^n(x) - x`, or the reason there are none.
pub fn a2_cycle_set<K: Base>(map: &RationalMap<K>, n: usize) -> Result<std::result::Result<PointSet<K>, Reason>> {
    if n == 0 {
        return Err(Error::Invalid("period must be positive".into()));
    }
    let pp = map.period_poly(n);
    let simple = pp
        .squarefree_decompose()?
        .into_iter()
        .find(|(_, mult)| *mult == 1)
        .map(|(a, _)| a);
    let Some(simple) = simple else {
        return Ok(Err(Reason::NoSquarefreeFactor));
    };
    let dyn_n = map.dynatomic(n, crate::dynamics::DEFAULT_DYNATOMIC_CAP)?;
    let mut e = Poly::gcd(&simple, &dyn_n);
    for np in crate::arith::divisors(n as u64) {
        let np = np as usize;
        if np == n || e.deg() == 0 {
            continue;
        }
        let g = Poly::gcd(&e, &map.period_poly(np));
        if g.deg() > 0 {
            e = e.div_exact(&g).expect("gcd divides");
        }
    }
    if e.deg() == 0 {
        return Ok(Err(Reason::SmallerPeriodOnly));
    }
    Ok(Ok(PointSet::from_squarefree(&e, false)))
}

/// `A_2` candidates: unramified preimages of the cycle set that are not on it.
pub fn a2_candidates<K: Base>(map: &RationalMap<K>, cycles: &PointSet<K>) -> std::result::Result<PointSet<K>, Reason> {
    let pre = map.preimage(cycles);
    let cands = pre.unramified().minus(cycles);
    if !cands.is_empty() {
        return Ok(cands);
    }
    if pre.all().minus(cycles).is_empty() {
        Err(Reason::PointEqualsExcludedBranch)
    } else {
        Err(Reason::AllPreimagesRamified)
    }
}

pub fn a2_verdict<K: Base>(map: &RationalMap<K>, n: usize) -> Result<Verdict<K>> {
    a2_verdict_with(map, n, Caps::default())
}

pub fn a2_verdict_with<K: Base>(map: &RationalMap<K>, n: usize, caps: Caps) -> Result<Verdict<K>> {
    let cycles = match a2_cycle_set(map, n)? {
        Ok(e) => e,
        Err(r) => return Ok(Verdict::no(r)),
    };
    let engine = Engine::new(map, caps);
    let w = engine.crit.finite_critical_poly().clone();
    let cands = unramified_preimage(map, &w, &cycles).minus(&cycles);
    if cands.is_empty() {
        return Ok(Verdict::no(match a2_candidates(map, &cycles) {
            Err(r) => r,
            Ok(_) => return Err(Error::Internal("candidate sets disagree".into())),
        }));
    }
    let s = engine.search(&cands, 0, None);
    Ok(engine.verdict(Query::A2 { n }, &cands, s))
}

/// `A_1 x A_2` on a grid, with the count of entries that are not `Yes`.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct AdmissibleTable<K: Base> {
    pub a1: Vec<(usize, Verdict<K>)>,
    pub a2: Vec<(usize, Verdict<K>)>,
    pub a1_no: usize,
    pub a1_unknown: usize,
    pub a2_no: usize,
    pub a2_unknown: usize,
}

impl<K: Base> AdmissibleTable<K> {
    /// Status of the pair `(m, n)`: `Yes` only when both coordinates are.
    pub fn cell(&self, m: usize, n: usize) -> Option<Status> {
        let a = self.a1.iter().find(|(k, _)| *k == m)?.1.status;
        let b = self.a2.iter().find(|(k, _)| *k == n)?.1.status;
        Some(match (a, b) {
            (Status::No, _) | (_, Status::No) => Status::No,
            (Status::Yes, Status::Yes) => Status::Yes,
            _ => Status::Unknown,
        })
    }
}

pub fn admissible_table<K: Base>(
    map: &RationalMap<K>,
    alpha: &ProjPoint<K>,
    max_m: usize,
    max_n: usize,
    threads: usize,
) -> Result<AdmissibleTable<K>> {
    use rayon::prelude::*;
    check_wandering(map, alpha)?;
    let (a1, a2) = crate::workers::with_pool(threads.max(1), || {
        let a1: Result<Vec<_>> = (0..=max_m)
            .into_par_iter()
            .map(|m| a1_verdict(map, alpha, m).map(|v| (m, v)))
            .collect();
        let a2: Result<Vec<_>> = (1..=max_n)
            .into_par_iter()
            .map(|n| a2_verdict(map, n).map(|v| (n, v)))
            .collect();
        (a1, a2)
    });
    let (a1, a2) = (a1?, a2?);
    let count = |v: &[(usize, Verdict<K>)], s: Status| v.iter().filter(|(_, x)| x.status == s).count();
    Ok(AdmissibleTable {
        a1_no: count(&a1, Status::No),
        a1_unknown: count(&a1, Status::Unknown),
        a2_no: count(&a2, Status::No),
        a2_unknown: count(&a2, Status::Unknown),
        a1,
        a2,
    })
}

/// Re-derives a certificate from the map alone: the target set from the
/// query, the unramified chain from the node down to the target, the critical
/// classes, every orbit disjointness, and each termination claim.
pub fn verify_certificate<K: Base>(cert: &AvoidanceCertificate<K>) -> std::result::Result<(), String> {
    let map = &cert.map;
    let target = match &cert.query {
        Query::DynamicallyUnramified { target } => {
            if cert.depth == 0 {
                return Err("a backward orbit needs depth at least 1".into());
            }
            PointSet::point(target)
        }
        Query::A1 { alpha, m: 0 } => {
            if cert.depth == 0 {
                return Err("a backward orbit needs depth at least 1".into());
            }
            PointSet::point(alpha)
        }
        Query::A1 { alpha, m } => a1_candidates(map, alpha, *m).map_err(|r| format!("no candidates: {r}"))?,
        Query::A2 { n } => {
            let cycles = a2_cycle_set(map, *n)
                .map_err(|e| e.to_string())?
                .map_err(|r| format!("no cycle set: {r}"))?;
            a2_candidates(map, &cycles).map_err(|r| format!("no candidates: {r}"))?
        }
    };
    if target != cert.target {
        return Err(format!(
            "target mismatch: recomputed {target}, certificate {}",
            cert.target
        ));
    }
    if cert.node.is_empty() {
        return Err("empty node".into());
    }

    let w = map.wronskian().squarefree_part().monic();
    let crit = PointSet::from_squarefree(&w, map.infinity_is_critical());
    let mut s = cert.node.clone();
    for k in 0..cert.depth {
        if !s.is_disjoint(&crit) {
            return Err(format!("node image at step {k} contains a critical point"));
        }
        s = map.image(&s);
    }
    if s.minus(&target).size() != 0 {
        return Err("node does not map into the target".into());
    }

    let escape = height_gap_constant(map).escape_height(map.degree());
    let need = if cert.node_preperiodic {
        if !set_is_preperiodic(map, &cert.node, DEFAULT_PREPERIODIC_STEPS) {
            return Err("node is not preperiodic within the step cap".into());
        }
        escape
    } else {
        set_upper(&cert.node).max(escape)
    };
    if cert.threshold < need {
        return Err(format!("threshold {} below required {}", cert.threshold, need));
    }

    let mut classes: Vec<(PointSet<K>, bool)> = if w.deg() > 0 {
        K::split_squarefree(&w, crate::factor::DEFAULT_FACTOR_CAP)
            .into_iter()
            .map(|f| (PointSet::from_squarefree(&f.poly, false), f.irreducible))
            .collect()
    } else {
        Vec::new()
    };
    if map.infinity_is_critical() {
        classes.push((PointSet::point(&ProjPoint::infinity()), true));
    }
    if classes.len() != cert.classes.len() {
        return Err(format!(
            "{} critical classes, certificate lists {}",
            classes.len(),
            cert.classes.len()
        ));
    }
    for (class, irreducible) in &classes {
        let check = cert
            .classes
            .iter()
            .find(|c| &c.class == class)
            .ok_or_else(|| format!("critical class {class} missing"))?;
        let mut orbit = vec![class.clone()];
        for j in 1..=check.checked_up_to {
            let next = map.image(orbit.last().unwrap());
            if !next.is_disjoint(&cert.node) {
                return Err(format!("phi^{j} of {class} meets the node"));
            }
            orbit.push(next);
        }
        match &check.termination {
            Termination::CriticalCycleClosed { first, repeat } => {
                if *repeat != check.checked_up_to || first >= repeat || orbit[*first] != orbit[*repeat] {
                    return Err(format!("claimed cycle for {class} does not close"));
                }
            }
            Termination::HeightDominance { index, .. } => {
                if *index != check.checked_up_to || *index == 0 {
                    return Err(format!("height claim for {class} at the wrong index"));
                }
                let lower = set_lower(&orbit[*index], *irreducible);
                if lower <= cert.threshold + HEIGHT_MARGIN {
                    return Err(format!("height lower bound {lower} does not exceed {}", cert.threshold));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, Rat};

    fn map(v: &[i64]) -> RationalMap<Rat> {
        RationalMap::polynomial(&Poly::from_i64s(v)).unwrap()
    }

    fn pt(v: i64) -> ProjPoint<Rat> {
        ProjPoint::affine(rat(v, 1))
    }

    fn assert_verified(v: &Verdict<Rat>) {
        assert_eq!(v.status, Status::Yes, "{v:?}");
        verify_certificate(v.certificate.as_ref().unwrap()).unwrap();
    }

    #[test]
    fn dynamically_unramified_examples() {
        let v = is_dynamically_unramified(&map(&[0, 0, 1]), &pt(0), Caps::default());
        assert_eq!(v.status, Status::No);
        let m = map(&[1, 0, 1]);
        let v = is_dynamically_unramified(&m, &pt(2), Caps::default());
        assert_verified(&v);
        let c = v.certificate.unwrap();
        assert_eq!((c.depth, c.node.poly().clone()), (1, Poly::from_i64s(&[1, 1])));
        let v = is_dynamically_unramified(&m, &pt(3), Caps::default());
        assert_verified(&v);
        let c = v.certificate.unwrap();
        assert_eq!((c.depth, c.node.poly().clone()), (1, Poly::from_i64s(&[-2, 0, 1])));
    }

    #[test]
    fn a1_examples() {
        let m = map(&[1, 0, 1]);
        let v = a1_verdict(&m, &pt(1), 0).unwrap();
        assert_eq!(v.status, Status::No);
        let v = a1_verdict(&m, &pt(-1), 1).unwrap();
        assert_eq!((v.status, v.reason), (Status::No, Some(Reason::PrunedTreeExhausted)));
        assert_verified(&a1_verdict(&m, &pt(-1), 2).unwrap());
        let e = RationalMap::polynomial(&(&Poly::from_i64s(&[-1, 1]) * &Poly::from_i64s(&[4, -4, 1]))).unwrap();
        let v = a1_verdict(&e, &pt(1), 1).unwrap();
        assert_eq!((v.status, v.reason), (Status::No, Some(Reason::AllPreimagesRamified)));
        assert!(a1_verdict(&map(&[0, 0, 1]), &pt(1), 0).is_err());
    }

    #[test]
    fn a2_examples() {
        let v = a2_verdict(&map(&[0, 1, 1]), 1).unwrap();
        assert_eq!((v.status, v.reason), (Status::No, Some(Reason::NoSquarefreeFactor)));
        assert_verified(&a2_verdict(&map(&[1, 0, 1]), 1).unwrap());
        assert_verified(&a2_verdict(&map(&[0, 0, 1]), 2).unwrap());
    }

    #[test]
    fn shortcut_agrees_with_direct_search() {
        let m = map(&[1, 0, 1]);
        for a in [2, 3, -1, 1] {
            for k in 1..4 {
                let fast = a1_verdict_with(&m, &pt(a), k, Caps::default(), Strategy::FastOnly).unwrap();
                let direct = a1_verdict_with(&m, &pt(a), k, Caps::default(), Strategy::Direct).unwrap();
                assert_ne!(fast.status, Status::No);
                if fast.status == Status::Yes {
                    verify_certificate(fast.certificate.as_ref().unwrap()).unwrap();
                    assert_eq!(direct.status, Status::Yes);
                }
            }
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let m = map(&[1, 0, 1]);
        let v = is_dynamically_unramified(&m, &pt(2), Caps::default());
        let mut c = v.certificate.unwrap();
        c.node = PointSet::point(&pt(1));
        assert!(verify_certificate(&c).is_err());
    }
}
