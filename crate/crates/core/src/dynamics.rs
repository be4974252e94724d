//! Rational maps on the projective line: normalization, exact iteration,
//! critical data, images and preimages of point sets, dynatomic polynomials.
//!
//! A map of degree `d` is kept as the dehomogenized pair `f(x) = F(x, 1)`,
//! `g(x) = G(x, 1)` with formal degree `d`; point sets are a monic squarefree
//! polynomial for the finite part plus a flag for `inf`.

use std::fmt;
use std::sync::Mutex;

use crate::arith::{divisors, mobius, Field};
use crate::base::{Base, Place, SplitFactor};
use crate::error::{Error, Result};
use crate::factor::DEFAULT_FACTOR_CAP;
use crate::poly::Poly;

pub const DEFAULT_CRITICAL_VALUE_CAP: usize = 4;
pub const DEFAULT_DYNATOMIC_CAP: usize = 8;

/// A point of `P^1` over the base in primitive integral coordinates,
/// normalized so that `b` is positive/monic, or `[1 : 0]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint<K: Base> {
    a: K,
    b: K,
}

impl<K: Base> ProjPoint<K> {
    pub fn new(a: K, b: K) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Invalid("[0 : 0] is not a point".into()));
        }
        if b.is_zero() {
            return Ok(Self::infinity());
        }
        let v = K::make_primitive(&[a, b]);
        let u = K::normalizing_unit(&v[1]);
        Ok(ProjPoint {
            a: v[0].clone() * &u,
            b: v[1].clone() * &u,
        })
    }

    pub fn affine(x: K) -> Self {
        Self::new(x, K::one()).expect("b = 1")
    }

    pub fn infinity() -> Self {
        ProjPoint {
            a: K::one(),
            b: K::zero(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.b.is_zero()
    }

    pub fn a(&self) -> &K {
        &self.a
    }

    pub fn b(&self) -> &K {
        &self.b
    }

    /// `a / b`, or `None` at infinity.
    pub fn value(&self) -> Option<K> {
        (!self.is_infinity()).then(|| self.a.div(&self.b))
    }

    pub fn height(&self) -> f64 {
        K::primitive_height(&[self.a.clone(), self.b.clone()])
    }
}

impl<K: Base> fmt::Display for ProjPoint<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => f.write_str("inf"),
            Some(v) => write!(f, "{}", v),
        }
    }
}

/// A finite set of points of `P^1(Kbar)` closed under conjugation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet<K: Base> {
    poly: Poly<K>,
    inf: bool,
}

impl<K: Base> PointSet<K> {
    /// From a squarefree polynomial (made monic here).
    pub fn from_squarefree(poly: &Poly<K>, inf: bool) -> Self {
        let poly = if poly.is_zero() { Poly::one() } else { poly.monic() };
        PointSet { poly, inf }
    }

    /// Root set of an arbitrary nonzero polynomial.
    pub fn roots_of(poly: &Poly<K>, inf: bool) -> Self {
        Self::from_squarefree(&poly.squarefree_part(), inf)
    }

    pub fn empty() -> Self {
        PointSet {
            poly: Poly::one(),
            inf: false,
        }
    }

    pub fn point(p: &ProjPoint<K>) -> Self {
        match p.value() {
            None => PointSet {
                poly: Poly::one(),
                inf: true,
            },
            Some(v) => PointSet {
                poly: Poly::linear_root(&v),
                inf: false,
            },
        }
    }

    pub fn poly(&self) -> &Poly<K> {
        &self.poly
    }

    pub fn has_infinity(&self) -> bool {
        self.inf
    }

    pub fn is_empty(&self) -> bool {
        self.poly.deg() == 0 && !self.inf
    }

    /// Number of geometric points.
    pub fn size(&self) -> usize {
        self.poly.deg() + self.inf as usize
    }

    pub fn union(&self, o: &Self) -> Self {
        let g = Poly::gcd(&self.poly, &o.poly);
        let l = &self.poly * &o.poly.div_exact(&g).unwrap();
        PointSet {
            poly: l.monic(),
            inf: self.inf || o.inf,
        }
    }

    pub fn intersection(&self, o: &Self) -> Self {
        PointSet {
            poly: Poly::gcd(&self.poly, &o.poly),
            inf: self.inf && o.inf,
        }
    }

    pub fn minus(&self, o: &Self) -> Self {
        let g = Poly::gcd(&self.poly, &o.poly);
        PointSet {
            poly: self.poly.div_exact(&g).unwrap(),
            inf: self.inf && !o.inf,
        }
    }

    pub fn is_disjoint(&self, o: &Self) -> bool {
        !(self.inf && o.inf) && Poly::gcd(&self.poly, &o.poly).deg() == 0
    }

    pub fn contains(&self, p: &ProjPoint<K>) -> bool {
        match p.value() {
            None => self.inf,
            Some(v) => self.poly.eval(&v).is_zero(),
        }
    }
}

impl<K: Base> fmt::Display for PointSet<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.poly.deg(), self.inf) {
            (0, false) => f.write_str("{}"),
            (0, true) => f.write_str("{inf}"),
            (_, false) => write!(f, "{{{}}}", self.poly),
            (_, true) => write!(f, "{{{}, inf}}", self.poly),
        }
    }
}

/// Preimage of a point set with multiplicities.
#[derive(Clone, Debug)]
pub struct Preimage<K: Base> {
    /// Finite preimages; the multiplicity of a root is the local degree.
    pub poly: Poly<K>,
    /// Local degree of the map at `inf` when `inf` is a preimage, else 0.
    pub inf_mult: usize,
}

impl<K: Base> Preimage<K> {
    /// Preimages at which the map is unramified.
    pub fn unramified(&self) -> PointSet<K> {
        let simple = if self.poly.deg() == 0 {
            Poly::one()
        } else {
            self.poly
                .squarefree_decompose()
                .expect("nonzero")
                .into_iter()
                .find(|(_, m)| *m == 1)
                .map(|(a, _)| a)
                .unwrap_or_else(Poly::one)
        };
        PointSet::from_squarefree(&simple, self.inf_mult == 1)
    }

    pub fn all(&self) -> PointSet<K> {
        PointSet::roots_of(&self.poly, self.inf_mult > 0)
    }
}

/// A rational map of degree `d >= 2` in normalized coprime form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMap<K: Base> {
    f: Poly<K>,
    g: Poly<K>,
    d: usize,
}

impl<K: Base> RationalMap<K> {
    /// Normalizes `num / den`: cancels common factors, clears denominators and
    /// content, and scales so the leading coefficient of the denominator form
    /// is positive/monic.
    pub fn new(num: &Poly<K>, den: &Poly<K>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPoly("map denominator"));
        }
        if num.is_zero() {
            return Err(Error::Degree("constant map".into()));
        }
        let h = Poly::gcd(num, den);
        let (num, den) = (num.div_exact(&h).unwrap(), den.div_exact(&h).unwrap());
        let d = num.deg().max(den.deg());
        if d < 2 {
            return Err(Error::Degree(format!("map has degree {d}, need at least 2")));
        }
        Ok(Self::from_forms(num, den, d))
    }

    fn from_forms(f: Poly<K>, g: Poly<K>, d: usize) -> Self {
        let (f, g) = primitive_pair(&f, &g, d);
        RationalMap { f, g, d }
    }

    pub fn polynomial(f: &Poly<K>) -> Result<Self> {
        Self::new(f, &Poly::one())
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn f(&self) -> &Poly<K> {
        &self.f
    }

    pub fn g(&self) -> &Poly<K> {
        &self.g
    }

    /// All coefficients of `F` and `G`, padded to formal degree.
    pub fn coefficients(&self) -> Vec<K> {
        (0..=self.d)
            .map(|i| self.f.coeff(i))
            .chain((0..=self.d).map(|i| self.g.coeff(i)))
            .collect()
    }

    pub fn apply(&self, p: &ProjPoint<K>) -> ProjPoint<K> {
        let a = self.f.eval_hom(p.a(), p.b(), self.d);
        let b = self.g.eval_hom(p.a(), p.b(), self.d);
        ProjPoint::new(a, b).expect("coprime forms have no common zero")
    }

    pub fn iterate(&self, p: &ProjPoint<K>, k: usize) -> ProjPoint<K> {
        let mut q = p.clone();
        for _ in 0..k {
            q = self.apply(&q);
        }
        q
    }

    /// The orbit `p, phi(p), ..., phi^k(p)`.
    pub fn orbit(&self, p: &ProjPoint<K>, k: usize) -> Vec<ProjPoint<K>> {
        let mut out = vec![p.clone()];
        for _ in 0..k {
            let next = self.apply(out.last().unwrap());
            out.push(next);
        }
        out
    }

    /// Forms of `phi^k`, dehomogenized, with formal degree `d^k`.
    pub fn iterate_forms(&self, k: usize) -> (Poly<K>, Poly<K>, usize) {
        let (mut fk, mut gk, mut e) = (Poly::x(), Poly::one(), 1usize);
        for _ in 0..k {
            let nf = self.f.subst_hom(&fk, &gk, self.d);
            let ng = self.g.subst_hom(&fk, &gk, self.d);
            e *= self.d;
            let (a, b) = primitive_pair(&nf, &ng, e);
            fk = a;
            gk = b;
        }
        (fk, gk, e)
    }

    /// `phi^k` as a map.
    pub fn compose_power(&self, k: usize) -> RationalMap<K> {
        let (f, g, e) = self.iterate_forms(k);
        RationalMap { f, g, d: e }
    }

    /// Monic numerator of `phi^n(x) - x`, i.e. `F_n(x, 1) - x G_n(x, 1)`.
    pub fn period_poly(&self, n: usize) -> Poly<K> {
        let (fk, gk, _) = self.iterate_forms(n);
        (&fk - &(&Poly::x() * &gk)).monic()
    }

    /// The dynatomic polynomial `prod_{k | n} (phi^k(x) - x)^mu(n/k)`, monic.
    pub fn dynatomic(&self, n: usize, cap: usize) -> Result<Poly<K>> {
        if n == 0 {
            return Err(Error::Invalid("period must be positive".into()));
        }
        if n > cap {
            return Err(Error::Cap {
                name: "dynatomic period",
                limit: cap,
                requested: n,
            });
        }
        let mut num = Poly::one();
        let mut den = Poly::one();
        for k in divisors(n as u64) {
            match mobius(n as u64 / k) {
                1 => num = &num * &self.period_poly(k as usize),
                -1 => den = &den * &self.period_poly(k as usize),
                _ => {}
            }
        }
        num.div_exact(&den)
            .map(|p| p.monic())
            .ok_or_else(|| Error::Internal("dynatomic division is not exact".into()))
    }

    /// `f'g - fg'`, which is the Wronskian of `(F, G)` up to the factor `d`.
    pub fn wronskian(&self) -> Poly<K> {
        &(&self.f.derivative() * &self.g) - &(&self.f * &self.g.derivative())
    }

    pub fn infinity_is_critical(&self) -> bool {
        (self.wronskian().degree()) < (2 * self.d as isize - 2)
    }

    pub fn infinity_image(&self) -> ProjPoint<K> {
        ProjPoint::new(self.f.coeff(self.d), self.g.coeff(self.d)).expect("forms are coprime")
    }

    fn sylvester(&self) -> Vec<Vec<K>> {
        sylvester_forms(&self.f, &self.g, self.d)
    }

    /// The homogeneous resultant `Res(F, G)` (up to sign).
    pub fn homogeneous_resultant(&self) -> K {
        determinant(self.sylvester())
    }

    /// Cofactor forms `(A, B)` of degree `d - 1` with `A F + B G = X^(2d-1)`
    /// (`top = true`) or `= Z^(2d-1)`.
    pub fn nullstellensatz(&self, top: bool) -> (Poly<K>, Poly<K>) {
        nullstellensatz_forms(&self.f, &self.g, self.d, top).expect("resultant is nonzero")
    }

    /// Places of bad reduction: those dividing the homogeneous resultant.
    pub fn bad_places(&self) -> Result<Vec<Place>> {
        let full = 2 * self.d * K::primitive_height(&self.coefficients()).round() as usize;
        K::places_dividing(&self.homogeneous_resultant(), full)
    }

    /// Image `phi(S)` of a point set.
    pub fn image(&self, s: &PointSet<K>) -> PointSet<K> {
        let mut inf = false;
        let mut out = PointSet::empty();
        if s.poly.deg() > 0 {
            let g0 = Poly::gcd(&s.poly, &self.g);
            if g0.deg() > 0 {
                inf = true;
            }
            let rest = s.poly.div_exact(&g0).unwrap();
            if rest.deg() > 0 {
                out = PointSet::from_squarefree(&self.image_poly(&rest), false);
            }
        }
        if s.inf {
            out = out.union(&PointSet::point(&self.infinity_image()));
        }
        out.inf |= inf;
        out
    }

    /// Squarefree polynomial of `{ f(r)/g(r) : p(r) = 0 }` for squarefree
    /// monic `p` coprime to `g`, via `Res_y(p(y), x g(y) - f(y))`.
    fn image_poly(&self, p: &Poly<K>) -> Poly<K> {
        if p.deg() == 1 {
            let r = -p.coeff(0).div(&p.coeff(1));
            let v = self.f.eval(&r).div(&self.g.eval(&r));
            return Poly::linear_root(&v);
        }
        let n = p.deg();
        let xs: Vec<K> = (0..=n as i64).map(K::from_i64).collect();
        let ys: Vec<K> = xs
            .iter()
            .map(|x| {
                let q = &self.g.scale(x) - &self.f;
                if q.is_zero() {
                    K::zero()
                } else {
                    Poly::resultant(p, &q).expect("nonzero")
                }
            })
            .collect();
        Poly::interpolate(&xs, &ys).squarefree_part().monic()
    }

    /// Preimage of a point set with local degrees as multiplicities.
    pub fn preimage(&self, s: &PointSet<K>) -> Preimage<K> {
        let dd = s.poly.deg();
        let mut poly = s.poly.subst_hom(&self.f, &self.g, dd);
        let mut formal = self.d * dd;
        if s.inf {
            poly = &poly * &self.g;
            formal += self.d;
        }
        let inf_mult = formal - poly.deg();
        Preimage { poly, inf_mult }
    }

    pub fn critical_data(&self) -> CriticalData<K> {
        CriticalData::new(self)
    }

    /// `f / g` rendered with `x` as the variable.
    pub fn expression(&self) -> String {
        let num = self.f.to_string();
        if self.g.is_one() {
            return num;
        }
        format!("({})/({})", num, self.g)
    }
}

impl<K: Base> fmt::Display for RationalMap<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.expression())
    }
}

/// Joint primitive normalization of a pair of forms, with the leading
/// structural coefficient of `g` normalized.
fn primitive_pair<K: Base>(f: &Poly<K>, g: &Poly<K>, d: usize) -> (Poly<K>, Poly<K>) {
    let all: Vec<K> = (0..=d).map(|i| f.coeff(i)).chain((0..=d).map(|i| g.coeff(i))).collect();
    let prim = K::make_primitive(&all);
    let (pf, pg) = prim.split_at(d + 1);
    let pf = Poly::new(pf.to_vec());
    let pg = Poly::new(pg.to_vec());
    let u = K::normalizing_unit(&pg.lc());
    (pf.scale(&u), pg.scale(&u))
}

/// Sylvester matrix of two forms of formal degree `d`; columns are `x^j f`
/// and `x^j g` for `j < d`.
pub(crate) fn sylvester_forms<F: Field>(f: &Poly<F>, g: &Poly<F>, d: usize) -> Vec<Vec<F>> {
    let n = 2 * d;
    let mut m = vec![vec![F::zero(); n]; n];
    for j in 0..d {
        for i in 0..=d {
            m[i + j][j] = f.coeff(i);
            m[i + j][d + j] = g.coeff(i);
        }
    }
    m
}

/// Cofactors `(A, B)` of degree `d - 1` with `A F + B G = X^(2d-1)` (or
/// `Z^(2d-1)`), or `None` when the forms share a zero.
pub(crate) fn nullstellensatz_forms<F: Field>(
    f: &Poly<F>,
    g: &Poly<F>,
    d: usize,
    top: bool,
) -> Option<(Poly<F>, Poly<F>)> {
    let n = 2 * d;
    let mut rhs = vec![F::zero(); n];
    rhs[if top { n - 1 } else { 0 }] = F::one();
    let sol = solve(sylvester_forms(f, g, d), rhs)?;
    Some((Poly::new(sol[..d].to_vec()), Poly::new(sol[d..].to_vec())))
}

fn determinant<K: Field>(mut m: Vec<Vec<K>>) -> K {
    let n = m.len();
    let mut det = K::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return K::zero();
        };
        if r != c {
            m.swap(r, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det = det * &piv;
        let inv = piv.inv();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let factor = m[r][c].clone() * &inv;
            for k in c..n {
                let v = m[c][k].clone() * &factor;
                m[r][k] = m[r][k].clone() - &v;
            }
        }
    }
    det
}

fn solve<K: Field>(mut m: Vec<Vec<K>>, mut rhs: Vec<K>) -> Option<Vec<K>> {
    let n = m.len();
    for c in 0..n {
        let r = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(r, c);
        rhs.swap(r, c);
        let inv = m[c][c].inv();
        for k in c..n {
            m[c][k] = m[c][k].clone() * &inv;
        }
        rhs[c] = rhs[c].clone() * &inv;
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let factor = m[r][c].clone();
            for k in c..n {
                let v = m[c][k].clone() * &factor;
                m[r][k] = m[r][k].clone() - &v;
            }
            let v = rhs[c].clone() * &factor;
            rhs[r] = rhs[r].clone() - &v;
        }
    }
    Some(rhs)
}

/// One Galois-stable piece of the critical set.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalClass<K: Base> {
    pub set: PointSet<K>,
    /// The finite part is irreducible over the base (or the class is `{inf}`).
    pub irreducible: bool,
}

/// Critical points and the lazily extended forward orbits of their classes.
#[derive(Debug)]
pub struct CriticalData<K: Base> {
    map: RationalMap<K>,
    w: Poly<K>,
    infinity_critical: bool,
    classes: Vec<CriticalClass<K>>,
    orbits: Mutex<Vec<Vec<PointSet<K>>>>,
}

impl<K: Base> CriticalData<K> {
    fn new(map: &RationalMap<K>) -> Self {
        let wr = map.wronskian();
        let w = wr.squarefree_part().monic();
        let infinity_critical = map.infinity_is_critical();
        let mut classes: Vec<CriticalClass<K>> = if w.deg() > 0 {
            K::split_squarefree(&w, DEFAULT_FACTOR_CAP)
                .into_iter()
                .map(|SplitFactor { poly, irreducible }| CriticalClass {
                    set: PointSet::from_squarefree(&poly, false),
                    irreducible,
                })
                .collect()
        } else {
            Vec::new()
        };
        if infinity_critical {
            classes.push(CriticalClass {
                set: PointSet {
                    poly: Poly::one(),
                    inf: true,
                },
                irreducible: true,
            });
        }
        let orbits = Mutex::new(classes.iter().map(|c| vec![c.set.clone()]).collect());
        CriticalData {
            map: map.clone(),
            w,
            infinity_critical,
            classes,
            orbits,
        }
    }

    pub fn map(&self) -> &RationalMap<K> {
        &self.map
    }

    /// Monic squarefree polynomial of the finite critical points.
    pub fn finite_critical_poly(&self) -> &Poly<K> {
        &self.w
    }

    pub fn infinity_is_critical(&self) -> bool {
        self.infinity_critical
    }

    pub fn critical_set(&self) -> PointSet<K> {
        PointSet::from_squarefree(&self.w, self.infinity_critical)
    }

    pub fn classes(&self) -> &[CriticalClass<K>] {
        &self.classes
    }

    /// Extends every class orbit to index `k` (single writer).
    pub fn ensure(&self, k: usize) {
        let mut orbits = self.orbits.lock().unwrap();
        for orbit in orbits.iter_mut() {
            while orbit.len() <= k {
                let next = self.map.image(orbit.last().unwrap());
                orbit.push(next);
            }
        }
    }

    /// `phi^k` of the `i`-th critical class.
    pub fn class_orbit(&self, i: usize, k: usize) -> PointSet<K> {
        self.ensure(k);
        self.orbits.lock().unwrap()[i][k].clone()
    }

    /// `{ phi^k(c) : c critical }`.
    pub fn orbit_poly(&self, k: usize) -> PointSet<K> {
        self.ensure(k);
        let orbits = self.orbits.lock().unwrap();
        orbits.iter().fold(PointSet::empty(), |acc, o| acc.union(&o[k]))
    }

    /// Critical values of `phi^k`: the union of `orbit_poly(j)` for `1 <= j <= k`.
    pub fn critical_value_poly(&self, k: usize, cap: usize) -> Result<PointSet<K>> {
        if k == 0 {
            return Err(Error::Invalid("iterate index must be positive".into()));
        }
        if k > cap {
            return Err(Error::Cap {
                name: "critical value iterate",
                limit: cap,
                requested: k,
            });
        }
        Ok((1..=k).fold(PointSet::empty(), |acc, j| acc.union(&self.orbit_poly(j))))
    }
}
