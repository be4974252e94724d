//! The two base fields, `Q` and `Q(t)`, behind one trait.
//!
//! Everything place-dependent lives here: what "integral and primitive" means,
//! how heights of integral vectors are measured, and how far polynomials over
//! the base can be split into irreducible factors.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{denominator_lcm, log_abs, primitive_integers, rat_int, Field, Rat};
use crate::error::{Error, Result};
use crate::factor::{factor_rational_poly, small_degree_factors, DEFAULT_FACTOR_CAP};
use crate::modp::factor_bigint;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    Nf,
    Ff,
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseKind::Nf => "nf",
            BaseKind::Ff => "ff",
        })
    }
}

/// A place of the base field: a rational prime, a monic irreducible
/// polynomial in `t`, or the infinite place of `Q(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Prime(BigInt),
    Finite(Poly<Rat>),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Finite(pi) => f.write_str(&pi.fmt_var("t")),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

/// A factor produced by [`Base::split_squarefree`].
#[derive(Clone, Debug, PartialEq)]
pub struct SplitFactor<K: Field> {
    pub poly: Poly<K>,
    /// `false` for a block that could not be split further (it may or may
    /// not be irreducible).
    pub irreducible: bool,
}

pub trait Base: Field {
    const KIND: BaseKind;

    /// Rescales a nonzero vector to integral coordinates with trivial content.
    /// The result is unique up to a unit.
    fn make_primitive(v: &[Self]) -> Vec<Self>;

    /// The unit `u` for which `u * c` is the normalized associate of `c`
    /// (positive over `Q`, monic in `t` over `Q(t)`).
    fn normalizing_unit(c: &Self) -> Self;

    /// Height of an integral primitive vector viewed as a projective point.
    fn primitive_height(v: &[Self]) -> f64;

    /// Sum over all places of `log` of the local size of a coefficient family,
    /// used for Nullstellensatz cofactors. Archimedean sizes are l1 norms of
    /// each set; the maximum over the sets is taken place by place.
    fn cofactor_size(sets: &[Vec<Self>]) -> f64;

    /// Upper gap term: `h(phi(P)) <= d h(P) + upper_gap` for integral primitive
    /// coefficients of the forms.
    fn upper_gap(coeffs: &[Self], d: usize) -> f64;

    /// Bounds on the heights of the roots of a nonzero nonconstant polynomial.
    /// With `irreducible` the bounds are per the minimal polynomial; otherwise
    /// they hold for every root of every factor.
    fn root_height_bounds(f: &Poly<Self>, irreducible: bool) -> (f64, f64);

    /// Splits a monic squarefree polynomial as far as the base supports.
    fn split_squarefree(f: &Poly<Self>, cap: usize) -> Vec<SplitFactor<Self>>;

    /// Places at which an integral element vanishes. `full_degree` is the
    /// generic `t`-degree, below which the infinite place of `Q(t)` divides.
    fn places_dividing(x: &Self, full_degree: usize) -> Result<Vec<Place>>;

    /// Rough size, in bits, of a point of height `h`.
    fn storage_bits(h: f64) -> f64;

    /// The element as an exact JSON-safe string.
    fn render(&self) -> String {
        self.to_string()
    }
}

fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rat::new(n, d))
}

impl Base for Rat {
    const KIND: BaseKind = BaseKind::Nf;

    fn make_primitive(v: &[Self]) -> Vec<Self> {
        primitive_integers(v).into_iter().map(rat_int).collect()
    }

    fn normalizing_unit(c: &Self) -> Self {
        if c.is_negative() {
            -<Rat as One>::one()
        } else {
            <Rat as One>::one()
        }
    }

    fn storage_bits(h: f64) -> f64 {
        h / std::f64::consts::LN_2
    }

    fn primitive_height(v: &[Self]) -> f64 {
        v.iter()
            .filter(|c| !Zero::is_zero(*c))
            .map(|c| log_abs(c.numer()))
            .fold(0.0, f64::max)
    }

    fn cofactor_size(sets: &[Vec<Self>]) -> f64 {
        let all: Vec<Rat> = sets.iter().flatten().cloned().collect();
        let lcm = denominator_lcm(&all);
        let l1 = sets
            .iter()
            .map(|s| s.iter().fold(<Rat as Zero>::zero(), |acc, c| acc + c.abs()))
            .max()
            .unwrap_or_else(<Rat as Zero>::zero);
        let arch = if Zero::is_zero(&l1) {
            0.0
        } else {
            log_abs(l1.numer()) - log_abs(l1.denom())
        };
        arch.max(0.0) + log_abs(&lcm)
    }

    /// `log max(|F|_1, |G|_1)`, never more than `log((d + 1) H)`.
    fn upper_gap(coeffs: &[Self], d: usize) -> f64 {
        let ints = primitive_integers(coeffs);
        let l1 = |v: &[BigInt]| v.iter().fold(BigInt::zero(), |acc, c| acc + c.abs());
        let (f, g) = ints.split_at((d + 1).min(ints.len()));
        log_abs(&l1(f).max(l1(g)))
    }

    fn root_height_bounds(f: &Poly<Self>, irreducible: bool) -> (f64, f64) {
        let ints = primitive_integers(f.coeffs());
        let n = f.deg();
        let maxc = ints.iter().filter(|c| !c.is_zero()).map(log_abs).fold(0.0, f64::max);
        if n == 1 {
            return (maxc, maxc);
        }
        if irreducible {
            let l = maxc / n as f64;
            let slack = std::f64::consts::LN_2;
            ((l - slack).max(0.0), l + slack)
        } else {
            let norm2: BigInt = ints.iter().map(|c| c * c).sum();
            (0.0, 0.5 * log_abs(&norm2))
        }
    }

    fn places_dividing(x: &Self, _full_degree: usize) -> Result<Vec<Place>> {
        let n = x.numer();
        if n.is_zero() {
            return Err(Error::Invalid("every prime divides zero".into()));
        }
        let fac = factor_bigint(n).ok_or(Error::Cap {
            name: "integer factorization",
            limit: 64,
            requested: n.bits() as usize,
        })?;
        Ok(fac.into_iter().map(|(p, _)| Place::Prime(p)).collect())
    }

    fn split_squarefree(f: &Poly<Self>, cap: usize) -> Vec<SplitFactor<Self>> {
        if f.deg() <= 1 {
            return vec![SplitFactor {
                poly: f.monic(),
                irreducible: true,
            }];
        }
        if f.deg() <= cap {
            if let Ok(fac) = factor_rational_poly(f, cap) {
                return fac
                    .factors
                    .into_iter()
                    .map(|(poly, _)| SplitFactor {
                        poly,
                        irreducible: true,
                    })
                    .collect();
            }
        }
        let (small, rest) = small_degree_factors(f, 2);
        let mut out: Vec<SplitFactor<Self>> = small
            .into_iter()
            .map(|poly| SplitFactor {
                poly,
                irreducible: true,
            })
            .collect();
        if rest.deg() > 0 {
            out.push(SplitFactor {
                poly: rest,
                irreducible: false,
            });
        }
        out
    }
}

fn ff_primitive(v: &[RatFunc]) -> Vec<RatFunc> {
    let lcm = v.iter().filter(|c| !c.is_zero()).fold(Poly::<Rat>::one(), |acc, c| {
        let g = Poly::gcd(&acc, c.den());
        &acc * &c.den().div_exact(&g).unwrap()
    });
    let nums: Vec<Poly<Rat>> = v
        .iter()
        .map(|c| {
            if c.is_zero() {
                Poly::zero()
            } else {
                c.num() * &lcm.div_exact(c.den()).unwrap()
            }
        })
        .collect();
    let g = nums.iter().fold(Poly::<Rat>::zero(), |acc, n| Poly::gcd(&acc, n));
    if g.is_zero() {
        return v.to_vec();
    }
    nums.into_iter()
        .map(|n| RatFunc::from_poly(n.div_exact(&g).unwrap()))
        .collect()
}

fn ff_maxdeg(v: &[RatFunc]) -> usize {
    v.iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.num().deg())
        .max()
        .unwrap_or(0)
}

fn poly_sqrt(p: &Poly<Rat>) -> Option<Poly<Rat>> {
    if p.is_zero() {
        return Some(Poly::zero());
    }
    let c = rat_sqrt(&p.lc())?;
    let mut acc = Poly::constant(c);
    if p.deg() > 0 {
        for (a, m) in p.squarefree_decompose().ok()? {
            if m % 2 == 1 {
                return None;
            }
            acc = &acc * &a.pow((m / 2) as u32);
        }
    }
    Some(acc)
}

impl Base for RatFunc {
    const KIND: BaseKind = BaseKind::Ff;

    fn make_primitive(v: &[Self]) -> Vec<Self> {
        ff_primitive(v)
    }

    fn normalizing_unit(c: &Self) -> Self {
        RatFunc::from_rat(&c.num().lc().inv())
    }

    /// An element of degree `h` carries about `h` coefficients of about
    /// `h` bits each; the factor covers the gcd work on top.
    fn storage_bits(h: f64) -> f64 {
        8.0 * h * h.max(1.0)
    }

    fn primitive_height(v: &[Self]) -> f64 {
        ff_maxdeg(v) as f64
    }

    fn cofactor_size(sets: &[Vec<Self>]) -> f64 {
        let all: Vec<&RatFunc> = sets.iter().flatten().filter(|c| !c.is_zero()).collect();
        let lcm = all.iter().fold(Poly::<Rat>::one(), |acc, c| {
            let g = Poly::gcd(&acc, c.den());
            &acc * &c.den().div_exact(&g).unwrap()
        });
        let at_inf = all
            .iter()
            .map(|c| c.num().deg() as i64 - c.den().deg() as i64)
            .max()
            .unwrap_or(0)
            .max(0);
        (lcm.deg() as i64 + at_inf) as f64
    }

    fn upper_gap(coeffs: &[Self], _d: usize) -> f64 {
        ff_maxdeg(coeffs) as f64
    }

    fn root_height_bounds(f: &Poly<Self>, irreducible: bool) -> (f64, f64) {
        let prim = ff_primitive(f.coeffs());
        let maxdeg = ff_maxdeg(&prim) as f64;
        if irreducible || f.deg() == 1 {
            let h = maxdeg / f.deg() as f64;
            (h, h)
        } else {
            (0.0, maxdeg)
        }
    }

    fn places_dividing(x: &Self, full_degree: usize) -> Result<Vec<Place>> {
        if x.is_zero() {
            return Err(Error::Invalid("every place divides zero".into()));
        }
        let mut out = Vec::new();
        if x.num().deg() > 0 {
            let fac = factor_rational_poly(x.num(), DEFAULT_FACTOR_CAP)?;
            out.extend(fac.factors.into_iter().map(|(p, _)| Place::Finite(p)));
        }
        if x.num().deg() < full_degree {
            out.push(Place::Infinity);
        }
        Ok(out)
    }

    fn split_squarefree(f: &Poly<Self>, _cap: usize) -> Vec<SplitFactor<Self>> {
        let f = f.monic();
        match f.deg() {
            0 | 1 => vec![SplitFactor {
                poly: f,
                irreducible: true,
            }],
            2 => {
                let (c, b) = (f.coeff(0), f.coeff(1));
                let disc = b.clone() * &b - RatFunc::from_i64(4) * &c;
                let sq = poly_sqrt(disc.num()).zip(poly_sqrt(disc.den()));
                match sq {
                    Some((n, d)) => {
                        let s = RatFunc::new(n, d);
                        let half = RatFunc::from_rat(&Rat::new(BigInt::one(), BigInt::from(2)));
                        let r1 = (-b.clone() + &s) * &half;
                        let r2 = (-b - &s) * &half;
                        let mut roots = vec![r1, r2];
                        roots.sort_by_key(|r| r.to_string());
                        roots
                            .into_iter()
                            .map(|r| SplitFactor {
                                poly: Poly::linear_root(&r),
                                irreducible: true,
                            })
                            .collect()
                    }
                    None => vec![SplitFactor {
                        poly: f,
                        irreducible: true,
                    }],
                }
            }
            _ => vec![SplitFactor {
                poly: f,
                irreducible: false,
            }],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn primitive_rescaling() {
        let v = vec![rat(1, 2), rat(-1, 3)];
        assert_eq!(Rat::make_primitive(&v), vec![rat(3, 1), rat(-2, 1)]);
        let t = RatFunc::t();
        let v = vec![t.clone() * &t.clone(), t.clone().inv()];
        let p = RatFunc::make_primitive(&v);
        assert_eq!(p[0].num(), &Poly::from_i64s(&[0, 0, 0, 1]));
        assert!(p[1].is_one());
    }

    #[test]
    fn root_heights() {
        let (lo, hi) = Rat::root_height_bounds(&Poly::from_i64s(&[-3, 1]), true);
        assert!((lo - 3f64.ln()).abs() < 1e-12 && (hi - lo).abs() < 1e-12);
        let (lo, hi) = Rat::root_height_bounds(&Poly::from_i64s(&[-2, 0, 1]), true);
        let h = 0.5 * 2f64.ln();
        assert!(lo <= h && h <= hi && hi - lo <= 2.0 * 2f64.ln() + 1e-12);
        let (lo, hi) = Rat::root_height_bounds(&Poly::from_i64s(&[1, 0, 1]), true);
        assert!(lo <= 0.0 && 0.0 <= hi);
    }

    #[test]
    fn ff_quadratic_split() {
        // x^2 - t^2 = (x - t)(x + t)
        let t = RatFunc::t();
        let f = Poly::new(vec![-(t.clone() * &t), RatFunc::zero(), RatFunc::one()]);
        let s = RatFunc::split_squarefree(&f, 64);
        assert_eq!(s.len(), 2);
        // x^2 - t stays whole
        let f = Poly::new(vec![-t, RatFunc::zero(), RatFunc::one()]);
        assert_eq!(RatFunc::split_squarefree(&f, 64).len(), 1);
    }
}
