//! Number fields `Q[y]/(m)` for irreducible `m`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::arith::{Field, Rat};
use crate::base::Base;
use crate::error::{Error, Result};
use crate::factor::{is_irreducible, DEFAULT_FACTOR_CAP};
use crate::poly::Poly;

#[derive(Debug, PartialEq, Eq)]
pub struct QuotField {
    modulus: Poly<Rat>,
}

impl QuotField {
    /// Builds the field after verifying that `modulus` is irreducible over `Q`.
    pub fn new(modulus: &Poly<Rat>) -> Result<Arc<Self>> {
        if modulus.deg() == 0 {
            return Err(Error::Degree("quotient modulus must be nonconstant".into()));
        }
        if !is_irreducible(modulus, DEFAULT_FACTOR_CAP)? {
            return Err(Error::Reducible(modulus.fmt_var("t")));
        }
        Ok(Arc::new(QuotField {
            modulus: modulus.monic(),
        }))
    }

    pub fn modulus(&self) -> &Poly<Rat> {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    pub fn elem(self: &Arc<Self>, p: &Poly<Rat>) -> QElem {
        QElem {
            rep: p.rem(&self.modulus),
            ctx: Some(self.clone()),
        }
    }

    /// Class of the generator `y`.
    pub fn gen(self: &Arc<Self>) -> QElem {
        self.elem(&Poly::x())
    }
}

/// An element of a [`QuotField`]. Constants may be built without a context
/// (`zero`, `one`, `from_i64`); they pick one up from the other operand.
#[derive(Clone, Debug)]
pub struct QElem {
    rep: Poly<Rat>,
    ctx: Option<Arc<QuotField>>,
}

impl QElem {
    pub fn rep(&self) -> &Poly<Rat> {
        &self.rep
    }

    fn join(a: &Option<Arc<QuotField>>, b: &Option<Arc<QuotField>>) -> Option<Arc<QuotField>> {
        a.clone().or_else(|| b.clone())
    }

    fn reduced(rep: Poly<Rat>, ctx: Option<Arc<QuotField>>) -> QElem {
        match &ctx {
            Some(c) if rep.deg() >= c.degree() => QElem {
                rep: rep.rem(&c.modulus),
                ctx,
            },
            _ => QElem { rep, ctx },
        }
    }

    /// Characteristic polynomial of multiplication by this element, a power of
    /// its minimal polynomial.
    pub fn charpoly(&self) -> Poly<Rat> {
        let m = match &self.ctx {
            Some(c) => c.modulus.clone(),
            None => Poly::x(),
        };
        let e = m.deg();
        let xs: Vec<Rat> = (0..=e as i64).map(Rat::from_i64).collect();
        let ys: Vec<Rat> = xs
            .iter()
            .map(|x| {
                let q = &Poly::constant(x.clone()) - &self.rep;
                if q.is_zero() {
                    Rat::from_i64(0)
                } else {
                    Poly::resultant(&m, &q).expect("nonzero operands")
                }
            })
            .collect();
        Poly::interpolate(&xs, &ys)
    }

    /// Bounds on the absolute Weil height of this element.
    pub fn height_bounds(&self) -> (f64, f64) {
        if self.rep.degree() <= 0 {
            let c = self.rep.coeff(0);
            let h = Rat::root_height_bounds(&Poly::linear_root(&c), true).0;
            return (h, h);
        }
        Rat::root_height_bounds(&self.charpoly(), true)
    }
}

impl PartialEq for QElem {
    fn eq(&self, o: &Self) -> bool {
        self.rep == o.rep
    }
}

impl Eq for QElem {}

impl Hash for QElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rep.hash(state);
    }
}

impl fmt::Display for QElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rep.fmt_var("y"))
    }
}

impl Add for QElem {
    type Output = QElem;
    fn add(self, o: QElem) -> QElem {
        self + &o
    }
}

impl Add<&QElem> for QElem {
    type Output = QElem;
    fn add(self, o: &QElem) -> QElem {
        QElem {
            rep: &self.rep + &o.rep,
            ctx: Self::join(&self.ctx, &o.ctx),
        }
    }
}

impl Sub for QElem {
    type Output = QElem;
    fn sub(self, o: QElem) -> QElem {
        self - &o
    }
}

impl Sub<&QElem> for QElem {
    type Output = QElem;
    fn sub(self, o: &QElem) -> QElem {
        QElem {
            rep: &self.rep - &o.rep,
            ctx: Self::join(&self.ctx, &o.ctx),
        }
    }
}

impl Mul for QElem {
    type Output = QElem;
    fn mul(self, o: QElem) -> QElem {
        self * &o
    }
}

impl Mul<&QElem> for QElem {
    type Output = QElem;
    fn mul(self, o: &QElem) -> QElem {
        Self::reduced(&self.rep * &o.rep, Self::join(&self.ctx, &o.ctx))
    }
}

impl Neg for QElem {
    type Output = QElem;
    fn neg(self) -> QElem {
        QElem {
            rep: -self.rep,
            ctx: self.ctx,
        }
    }
}

impl Field for QElem {
    fn zero() -> Self {
        QElem {
            rep: Poly::zero(),
            ctx: None,
        }
    }
    fn one() -> Self {
        QElem {
            rep: Poly::one(),
            ctx: None,
        }
    }
    fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
    fn inv(&self) -> Self {
        assert!(!self.rep.is_zero(), "inverse of zero");
        if self.rep.is_constant() {
            return QElem {
                rep: Poly::constant(self.rep.lc().inv()),
                ctx: self.ctx.clone(),
            };
        }
        let ctx = self.ctx.as_ref().expect("nonconstant element without a field");
        let (g, s, _) = Poly::xgcd(&self.rep, &ctx.modulus);
        debug_assert!(g.is_one());
        QElem {
            rep: s.rem(&ctx.modulus),
            ctx: self.ctx.clone(),
        }
    }
    fn from_i64(v: i64) -> Self {
        QElem {
            rep: Poly::constant(Rat::from_i64(v)),
            ctx: None,
        }
    }
    fn from_rat(r: &Rat) -> Self {
        QElem {
            rep: Poly::constant(r.clone()),
            ctx: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reducible() {
        assert!(QuotField::new(&Poly::from_i64s(&[-1, 0, 1])).is_err());
        assert!(QuotField::new(&Poly::from_i64s(&[1, 0, 1])).is_ok());
    }

    #[test]
    fn inverse_and_charpoly() {
        let k = QuotField::new(&Poly::from_i64s(&[-2, 0, 1])).unwrap();
        let a = k.elem(&Poly::from_i64s(&[1, 1])); // 1 + sqrt2
        assert!((a.clone() * &a.inv()).is_one());
        // minimal polynomial of 1 + sqrt2 is x^2 - 2x - 1
        assert_eq!(a.charpoly(), Poly::from_i64s(&[-1, -2, 1]));
    }
}
