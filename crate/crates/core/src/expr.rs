//! Parsing of maps, points and polynomials written as ordinary expressions:
//! `x^2 + 1`, `(x^2 - 1)/x`, `x^2 + t`, `5/2`, `0.25`, `t + 3`, `inf`.
//! Multiplication may be implicit (`2x`, `(x - 1)(x - 2)^2`).

use num_bigint::BigInt;

use crate::arith::{Field, Rat};
use crate::base::Base;
use crate::dynamics::{ProjPoint, RationalMap};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

/// Bases whose elements can be written down: `Q` has no `t`.
pub trait Parse: Base {
    fn param() -> Option<Self>;
}

impl Parse for Rat {
    fn param() -> Option<Self> {
        None
    }
}

impl Parse for RatFunc {
    fn param() -> Option<Self> {
        Some(RatFunc::t())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((
                pos,
                Tok::Num(decimal(&text).ok_or_else(|| perr(pos, format!("bad number '{text}'")))?),
            ));
        } else if c.is_alphabetic() || c == '∞' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '∞') {
                i += 1;
            }
            let word: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            // `xt` and `2x` read as products; only `inf` is a longer word
            if word == "inf" || word == "∞" {
                out.push((pos, Tok::Ident("inf".into())));
            } else {
                for (k, ch) in word.chars().enumerate() {
                    out.push((chars[start + k].0, Tok::Ident(ch.to_string())));
                }
            }
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else if c == '−' {
            out.push((pos, Tok::Op('-')));
            i += 1;
        } else {
            return Err(perr(pos, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn decimal(s: &str) -> Option<Rat> {
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = BigInt::from(10).pow(frac.len() as u32);
    Some(Rat::new(n, d))
}

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

/// A quotient of polynomials in the main variable.
#[derive(Clone, Debug)]
struct Frac<K: Base> {
    num: Poly<K>,
    den: Poly<K>,
}

impl<K: Base> Frac<K> {
    fn constant(c: K) -> Self {
        Frac {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    fn add(self, o: Self, sign: bool) -> Self {
        let rhs = &o.num * &self.den;
        let lhs = &self.num * &o.den;
        Frac {
            num: if sign { &lhs + &rhs } else { &lhs - &rhs },
            den: &self.den * &o.den,
        }
    }

    fn mul(self, o: Self) -> Self {
        Frac {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
    }

    fn div(self, o: Self, pos: usize) -> Result<Self> {
        if o.num.is_zero() {
            return Err(perr(pos, "division by zero"));
        }
        Ok(Frac {
            num: &self.num * &o.den,
            den: &self.den * &o.num,
        })
    }

    fn reduced(self) -> Self {
        let g = Poly::gcd(&self.num, &self.den);
        if g.deg() == 0 {
            return self;
        }
        Frac {
            num: self.num.div_exact(&g).unwrap(),
            den: self.den.div_exact(&g).unwrap(),
        }
    }
}

struct Parser<'a, K: Base> {
    toks: &'a [(usize, Tok)],
    i: usize,
    end: usize,
    var: &'a str,
    param: Option<K>,
}

impl<'a, K: Base> Parser<'a, K> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Frac<K>> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let plus = *c == '+';
            self.i += 1;
            let rhs = self.term()?;
            acc = acc.add(rhs, plus).reduced();
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Frac<K>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.i += 1;
                    acc = acc.mul(self.unary()?);
                }
                Some(Tok::Op('/')) => {
                    self.i += 1;
                    let pos = self.pos();
                    acc = acc.div(self.unary()?, pos)?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    acc = acc.mul(self.power()?);
                }
                _ => return Ok(acc.reduced()),
            }
        }
    }

    fn unary(&mut self) -> Result<Frac<K>> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.i += 1;
                let v = self.unary()?;
                Ok(Frac {
                    num: -v.num,
                    den: v.den,
                })
            }
            Some(Tok::Op('+')) => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Frac<K>> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.i += 1;
            let pos = self.pos();
            let e = match self.peek() {
                Some(Tok::Num(r)) if r.is_integer() => r.to_integer(),
                _ => return Err(perr(pos, "exponent must be a non-negative integer")),
            };
            self.i += 1;
            let e: u32 = e.try_into().map_err(|_| perr(pos, "exponent out of range"))?;
            return Ok(Frac {
                num: base.num.pow(e),
                den: base.den.pow(e),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Frac<K>> {
        let pos = self.pos();
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| perr(pos, "unexpected end of input"))?;
        self.i += 1;
        match tok {
            Tok::Num(r) => Ok(Frac::constant(K::from_rat(&r))),
            Tok::Ident(name) if name == self.var => Ok(Frac {
                num: Poly::x(),
                den: Poly::one(),
            }),
            Tok::Ident(name) if name == "t" => match &self.param {
                Some(t) => Ok(Frac::constant(t.clone())),
                None => Err(perr(pos, "'t' is not available over Q")),
            },
            Tok::Ident(name) if name == "inf" => Err(perr(pos, "'inf' must stand alone")),
            Tok::Ident(name) => Err(perr(pos, format!("unknown symbol '{name}'"))),
            Tok::Op('(') => {
                let v = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.i += 1;
                        Ok(v)
                    }
                    _ => Err(perr(self.pos(), "expected ')'")),
                }
            }
            Tok::Op(c) => Err(perr(pos, format!("unexpected '{c}'"))),
        }
    }
}

fn parse_frac<K: Base>(src: &str, var: &str, param: Option<K>) -> Result<Frac<K>> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(perr(0, "empty expression"));
    }
    let mut p = Parser {
        toks: &toks,
        i: 0,
        end: src.len(),
        var,
        param,
    };
    let v = p.expr()?;
    if p.i < toks.len() {
        return Err(perr(p.pos(), "unexpected trailing input"));
    }
    Ok(v)
}

/// A rational map in `x` over `K`.
pub fn parse_map<K: Parse>(src: &str) -> Result<RationalMap<K>> {
    let f = parse_frac::<K>(src, "x", K::param())?;
    RationalMap::new(&f.num, &f.den)
}

/// Numerator and denominator of an expression in `x`.
pub fn parse_fraction<K: Parse>(src: &str) -> Result<(Poly<K>, Poly<K>)> {
    let f = parse_frac::<K>(src, "x", K::param())?;
    Ok((f.num, f.den))
}

/// A point of `P^1(K)`; `inf` is the point at infinity.
pub fn parse_point<K: Parse>(src: &str) -> Result<ProjPoint<K>> {
    if matches!(src.trim(), "inf" | "∞" | "infinity") {
        return Ok(ProjPoint::infinity());
    }
    parse_element::<K>(src).map(ProjPoint::affine)
}

/// An element of `K` (no `x` allowed).
pub fn parse_element<K: Parse>(src: &str) -> Result<K> {
    let f = parse_frac::<K>(src, "\u{0}", K::param())?;
    Ok(f.num.coeff(0).div(&f.den.coeff(0)))
}

/// A polynomial in `t` with rational coefficients.
pub fn parse_t_poly(src: &str) -> Result<Poly<Rat>> {
    let f = parse_frac::<Rat>(src, "t", None)?;
    if f.den.deg() > 0 {
        return Err(perr(0, "expected a polynomial in t"));
    }
    Ok(f.num.scale(&f.den.coeff(0).inv()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn maps() {
        let m: RationalMap<Rat> = parse_map("x^2 + 1").unwrap();
        assert_eq!(m.f(), &Poly::from_i64s(&[1, 0, 1]));
        let m: RationalMap<Rat> = parse_map("(x^2-1)/x").unwrap();
        assert_eq!(
            (m.f().clone(), m.g().clone()),
            (Poly::from_i64s(&[-1, 0, 1]), Poly::from_i64s(&[0, 1]))
        );
        let m: RationalMap<Rat> = parse_map("(x-1)(x-2)^2").unwrap();
        assert_eq!(m.f(), &(&Poly::from_i64s(&[-1, 1]) * &Poly::from_i64s(&[4, -4, 1])));
        let m: RationalMap<RatFunc> = parse_map("x^2+t").unwrap();
        assert_eq!(m.f().coeff(0), RatFunc::t());
        assert!(parse_map::<Rat>("x").is_err());
    }

    #[test]
    fn points() {
        assert_eq!(parse_point::<Rat>("5/2").unwrap(), ProjPoint::affine(rat(5, 2)));
        assert_eq!(parse_point::<Rat>("-0.25").unwrap(), ProjPoint::affine(rat(-1, 4)));
        assert!(parse_point::<Rat>("inf").unwrap().is_infinity());
        let p: ProjPoint<RatFunc> = parse_point("t+3").unwrap();
        assert_eq!(p.value().unwrap(), RatFunc::from_poly(Poly::from_i64s(&[3, 1])));
        assert_eq!(parse_t_poly("t+2").unwrap(), Poly::from_i64s(&[2, 1]));
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_point::<Rat>("t"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_map::<Rat>("x^2 + $"), Err(Error::Parse { pos: 6, .. })));
        assert!(matches!(parse_map::<Rat>("(x^2"), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_point::<Rat>("1/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_point::<Rat>("x"), Err(Error::Parse { .. })));
    }
}
