//! Reader for the plain-text expression grammar.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" unary) | ("/" unary))*
//! unary   := "-" unary | power
//! power   := primary ("^" "-"? int)?
//! primary := int | "i" | "lam" | atom | "(" expr ")" | "tr" "(" expr ")"
//! atom    := name ("_t" | "_x" | "_x" int)*
//! ```
//!
//! Names are `u, uh, pi, pih, K11, K22, xip, xim, kap, kam, kapinv,
//! kaminv`. Division is only by numbers, powers of `lam` and boundary
//! constants. Bare numbers take whatever block shape the surrounding sum
//! needs.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeff::Coeff;
use crate::error::{AlgebraError, ParseError};
use crate::ncpoly::{
    invertible_constant, Base, FieldAtom, LaurentSeries, Mode, NCPolynomial, PolyMatrix, Shape, PHYSICAL_FLOW,
};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().map(|x| x.1).collect();
            out.push((Tok::Int(BigInt::from_str(&s).expect("digits")), pos));
        } else if c.is_ascii_alphabetic() {
            let start = k;
            while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            out.push((Tok::Ident(chars[start..k].iter().map(|x| x.1).collect()), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), pos));
            k += 1;
        } else {
            return Err(ParseError::UnexpectedChar { ch: c, pos });
        }
    }
    Ok(out)
}

/// Reads an atom name such as `u_t_x` or `pih_x3`.
pub fn parse_atom(name: &str) -> Result<FieldAtom, ParseError> {
    let mut parts = name.split('_');
    let head = parts.next().unwrap_or_default();
    let base = Base::from_name(head).ok_or_else(|| ParseError::UnknownSymbol(name.to_string()))?;
    let (mut dt, mut dx, mut flow) = (0, 0, 0);
    for p in parts {
        if !p.is_empty() && p.chars().all(|c| c == 't') {
            dt += p.len() as u32;
        } else if let Some(rest) = p.strip_prefix('x') {
            let (n, f) = if rest.is_empty() {
                (1, PHYSICAL_FLOW)
            } else if rest.chars().all(|c| c == 'x') {
                (rest.len() as u32 + 1, PHYSICAL_FLOW)
            } else {
                (1, rest.parse::<u32>().map_err(|_| ParseError::UnknownSymbol(name.to_string()))?)
            };
            if dx > 0 && flow != f {
                return Err(ParseError::UnknownSymbol(format!("{name} (mixed flows)")));
            }
            dx += n;
            flow = f;
        } else {
            return Err(ParseError::UnknownSymbol(name.to_string()));
        }
    }
    if base.is_constant() && (dt > 0 || dx > 0) {
        return Err(ParseError::UnknownSymbol(format!("{name} (boundary constants have no derivatives)")));
    }
    Ok(FieldAtom::with_derivs(base, dt, dx, flow))
}

/// A Laurent polynomial in `lam` whose coefficients are either plain
/// numbers (shape not yet known) or polynomials of a fixed shape.
#[derive(Clone, Debug)]
enum Val {
    Num(BTreeMap<i32, Coeff>),
    Poly(BTreeMap<i32, NCPolynomial>),
}

fn clean<T>(m: BTreeMap<i32, T>, zero: impl Fn(&T) -> bool) -> BTreeMap<i32, T> {
    m.into_iter().filter(|(_, v)| !zero(v)).collect()
}

struct Ctx {
    mode: Mode,
}

impl Ctx {
    fn num(&self, c: Coeff) -> Val {
        Val::Num(clean([(0, c)].into(), Coeff::is_zero))
    }

    fn promote(&self, m: &BTreeMap<i32, Coeff>, shape: Shape) -> Result<BTreeMap<i32, NCPolynomial>, AlgebraError> {
        m.iter().map(|(k, c)| Ok((*k, NCPolynomial::constant(self.mode, shape, c.clone())?))).collect()
    }

    fn shape_of(p: &BTreeMap<i32, NCPolynomial>) -> Option<Shape> {
        p.values().next().map(|x| x.shape())
    }

    fn add(&self, a: Val, b: Val) -> Result<Val, ParseError> {
        Ok(match (a, b) {
            (Val::Num(x), Val::Num(mut y)) => {
                for (k, c) in x {
                    let e = y.entry(k).or_insert_with(Coeff::zero);
                    *e += &c;
                }
                Val::Num(clean(y, Coeff::is_zero))
            }
            (Val::Num(x), Val::Poly(y)) | (Val::Poly(y), Val::Num(x)) => {
                let Some(shape) = Ctx::shape_of(&y) else { return Ok(Val::Num(x)) };
                self.add(Val::Poly(self.promote(&x, shape)?), Val::Poly(y))?
            }
            (Val::Poly(x), Val::Poly(mut y)) => {
                for (k, p) in x {
                    let e = match y.remove(&k) {
                        Some(q) => q.checked_add(&p)?,
                        None => p,
                    };
                    y.insert(k, e);
                }
                Val::Poly(clean(y, NCPolynomial::is_zero))
            }
        })
    }

    fn neg(&self, a: Val) -> Val {
        self.scale(a, &Coeff::from_int(-1))
    }

    fn scale(&self, a: Val, c: &Coeff) -> Val {
        match a {
            Val::Num(x) => Val::Num(clean(x.into_iter().map(|(k, v)| (k, &v * c)).collect(), Coeff::is_zero)),
            Val::Poly(x) => Val::Poly(clean(x.into_iter().map(|(k, v)| (k, v.scale(c))).collect(), NCPolynomial::is_zero)),
        }
    }

    fn mul(&self, a: Val, b: Val) -> Result<Val, ParseError> {
        Ok(match (a, b) {
            (Val::Num(x), Val::Num(y)) => {
                let mut out: BTreeMap<i32, Coeff> = BTreeMap::new();
                for (i, c) in &x {
                    for (j, d) in &y {
                        let e = out.entry(i + j).or_insert_with(Coeff::zero);
                        *e += &(c * d);
                    }
                }
                Val::Num(clean(out, Coeff::is_zero))
            }
            (Val::Num(x), Val::Poly(y)) | (Val::Poly(y), Val::Num(x)) => {
                let mut acc = Val::Poly(BTreeMap::new());
                for (i, c) in &x {
                    let term = y.iter().map(|(j, p)| (i + j, p.scale(c))).collect();
                    acc = self.add(acc, Val::Poly(term))?;
                }
                acc
            }
            (Val::Poly(x), Val::Poly(y)) => {
                let mut acc = Val::Poly(BTreeMap::new());
                for (i, p) in &x {
                    for (j, q) in &y {
                        acc = self.add(acc, Val::Poly([(i + j, p.nc_mul(q)?)].into()))?;
                    }
                }
                acc
            }
        })
    }

    fn invert(&self, a: Val) -> Result<Val, ParseError> {
        match a {
            Val::Num(x) if x.len() == 1 => {
                let (k, c) = x.into_iter().next().expect("one term");
                Ok(Val::Num([(-k, c.inv().ok_or(ParseError::BadDivision)?)].into()))
            }
            Val::Poly(x) if x.len() == 1 => {
                let (k, p) = x.into_iter().next().expect("one term");
                let inv = invertible_constant(&p).ok_or(ParseError::BadDivision)?;
                Ok(Val::Poly([(-k, inv)].into()))
            }
            _ => Err(ParseError::BadDivision),
        }
    }

    fn pow(&self, a: Val, e: i64) -> Result<Val, ParseError> {
        let (base, n) = if e < 0 { (self.invert(a)?, (-e) as u64) } else { (a, e as u64) };
        let mut acc = self.num(Coeff::one());
        for _ in 0..n {
            acc = self.mul(acc, base.clone())?;
        }
        Ok(acc)
    }

    fn trace(&self, a: Val) -> Result<Val, ParseError> {
        match a {
            Val::Poly(x) => Ok(Val::Poly(
                x.into_iter().map(|(k, p)| Ok((k, p.trace()?))).collect::<Result<_, AlgebraError>>()?,
            )),
            Val::Num(c) if c.values().all(Coeff::is_zero) => Ok(Val::Num(c)),
            Val::Num(_) => Err(ParseError::Document("tr() of a bare number has no block size".into())),
        }
    }
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    at: usize,
    ctx: Ctx,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.0.clone());
        self.at += 1;
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.at) {
            Some((t, pos)) => ParseError::UnexpectedToken {
                found: match t {
                    Tok::Int(n) => n.to_string(),
                    Tok::Ident(s) => s.clone(),
                    Tok::Sym(c) => c.to_string(),
                },
                pos: *pos,
            },
            None => ParseError::UnexpectedEnd,
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.at += 1;
                    let t = self.term()?;
                    acc = self.ctx.add(acc, t)?;
                }
                Some(Tok::Sym('-')) => {
                    self.at += 1;
                    let t = self.term()?;
                    acc = self.ctx.add(acc, self.ctx.neg(t))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    /// The body of `tr(...)`: each term is traced on its own, so terms of
    /// different square shapes may be added.
    fn traced_sum(&mut self) -> Result<Val, ParseError> {
        let t = self.term()?;
        let mut acc = self.ctx.trace(t)?;
        loop {
            let neg = match self.peek() {
                Some(Tok::Sym('+')) => false,
                Some(Tok::Sym('-')) => true,
                _ => return Ok(acc),
            };
            self.at += 1;
            let mut t = self.term()?;
            if neg {
                t = self.ctx.neg(t);
            }
            let t = self.ctx.trace(t)?;
            acc = self.ctx.add(acc, t)?;
        }
    }

    fn term(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('*')) => {
                    self.at += 1;
                    let f = self.unary()?;
                    acc = self.ctx.mul(acc, f)?;
                }
                Some(Tok::Sym('/')) => {
                    self.at += 1;
                    let f = self.unary()?;
                    acc = self.ctx.mul(acc, self.ctx.invert(f)?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Val, ParseError> {
        if self.peek() == Some(&Tok::Sym('-')) {
            self.at += 1;
            let v = self.unary()?;
            return Ok(self.ctx.neg(v));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Val, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Sym('^')) {
            return Ok(base);
        }
        self.at += 1;
        let neg = if self.peek() == Some(&Tok::Sym('-')) {
            self.at += 1;
            true
        } else {
            false
        };
        let Some(Tok::Int(n)) = self.peek().cloned() else { return Err(self.unexpected()) };
        self.at += 1;
        let n: i64 = n.try_into().map_err(|_| ParseError::Document("exponent too large".into()))?;
        self.ctx.pow(base, if neg { -n } else { n })
    }

    fn primary(&mut self) -> Result<Val, ParseError> {
        let mode = self.ctx.mode;
        match self.bump() {
            Some(Tok::Int(n)) => Ok(self.ctx.num(Coeff::new(BigRational::from_integer(n), BigRational::from_integer(0.into())))),
            Some(Tok::Sym('(')) => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "i" => Ok(self.ctx.num(Coeff::i())),
                "lam" => Ok(Val::Num([(1, Coeff::one())].into())),
                "tr" => {
                    self.expect('(')?;
                    let v = self.traced_sum()?;
                    self.expect(')')?;
                    Ok(v)
                }
                _ => {
                    let atom = parse_atom(&name)?;
                    Ok(Val::Poly([(0, NCPolynomial::atom(mode, atom)?)].into()))
                }
            },
            _ => {
                self.at -= 1;
                Err(self.unexpected())
            }
        }
    }
}

/// Parses `src` into a Laurent polynomial in `lam` with 1x1 coefficients.
///
/// In `Mode::Trace` the expression is read in matrix mode and traced
/// unless it already is a trace.
pub fn parse_series(src: &str, mode: Mode) -> Result<LaurentSeries, ParseError> {
    parse_series_impl(src, mode, None)
}

/// As [`parse_series`], but pure numbers become multiples of the identity
/// of `shape` (or zero blocks), and the result must have that shape.
pub fn parse_series_shaped(src: &str, mode: Mode, shape: Shape) -> Result<LaurentSeries, ParseError> {
    let s = parse_series_impl(src, mode, Some(shape))?;
    let got = s.zero_matrix().get(0, 0).shape();
    if got != shape && mode != Mode::Trace {
        return Err(ParseError::Document(format!("`{src}` has block shape {got}, expected {shape}")));
    }
    Ok(s)
}

fn parse_series_impl(src: &str, mode: Mode, shape: Option<Shape>) -> Result<LaurentSeries, ParseError> {
    let toks = lex(src)?;
    let inner = if mode == Mode::Trace { Mode::Matrix } else { mode };
    let mut p = Parser { toks: &toks, at: 0, ctx: Ctx { mode: inner } };
    let mut v = p.expr()?;
    if p.at < toks.len() {
        return Err(p.unexpected());
    }
    if mode == Mode::Trace {
        if let Val::Poly(x) = &v {
            if x.values().any(|q| q.mode() == Mode::Matrix) {
                v = p.ctx.trace(v)?;
            }
        }
    }
    let polys = match v {
        Val::Poly(x) => x,
        Val::Num(x) => match mode {
            Mode::Scalar => p.ctx.promote(&x, Shape::SCALAR)?,
            _ if x.is_empty() => BTreeMap::new(),
            _ if shape.is_some() => p.ctx.promote(&x, shape.expect("checked"))?,
            _ => return Err(ParseError::Document("block shape of a pure number cannot be inferred".into())),
        },
    };
    let template = match polys.values().next() {
        Some(q) => PolyMatrix::single(NCPolynomial::zero(q.mode(), q.shape())),
        None => PolyMatrix::single(NCPolynomial::zero(mode, shape.unwrap_or(Shape::SCALAR))),
    };
    Ok(LaurentSeries::from_coeffs(&template, polys.into_iter().map(|(k, q)| (k, PolyMatrix::single(q))), None)?)
}

/// Parses a `lam`-free expression.
pub fn parse_poly(src: &str, mode: Mode) -> Result<NCPolynomial, ParseError> {
    let s = parse_series(src, mode)?;
    if s.iter().any(|(k, _)| k != 0) {
        return Err(ParseError::Document(format!("`{src}` depends on lam")));
    }
    Ok(s.coeff(0)?.get(0, 0).clone())
}

impl FromStr for FieldAtom {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_atom(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str) -> NCPolynomial {
        parse_poly(s, Mode::Scalar).unwrap()
    }

    #[test]
    fn atoms() {
        assert_eq!(parse_atom("u_t_t").unwrap(), FieldAtom::with_dt(Base::U, 2));
        assert_eq!(parse_atom("u_tt").unwrap(), FieldAtom::with_dt(Base::U, 2));
        assert_eq!(parse_atom("pih_x3").unwrap(), FieldAtom::with_derivs(Base::PiHat, 0, 1, 3));
        assert_eq!(parse_atom("uh_t_x_x").unwrap(), FieldAtom::with_derivs(Base::UHat, 1, 2, 2));
        assert!(parse_atom("v").is_err());
        assert!(parse_atom("u_x1_x3").is_err());
        assert!(parse_atom("kap_t").is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["u*pi - uh*pih", "1/2*u*u + u*xip/kap - i*pih/kap", "-3/4 + (1+2*i)*u_t", "-u*u*uh_t"] {
            assert_eq!(sp(s).to_string(), s);
        }
    }

    #[test]
    fn precedence_and_powers() {
        assert_eq!(sp("(u + uh)^2"), sp("u*u + 2*u*uh + uh*uh"));
        assert_eq!(sp("-u^2"), sp("-(u*u)"));
        assert_eq!(sp("2^-1*u"), sp("1/2*u"));
        assert_eq!(sp("kap*kapinv"), sp("1"));
    }

    #[test]
    fn constants_take_the_block_shape() {
        let p = parse_poly("u*uh - 2", Mode::Matrix).unwrap();
        assert_eq!(p.shape(), Shape::new(crate::ncpoly::Dim::M, crate::ncpoly::Dim::M));
        assert!(parse_poly("u + 1", Mode::Matrix).is_err());
        assert!(parse_poly("u*u", Mode::Matrix).is_err());
    }

    #[test]
    fn traces_and_lambda() {
        let t = parse_poly("tr(uh*u*uh*u) - tr(u*uh*u*uh)", Mode::Trace).unwrap();
        assert!(t.is_zero());
        let s = parse_series("lam^2/2 - u*uh + lam^-1*pi", Mode::Scalar).unwrap();
        assert_eq!(s.max_order(), Some(2));
        assert_eq!(s.min_order(), Some(-1));
        assert_eq!(parse_poly("u*pi", Mode::Trace).unwrap().to_string(), "tr(u*pi)");
        assert!(parse_poly("tr(0)", Mode::Trace).unwrap().is_zero());
        assert!(parse_poly("tr(2)", Mode::Trace).is_err());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_poly("u/uh", Mode::Scalar), Err(ParseError::BadDivision)));
        assert!(matches!(parse_poly("u +", Mode::Scalar), Err(ParseError::UnexpectedEnd)));
        assert!(matches!(parse_poly("u $ 2", Mode::Scalar), Err(ParseError::UnexpectedChar { .. })));
        assert!(matches!(parse_poly("foo", Mode::Scalar), Err(ParseError::UnknownSymbol(_))));
        assert!(parse_poly("u*lam", Mode::Scalar).is_err());
    }
}
