//! Commutative polynomials and rational functions in the spectral
//! parameters, the boundary constants and (for bracket computations) the
//! fields, with Gaussian-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::coeff::Coeff;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Lam,
    Mu,
    XiPlus,
    XiMinus,
    KappaPlus,
    KappaMinus,
    U,
    UHat,
    Pi,
    PiHat,
}

const NVARS: usize = 10;

impl Var {
    pub const ALL: [Var; NVARS] = [
        Var::Lam,
        Var::Mu,
        Var::XiPlus,
        Var::XiMinus,
        Var::KappaPlus,
        Var::KappaMinus,
        Var::U,
        Var::UHat,
        Var::Pi,
        Var::PiHat,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::Lam => "lam",
            Var::Mu => "mu",
            Var::XiPlus => "xip",
            Var::XiMinus => "xim",
            Var::KappaPlus => "kap",
            Var::KappaMinus => "kam",
            Var::U => "u",
            Var::UHat => "uh",
            Var::Pi => "pi",
            Var::PiHat => "pih",
        }
    }
}

/// Exponent vector; the derived order is lexicographic in [`Var::ALL`].
type Monomial = [u32; NVARS];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CommPoly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl CommPoly {
    pub fn zero() -> Self {
        CommPoly::default()
    }

    pub fn constant(c: Coeff) -> Self {
        let mut p = CommPoly::zero();
        p.add_term([0; NVARS], c);
        p
    }

    pub fn one() -> Self {
        CommPoly::constant(Coeff::one())
    }

    pub fn var(v: Var) -> Self {
        let mut m = [0; NVARS];
        m[v.index()] = 1;
        let mut p = CommPoly::zero();
        p.add_term(m, Coeff::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Coeff::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Coeff::from_int(-1))
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = CommPoly::zero();
        for (m, x) in &self.terms {
            out.add_term(*m, x * c);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = CommPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = *m1;
                for i in 0..NVARS {
                    m[i] += m2[i];
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m[v.index()]).max().unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.degree_in(v) > 0
    }

    /// `d/dv`.
    pub fn partial(&self, v: Var) -> Self {
        let i = v.index();
        let mut out = CommPoly::zero();
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut d = *m;
                d[i] -= 1;
                out.add_term(d, c * &Coeff::from_int(m[i] as i64));
            }
        }
        out
    }

    /// Replaces `v` by `value`.
    pub fn substitute(&self, v: Var, value: &CommPoly) -> Self {
        let i = v.index();
        let mut out = CommPoly::zero();
        for (m, c) in &self.terms {
            let mut rest = *m;
            rest[i] = 0;
            let mut term = CommPoly::zero();
            term.add_term(rest, c.clone());
            for _ in 0..m[i] {
                term = term.mul(value);
            }
            out = out.add(&term);
        }
        out
    }

    /// Numeric value at the point `value`.
    pub fn eval(&self, value: &impl Fn(Var) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex64();
            for v in Var::ALL {
                t *= value(v).powu(m[v.index()]);
            }
            acc += t;
        }
        acc
    }

    fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &CommPoly) -> Option<CommPoly> {
        let (dm, dc) = d.leading()?;
        let dc_inv = dc.inv()?;
        let mut rem = self.clone();
        let mut q = CommPoly::zero();
        while let Some((m, c)) = rem.leading() {
            if (0..NVARS).any(|i| m[i] < dm[i]) {
                return None;
            }
            let mut qm = *m;
            for i in 0..NVARS {
                qm[i] -= dm[i];
            }
            let mut t = CommPoly::zero();
            t.add_term(qm, c * &dc_inv);
            rem = rem.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }
}

impl fmt::Display for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative_for_display();
            let mag = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let vars: Vec<String> = Var::ALL
                .iter()
                .filter(|v| m[v.index()] > 0)
                .map(|v| match m[v.index()] {
                    1 => v.name().to_string(),
                    e => format!("{}^{e}", v.name()),
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `num / den` with a nonzero denominator. No cancellation is attempted;
/// equality is decided by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    pub num: CommPoly,
    pub den: CommPoly,
}

impl RationalFunction {
    pub fn new(num: CommPoly, den: CommPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        RationalFunction { num, den }
    }

    pub fn poly(p: CommPoly) -> Self {
        RationalFunction::new(p, CommPoly::one())
    }

    pub fn zero() -> Self {
        RationalFunction::poly(CommPoly::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RationalFunction::new(self.num.add(&o.num), self.den.clone());
        }
        RationalFunction::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        RationalFunction::new(self.num.neg(), self.den.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    /// Simplified form when the denominator divides the numerator.
    pub fn as_poly(&self) -> Option<CommPoly> {
        self.num.div_exact(&self.den)
    }

    pub fn eval(&self, value: &impl Fn(Var) -> Complex64) -> Complex64 {
        self.num.eval(value) / self.den.eval(value)
    }

    pub fn substitute(&self, v: Var, value: &CommPoly) -> Self {
        RationalFunction::new(self.num.substitute(v, value), self.den.substitute(v, value))
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_poly() {
            Some(p) => write!(f, "{p}"),
            None => write!(f, "({}) / ({})", self.num, self.den),
        }
    }
}

/// Dense square matrix of rational functions.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix {
    pub dim: usize,
    pub entries: Vec<RationalFunction>,
}

impl RationalMatrix {
    pub fn zeros(dim: usize) -> Self {
        RationalMatrix { dim, entries: vec![RationalFunction::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = RationalMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, RationalFunction::poly(CommPoly::one()));
        }
        m
    }

    pub fn from_polys(dim: usize, entries: Vec<CommPoly>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        RationalMatrix { dim, entries: entries.into_iter().map(RationalFunction::poly).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalFunction {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RationalFunction) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RationalFunction::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        RationalMatrix { dim: self.dim, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RationalMatrix { dim: self.dim, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        let n = self.dim;
        let mut out = RationalMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RationalFunction::zero();
                for k in 0..n {
                    if !self.get(i, k).is_zero() && !o.get(k, j).is_zero() {
                        acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        RationalMatrix { dim: self.dim, entries: self.entries.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn map(&self, f: impl Fn(&RationalFunction) -> RationalFunction) -> Self {
        RationalMatrix { dim: self.dim, entries: self.entries.iter().map(f).collect() }
    }

    /// `A (x) I`, indexed `(a, c), (b, d) -> A_ab delta_cd`.
    pub fn in_first(&self) -> Self {
        let d = self.dim;
        let mut out = RationalMatrix::zeros(d * d);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    out.set(a * d + c, b * d + c, self.get(a, b).clone());
                }
            }
        }
        out
    }

    /// `I (x) A`.
    pub fn in_second(&self) -> Self {
        let d = self.dim;
        let mut out = RationalMatrix::zeros(d * d);
        for a in 0..d {
            for c in 0..d {
                for e in 0..d {
                    out.set(a * d + c, a * d + e, self.get(c, e).clone());
                }
            }
        }
        out
    }

    /// The permutation operator on `C^d (x) C^d`.
    pub fn permutation(d: usize) -> Self {
        let mut out = RationalMatrix::zeros(d * d);
        for a in 0..d {
            for c in 0..d {
                out.set(a * d + c, c * d + a, RationalFunction::poly(CommPoly::one()));
            }
        }
        out
    }

    pub fn substitute(&self, v: Var, value: &CommPoly) -> Self {
        self.map(|r| r.substitute(v, value))
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.dim {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.dim {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
