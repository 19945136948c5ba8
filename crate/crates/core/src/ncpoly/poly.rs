use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeff::Coeff;
use crate::error::AlgebraError;

use super::atom::{canonical_word, Base, Dim, FieldAtom, Mode, Shape, Word};

/// Exact linear combination of words.
///
/// All words share `shape`; zero coefficients are never stored. The empty
/// word is the identity block of the (square) shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NCPolynomial {
    mode: Mode,
    shape: Shape,
    terms: BTreeMap<Word, Coeff>,
}

impl NCPolynomial {
    pub fn zero(mode: Mode, shape: Shape) -> Self {
        let shape = if mode == Mode::Matrix { shape } else { Shape::SCALAR };
        NCPolynomial { mode, shape, terms: BTreeMap::new() }
    }

    /// `c` times the identity block of `shape`.
    pub fn constant(mode: Mode, shape: Shape, c: Coeff) -> Result<Self, AlgebraError> {
        if mode == Mode::Matrix && !shape.is_square() {
            return Err(AlgebraError::NonSquareConstant(shape));
        }
        let mut p = NCPolynomial::zero(mode, shape);
        p.add_term(Word::empty(), c);
        Ok(p)
    }

    pub fn identity(mode: Mode, dim: Dim) -> Self {
        NCPolynomial::constant(mode, Shape::new(dim, dim), Coeff::one()).expect("square")
    }

    /// A constant in scalar mode.
    pub fn scalar(c: Coeff) -> Self {
        NCPolynomial::constant(Mode::Scalar, Shape::SCALAR, c).expect("square")
    }

    pub fn atom(mode: Mode, atom: FieldAtom) -> Result<Self, AlgebraError> {
        NCPolynomial::from_word(mode, vec![atom], Coeff::one())
    }

    pub fn field(mode: Mode, base: Base) -> Self {
        NCPolynomial::atom(mode, FieldAtom::new(base)).expect("field atom has a shape in every mode")
    }

    /// Builds `c * atoms` after validating the chain.
    pub fn from_word(mode: Mode, atoms: Vec<FieldAtom>, c: Coeff) -> Result<Self, AlgebraError> {
        if atoms.is_empty() {
            return Err(AlgebraError::Layout("empty word needs an explicit shape".into()));
        }
        let raw = Word(atoms);
        let shape = raw.chain_shape(mode)?.expect("non-empty");
        if mode == Mode::Trace && !shape.is_square() {
            return Err(AlgebraError::BrokenChain(format!("tr({raw}) is not closed")));
        }
        let mut p = NCPolynomial::zero(mode, shape);
        p.add_term(canonical_word(mode, raw.0), c);
        Ok(p)
    }

    /// Builds a polynomial from already-canonical parts. Used by the
    /// deserializer, which validates each word itself.
    pub(crate) fn from_parts(mode: Mode, shape: Shape, terms: Vec<(Word, Coeff)>) -> Result<Self, AlgebraError> {
        let mut p = NCPolynomial::zero(mode, shape);
        for (w, c) in terms {
            if let Some(s) = w.chain_shape(mode)? {
                let expect = if mode == Mode::Matrix { shape } else { s };
                if s != expect || (mode == Mode::Trace && !s.is_square()) {
                    return Err(AlgebraError::BrokenChain(w.to_string()));
                }
            } else if mode == Mode::Matrix && !shape.is_square() {
                return Err(AlgebraError::NonSquareConstant(shape));
            }
            p.add_term(canonical_word(mode, w.0), c);
        }
        Ok(p)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, w: &Word) -> Coeff {
        self.terms.get(w).cloned().unwrap_or_else(Coeff::zero)
    }

    /// True when every word is empty or built from boundary constants only.
    pub fn is_field_independent(&self) -> bool {
        self.terms.keys().all(|w| w.atoms().iter().all(|a| a.base.is_constant()))
    }

    /// Part carried by the empty word.
    pub fn constant_term(&self) -> Coeff {
        self.coeff_of(&Word::empty())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|w| w.is_empty())
    }

    pub fn contains_base(&self, pred: impl Fn(Base) -> bool) -> bool {
        self.terms.keys().any(|w| w.atoms().iter().any(|a| pred(a.base)))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &FieldAtom> {
        self.terms.keys().flat_map(|w| w.atoms().iter())
    }

    pub(crate) fn add_term(&mut self, w: Word, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    /// Adds `c * atoms` (canonicalizing `atoms` first).
    pub(crate) fn add_raw(&mut self, atoms: Vec<FieldAtom>, c: Coeff) {
        self.add_term(canonical_word(self.mode, atoms), c);
    }

    fn check_same(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.mode != other.mode {
            return Err(AlgebraError::ModeMismatch { left: self.mode, right: other.mode });
        }
        if self.shape != other.shape {
            return Err(AlgebraError::AddShapeMismatch { left: self.shape, right: other.shape });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return NCPolynomial::zero(self.mode, self.shape);
        }
        NCPolynomial {
            mode: self.mode,
            shape: self.shape,
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    /// Bilinear product: word concatenation in matrix mode, commutative
    /// canonical reordering in scalar mode. In trace mode one factor must be
    /// a constant.
    pub fn nc_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.mode != other.mode {
            return Err(AlgebraError::ModeMismatch { left: self.mode, right: other.mode });
        }
        if self.mode == Mode::Trace {
            return match (self.is_constant(), other.is_constant()) {
                (true, _) => Ok(other.scale(&self.constant_term())),
                (_, true) => Ok(self.scale(&other.constant_term())),
                _ => Err(AlgebraError::TraceProduct),
            };
        }
        if self.shape.cols != other.shape.rows {
            return Err(AlgebraError::ShapeMismatch { left: self.shape, right: other.shape });
        }
        let mut out = NCPolynomial::zero(self.mode, Shape::new(self.shape.rows, other.shape.cols));
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut atoms = Vec::with_capacity(w1.len() + w2.len());
                atoms.extend_from_slice(w1.atoms());
                atoms.extend_from_slice(w2.atoms());
                out.add_raw(atoms, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> Result<Self, AlgebraError> {
        let mut acc = NCPolynomial::constant(self.mode, Shape::new(self.shape.rows, self.shape.rows), Coeff::one())?;
        for _ in 0..exp {
            acc = acc.nc_mul(self)?;
        }
        Ok(acc)
    }

    /// Applies `f` to every atom occurrence and sums the results (Leibniz).
    fn derivation(&self, f: impl Fn(&FieldAtom) -> Option<FieldAtom>) -> Self {
        let mut out = NCPolynomial::zero(self.mode, self.shape);
        for (w, c) in &self.terms {
            for (i, atom) in w.atoms().iter().enumerate() {
                if let Some(d) = f(atom) {
                    let mut atoms = w.atoms().to_vec();
                    atoms[i] = d;
                    out.add_raw(atoms, c.clone());
                }
            }
        }
        out
    }

    /// Total time derivative.
    pub fn differentiate_t(&self) -> Self {
        self.derivation(FieldAtom::dt_raised)
    }

    /// Formal derivative along the flow `x_flow`.
    pub fn differentiate_x(&self, flow: u32) -> Self {
        self.derivation(|a| a.dx_raised(flow))
    }

    pub fn differentiate_t_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.differentiate_t())
    }

    /// Formal trace of a square matrix-mode polynomial. Scalar input is
    /// returned unchanged; trace input too.
    pub fn trace(&self) -> Result<Self, AlgebraError> {
        match self.mode {
            Mode::Scalar | Mode::Trace => Ok(self.clone()),
            Mode::Matrix => {
                if !self.shape.is_square() {
                    return Err(AlgebraError::NonSquareConstant(self.shape));
                }
                if self.terms.keys().any(|w| w.is_empty()) {
                    return Err(AlgebraError::Layout(
                        "trace of an identity block depends on the symbolic dimension".into(),
                    ));
                }
                let mut out = NCPolynomial::zero(Mode::Trace, Shape::SCALAR);
                for (w, c) in &self.terms {
                    out.add_raw(w.atoms().to_vec(), c.clone());
                }
                Ok(out)
            }
        }
    }

    /// Image under `N = M = 1`: words become commuting monomials.
    pub fn to_scalar(&self) -> Self {
        let mut out = NCPolynomial::zero(Mode::Scalar, Shape::SCALAR);
        for (w, c) in &self.terms {
            out.add_raw(w.atoms().to_vec(), c.clone());
        }
        out
    }

    /// Keeps only the terms for which `keep` holds.
    pub fn filter_terms(&self, keep: impl Fn(&Word, &Coeff) -> bool) -> Self {
        NCPolynomial {
            mode: self.mode,
            shape: self.shape,
            terms: self.terms.iter().filter(|(w, c)| keep(w, c)).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Highest total number of time derivatives among the words.
    pub fn max_dt_weight(&self) -> u32 {
        self.terms.keys().map(|w| w.dt_weight()).max().unwrap_or(0)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, first: bool, w: &Word, c: &Coeff) -> fmt::Result {
    let negative = c.is_negative_for_display();
    let mag = if negative { -c } else { c.clone() };
    if first {
        if negative {
            f.write_str("-")?;
        }
    } else if negative {
        f.write_str(" - ")?;
    } else {
        f.write_str(" + ")?;
    }
    let (num, inv): (Vec<&FieldAtom>, Vec<&FieldAtom>) = w.atoms().iter().partition(|a| !matches!(a.base, Base::KappaInv(_)));
    let mut wrote = false;
    if !mag.is_one() || num.is_empty() {
        write!(f, "{mag}")?;
        wrote = true;
    }
    for a in num {
        if wrote {
            f.write_str("*")?;
        }
        write!(f, "{a}")?;
        wrote = true;
    }
    for a in inv {
        if let Base::KappaInv(s) = a.base {
            write!(f, "/ka{}", s.suffix())?;
        }
    }
    Ok(())
}

impl fmt::Display for NCPolynomial {
    /// Plain-text form in the expression grammar (terms in canonical order).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mode == Mode::Trace {
            f.write_str("tr(")?;
        }
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            write_term(f, i == 0, w, c)?;
        }
        if self.mode == Mode::Trace {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Add for &NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: &NCPolynomial) -> NCPolynomial {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: &NCPolynomial) -> NCPolynomial {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: &NCPolynomial) -> NCPolynomial {
        self.nc_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        self.scale(&Coeff::from_int(-1))
    }
}

impl Add for NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: NCPolynomial) -> NCPolynomial {
        &self + &rhs
    }
}

impl Sub for NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: NCPolynomial) -> NCPolynomial {
        &self - &rhs
    }
}

impl Mul for NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: NCPolynomial) -> NCPolynomial {
        &self * &rhs
    }
}

impl Neg for NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        -&self
    }
}
