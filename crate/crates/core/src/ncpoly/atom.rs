use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// Flow index of the physical `x` coordinate (the NLS flow).
pub const PHYSICAL_FLOW: u32 = 2;

/// A block dimension. `N` and `M` stay symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dim {
    #[serde(rename = "1")]
    One,
    N,
    M,
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dim::One => "1",
            Dim::N => "N",
            Dim::M => "M",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    pub rows: Dim,
    pub cols: Dim,
}

impl Shape {
    pub const SCALAR: Shape = Shape { rows: Dim::One, cols: Dim::One };

    pub fn new(rows: Dim, cols: Dim) -> Self {
        Shape { rows, cols }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transposed(&self) -> Shape {
        Shape::new(self.cols, self.rows)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// How words multiply.
///
/// * `Scalar`: commuting fields, words kept sorted (`N = M = 1`).
/// * `Matrix`: non-commuting blocks, word order is significant.
/// * `Trace`: formal traces of closed matrix words, words are taken up to
///   cyclic rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Scalar,
    Matrix,
    Trace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn suffix(self) -> char {
        match self {
            Side::Plus => 'p',
            Side::Minus => 'm',
        }
    }

    pub fn sign(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }
}

/// The symbol an atom is built on.
///
/// `U, UHat, Pi, PiHat` are the dynamical fields, `K11, K22` the opaque
/// diagonal blocks of the dressing kernel, and the remaining variants are
/// boundary constants (with `KappaInv` standing for `1/kappa`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    U,
    UHat,
    Pi,
    PiHat,
    K11,
    K22,
    Xi(Side),
    Kappa(Side),
    KappaInv(Side),
}

impl Base {
    pub const FIELDS: [Base; 4] = [Base::U, Base::UHat, Base::Pi, Base::PiHat];

    pub fn is_field(self) -> bool {
        matches!(self, Base::U | Base::UHat | Base::Pi | Base::PiHat)
    }

    pub fn is_kernel(self) -> bool {
        matches!(self, Base::K11 | Base::K22)
    }

    /// Boundary constants: annihilated by every derivative.
    pub fn is_constant(self) -> bool {
        matches!(self, Base::Xi(_) | Base::Kappa(_) | Base::KappaInv(_))
    }

    pub fn name(self) -> String {
        match self {
            Base::U => "u".into(),
            Base::UHat => "uh".into(),
            Base::Pi => "pi".into(),
            Base::PiHat => "pih".into(),
            Base::K11 => "K11".into(),
            Base::K22 => "K22".into(),
            Base::Xi(s) => format!("xi{}", s.suffix()),
            Base::Kappa(s) => format!("ka{}", s.suffix()),
            Base::KappaInv(s) => format!("ka{}inv", s.suffix()),
        }
    }

    pub fn from_name(name: &str) -> Option<Base> {
        Some(match name {
            "u" => Base::U,
            "uh" => Base::UHat,
            "pi" => Base::Pi,
            "pih" => Base::PiHat,
            "K11" => Base::K11,
            "K22" => Base::K22,
            "xip" => Base::Xi(Side::Plus),
            "xim" => Base::Xi(Side::Minus),
            "kap" => Base::Kappa(Side::Plus),
            "kam" => Base::Kappa(Side::Minus),
            "kapinv" => Base::KappaInv(Side::Plus),
            "kaminv" => Base::KappaInv(Side::Minus),
            _ => return None,
        })
    }

    /// Block shape in matrix mode: `u`, `pih` are `MxN`; `uh`, `pi` are `NxM`.
    pub fn matrix_shape(self) -> Option<Shape> {
        use Dim::*;
        Some(match self {
            Base::U | Base::PiHat => Shape::new(M, N),
            Base::UHat | Base::Pi => Shape::new(N, M),
            Base::K11 => Shape::new(N, N),
            Base::K22 => Shape::new(M, M),
            _ => return None,
        })
    }
}

/// One differentiated symbol: `base` hit by `dt` time derivatives and `dx`
/// derivatives along the flow `x_flow`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldAtom {
    pub base: Base,
    pub dt: u32,
    pub dx: u32,
    /// Meaningful only when `dx > 0`; normalized to 0 otherwise.
    pub flow: u32,
}

impl FieldAtom {
    pub fn new(base: Base) -> Self {
        FieldAtom { base, dt: 0, dx: 0, flow: 0 }
    }

    pub fn with_dt(base: Base, dt: u32) -> Self {
        FieldAtom { base, dt, dx: 0, flow: 0 }
    }

    pub fn with_derivs(base: Base, dt: u32, dx: u32, flow: u32) -> Self {
        FieldAtom { base, dt, dx, flow: if dx == 0 { 0 } else { flow } }
    }

    pub fn shape(&self, mode: Mode) -> Result<Shape, AlgebraError> {
        match mode {
            Mode::Scalar => Ok(Shape::SCALAR),
            Mode::Matrix | Mode::Trace => self
                .base
                .matrix_shape()
                .ok_or(AlgebraError::AtomUnavailable { atom: *self, mode }),
        }
    }

    /// `None` when the derivative vanishes identically.
    pub fn dt_raised(&self) -> Option<FieldAtom> {
        if self.base.is_constant() {
            return None;
        }
        Some(FieldAtom { dt: self.dt + 1, ..*self })
    }

    /// `None` when the derivative vanishes or mixes two different flows.
    pub fn dx_raised(&self, flow: u32) -> Option<FieldAtom> {
        if self.base.is_constant() {
            return None;
        }
        if self.dx > 0 && self.flow != flow {
            // mixed flow derivatives are never produced by the hierarchy
            panic!("atom {self} already carries x_{} derivatives, cannot add x_{flow}", self.flow);
        }
        Some(FieldAtom { dx: self.dx + 1, flow, ..*self })
    }

    /// `(base, dx, flow)`: the jet family over `t` this atom belongs to.
    pub fn family(&self) -> (Base, u32, u32) {
        (self.base, self.dx, self.flow)
    }
}

impl fmt::Display for FieldAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base.name())?;
        for _ in 0..self.dt {
            f.write_str("_t")?;
        }
        for _ in 0..self.dx {
            if self.flow == PHYSICAL_FLOW {
                f.write_str("_x")?;
            } else {
                write!(f, "_x{}", self.flow)?;
            }
        }
        Ok(())
    }
}

/// An ordered product of atoms. The empty word is the identity block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub(crate) Vec<FieldAtom>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn atoms(&self) -> &[FieldAtom] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of time derivatives carried by the word.
    pub fn dt_weight(&self) -> u32 {
        self.0.iter().map(|a| a.dt).sum()
    }

    pub fn into_atoms(self) -> Vec<FieldAtom> {
        self.0
    }

    /// Checks that consecutive atoms chain and returns the overall shape,
    /// or `None` for the empty word.
    pub fn chain_shape(&self, mode: Mode) -> Result<Option<Shape>, AlgebraError> {
        let mut shape: Option<Shape> = None;
        for atom in &self.0 {
            let s = atom.shape(mode)?;
            shape = Some(match shape {
                None => s,
                Some(prev) => {
                    if prev.cols != s.rows {
                        return Err(AlgebraError::BrokenChain(self.to_string()));
                    }
                    Shape::new(prev.rows, s.cols)
                }
            });
        }
        Ok(shape)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Brings a raw atom sequence into the canonical form of `mode`.
pub(crate) fn canonical_word(mode: Mode, mut atoms: Vec<FieldAtom>) -> Word {
    match mode {
        Mode::Scalar => {
            atoms.sort();
            cancel_kappa_pairs(&mut atoms);
            Word(atoms)
        }
        Mode::Matrix => Word(atoms),
        Mode::Trace => Word(min_rotation(atoms)),
    }
}

fn cancel_kappa_pairs(atoms: &mut Vec<FieldAtom>) {
    for side in [Side::Plus, Side::Minus] {
        let k = FieldAtom::new(Base::Kappa(side));
        let kinv = FieldAtom::new(Base::KappaInv(side));
        let nk = atoms.iter().filter(|a| **a == k).count();
        let ninv = atoms.iter().filter(|a| **a == kinv).count();
        let cancel = nk.min(ninv);
        if cancel == 0 {
            continue;
        }
        let (mut dk, mut dinv) = (cancel, cancel);
        atoms.retain(|a| {
            if *a == k && dk > 0 {
                dk -= 1;
                false
            } else if *a == kinv && dinv > 0 {
                dinv -= 1;
                false
            } else {
                true
            }
        });
    }
}

fn min_rotation(atoms: Vec<FieldAtom>) -> Vec<FieldAtom> {
    let n = atoms.len();
    if n < 2 {
        return atoms;
    }
    let mut best: Option<Vec<FieldAtom>> = None;
    for r in 0..n {
        let rot: Vec<FieldAtom> = atoms[r..].iter().chain(&atoms[..r]).copied().collect();
        if best.as_ref().map_or(true, |b| rot < *b) {
            best = Some(rot);
        }
    }
    best.unwrap()
}
