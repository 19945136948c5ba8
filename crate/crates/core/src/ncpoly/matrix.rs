use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeff::Coeff;
use crate::error::AlgebraError;

use super::atom::{Dim, Mode, Shape};
use super::poly::NCPolynomial;

/// Block sizes along one axis of a [`PolyMatrix`].
pub type BlockLayout = Vec<Dim>;

/// A block matrix of polynomials. Entry `(i, j)` has shape
/// `rows[i] x cols[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    mode: Mode,
    rows: BlockLayout,
    cols: BlockLayout,
    entries: Vec<NCPolynomial>,
}

impl PolyMatrix {
    pub fn zeros(mode: Mode, rows: BlockLayout, cols: BlockLayout) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for r in &rows {
            for c in &cols {
                entries.push(NCPolynomial::zero(mode, Shape::new(*r, *c)));
            }
        }
        PolyMatrix { mode, rows, cols, entries }
    }

    pub fn identity(mode: Mode, blocks: BlockLayout) -> Self {
        let mut m = PolyMatrix::zeros(mode, blocks.clone(), blocks.clone());
        for (i, d) in blocks.iter().enumerate() {
            m.set(i, i, NCPolynomial::identity(mode, *d));
        }
        m
    }

    /// Constant block-diagonal matrix `diag(c_0 I, c_1 I, ...)`.
    pub fn diag_constants(mode: Mode, blocks: BlockLayout, diag: &[Coeff]) -> Self {
        assert_eq!(blocks.len(), diag.len());
        let mut m = PolyMatrix::zeros(mode, blocks.clone(), blocks.clone());
        for (i, (d, c)) in blocks.iter().zip(diag).enumerate() {
            m.set(i, i, NCPolynomial::identity(mode, *d).scale(c));
        }
        m
    }

    /// Row-major construction with shape validation.
    pub fn from_entries(
        mode: Mode,
        rows: BlockLayout,
        cols: BlockLayout,
        entries: Vec<NCPolynomial>,
    ) -> Result<Self, AlgebraError> {
        if entries.len() != rows.len() * cols.len() {
            return Err(AlgebraError::Layout(format!(
                "{} entries for a {}x{} block layout",
                entries.len(),
                rows.len(),
                cols.len()
            )));
        }
        for (k, e) in entries.iter().enumerate() {
            let expect = Shape::new(rows[k / cols.len()], cols[k % cols.len()]);
            if e.mode() != mode {
                return Err(AlgebraError::ModeMismatch { left: mode, right: e.mode() });
            }
            if mode == Mode::Matrix && e.shape() != expect {
                return Err(AlgebraError::Layout(format!(
                    "entry ({}, {}) has shape {}, expected {}",
                    k / cols.len(),
                    k % cols.len(),
                    e.shape(),
                    expect
                )));
            }
        }
        Ok(PolyMatrix { mode, rows, cols, entries })
    }

    /// The standard 2x2 layout: `[1, 1]` in scalar mode, `[N, M]` in matrix mode.
    pub fn two_by_two_layout(mode: Mode) -> BlockLayout {
        match mode {
            Mode::Matrix => vec![Dim::N, Dim::M],
            _ => vec![Dim::One, Dim::One],
        }
    }

    /// 2x2 matrix from four entries in the standard layout.
    pub fn two_by_two(mode: Mode, e: [NCPolynomial; 4]) -> Self {
        let l = PolyMatrix::two_by_two_layout(mode);
        PolyMatrix::from_entries(mode, l.clone(), l, e.into()).unwrap_or_else(|err| panic!("{err}"))
    }

    /// 1x1 block matrix wrapping a single polynomial.
    pub fn single(p: NCPolynomial) -> Self {
        let s = p.shape();
        let mode = p.mode();
        PolyMatrix { mode, rows: vec![s.rows], cols: vec![s.cols], entries: vec![p] }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn row_blocks(&self) -> &[Dim] {
        &self.rows
    }

    pub fn col_blocks(&self) -> &[Dim] {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &NCPolynomial {
        &self.entries[i * self.cols.len() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: NCPolynomial) {
        let k = i * self.cols.len() + j;
        self.entries[k] = p;
    }

    pub fn entries(&self) -> &[NCPolynomial] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.mode == other.mode && self.rows == other.rows && self.cols == other.cols
    }

    pub fn map(&self, f: impl Fn(&NCPolynomial) -> NCPolynomial) -> Self {
        PolyMatrix {
            mode: self.mode,
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(
        &self,
        f: impl Fn(&NCPolynomial) -> Result<NCPolynomial, AlgebraError>,
    ) -> Result<Self, AlgebraError> {
        Ok(PolyMatrix {
            mode: self.mode,
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    fn check_layout(&self, other: &Self) -> Result<(), AlgebraError> {
        if !self.same_layout(other) {
            return Err(AlgebraError::Layout("operands have different block layouts".into()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_layout(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.checked_add(b)).collect::<Result<_, _>>()?;
        Ok(PolyMatrix { entries, ..self.clone() })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_layout(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.checked_sub(b)).collect::<Result<_, _>>()?;
        Ok(PolyMatrix { entries, ..self.clone() })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.mode != other.mode {
            return Err(AlgebraError::ModeMismatch { left: self.mode, right: other.mode });
        }
        if self.cols != other.rows {
            return Err(AlgebraError::Layout(format!(
                "cannot multiply block layouts {:?} and {:?}",
                self.cols, other.rows
            )));
        }
        let mut out = PolyMatrix::zeros(self.mode, self.rows.clone(), other.cols.clone());
        for i in 0..self.nrows() {
            for j in 0..other.ncols() {
                let mut acc = NCPolynomial::zero(self.mode, Shape::new(self.rows[i], other.cols[j]));
                for k in 0..self.ncols() {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&a.nc_mul(b)?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        self.map(|e| e.scale(c))
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn differentiate_t(&self) -> Self {
        self.map(NCPolynomial::differentiate_t)
    }

    pub fn differentiate_x(&self, flow: u32) -> Self {
        self.map(|e| e.differentiate_x(flow))
    }

    /// Block-diagonal part (off-diagonal blocks zeroed).
    pub fn diagonal_part(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                if i != j {
                    out.set(i, j, NCPolynomial::zero(self.mode, Shape::new(self.rows[i], self.cols[j])));
                }
            }
        }
        out
    }

    pub fn off_diagonal_part(&self) -> Self {
        self.checked_sub(&self.diagonal_part()).expect("same layout")
    }

    pub fn is_diagonal(&self) -> bool {
        self.off_diagonal_part().is_zero()
    }

    pub fn is_off_diagonal(&self) -> bool {
        self.diagonal_part().is_zero()
    }

    /// Entry-position transpose. Only meaningful for commuting entries.
    pub fn transpose_scalar(&self) -> Result<Self, AlgebraError> {
        if self.mode != Mode::Scalar {
            return Err(AlgebraError::ModeMismatch { left: self.mode, right: Mode::Scalar });
        }
        let mut out = PolyMatrix::zeros(self.mode, self.cols.clone(), self.rows.clone());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Image under `N = M = 1`.
    pub fn to_scalar(&self) -> Self {
        PolyMatrix {
            mode: Mode::Scalar,
            rows: vec![Dim::One; self.rows.len()],
            cols: vec![Dim::One; self.cols.len()],
            entries: self.entries.iter().map(NCPolynomial::to_scalar).collect(),
        }
    }

    /// If the matrix is `diag(c_0 I, c_1 I, ...)` with constant `c_k`, returns the `c_k`.
    pub fn constant_diagonal(&self) -> Option<Vec<Coeff>> {
        if self.rows != self.cols || !self.is_diagonal() {
            return None;
        }
        (0..self.nrows())
            .map(|i| {
                let e = self.get(i, i);
                e.is_constant().then(|| e.constant_term())
            })
            .collect()
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.nrows() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.ncols() {
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

impl Add for &PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        self.scale(&Coeff::from_int(-1))
    }
}
