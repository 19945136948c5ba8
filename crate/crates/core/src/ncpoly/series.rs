use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::Coeff;
use crate::error::AlgebraError;

use super::atom::{Base, Mode, Shape};
use super::matrix::{BlockLayout, PolyMatrix};
use super::poly::NCPolynomial;

/// A finitely supported series in the spectral parameter `lam` with
/// [`PolyMatrix`] coefficients.
///
/// `truncation = Some(t)` means every order below `lam^-t` is unknown;
/// reading such an order is an error rather than a silent zero. `None`
/// marks an exact Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    mode: Mode,
    rows: BlockLayout,
    cols: BlockLayout,
    coeffs: BTreeMap<i32, PolyMatrix>,
    truncation: Option<i32>,
}

impl LaurentSeries {
    pub fn zero(mode: Mode, rows: BlockLayout, cols: BlockLayout, truncation: Option<i32>) -> Self {
        LaurentSeries { mode, rows, cols, coeffs: BTreeMap::new(), truncation }
    }

    /// Builds a series from `(power, coefficient)` pairs; zero coefficients
    /// are dropped and coefficients below the truncation are discarded.
    pub fn from_coeffs(
        template: &PolyMatrix,
        coeffs: impl IntoIterator<Item = (i32, PolyMatrix)>,
        truncation: Option<i32>,
    ) -> Result<Self, AlgebraError> {
        let mut s = LaurentSeries::zero(
            template.mode(),
            template.row_blocks().to_vec(),
            template.col_blocks().to_vec(),
            truncation,
        );
        for (k, m) in coeffs {
            if !m.same_layout(template) {
                return Err(AlgebraError::Layout(format!("coefficient of lam^{k} has the wrong layout")));
            }
            s.accumulate(k, &m)?;
        }
        Ok(s)
    }

    /// The exact series `m * lam^0`.
    pub fn constant(m: PolyMatrix) -> Self {
        let t = m.clone();
        LaurentSeries::from_coeffs(&t, [(0, m)], None).expect("same layout")
    }

    /// The exact series `m * lam^k`.
    pub fn monomial(m: PolyMatrix, k: i32) -> Self {
        let t = m.clone();
        LaurentSeries::from_coeffs(&t, [(k, m)], None).expect("same layout")
    }

    pub fn identity(mode: Mode, blocks: BlockLayout) -> Self {
        LaurentSeries::constant(PolyMatrix::identity(mode, blocks))
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn row_blocks(&self) -> &[super::atom::Dim] {
        &self.rows
    }

    pub fn col_blocks(&self) -> &[super::atom::Dim] {
        &self.cols
    }

    pub fn truncation(&self) -> Option<i32> {
        self.truncation
    }

    /// Lowest order whose coefficient is known.
    pub fn floor(&self) -> Option<i32> {
        self.truncation.map(|t| -t)
    }

    pub fn max_order(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_order(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_exact(&self) -> bool {
        self.truncation.is_none()
    }

    pub fn zero_matrix(&self) -> PolyMatrix {
        PolyMatrix::zeros(self.mode, self.rows.clone(), self.cols.clone())
    }

    pub fn coeff(&self, k: i32) -> Result<PolyMatrix, AlgebraError> {
        if let Some(floor) = self.floor() {
            if k < floor {
                return Err(AlgebraError::Truncated { requested: k, floor });
            }
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_else(|| self.zero_matrix()))
    }

    /// Known nonzero coefficients, lowest order first.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (i32, &PolyMatrix)> {
        self.coeffs.iter().map(|(k, m)| (*k, m))
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn accumulate(&mut self, k: i32, m: &PolyMatrix) -> Result<(), AlgebraError> {
        if let Some(floor) = self.floor() {
            if k < floor {
                return Ok(());
            }
        }
        let sum = match self.coeffs.get(&k) {
            Some(prev) => prev.checked_add(m)?,
            None => m.clone(),
        };
        if sum.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, sum);
        }
        Ok(())
    }

    /// Drops everything below `lam^-t` and records the truncation.
    pub fn truncated(&self, t: i32) -> Self {
        let t = self.truncation.map_or(t, |old| old.min(t));
        LaurentSeries {
            coeffs: self.coeffs.iter().filter(|(k, _)| **k >= -t).map(|(k, m)| (*k, m.clone())).collect(),
            truncation: Some(t),
            ..self.clone()
        }
    }

    fn check_layout(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.mode != other.mode || self.rows != other.rows || self.cols != other.cols {
            return Err(AlgebraError::Layout("series have different block layouts".into()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_layout(other)?;
        let truncation = min_trunc(self.truncation, other.truncation);
        let mut out = LaurentSeries { coeffs: BTreeMap::new(), truncation, ..self.clone() };
        for (k, m) in self.iter().chain(other.iter()) {
            out.accumulate(k, m)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Coeff::from_int(-1))
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        self.map(|m| m.scale(c))
    }

    pub fn map(&self, f: impl Fn(&PolyMatrix) -> PolyMatrix) -> Self {
        let mut out = LaurentSeries { coeffs: BTreeMap::new(), ..self.clone() };
        for (k, m) in self.iter() {
            let mapped = f(m);
            if !mapped.is_zero() {
                out.coeffs.insert(k, mapped);
            }
        }
        out
    }

    pub fn try_map(
        &self,
        f: impl Fn(&PolyMatrix) -> Result<PolyMatrix, AlgebraError>,
    ) -> Result<Self, AlgebraError> {
        let mut out = LaurentSeries { coeffs: BTreeMap::new(), ..self.clone() };
        for (k, m) in self.iter() {
            let mapped = f(m)?;
            if !mapped.is_zero() {
                out.coeffs.insert(k, mapped);
            }
        }
        Ok(out)
    }

    /// Product; the truncation of the result is the highest order any
    /// unknown operand term can reach.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.mode != other.mode || self.cols != other.rows {
            return Err(AlgebraError::Layout("cannot multiply series with these block layouts".into()));
        }
        let mut floor: Option<i32> = None;
        let mut bump = |f: i32| floor = Some(floor.map_or(f, |g: i32| g.max(f)));
        if let Some(fa) = self.floor() {
            if let Some(mb) = other.max_order() {
                bump(fa + mb);
            }
        }
        if let Some(fb) = other.floor() {
            if let Some(ma) = self.max_order() {
                bump(fb + ma);
            }
        }
        if let (Some(fa), Some(fb)) = (self.floor(), other.floor()) {
            bump(fa + fb - 1);
        }
        let mut out = LaurentSeries {
            mode: self.mode,
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            coeffs: BTreeMap::new(),
            truncation: floor.map(|f| -f),
        };
        for (i, a) in self.iter() {
            for (j, b) in other.iter() {
                if floor.is_some_and(|f| i + j < f) {
                    continue;
                }
                out.accumulate(i + j, &a.checked_mul(b)?)?;
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn differentiate_t(&self) -> Self {
        self.map(PolyMatrix::differentiate_t)
    }

    pub fn differentiate_x(&self, flow: u32) -> Self {
        self.map(|m| m.differentiate_x(flow))
    }

    /// Multiplies by `lam^k`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(p, m)| (p + k, m.clone())).collect(),
            truncation: self.truncation.map(|t| t - k),
            ..self.clone()
        }
    }

    /// `f(lam) -> f(-lam)`.
    pub fn reflect(&self) -> Self {
        LaurentSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, m)| (*k, if k.rem_euclid(2) == 1 { m.scale(&Coeff::from_int(-1)) } else { m.clone() }))
                .collect(),
            ..self.clone()
        }
    }

    pub fn diagonal_part(&self) -> Self {
        self.map(PolyMatrix::diagonal_part)
    }

    pub fn off_diagonal_part(&self) -> Self {
        self.map(PolyMatrix::off_diagonal_part)
    }

    /// Entry `(i, j)` as a 1x1 series.
    pub fn entry(&self, i: usize, j: usize) -> LaurentSeries {
        let template = PolyMatrix::single(self.zero_matrix().get(i, j).clone());
        let mut out = LaurentSeries::zero(
            self.mode,
            template.row_blocks().to_vec(),
            template.col_blocks().to_vec(),
            self.truncation,
        );
        for (k, m) in self.iter() {
            let e = m.get(i, j);
            if !e.is_zero() {
                out.coeffs.insert(k, PolyMatrix::single(e.clone()));
            }
        }
        out
    }

    pub fn transpose_scalar(&self) -> Result<Self, AlgebraError> {
        let mut out = LaurentSeries {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            coeffs: BTreeMap::new(),
            ..self.clone()
        };
        for (k, m) in self.iter() {
            out.coeffs.insert(k, m.transpose_scalar()?);
        }
        Ok(out)
    }

    pub fn to_scalar(&self) -> Self {
        let template = self.zero_matrix().to_scalar();
        let mut out = LaurentSeries::zero(
            Mode::Scalar,
            template.row_blocks().to_vec(),
            template.col_blocks().to_vec(),
            self.truncation,
        );
        for (k, m) in self.iter() {
            out.accumulate(k, &m.to_scalar()).expect("layout");
        }
        out
    }
}

fn min_trunc(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, m) in self.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{m}")?;
            if k != 0 {
                write!(f, "*lam^{k}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        if let Some(t) = self.truncation {
            write!(f, " + O(lam^{})", -t - 1)?;
        }
        Ok(())
    }
}

fn effective_truncation(s: &LaurentSeries, truncation: i32) -> i32 {
    s.truncation.map_or(truncation, |t| t.min(truncation))
}

/// Inverse of a series whose top coefficient sits at `lam^0` and is an
/// invertible constant block-diagonal matrix, computed as a geometric series.
pub fn series_invert(s: &LaurentSeries, truncation: i32) -> Result<LaurentSeries, AlgebraError> {
    if s.rows != s.cols {
        return Err(AlgebraError::NotInvertible("non-square layout".into()));
    }
    let t = effective_truncation(s, truncation);
    let top = s.max_order().ok_or(AlgebraError::VanishingLeading)?;
    if top != 0 {
        return Err(AlgebraError::NotInvertible(format!("leading order is lam^{top}, expected lam^0")));
    }
    let lead = s.coeff(0)?;
    let diag = lead
        .constant_diagonal()
        .ok_or_else(|| AlgebraError::NotInvertible(lead.to_string()))?;
    let inv_diag = diag
        .iter()
        .map(|c| c.inv())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| AlgebraError::NotInvertible(lead.to_string()))?;
    let lead_inv = LaurentSeries::constant(PolyMatrix::diag_constants(s.mode, s.rows.clone(), &inv_diag));
    let tail = s.checked_sub(&LaurentSeries::constant(lead))?.truncated(t);
    // q = -L^{-1} n ; inverse = sum_k q^k L^{-1}
    let q = lead_inv.checked_mul(&tail)?.neg().truncated(t);
    let mut term = lead_inv.truncated(t);
    let mut acc = term.clone();
    for _ in 0..t.max(0) {
        term = q.checked_mul(&term)?.truncated(t);
        if term.is_zero() {
            break;
        }
        acc = acc.checked_add(&term)?;
    }
    Ok(acc.truncated(t))
}

/// `log s` split as `log(c lam^k) + log(1 + n)`.
#[derive(Clone, Debug)]
pub struct LogSeries {
    /// `log(1 + n)`: only strictly negative powers.
    pub series: LaurentSeries,
    /// The constant prefactor `c`.
    pub prefactor: NCPolynomial,
    /// The leading power `k`.
    pub power: i32,
}

pub(crate) fn invertible_constant(c: &NCPolynomial) -> Option<NCPolynomial> {
    if c.len() != 1 {
        return None;
    }
    let (w, x) = c.terms().next()?;
    let mut atoms = Vec::new();
    for a in w.atoms() {
        atoms.push(match a.base {
            Base::Kappa(s) => super::atom::FieldAtom::new(Base::KappaInv(s)),
            Base::KappaInv(s) => super::atom::FieldAtom::new(Base::Kappa(s)),
            _ => return None,
        });
    }
    let inv = x.inv()?;
    if atoms.is_empty() {
        NCPolynomial::constant(c.mode(), c.shape(), inv).ok()
    } else {
        NCPolynomial::from_word(c.mode(), atoms, inv).ok()
    }
}

/// Logarithm of a scalar series `c lam^k (1 + n)` through the Mercator
/// series. The field-independent prefix `(c, k)` is returned as metadata.
pub fn series_log(s: &LaurentSeries, truncation: i32) -> Result<LogSeries, AlgebraError> {
    if s.mode != Mode::Scalar || s.rows.len() != 1 || s.cols.len() != 1 {
        return Err(AlgebraError::Layout("series_log needs a scalar 1x1 series".into()));
    }
    let k = s.max_order().ok_or(AlgebraError::VanishingLeading)?;
    let c = s.coeff(k)?.get(0, 0).clone();
    let c_inv = invertible_constant(&c).ok_or_else(|| AlgebraError::NotInvertible(c.to_string()))?;
    let normalized = s.shift(-k).map(|m| m.map(|e| &c_inv * e));
    let t = effective_truncation(&normalized, truncation);
    let one = LaurentSeries::identity(Mode::Scalar, s.rows.clone());
    let n = normalized.checked_sub(&one)?.truncated(t);
    if n.max_order().is_some_and(|m| m >= 0) {
        return Err(AlgebraError::NotInvertible(format!("{s} is not of the form c lam^k (1 + O(1/lam))")));
    }
    let mut power = n.clone();
    let mut acc = LaurentSeries::zero(Mode::Scalar, s.rows.clone(), s.cols.clone(), Some(t));
    for m in 1..=t.max(0) {
        let sign = if m % 2 == 1 { 1 } else { -1 };
        acc = acc.checked_add(&power.scale(&Coeff::from_frac(sign, m as i64)))?;
        power = power.checked_mul(&n)?.truncated(t);
        if power.is_zero() {
            break;
        }
    }
    Ok(LogSeries { series: acc.truncated(t), prefactor: c, power: k })
}

/// Exponential of a series with only strictly negative powers.
pub fn series_exp(s: &LaurentSeries, truncation: i32) -> Result<LaurentSeries, AlgebraError> {
    if s.max_order().is_some_and(|m| m >= 0) {
        return Err(AlgebraError::NotInvertible("series_exp needs strictly negative powers".into()));
    }
    let t = effective_truncation(s, truncation);
    let mut term = LaurentSeries::identity(s.mode, s.rows.clone()).truncated(t);
    let mut acc = term.clone();
    for m in 1..=t.max(0) {
        term = term.checked_mul(s)?.truncated(t).scale(&Coeff::from_frac(1, m as i64));
        if term.is_zero() {
            break;
        }
        acc = acc.checked_add(&term)?;
    }
    Ok(acc)
}

/// Shape of the coefficients' `(0, 0)` entry; handy for scalar series.
pub fn scalar_series(coeffs: impl IntoIterator<Item = (i32, NCPolynomial)>, truncation: Option<i32>) -> LaurentSeries {
    let template = PolyMatrix::single(NCPolynomial::zero(Mode::Scalar, Shape::SCALAR));
    LaurentSeries::from_coeffs(&template, coeffs.into_iter().map(|(k, p)| (k, PolyMatrix::single(p))), truncation)
        .expect("scalar layout")
}
