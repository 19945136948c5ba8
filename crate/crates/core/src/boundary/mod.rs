//! Open boundaries on the time axis: K-matrices and the r-matrix checks,
//! the boundary part of the open generating function, the boundary
//! U-operators and the boundary conditions they imply.

pub mod rational;
mod rmatrix;

pub use rational::{CommPoly, RationalFunction, RationalMatrix, Var};
pub use rmatrix::{bracket_table, k_matrix, poisson_residual, reflection_residual, yangian_r, LaxChoice};

use std::fmt;

use crate::coeff::Coeff;
use crate::error::AlgebraError;
use crate::hierarchy::{dress_u, LaxKind, LaxOperator};
use crate::ncpoly::subst::substitute;
use crate::ncpoly::{
    invertible_constant, series_invert, series_log, Base, FieldAtom, LaurentSeries, Mode, NCPolynomial, PolyMatrix, Rule,
    Side,
};
use crate::riccati;

/// A boundary constant: a free symbol or a fixed number.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Param {
    #[default]
    Symbolic,
    Value(Coeff),
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct BoundaryParams {
    pub xi_plus: Param,
    pub xi_minus: Param,
    pub kappa_plus: Param,
    pub kappa_minus: Param,
}

fn scalar_atom(b: Base) -> NCPolynomial {
    NCPolynomial::field(Mode::Scalar, b)
}

impl BoundaryParams {
    pub fn symbolic() -> Self {
        BoundaryParams::default()
    }

    fn pick(&self, side: Side) -> (&Param, &Param) {
        match side {
            Side::Plus => (&self.xi_plus, &self.kappa_plus),
            Side::Minus => (&self.xi_minus, &self.kappa_minus),
        }
    }

    pub fn xi(&self, side: Side) -> NCPolynomial {
        match self.pick(side).0 {
            Param::Symbolic => scalar_atom(Base::Xi(side)),
            Param::Value(c) => NCPolynomial::scalar(c.clone()),
        }
    }

    pub fn kappa(&self, side: Side) -> Result<NCPolynomial, AlgebraError> {
        match self.pick(side).1 {
            Param::Symbolic => Ok(scalar_atom(Base::Kappa(side))),
            Param::Value(c) if c.is_zero() => Err(AlgebraError::VanishingLeading),
            Param::Value(c) => Ok(NCPolynomial::scalar(c.clone())),
        }
    }

    pub fn kappa_inv(&self, side: Side) -> Result<NCPolynomial, AlgebraError> {
        match self.pick(side).1 {
            Param::Symbolic => Ok(scalar_atom(Base::KappaInv(side))),
            Param::Value(c) => c.inv().map(NCPolynomial::scalar).ok_or(AlgebraError::VanishingLeading),
        }
    }
}

fn layout() -> Vec<crate::ncpoly::Dim> {
    PolyMatrix::two_by_two_layout(Mode::Scalar)
}

fn mat(e: [NCPolynomial; 4]) -> PolyMatrix {
    PolyMatrix::two_by_two(Mode::Scalar, e)
}

fn num(re: i64, im: i64) -> NCPolynomial {
    NCPolynomial::scalar(Coeff::gaussian(re, im))
}

/// `K(lam)` as an exact scalar-mode series.
pub fn k_series(side: Side, params: &BoundaryParams) -> Result<LaurentSeries, AlgebraError> {
    let ixi = &num(0, 1) * &params.xi(side);
    let ika = &num(0, 1) * &params.kappa(side)?;
    let z = || NCPolynomial::zero(Mode::Scalar, crate::ncpoly::Shape::SCALAR);
    let lam1 = mat([num(1, 0), ika.clone(), ika, num(-1, 0)]);
    let lam0 = mat([ixi.clone(), z(), z(), ixi]);
    LaurentSeries::from_coeffs(&lam0, [(1, lam1), (0, lam0.clone())], None)
}

/// `[[0, i], [-i, 0]]`.
fn omega() -> LaurentSeries {
    let z = NCPolynomial::zero(Mode::Scalar, crate::ncpoly::Shape::SCALAR);
    LaurentSeries::constant(mat([z.clone(), num(0, 1), num(0, -1), z]))
}

/// The two scalar series whose logarithms carry the boundary charges.
pub fn boundary_generators(params: &BoundaryParams, order: usize) -> Result<(LaurentSeries, LaurentSeries), AlgebraError> {
    let t = order as i32;
    let sol = riccati::solve_w_z(order + 1, Mode::Scalar)?;
    let one = LaurentSeries::identity(Mode::Scalar, layout());
    let w = sol.w_series().truncated(t + 1);
    let one_w = one.checked_add(&w)?;
    let one_wh = one.checked_add(&w.reflect())?;
    let plus = one_wh
        .transpose_scalar()?
        .checked_mul(&omega())?
        .checked_mul(&k_series(Side::Plus, params)?)?
        .checked_mul(&one_w)?;
    let inv_w = series_invert(&one_w, t + 1)?;
    let inv_wh = series_invert(&one_wh, t + 1)?;
    let minus = inv_w
        .checked_mul(&k_series(Side::Minus, params)?)?
        .checked_mul(&omega())?
        .checked_mul(&inv_wh.transpose_scalar()?)?;
    Ok((plus.entry(0, 0).truncated(t), minus.entry(0, 0).truncated(t)))
}

/// Split of a polynomial into its field-dependent part and the constant
/// obtained by setting every field to zero.
pub fn strip_field_independent(p: &NCPolynomial) -> (NCPolynomial, NCPolynomial) {
    let constant = p.filter_terms(|w, _| w.atoms().iter().all(|a| !a.base.is_field()));
    (p.checked_sub(&constant).expect("same shape"), constant)
}

/// Expansion of the open generating function up to `lam^-order`, with
/// the overall factor 1/2 applied.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenCharges {
    pub order: usize,
    /// `(Z_11 + Zhat_11) / 2` at `lam^-k`, `k = 1..order`.
    pub bulk: Vec<NCPolynomial>,
    /// `log W+ / 2` at `lam^-k`, field-independent constants removed.
    pub plus: Vec<NCPolynomial>,
    pub minus: Vec<NCPolynomial>,
    /// The discarded constants, `(plus, minus)` per order.
    pub constants: Vec<(NCPolynomial, NCPolynomial)>,
}

impl OpenCharges {
    pub fn boundary_term(&self, side: Side, k: usize) -> &NCPolynomial {
        match side {
            Side::Plus => &self.plus[k - 1],
            Side::Minus => &self.minus[k - 1],
        }
    }
}

pub fn open_charge_expansion(params: &BoundaryParams, order: usize) -> Result<OpenCharges, AlgebraError> {
    if order == 0 {
        return Err(AlgebraError::Layout("order must be at least 1".into()));
    }
    let t = order as i32;
    let (wp, wm) = boundary_generators(params, order)?;
    let lp = series_log(&wp, t)?;
    let lm = series_log(&wm, t)?;
    let sol = riccati::solve_w_z(order + 1, Mode::Scalar)?;
    let half = Coeff::from_frac(1, 2);
    let mut out = OpenCharges { order, bulk: Vec::new(), plus: Vec::new(), minus: Vec::new(), constants: Vec::new() };
    for k in 1..=order {
        let z = sol.z(k).get(0, 0);
        out.bulk.push(if k % 2 == 0 { z.clone() } else { NCPolynomial::zero(Mode::Scalar, z.shape()) });
        let (p, pc) = strip_field_independent(&lp.series.coeff(-(k as i32))?.get(0, 0).scale(&half));
        let (m, mc) = strip_field_independent(&lm.series.coeff(-(k as i32))?.get(0, 0).scale(&half));
        out.plus.push(p);
        out.minus.push(m);
        out.constants.push((pc, mc));
    }
    Ok(out)
}

/// The bulk operator `[[lam/2, uh], [u, -lam/2]]`.
pub fn bulk_u2() -> LaxOperator {
    dress_u(2, Mode::Scalar).expect("second flow")
}

/// The boundary U-operator at `t = tau` (`Plus`) or `t = -tau` (`Minus`).
pub fn boundary_u(side: Side, params: &BoundaryParams) -> Result<LaxOperator, AlgebraError> {
    let ik = &num(0, 1) * &params.kappa_inv(side)?;
    let xk = &params.xi(side) * &params.kappa_inv(side)?;
    let field = match side {
        Side::Plus => scalar_atom(Base::U),
        Side::Minus => scalar_atom(Base::UHat),
    };
    let d = &ik * &field;
    let z = NCPolynomial::zero(Mode::Scalar, crate::ncpoly::Shape::SCALAR);
    let lam0 = match side {
        Side::Plus => mat([-&d, &field + &xk, field.clone(), d]),
        Side::Minus => mat([-&d, field.clone(), &field + &xk, d]),
    };
    let lam1 = match side {
        Side::Plus => mat([num(1, 0).scale(&Coeff::from_frac(1, 2)), ik, z.clone(), num(-1, 0).scale(&Coeff::from_frac(1, 2))]),
        Side::Minus => mat([num(1, 0).scale(&Coeff::from_frac(1, 2)), z.clone(), ik, num(-1, 0).scale(&Coeff::from_frac(1, 2))]),
    };
    let series = LaurentSeries::from_coeffs(&lam0, [(1, lam1), (0, lam0.clone())], None)?;
    Ok(LaxOperator { series, flow: 2, kind: LaxKind::UBoundary(side) })
}

/// A field-independent term of `bdry - bulk` carrying a power of `lam`;
/// it can only be dropped when the boundary constants are large.
#[derive(Clone, Debug, PartialEq)]
pub struct LargeParameterFlag {
    pub row: usize,
    pub col: usize,
    pub power: i32,
    pub coefficient: NCPolynomial,
}

impl fmt::Display for LargeParameterFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "entry {}{}: ({})*lam^{}", self.row + 1, self.col + 1, self.coefficient, self.power)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConditions {
    pub side: Option<Side>,
    /// `(field, value)` in the order they were solved.
    pub equations: Vec<(FieldAtom, NCPolynomial)>,
    pub flags: Vec<LargeParameterFlag>,
}

impl BoundaryConditions {
    pub fn rules(&self) -> Result<Vec<Rule>, AlgebraError> {
        self.equations.iter().map(|(a, v)| Rule::atom(*a, v.clone())).collect()
    }

    /// `delta` with the boundary values imposed.
    pub fn apply(&self, delta: &LaurentSeries) -> Result<LaurentSeries, AlgebraError> {
        let rules = self.rules()?;
        delta.try_map(|m| crate::ncpoly::substitute_matrix(m, &rules))
    }

    /// The series made of the flagged terms alone.
    pub fn flag_series(&self) -> Result<LaurentSeries, AlgebraError> {
        let template = PolyMatrix::zeros(Mode::Scalar, layout(), layout());
        let mut terms = Vec::new();
        for fl in &self.flags {
            let mut m = template.clone();
            m.set(fl.row, fl.col, fl.coefficient.clone());
            terms.push((fl.power, m));
        }
        LaurentSeries::from_coeffs(&template, terms, None)
    }

    pub fn label(&self) -> &'static str {
        match self.side {
            Some(Side::Plus) => "tau",
            Some(Side::Minus) => "-tau",
            None => "t",
        }
    }

    pub fn equation_strings(&self) -> Vec<String> {
        self.equations.iter().map(|(a, v)| format!("{a}({}) = {v}", self.label())).collect()
    }
}

fn is_field_free(p: &NCPolynomial) -> bool {
    !p.contains_base(Base::is_field)
}

fn word_poly(atoms: Vec<FieldAtom>, c: &Coeff) -> NCPolynomial {
    if atoms.is_empty() {
        NCPolynomial::scalar(c.clone())
    } else {
        NCPolynomial::from_word(Mode::Scalar, atoms, c.clone()).expect("scalar word")
    }
}

/// Writes `p = c a + r` with `a` absent from `r`, when `c` is an
/// invertible constant.
fn linear_in(p: &NCPolynomial, a: FieldAtom) -> Option<(NCPolynomial, NCPolynomial)> {
    let mut coeff = NCPolynomial::zero(Mode::Scalar, p.shape());
    let mut rest = coeff.clone();
    for (w, c) in p.terms() {
        let hits = w.atoms().iter().filter(|x| **x == a).count();
        let term = word_poly(w.atoms().to_vec(), c);
        match hits {
            0 => rest = rest.checked_add(&term).ok()?,
            1 => {
                let others: Vec<FieldAtom> = w.atoms().iter().copied().filter(|x| *x != a).collect();
                if others.iter().any(|x| x.base.is_field()) {
                    return None;
                }
                coeff = coeff.checked_add(&word_poly(others, c)).ok()?;
            }
            _ => return None,
        }
    }
    if coeff.is_zero() {
        return None;
    }
    Some((coeff, rest))
}

/// Reads off the field values forced by `bdry = bulk`.
pub fn extract_boundary_conditions(bulk: &LaxOperator, bdry: &LaxOperator) -> Result<BoundaryConditions, AlgebraError> {
    let side = match bdry.kind {
        LaxKind::UBoundary(s) => Some(s),
        _ => None,
    };
    let delta = bdry.series.to_scalar().checked_sub(&bulk.series.to_scalar())?;
    let mut flags = Vec::new();
    let mut pending: Vec<(String, NCPolynomial)> = Vec::new();
    for (k, m) in delta.iter().rev() {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let e = m.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let (dep, free) = strip_field_independent(e);
                let eq = if k == 0 { e.clone() } else { dep };
                if k != 0 && !free.is_zero() {
                    flags.push(LargeParameterFlag { row: i, col: j, power: k, coefficient: free });
                }
                if !eq.is_zero() {
                    pending.push((format!("lam^{k} entry {}{}", i + 1, j + 1), eq));
                }
            }
        }
    }
    let mut equations: Vec<(FieldAtom, NCPolynomial)> = Vec::new();
    loop {
        let rules: Vec<Rule> = equations.iter().map(|(a, v)| Rule::atom(*a, v.clone())).collect::<Result<_, _>>()?;
        let mut live = Vec::new();
        for (w, p) in &pending {
            let q = substitute(p, &rules)?;
            if q.is_zero() {
                continue;
            }
            if is_field_free(&q) {
                return Err(AlgebraError::Inconsistent(format!("{w}: {q} = 0")));
            }
            live.push((w.clone(), q));
        }
        if live.is_empty() {
            break;
        }
        let mut found = None;
        'search: for (_, q) in &live {
            let mut atoms: Vec<FieldAtom> = q.atoms().copied().filter(|a| a.base.is_field()).collect();
            atoms.sort();
            atoms.dedup();
            for a in atoms {
                if let Some((c, rest)) = linear_in(q, a) {
                    if let Some(ci) = invertible_constant(&c) {
                        found = Some((a, (-&ci) * rest));
                        break 'search;
                    }
                }
            }
        }
        let Some((a, value)) = found else {
            let (w, q) = &live[0];
            return Err(AlgebraError::Unsupported(format!("{w}: {q} = 0 is not linear in a single field")));
        };
        let sub = [Rule::atom(a, value.clone())?];
        for (_, v) in equations.iter_mut() {
            *v = substitute(v, &sub)?;
        }
        equations.push((a, value));
    }
    Ok(BoundaryConditions { side, equations, flags })
}
