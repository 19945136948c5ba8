//! Order-by-order solution of the time Riccati equations.
//!
//! With `V = V_D + V_A` split into block-diagonal and off-diagonal parts,
//! the off-diagonal dressing `W = sum W^(k) lam^-k` solves
//!
//! `d/dt W + [W, V_D] + W V_A W - V_A = 0`
//!
//! and the diagonal phase has density `Z' = V_D + V_A W`. The blocks
//! `Gamma = Psi_2 Psi_1^-1` and `Gamma^ = Psi_1 Psi_2^-1` solve the two
//! one-sided Riccati equations directly.

use crate::coeff::Coeff;
use crate::error::AlgebraError;
use crate::ncpoly::{Base, Dim, LaurentSeries, Mode, NCPolynomial, PolyMatrix, Shape};

fn field(mode: Mode, b: Base) -> NCPolynomial {
    NCPolynomial::field(mode, b)
}

fn half(mode: Mode, d: Dim, sign: i64) -> NCPolynomial {
    NCPolynomial::identity(mode, d).scale(&Coeff::from_frac(sign, 2))
}

/// The time-like Lax operator
/// `V = [[lam^2/2 - uh u, lam uh + pi], [lam u - pih, -lam^2/2 + u uh]]`.
pub fn v_operator(mode: Mode) -> LaurentSeries {
    let l = PolyMatrix::two_by_two_layout(mode);
    let (n, m) = (l[0], l[1]);
    let (u, uh, pi, pih) = (field(mode, Base::U), field(mode, Base::UHat), field(mode, Base::Pi), field(mode, Base::PiHat));
    let zn = NCPolynomial::zero(mode, Shape::new(n, n));
    let zm = NCPolynomial::zero(mode, Shape::new(m, m));
    let v2 = PolyMatrix::two_by_two(
        mode,
        [half(mode, n, 1), NCPolynomial::zero(mode, uh.shape()), NCPolynomial::zero(mode, u.shape()), half(mode, m, -1)],
    );
    let v1 = PolyMatrix::two_by_two(mode, [zn.clone(), uh.clone(), u.clone(), zm.clone()]);
    let v0 = PolyMatrix::two_by_two(mode, [-&(&uh * &u), pi, -&pih, &u * &uh]);
    LaurentSeries::from_coeffs(&v0.clone(), [(2, v2), (1, v1), (0, v0)], None).expect("layout")
}

/// Solution of the W/Z system up to a given order.
#[derive(Clone, Debug)]
pub struct RiccatiSolution {
    pub mode: Mode,
    pub order: usize,
    /// `W^(1) ... W^(order)`, all block off-diagonal.
    pub w: Vec<PolyMatrix>,
    /// Densities `Z^(1) ... Z^(order-1)`, all block diagonal.
    pub z: Vec<PolyMatrix>,
    /// Field-independent `lam^2` density `diag(1/2, -1/2)`; it integrates
    /// to `diag(tau, -tau)` over `[-tau, tau]`.
    pub z_leading: PolyMatrix,
}

impl RiccatiSolution {
    /// `W^(k)`, 1-based.
    pub fn w(&self, k: usize) -> &PolyMatrix {
        &self.w[k - 1]
    }

    /// `Z^(k)` density, 1-based.
    pub fn z(&self, k: usize) -> &PolyMatrix {
        &self.z[k - 1]
    }

    /// `W` as an exact Laurent polynomial (orders `-1 .. -order`).
    pub fn w_series(&self) -> LaurentSeries {
        w_series_from(self.mode, &self.w)
    }

    /// `d/dt W + [W, V_D] + W V_A W - V_A` for the stored partial sum.
    pub fn residual(&self) -> Result<LaurentSeries, AlgebraError> {
        riccati_residual(self.mode, &self.w_series())
    }

    /// True when the residual vanishes through `lam^(2-order)`.
    pub fn residual_vanishes(&self) -> Result<bool, AlgebraError> {
        let r = self.residual()?;
        let clean = r.iter().all(|(k, _)| k < 2 - self.order as i32);
        Ok(clean)
    }
}

fn w_series_from(mode: Mode, w: &[PolyMatrix]) -> LaurentSeries {
    let template = PolyMatrix::identity(mode, PolyMatrix::two_by_two_layout(mode));
    LaurentSeries::from_coeffs(&template, w.iter().enumerate().map(|(i, m)| (-(i as i32) - 1, m.clone())), None)
        .expect("layout")
}

fn riccati_residual(mode: Mode, w: &LaurentSeries) -> Result<LaurentSeries, AlgebraError> {
    let v = v_operator(mode);
    let vd = v.diagonal_part();
    let va = v.off_diagonal_part();
    w.differentiate_t()
        .checked_add(&w.commutator(&vd)?)?
        .checked_add(&w.checked_mul(&va)?.checked_mul(w)?)?
        .checked_sub(&va)
}

/// Solves for `W^(1..order)` and the densities `Z^(1..order-1)`.
pub fn solve_w_z(order: usize, mode: Mode) -> Result<RiccatiSolution, AlgebraError> {
    if order == 0 {
        return Err(AlgebraError::Layout("Riccati order must be at least 1".into()));
    }
    if mode == Mode::Trace {
        return Err(AlgebraError::NeedsTrace);
    }
    let mut w: Vec<PolyMatrix> = Vec::with_capacity(order);
    for n in 1..=order {
        let r = riccati_residual(mode, &w_series_from(mode, &w))?.coeff(2 - n as i32)?;
        // [W^(n), Sigma/2] = [[0, -a], [b, 0]] must cancel the residual
        let mut next = PolyMatrix::zeros(mode, r.row_blocks().to_vec(), r.col_blocks().to_vec());
        next.set(0, 1, r.get(0, 1).clone());
        next.set(1, 0, -r.get(1, 0));
        if !r.diagonal_part().is_zero() {
            return Err(AlgebraError::Layout(format!("diagonal Riccati residual at order {n}")));
        }
        w.push(next);
    }
    let v = v_operator(mode);
    let phase = v.diagonal_part().checked_add(&v.off_diagonal_part().checked_mul(&w_series_from(mode, &w))?)?;
    let z = (1..order).map(|k| phase.coeff(-(k as i32)).map(|m| m.diagonal_part())).collect::<Result<_, _>>()?;
    let z_leading = phase.coeff(2)?;
    Ok(RiccatiSolution { mode, order, w, z, z_leading })
}

/// Which one-sided Riccati equation to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaKind {
    /// `Gamma = Psi_2 Psi_1^-1`, an `M x N` block.
    Gamma,
    /// `Gamma^ = Psi_1 Psi_2^-1`, an `N x M` block.
    HatGamma,
}

#[derive(Clone, Debug)]
pub struct GammaSolution {
    pub kind: GammaKind,
    pub order: usize,
    /// `Gamma^(1) ... Gamma^(order)`.
    pub coeffs: Vec<NCPolynomial>,
}

impl GammaSolution {
    pub fn coeff(&self, k: usize) -> &NCPolynomial {
        &self.coeffs[k - 1]
    }

    pub fn series(&self) -> LaurentSeries {
        gamma_series(self.kind, &self.coeffs, self.coeffs[0].mode())
    }

    /// `d/dt Gamma - rhs` for the stored partial sum.
    pub fn residual(&self) -> Result<LaurentSeries, AlgebraError> {
        gamma_residual(self.kind, &self.series(), self.coeffs[0].mode())
    }

    pub fn residual_vanishes(&self) -> Result<bool, AlgebraError> {
        let r = self.residual()?;
        let clean = r.iter().all(|(k, _)| k < 2 - self.order as i32);
        Ok(clean)
    }
}

fn block_series(v: &LaurentSeries, i: usize, j: usize) -> LaurentSeries {
    v.entry(i, j)
}

fn gamma_series(kind: GammaKind, coeffs: &[NCPolynomial], mode: Mode) -> LaurentSeries {
    let shape = match kind {
        GammaKind::Gamma => Base::U.matrix_shape(),
        GammaKind::HatGamma => Base::UHat.matrix_shape(),
    }
    .filter(|_| mode == Mode::Matrix)
    .unwrap_or(Shape::SCALAR);
    let template = PolyMatrix::single(NCPolynomial::zero(mode, shape));
    LaurentSeries::from_coeffs(
        &template,
        coeffs.iter().enumerate().map(|(i, p)| (-(i as i32) - 1, PolyMatrix::single(p.clone()))),
        None,
    )
    .expect("layout")
}

fn gamma_residual(kind: GammaKind, g: &LaurentSeries, mode: Mode) -> Result<LaurentSeries, AlgebraError> {
    let v = v_operator(mode);
    let (v11, v12, v21, v22) = (block_series(&v, 0, 0), block_series(&v, 0, 1), block_series(&v, 1, 0), block_series(&v, 1, 1));
    let rhs = match kind {
        // d/dt G = V21 + V22 G - G V11 - G V12 G
        GammaKind::Gamma => v21
            .checked_add(&v22.checked_mul(g)?)?
            .checked_sub(&g.checked_mul(&v11)?)?
            .checked_sub(&g.checked_mul(&v12)?.checked_mul(g)?)?,
        // d/dt G^ = V12 + V11 G^ - G^ V22 - G^ V21 G^
        GammaKind::HatGamma => v12
            .checked_add(&v11.checked_mul(g)?)?
            .checked_sub(&g.checked_mul(&v22)?)?
            .checked_sub(&g.checked_mul(&v21)?.checked_mul(g)?)?,
    };
    g.differentiate_t().checked_sub(&rhs)
}

/// Solves for `Gamma^(1..order)` (or the hatted companion).
pub fn solve_gamma(order: usize, kind: GammaKind, mode: Mode) -> Result<GammaSolution, AlgebraError> {
    if order == 0 {
        return Err(AlgebraError::Layout("Riccati order must be at least 1".into()));
    }
    if mode == Mode::Trace {
        return Err(AlgebraError::NeedsTrace);
    }
    let mut coeffs: Vec<NCPolynomial> = Vec::with_capacity(order);
    for n in 1..=order {
        let g = gamma_series(kind, &coeffs, mode);
        let f = gamma_residual(kind, &g, mode)?.coeff(2 - n as i32)?.get(0, 0).clone();
        coeffs.push(match kind {
            GammaKind::Gamma => -&f,
            GammaKind::HatGamma => f,
        });
    }
    Ok(GammaSolution { kind, order, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_orders_scalar() {
        let s = solve_w_z(3, Mode::Scalar).unwrap();
        assert_eq!(s.w(1).to_string(), "[[0, -uh], [u, 0]]");
        assert!(s.w.iter().all(PolyMatrix::is_off_diagonal));
        assert!(s.z.iter().all(PolyMatrix::is_diagonal));
        assert!(s.residual_vanishes().unwrap());
    }

    #[test]
    fn leading_density() {
        let s = solve_w_z(1, Mode::Matrix).unwrap();
        assert_eq!(s.z_leading.constant_diagonal().unwrap(), vec![Coeff::from_frac(1, 2), Coeff::from_frac(-1, 2)]);
    }

    #[test]
    fn gamma_is_lower_block_of_w() {
        let s = solve_w_z(4, Mode::Matrix).unwrap();
        let g = solve_gamma(4, GammaKind::Gamma, Mode::Matrix).unwrap();
        let gh = solve_gamma(4, GammaKind::HatGamma, Mode::Matrix).unwrap();
        for k in 1..=4 {
            assert_eq!(s.w(k).get(1, 0), g.coeff(k));
            assert_eq!(s.w(k).get(0, 1), gh.coeff(k));
        }
        assert!(g.residual_vanishes().unwrap());
        assert!(gh.residual_vanishes().unwrap());
    }

    #[test]
    fn order_zero_is_rejected() {
        assert!(solve_w_z(0, Mode::Scalar).is_err());
        assert!(solve_gamma(0, GammaKind::Gamma, Mode::Matrix).is_err());
    }
}
