//! The U-operator hierarchy attached to the time-like Lax operator `V`,
//! its conserved charges and equations of motion.

mod charges;
mod dressing;
mod eom;

pub use charges::{charges, ChargeDensity, ChargeKind};
pub use dressing::{dress_u, dress_w, DressingKernel};
pub use eom::{extract_eom, verify_conservation, zero_curvature_residual, ConservationProof, EomSystem};

use crate::coeff::Coeff;
use crate::error::AlgebraError;
use crate::ncpoly::{series_invert, LaurentSeries, Mode, PolyMatrix, Side};
use crate::riccati::{self, RiccatiSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaxKind {
    V,
    UBulk,
    UBare,
    UBoundary(Side),
}

/// A Lax matrix polynomial in `lam`, tagged with the flow it generates.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxOperator {
    pub series: LaurentSeries,
    /// `n` for the `x_n` flow; the time operator `V` uses 0.
    pub flow: u32,
    pub kind: LaxKind,
}

impl LaxOperator {
    pub fn v(mode: Mode) -> LaxOperator {
        LaxOperator { series: riccati::v_operator(mode), flow: 0, kind: LaxKind::V }
    }

    /// `lam^(n-1)/2 Sigma`.
    pub fn bare(n: u32, mode: Mode) -> LaxOperator {
        let sigma = PolyMatrix::diag_constants(
            mode,
            PolyMatrix::two_by_two_layout(mode),
            &[Coeff::from_frac(1, 2), Coeff::from_frac(-1, 2)],
        );
        LaxOperator { series: LaurentSeries::monomial(sigma, n as i32 - 1), flow: n, kind: LaxKind::UBare }
    }

    pub fn mode(&self) -> Mode {
        self.series.mode()
    }

    /// Coefficient of `lam^k`.
    pub fn coeff(&self, k: i32) -> PolyMatrix {
        self.series.coeff(k).expect("Lax operators are exact")
    }

    /// Image under `N = M = 1`.
    pub fn to_scalar(&self) -> LaxOperator {
        LaxOperator { series: self.series.to_scalar(), ..self.clone() }
    }

    /// Adds `c lam^k` times the identity.
    pub fn shifted_by_identity(&self, c: &Coeff, k: i32) -> LaxOperator {
        let id = PolyMatrix::identity(self.mode(), self.series.row_blocks().to_vec()).scale(c);
        let series = self.series.checked_add(&LaurentSeries::monomial(id, k)).expect("layout");
        LaxOperator { series, ..self.clone() }
    }
}

impl std::fmt::Display for LaxOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.series)
    }
}

/// `U^(n)` from the generating function `(1 + W) D (1 + W)^-1 / (lam - mu)`
/// with `D = diag(1, 0)`.
pub fn generate_u(n: u32, mode: Mode) -> Result<LaxOperator, AlgebraError> {
    let sol = riccati::solve_w_z((n as usize).saturating_sub(1).max(1), mode)?;
    generate_u_from(n, &sol)
}

/// As [`generate_u`] but reusing a Riccati solution, which must reach
/// order `n - 1`.
pub fn generate_u_from(n: u32, sol: &RiccatiSolution) -> Result<LaxOperator, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::Layout("flow index must be at least 1".into()));
    }
    let need = n as i32 - 1;
    if (sol.order as i32) < need {
        return Err(AlgebraError::Truncated { requested: -need, floor: -(sol.order as i32) });
    }
    let mode = sol.mode;
    let blocks = PolyMatrix::two_by_two_layout(mode);
    let t = need;
    let one_w = LaurentSeries::identity(mode, blocks.clone()).checked_add(&sol.w_series())?.truncated(t);
    let inv = series_invert(&one_w, t)?;
    let d = LaurentSeries::constant(PolyMatrix::diag_constants(mode, blocks.clone(), &[Coeff::one(), Coeff::zero()]));
    let f = one_w.checked_mul(&d)?.checked_mul(&inv)?.truncated(t);
    // coefficient of lam^-n in sum_k mu^k lam^(-k-1) F(lam), then mu -> lam
    let mut coeffs = Vec::new();
    for j in 0..n as i32 {
        coeffs.push((n as i32 - 1 - j, f.coeff(-j)?));
    }
    let template = PolyMatrix::identity(mode, blocks);
    let series = LaurentSeries::from_coeffs(&template, coeffs, None)?;
    Ok(LaxOperator { series, flow: n, kind: LaxKind::UBulk })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_generated_operators() {
        assert_eq!(generate_u(1, Mode::Scalar).unwrap().to_string(), "[[1, 0], [0, 0]]");
        assert_eq!(generate_u(2, Mode::Scalar).unwrap().to_string(), "[[1, 0], [0, 0]]*lam^1 + [[0, uh], [u, 0]]");
    }

    #[test]
    fn insufficient_order() {
        let sol = riccati::solve_w_z(2, Mode::Scalar).unwrap();
        assert!(matches!(generate_u_from(5, &sol), Err(AlgebraError::Truncated { .. })));
        assert!(generate_u_from(3, &sol).is_ok());
    }

    #[test]
    fn routes_agree_in_matrix_mode() {
        for n in 1..=4 {
            let g = generate_u(n, Mode::Matrix).unwrap();
            let d = dress_u(n, Mode::Matrix).unwrap();
            assert_eq!(d.shifted_by_identity(&Coeff::from_frac(1, 2), n as i32 - 1).series, g.series, "n = {n}");
        }
    }
}
