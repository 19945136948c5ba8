use serde::Serialize;

use crate::error::AlgebraError;
use crate::ncpoly::{Base, Mode, NCPolynomial};
use crate::riccati::{self, GammaKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChargeKind {
    /// Densities `Z^(k)_11` of the periodic generating function.
    H,
    /// Matrix charges `tr(uh Gamma^(k+1) + pi Gamma^(k))`.
    I,
}

/// A conserved density, integrated over `t` in `[-tau, tau]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeDensity {
    pub kind: ChargeKind,
    pub k: usize,
    pub density: NCPolynomial,
    /// Contributions at `t = tau` and `t = -tau`, for open boundaries.
    pub boundary_terms: Option<(NCPolynomial, NCPolynomial)>,
}

/// `H^(1..max_k)` (scalar) or `I^(1..max_k)` (trace of matrix words).
pub fn charges(kind: ChargeKind, max_k: usize) -> Result<Vec<ChargeDensity>, AlgebraError> {
    match kind {
        ChargeKind::H => {
            let sol = riccati::solve_w_z(max_k + 1, Mode::Scalar)?;
            Ok((1..=max_k)
                .map(|k| ChargeDensity { kind, k, density: sol.z(k).get(0, 0).clone(), boundary_terms: None })
                .collect())
        }
        ChargeKind::I => {
            let m = Mode::Matrix;
            let g = riccati::solve_gamma(max_k + 1, GammaKind::Gamma, m)?;
            let uh = NCPolynomial::field(m, Base::UHat);
            let pi = NCPolynomial::field(m, Base::Pi);
            (1..=max_k)
                .map(|k| {
                    let d = uh.nc_mul(g.coeff(k + 1))?.checked_add(&pi.nc_mul(g.coeff(k))?)?;
                    Ok(ChargeDensity { kind, k, density: d.trace()?, boundary_terms: None })
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_charges() {
        let h = charges(ChargeKind::H, 2).unwrap();
        assert_eq!(h[0].density.to_string(), "u*pi - uh*pih");
        let i = charges(ChargeKind::I, 3).unwrap();
        assert_eq!(i[0].density.to_string(), "tr(u*pi - uh*pih)");
        assert_eq!(i[0].density.to_scalar(), h[0].density);
    }
}
