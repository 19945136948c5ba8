use crate::coeff::Coeff;
use crate::error::AlgebraError;
use crate::ncpoly::subst::substitute_matrix;
use crate::ncpoly::{Base, FieldAtom, LaurentSeries, Mode, NCPolynomial, PolyMatrix, Rule};

use super::{LaxKind, LaxOperator};

fn f(mode: Mode, b: Base) -> NCPolynomial {
    NCPolynomial::field(mode, b)
}

fn a(b: Base) -> FieldAtom {
    FieldAtom::new(b)
}

/// The dressing kernel `K = [[K11, -uh], [u, K22]]` of `G = lam + K`, with
/// the frozen rewrites that eliminate its diagonal blocks.
#[derive(Clone, Debug)]
pub struct DressingKernel {
    mode: Mode,
    rules: Vec<Rule>,
}

impl DressingKernel {
    pub fn new(mode: Mode) -> Result<DressingKernel, AlgebraError> {
        let (u, uh, pi, pih) = (f(mode, Base::U), f(mode, Base::UHat), f(mode, Base::Pi), f(mode, Base::PiHat));
        let rules = vec![
            Rule::word(vec![a(Base::U), a(Base::K11)], pih.clone())?,
            Rule::word(vec![a(Base::UHat), a(Base::K22)], -&pi)?,
            Rule::word(vec![a(Base::PiHat), a(Base::K11)], &(&(&u * &uh) * &u) - &u.differentiate_t())?,
            Rule::word(vec![a(Base::Pi), a(Base::K22)], &(-&uh.differentiate_t()) - &(&(&uh * &u) * &uh))?,
            Rule::prolonged(FieldAtom::with_dt(Base::K11, 1), &(&pi * &u) - &(&uh * &pih))?,
            Rule::prolonged(FieldAtom::with_dt(Base::K22, 1), &(&pih * &uh) - &(&u * &pi))?,
        ];
        Ok(DressingKernel { mode, rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn k(&self) -> PolyMatrix {
        let m = self.mode;
        PolyMatrix::two_by_two(m, [f(m, Base::K11), -&f(m, Base::UHat), f(m, Base::U), f(m, Base::K22)])
    }

    fn sigma(&self) -> PolyMatrix {
        PolyMatrix::diag_constants(self.mode, PolyMatrix::two_by_two_layout(self.mode), &[Coeff::one(), Coeff::from_int(-1)])
    }

    /// `X = [K, Sigma] / 2`.
    pub fn x(&self) -> PolyMatrix {
        self.k().commutator(&self.sigma()).expect("layout").scale(&Coeff::from_frac(1, 2))
    }

    /// `Y = -X K`, with the rewrites applied.
    pub fn y(&self) -> Result<PolyMatrix, AlgebraError> {
        self.reduce(&(-&self.x()).checked_mul(&self.k())?)
    }

    pub fn reduce(&self, m: &PolyMatrix) -> Result<PolyMatrix, AlgebraError> {
        substitute_matrix(m, &self.rules)
    }

    /// `d/dt K - Y K` after rewriting; vanishes when the rules are
    /// compatible with the time part of the dressing.
    pub fn time_constraint(&self) -> Result<PolyMatrix, AlgebraError> {
        let lhs = self.reduce(&self.k().differentiate_t())?;
        let rhs = self.reduce(&self.y()?.checked_mul(&self.k())?)?;
        lhs.checked_sub(&rhs)
    }
}

fn contains_kernel(m: &PolyMatrix) -> bool {
    m.entries().iter().any(|p| p.contains_base(Base::is_kernel))
}

/// The coefficients `w_0 ... w_(n-2)` of `U^(n)` from the recursion
/// `w_(n-2) = X`, `w_(k-1) = -w_k K`.
pub fn dress_w(n: u32, mode: Mode) -> Result<Vec<PolyMatrix>, AlgebraError> {
    let kernel = DressingKernel::new(mode)?;
    if n < 2 {
        return Ok(Vec::new());
    }
    let mut w = vec![kernel.x()];
    for k in (1..n - 1).rev() {
        let next = kernel.reduce(&(-&w[0]).checked_mul(&kernel.k())?)?;
        if contains_kernel(&next) {
            return Err(AlgebraError::Layout(format!(
                "dressing kernel not eliminated at w_{} of U^({n}): {next}",
                k - 1
            )));
        }
        w.insert(0, next);
    }
    Ok(w)
}

/// `U^(n) = lam^(n-1)/2 Sigma + sum_k lam^k w_k` from the dressing recursion.
pub fn dress_u(n: u32, mode: Mode) -> Result<LaxOperator, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::Layout("flow index must be at least 1".into()));
    }
    let mut op = LaxOperator::bare(n, mode);
    for (k, w) in dress_w(n, mode)?.into_iter().enumerate() {
        op.series = op.series.checked_add(&LaurentSeries::monomial(w, k as i32))?;
    }
    op.kind = LaxKind::UBulk;
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w0_for_low_flows() {
        let m = Mode::Matrix;
        assert_eq!(dress_w(2, m).unwrap()[0].to_string(), "[[0, uh], [u, 0]]");
        assert_eq!(dress_w(3, m).unwrap()[0].to_string(), "[[-uh*u, pi], [-pih, u*uh]]");
        assert_eq!(dress_w(4, m).unwrap()[0].to_string(), "[[uh*pih - pi*u, uh_t], [-u_t, u*pi - pih*uh]]");
    }

    #[test]
    fn constraints_hold() {
        for m in [Mode::Matrix, Mode::Scalar] {
            let k = DressingKernel::new(m).unwrap();
            assert_eq!(k.x(), dress_w(2, m).unwrap()[0]);
            assert_eq!(k.y().unwrap(), dress_w(3, m).unwrap()[0]);
            assert!(k.time_constraint().unwrap().is_zero());
        }
    }

    #[test]
    fn fifth_flow_needs_more_rules() {
        assert!(dress_u(5, Mode::Matrix).is_err());
    }

    #[test]
    fn bare_limit() {
        for n in 1..=4 {
            let u = dress_u(n, Mode::Matrix).unwrap();
            let bare = u.series.map(|m| m.map(|p| p.filter_terms(|w, _| w.is_empty())));
            assert_eq!(bare, LaxOperator::bare(n, Mode::Matrix).series);
        }
    }
}
