//! Exact checks of the Yangian r-matrix relations: the classical
//! reflection equation for c-number K-matrices and the linear Poisson
//! algebra of the Lax matrices.

use crate::coeff::Coeff;
use crate::error::AlgebraError;
use crate::ncpoly::Side;

use super::rational::{CommPoly, RationalFunction, RationalMatrix, Var};

fn v(x: Var) -> CommPoly {
    CommPoly::var(x)
}

fn c(re: i64, im: i64) -> CommPoly {
    CommPoly::constant(Coeff::gaussian(re, im))
}

/// `r(arg) = P / arg`.
pub fn yangian_r(arg: &CommPoly) -> RationalMatrix {
    RationalMatrix::permutation(2).scale(&RationalFunction::new(CommPoly::one(), arg.clone()))
}

pub fn xi_var(side: Side) -> Var {
    match side {
        Side::Plus => Var::XiPlus,
        Side::Minus => Var::XiMinus,
    }
}

pub fn kappa_var(side: Side) -> Var {
    match side {
        Side::Plus => Var::KappaPlus,
        Side::Minus => Var::KappaMinus,
    }
}

/// `[[lam + i xi, i kappa lam], [i kappa lam, -lam + i xi]]` with symbolic
/// constants.
pub fn k_matrix(side: Side) -> RationalMatrix {
    let (lam, xi, ka) = (v(Var::Lam), v(xi_var(side)), v(kappa_var(side)));
    let i = c(0, 1);
    let ixi = i.mul(&xi);
    let off = i.mul(&ka).mul(&lam);
    RationalMatrix::from_polys(2, vec![lam.add(&ixi), off.clone(), off, lam.neg().add(&ixi)])
}

/// `[r(lam - mu), K1(lam) K2(mu)] + K1(lam) r(lam + mu) K2(mu)
///  - K2(mu) r(lam + mu) K1(lam)` for `K` a 2x2 matrix in `lam`.
pub fn reflection_residual(k: &RationalMatrix) -> RationalMatrix {
    assert_eq!(k.dim, 2, "K must be 2x2");
    let (lam, mu) = (v(Var::Lam), v(Var::Mu));
    let k1 = k.in_first();
    let k2 = k.substitute(Var::Lam, &mu).in_second();
    let r_minus = yangian_r(&lam.sub(&mu));
    let r_plus = yangian_r(&lam.add(&mu));
    r_minus
        .commutator(&k1.mul(&k2))
        .add(&k1.mul(&r_plus).mul(&k2))
        .sub(&k2.mul(&r_plus).mul(&k1))
}

/// Which Lax matrix carries the linear Poisson algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaxChoice {
    /// `V` with `{u, pi} = {uh, pih} = 1`.
    V,
    /// `U` with `{u, uh} = 1`.
    U,
}

impl LaxChoice {
    pub fn matrix(self) -> Vec<CommPoly> {
        let lam = v(Var::Lam);
        let half = CommPoly::constant(Coeff::from_frac(1, 2));
        let (u, uh) = (v(Var::U), v(Var::UHat));
        match self {
            LaxChoice::V => {
                let l2 = half.mul(&lam).mul(&lam);
                let uuh = u.mul(&uh);
                vec![
                    l2.sub(&uuh),
                    lam.mul(&uh).add(&v(Var::Pi)),
                    lam.mul(&u).sub(&v(Var::PiHat)),
                    uuh.sub(&l2),
                ]
            }
            LaxChoice::U => vec![half.mul(&lam), uh, u, half.mul(&lam).neg()],
        }
    }

    /// Canonical pairs `(q, p)` with `{q, p} = 1`.
    pub fn pairs(self) -> &'static [(Var, Var)] {
        match self {
            LaxChoice::V => &[(Var::U, Var::Pi), (Var::UHat, Var::PiHat)],
            LaxChoice::U => &[(Var::U, Var::UHat)],
        }
    }
}

fn bracket(a: &CommPoly, b: &CommPoly, pairs: &[(Var, Var)]) -> CommPoly {
    let mut out = CommPoly::zero();
    for &(q, p) in pairs {
        out = out.add(&a.partial(q).mul(&b.partial(p))).sub(&a.partial(p).mul(&b.partial(q)));
    }
    out
}

/// The ultralocal coefficient of `{L1(lam), L2(mu)}`, entry
/// `((a, c), (b, d)) = {L_ab(lam), L_cd(mu)}`.
pub fn bracket_table(which: LaxChoice) -> RationalMatrix {
    let l = which.matrix();
    let mu = v(Var::Mu);
    let l_mu: Vec<CommPoly> = l.iter().map(|p| p.substitute(Var::Lam, &mu)).collect();
    let mut out = RationalMatrix::zeros(4);
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    let e = bracket(&l[a * 2 + b], &l_mu[cc * 2 + d], which.pairs());
                    out.set(a * 2 + cc, b * 2 + d, RationalFunction::poly(e));
                }
            }
        }
    }
    out
}

/// `{L1(lam), L2(mu)} - [P, L1(lam) + L2(mu)] / (lam - mu)`, where the
/// quotient is taken by exact polynomial division.
pub fn poisson_residual(which: LaxChoice) -> Result<RationalMatrix, AlgebraError> {
    let (lam, mu) = (v(Var::Lam), v(Var::Mu));
    let l = RationalMatrix::from_polys(2, which.matrix());
    let sum = l.in_first().add(&l.substitute(Var::Lam, &mu).in_second());
    let comm = RationalMatrix::permutation(2).commutator(&sum);
    let diff = lam.sub(&mu);
    let mut rhs = RationalMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            let e = comm.get(i, j).as_poly().expect("polynomial entries");
            let q = e.div_exact(&diff).ok_or_else(|| {
                AlgebraError::Inconsistent(format!("entry ({}, {}) = {e} is not divisible by lam - mu", i + 1, j + 1))
            })?;
            rhs.set(i, j, RationalFunction::poly(q));
        }
    }
    Ok(bracket_table(which).sub(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solves_reflection() {
        assert!(reflection_residual(&RationalMatrix::identity(2)).is_zero());
    }

    #[test]
    fn general_k_solves_reflection() {
        for s in [Side::Plus, Side::Minus] {
            let r = reflection_residual(&k_matrix(s));
            assert!(r.is_zero(), "{r}");
        }
    }

    #[test]
    fn diagonal_limit() {
        let k = k_matrix(Side::Plus).substitute(Var::KappaPlus, &CommPoly::zero());
        assert!(reflection_residual(&k).is_zero());
    }

    #[test]
    fn non_solution_is_detected() {
        let lam = v(Var::Lam);
        let k = RationalMatrix::from_polys(2, vec![lam.clone(), CommPoly::one(), CommPoly::zero(), CommPoly::one()]);
        assert!(!reflection_residual(&k).is_zero());
    }

    #[test]
    fn linear_algebras() {
        for w in [LaxChoice::V, LaxChoice::U] {
            let r = poisson_residual(w).unwrap();
            assert!(r.is_zero(), "{w:?}: {r}");
        }
    }

    #[test]
    fn bracket_antisymmetry() {
        let (lam, mu) = (v(Var::Lam), v(Var::Mu));
        let tmp = v(Var::XiPlus);
        for w in [LaxChoice::V, LaxChoice::U] {
            let b = bracket_table(w);
            let swapped = b.substitute(Var::Lam, &tmp).substitute(Var::Mu, &lam).substitute(Var::XiPlus, &mu);
            let p = RationalMatrix::permutation(2);
            assert_eq!(p.mul(&b).mul(&p), swapped.map(|e| e.neg()));
        }
    }

    #[test]
    fn commutator_vanishes_on_diagonal() {
        let l = RationalMatrix::from_polys(2, LaxChoice::V.matrix());
        let sum = l.in_first().add(&l.in_second());
        assert!(RationalMatrix::permutation(2).commutator(&sum).is_zero());
    }
}
