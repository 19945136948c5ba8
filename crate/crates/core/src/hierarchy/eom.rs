use crate::coeff::Coeff;
use crate::error::AlgebraError;
use crate::ncpoly::subst::substitute;
use crate::ncpoly::{is_total_t_derivative, FieldAtom, LaurentSeries, Mode, NCPolynomial, Pattern, Rule, PHYSICAL_FLOW};

use super::charges::{charges, ChargeKind};
use super::{dress_u, LaxOperator};

/// `d/dx_n V - d/dt U + [V, U]`, one matrix per power of `lam`.
pub fn zero_curvature_residual(u_op: &LaxOperator, v_op: &LaxOperator) -> Result<LaurentSeries, AlgebraError> {
    let v = &v_op.series;
    let u = &u_op.series;
    v.differentiate_x(u_op.flow).checked_sub(&u.differentiate_t())?.checked_add(&v.commutator(u)?)
}

/// Equations of motion of one flow, as rewrite rules for `x_n`
/// derivatives.
#[derive(Clone, Debug)]
pub struct EomSystem {
    pub flow: u32,
    pub mode: Mode,
    /// `(atom, value)` in the order they were solved.
    pub solved: Vec<(FieldAtom, NCPolynomial)>,
    pub rules: Vec<Rule>,
}

impl EomSystem {
    /// Relations `g = f_x` read off from rules `f_x -> g`.
    pub fn first_order_relations(&self) -> Vec<(FieldAtom, FieldAtom)> {
        self.solved
            .iter()
            .filter_map(|(lhs, rhs)| {
                if lhs.dx != 1 || lhs.dt != 0 || rhs.len() != 1 {
                    return None;
                }
                let (w, c) = rhs.terms().next()?;
                match w.atoms() {
                    [g] if c.is_one() && g.dx == 0 && g.dt == 0 => Some((*g, *lhs)),
                    _ => None,
                }
            })
            .collect()
    }

    /// The remaining relations as `expr = 0`, with the first-order
    /// relations substituted back and the time derivative normalized to
    /// coefficient 1.
    pub fn evolution_equations(&self) -> Result<Vec<NCPolynomial>, AlgebraError> {
        let first = self.first_order_relations();
        let inverse: Vec<Rule> = first
            .iter()
            .map(|(g, fx)| Rule::prolonged(*g, NCPolynomial::atom(self.mode, *fx).expect("atom")))
            .collect::<Result<_, _>>()?;
        let mut out = Vec::new();
        for (lhs, rhs) in &self.solved {
            if first.iter().any(|(_, fx)| fx == lhs) {
                continue;
            }
            let lhs_p = NCPolynomial::atom(self.mode, *lhs)?;
            let eq = substitute(&lhs_p.checked_sub(rhs)?, &inverse)?;
            let lead = eq
                .terms()
                .find(|(w, _)| matches!(w.atoms(), [a] if a.dt == 1 && a.dx == 0))
                .map(|(_, c)| c.clone())
                .unwrap_or_else(Coeff::one);
            out.push(eq.scale(&lead.inv().expect("nonzero")));
        }
        Ok(out)
    }
}

fn solvable_atom(p: &NCPolynomial, flow: u32) -> Option<(FieldAtom, Coeff)> {
    let mut best: Option<(FieldAtom, Coeff)> = None;
    for (w, c) in p.terms() {
        let [a] = w.atoms() else { continue };
        if a.dx == 0 || a.flow != flow {
            continue;
        }
        let elsewhere = p.terms().filter(|(w2, _)| w2.atoms().contains(a)).count() > 1;
        if elsewhere {
            continue;
        }
        if best.as_ref().map_or(true, |(b, _)| (a.dx, a.dt) > (b.dx, b.dt)) {
            best = Some((*a, c.clone()));
        }
    }
    best
}

/// Solves the zero-curvature residual of `(U, V)` for `x_n` derivatives,
/// highest power of `lam` first.
pub fn extract_eom(u_op: &LaxOperator, v_op: &LaxOperator) -> Result<EomSystem, AlgebraError> {
    let flow = u_op.flow;
    let mode = u_op.mode();
    let residual = zero_curvature_residual(u_op, v_op)?;
    let mut rules: Vec<Rule> = Vec::new();
    let mut solved = Vec::new();
    for (k, m) in residual.iter().rev() {
        for (idx, entry) in m.entries().iter().enumerate() {
            let p = substitute(entry, &rules)?;
            if p.is_zero() {
                continue;
            }
            let Some((atom, c)) = solvable_atom(&p, flow) else {
                let where_ = format!("lam^{k} entry {}{}: {p} = 0", idx / m.ncols() + 1, idx % m.ncols() + 1);
                return Err(if p.atoms().any(|a| a.dx > 0) {
                    AlgebraError::Unsupported(where_)
                } else {
                    AlgebraError::Inconsistent(where_)
                });
            };
            let lone = NCPolynomial::atom(mode, atom)?.scale(&c);
            let value = p.checked_sub(&lone)?.scale(&-(c.inv().expect("nonzero")));
            rules.push(Rule::new(Pattern::Atom { atom, prolong: true }, value.clone())?);
            solved.push((atom, value));
        }
    }
    Ok(EomSystem { flow, mode, solved, rules })
}

/// Certificate that `d/dx rho = d/dt j` once the flow-2 equations of
/// motion are imposed.
#[derive(Clone, Debug)]
pub struct ConservationProof {
    pub k: usize,
    pub density: NCPolynomial,
    /// `d/dx rho` with every `x` derivative eliminated.
    pub dx_density: NCPolynomial,
    pub flux: NCPolynomial,
}

/// Checks that `H^(k)` is conserved along the physical `x` flow.
pub fn verify_conservation(k: usize) -> Result<ConservationProof, AlgebraError> {
    let mode = Mode::Scalar;
    let eom = extract_eom(&dress_u(PHYSICAL_FLOW, mode)?, &LaxOperator::v(mode))?;
    let density = charges(ChargeKind::H, k)?.pop().expect("k >= 1").density;
    verify_density(k, density, &eom.rules)
}

pub(crate) fn verify_density(k: usize, density: NCPolynomial, rules: &[Rule]) -> Result<ConservationProof, AlgebraError> {
    let dx_density = substitute(&density.differentiate_x(PHYSICAL_FLOW), rules)?;
    let test = is_total_t_derivative(&dx_density)?;
    match test.witness {
        Some(flux) if test.is_total => Ok(ConservationProof { k, density, dx_density, flux }),
        _ => Err(AlgebraError::NotConserved(format!(
            "d/dx of {density} reduces to {dx_density}, whose variational derivative does not vanish"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::generate_u;
    use crate::ncpoly::Base;

    #[test]
    fn nls_from_second_flow() {
        for mode in [Mode::Scalar, Mode::Matrix] {
            let eom = extract_eom(&dress_u(2, mode).unwrap(), &LaxOperator::v(mode)).unwrap();
            let rel: Vec<String> = eom.first_order_relations().iter().map(|(g, f)| format!("{g} = {f}")).collect();
            assert_eq!(rel, vec!["pi = uh_x", "pih = u_x"]);
            let ev: Vec<String> = eom.evolution_equations().unwrap().iter().map(|p| p.to_string()).collect();
            match mode {
                Mode::Scalar => assert_eq!(ev, vec!["2*u*uh*uh - uh_x_x + uh_t", "-2*u*u*uh + u_x_x + u_t"]),
                _ => assert_eq!(ev, vec!["2*uh*u*uh - uh_x_x + uh_t", "-2*u*uh*u + u_x_x + u_t"]),
            }
        }
    }

    #[test]
    fn generated_operator_gives_same_equations() {
        let v = LaxOperator::v(Mode::Scalar);
        let a = extract_eom(&generate_u(2, Mode::Scalar).unwrap(), &v).unwrap();
        let b = extract_eom(&dress_u(2, Mode::Scalar).unwrap(), &v).unwrap();
        assert_eq!(a.solved, b.solved);
    }

    #[test]
    fn first_flow_is_a_phase() {
        let eom = extract_eom(&dress_u(1, Mode::Scalar).unwrap(), &LaxOperator::v(Mode::Scalar)).unwrap();
        let s: Vec<String> = eom.solved.iter().map(|(a, v)| format!("{a} -> {v}")).collect();
        assert_eq!(s, vec!["uh_x1 -> uh", "u_x1 -> -u", "pi_x1 -> pi", "pih_x1 -> -pih"]);
    }

    #[test]
    fn third_flow_is_time() {
        let eom = extract_eom(&dress_u(3, Mode::Matrix).unwrap(), &LaxOperator::v(Mode::Matrix)).unwrap();
        for (a, v) in &eom.solved {
            assert_eq!(*v, NCPolynomial::atom(Mode::Matrix, FieldAtom::with_dt(a.base, 1)).unwrap());
        }
        assert_eq!(eom.solved.len(), 4);
    }

    #[test]
    fn residual_vanishes_on_shell() {
        for n in 1..=4 {
            let u = dress_u(n, Mode::Matrix).unwrap();
            let v = LaxOperator::v(Mode::Matrix);
            let eom = extract_eom(&u, &v).unwrap();
            let r = zero_curvature_residual(&u, &v).unwrap();
            for (_, m) in r.iter() {
                for e in m.entries() {
                    assert!(substitute(e, &eom.rules).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn first_charge_flux() {
        let p = verify_conservation(1).unwrap();
        let u = NCPolynomial::field(Mode::Scalar, Base::U);
        let uh = NCPolynomial::field(Mode::Scalar, Base::UHat);
        assert_eq!(p.flux, &u * &uh);
    }

    #[test]
    fn constant_fields_conserve_trivially() {
        let c = NCPolynomial::scalar(Coeff::from_int(7));
        let d = c.differentiate_x(PHYSICAL_FLOW);
        assert!(d.is_zero());
    }
}
