use laxforge_core::boundary::{
    boundary_u, bulk_u2, extract_boundary_conditions, k_matrix, open_charge_expansion, poisson_residual,
    reflection_residual, BoundaryParams, CommPoly, LaxChoice, Param, Var,
};
use laxforge_core::hierarchy::{charges, ChargeKind};
use laxforge_core::ncpoly::{substitute, Base, FieldAtom, NCPolynomial, Rule, Side};
use laxforge_core::Coeff;

fn values() -> BoundaryParams {
    BoundaryParams {
        xi_plus: Param::Value(Coeff::from_frac(1, 3)),
        xi_minus: Param::Value(Coeff::gaussian(-2, 1)),
        kappa_plus: Param::Value(Coeff::from_int(2)),
        kappa_minus: Param::Value(Coeff::gaussian(0, 3)),
    }
}

/// Symbolic constants replaced by the numbers in `values()`.
fn specialize(p: &NCPolynomial) -> NCPolynomial {
    let c = |x: Coeff| NCPolynomial::scalar(x);
    let rules = vec![
        Rule::atom(FieldAtom::new(Base::Xi(Side::Plus)), c(Coeff::from_frac(1, 3))).unwrap(),
        Rule::atom(FieldAtom::new(Base::Xi(Side::Minus)), c(Coeff::gaussian(-2, 1))).unwrap(),
        Rule::atom(FieldAtom::new(Base::Kappa(Side::Plus)), c(Coeff::from_int(2))).unwrap(),
        Rule::atom(FieldAtom::new(Base::Kappa(Side::Minus)), c(Coeff::gaussian(0, 3))).unwrap(),
        Rule::atom(FieldAtom::new(Base::KappaInv(Side::Plus)), c(Coeff::from_frac(1, 2))).unwrap(),
        Rule::atom(FieldAtom::new(Base::KappaInv(Side::Minus)), c(Coeff::gaussian(0, 3).inv().unwrap())).unwrap(),
    ];
    substitute(p, &rules).unwrap()
}

#[test]
fn numeric_constants_commute_with_the_expansion() {
    let sym = open_charge_expansion(&BoundaryParams::symbolic(), 4).unwrap();
    let num = open_charge_expansion(&values(), 4).unwrap();
    for k in 1..=4 {
        for side in [Side::Plus, Side::Minus] {
            assert_eq!(specialize(sym.boundary_term(side, k)), *num.boundary_term(side, k), "k = {k}");
        }
        assert_eq!(sym.bulk[k - 1], num.bulk[k - 1]);
    }
}

#[test]
fn bulk_part_is_the_even_charges() {
    let oc = open_charge_expansion(&BoundaryParams::symbolic(), 4).unwrap();
    let hs = charges(ChargeKind::H, 4).unwrap();
    for k in 1..=4 {
        if k % 2 == 0 {
            assert_eq!(oc.bulk[k - 1], hs[k - 1].density);
        } else {
            assert!(oc.bulk[k - 1].is_zero());
        }
    }
}

#[test]
fn numeric_boundary_values() {
    let p = values();
    let bulk = bulk_u2();
    let plus = extract_boundary_conditions(&bulk, &boundary_u(Side::Plus, &p).unwrap()).unwrap();
    assert_eq!(plus.equation_strings(), vec!["u(tau) = 0", "uh(tau) = 1/6"]);
    let minus = extract_boundary_conditions(&bulk, &boundary_u(Side::Minus, &p).unwrap()).unwrap();
    assert_eq!(minus.equation_strings(), vec!["uh(-tau) = 0", "u(-tau) = (1/3+2/3*i)"]);
    for bc in [&plus, &minus] {
        assert_eq!(bc.flags.len(), 1);
        assert_eq!(bc.flags[0].power, 1);
        assert!(bc.flags[0].coefficient.is_constant());
    }
}

#[test]
fn reflection_holds_for_specialized_constants() {
    for side in [Side::Plus, Side::Minus] {
        let k = k_matrix(side);
        let (xi, ka) = match side {
            Side::Plus => (Var::XiPlus, Var::KappaPlus),
            Side::Minus => (Var::XiMinus, Var::KappaMinus),
        };
        let k = k
            .substitute(xi, &CommPoly::constant(Coeff::from_frac(-5, 7)))
            .substitute(ka, &CommPoly::constant(Coeff::gaussian(1, 1)));
        assert!(reflection_residual(&k).is_zero());
    }
}

#[test]
fn both_linear_algebras_close() {
    for w in [LaxChoice::V, LaxChoice::U] {
        assert!(poisson_residual(w).unwrap().is_zero());
    }
}
