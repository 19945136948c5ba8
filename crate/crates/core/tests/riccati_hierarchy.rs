use laxforge_core::hierarchy::{
    charges, dress_u, extract_eom, generate_u, verify_conservation, zero_curvature_residual, ChargeKind, LaxOperator,
};
use laxforge_core::json::{from_json, to_json};
use laxforge_core::ncpoly::{substitute, LaurentSeries, Mode, NCPolynomial, PolyMatrix};
use laxforge_core::parse::parse_poly;
use laxforge_core::riccati::{solve_gamma, solve_w_z, GammaKind};
use laxforge_core::AlgebraError;

#[test]
fn riccati_residual_vanishes_at_higher_orders() {
    for (mode, order) in [(Mode::Scalar, 7), (Mode::Matrix, 6)] {
        let sol = solve_w_z(order, mode).unwrap();
        assert!(sol.residual_vanishes().unwrap(), "{mode:?} order {order}");
        assert!(sol.w_series().is_exact());
    }
}

#[test]
fn scalar_solution_is_the_image_of_the_matrix_one() {
    let s = solve_w_z(5, Mode::Scalar).unwrap();
    let m = solve_w_z(5, Mode::Matrix).unwrap();
    for k in 1..=5 {
        assert_eq!(m.w(k).to_scalar(), *s.w(k), "W^({k})");
    }
    for k in 1..5 {
        assert_eq!(m.z(k).to_scalar(), *s.z(k), "Z^({k})");
    }
}

#[test]
fn gamma_routes_match_w_blocks() {
    let w = solve_w_z(5, Mode::Matrix).unwrap();
    let g = solve_gamma(5, GammaKind::Gamma, Mode::Matrix).unwrap();
    let gh = solve_gamma(5, GammaKind::HatGamma, Mode::Matrix).unwrap();
    assert!(g.residual_vanishes().unwrap());
    assert!(gh.residual_vanishes().unwrap());
    for k in 1..=5 {
        assert_eq!(g.coeff(k), w.w(k).get(1, 0));
        assert_eq!(gh.coeff(k), w.w(k).get(0, 1));
    }
}

#[test]
fn solutions_survive_json() {
    let sol = solve_w_z(4, Mode::Matrix).unwrap();
    let s = sol.w_series();
    let back: LaurentSeries = from_json(&to_json(&s)).unwrap();
    assert_eq!(back, s);
    let z: PolyMatrix = from_json(&to_json(sol.z(3))).unwrap();
    assert_eq!(&z, sol.z(3));
    let g = solve_gamma(4, GammaKind::Gamma, Mode::Matrix).unwrap();
    let p: NCPolynomial = from_json(&to_json(g.coeff(4))).unwrap();
    assert_eq!(&p, g.coeff(4));
}

#[test]
fn every_flow_is_compatible_with_v_on_shell() {
    for mode in [Mode::Scalar, Mode::Matrix] {
        let v = LaxOperator::v(mode);
        for n in 1..=4 {
            let u = generate_u(n, mode).unwrap();
            let eom = extract_eom(&u, &v).unwrap();
            let r = zero_curvature_residual(&u, &v).unwrap();
            for (_, m) in r.iter() {
                for e in m.entries() {
                    assert!(substitute(e, &eom.rules).unwrap().is_zero(), "{mode:?} n = {n}");
                }
            }
        }
    }
}

#[test]
fn routes_give_the_same_flows() {
    for n in 1..=4 {
        let g = generate_u(n, Mode::Matrix).unwrap();
        let d = dress_u(n, Mode::Matrix).unwrap();
        let v = LaxOperator::v(Mode::Matrix);
        assert_eq!(extract_eom(&g, &v).unwrap().solved, extract_eom(&d, &v).unwrap().solved, "n = {n}");
    }
}

#[test]
fn charges_conserve_through_fourth_order() {
    let hs = charges(ChargeKind::H, 4).unwrap();
    for c in &hs {
        let p = verify_conservation(c.k).unwrap();
        assert_eq!(p.density, c.density);
        assert!(!p.flux.is_zero());
    }
}

#[test]
fn trace_charges_reduce_to_scalar_ones() {
    let hs = charges(ChargeKind::H, 4).unwrap();
    let is = charges(ChargeKind::I, 4).unwrap();
    for (h, i) in hs.iter().zip(&is) {
        assert_eq!(i.density.mode(), Mode::Trace);
        assert_eq!(i.density.to_scalar(), h.density, "k = {}", h.k);
    }
}

#[test]
fn non_density_is_not_conserved() {
    // u*uh is the flux of H^(1), not a density.
    let eom = extract_eom(&dress_u(2, Mode::Scalar).unwrap(), &LaxOperator::v(Mode::Scalar)).unwrap();
    let rho = parse_poly("u*uh", Mode::Scalar).unwrap();
    let dx = substitute(&rho.differentiate_x(2), &eom.rules).unwrap();
    let verdict = laxforge_core::ncpoly::is_total_t_derivative(&dx).unwrap();
    assert!(!verdict.is_total);
    assert!(verdict.witness.is_none());
    assert!(!verdict.euler.is_empty());
}

#[test]
fn order_zero_is_an_error() {
    assert!(solve_w_z(0, Mode::Scalar).is_err());
    assert!(matches!(solve_gamma(0, GammaKind::Gamma, Mode::Matrix), Err(AlgebraError::Layout(_))));
}
