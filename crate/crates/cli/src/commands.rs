use laxforge_core::boundary::{
    boundary_u, bulk_u2, extract_boundary_conditions, k_matrix, open_charge_expansion, poisson_residual,
    reflection_residual, BoundaryConditions, BoundaryParams, LaxChoice, Param, RationalMatrix,
};
use laxforge_core::hierarchy::{charges, dress_u, extract_eom, generate_u, verify_conservation, ChargeKind, LaxOperator};
use laxforge_core::ncpoly::{Mode, NCPolynomial, Side, PHYSICAL_FLOW};
use laxforge_core::oracle::{run_target, Target};
use laxforge_core::parse::{parse_poly, parse_series};
use laxforge_core::riccati::{self, GammaKind};
use laxforge_core::AlgebraError;

use crate::artifact::{Artifact, Item};

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit status 2.
    Usage(String),
    /// The computation itself failed: exit status 1.
    Compute(String),
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Scalar => "scalar",
        Mode::Matrix => "matrix",
        Mode::Trace => "trace",
    }
}

pub fn riccati(order: usize, mode: Mode) -> Result<Artifact, Failure> {
    let sol = riccati::solve_w_z(order, mode)?;
    let mut a = Artifact::new(format!("riccati-{}", mode_name(mode)), mode);
    for k in 1..=order {
        a.push(format!("W^({k})"), Item::Matrix(sol.w(k).clone()));
    }
    for k in 1..order {
        a.push(format!("Z^({k})"), Item::Matrix(sol.z(k).clone()));
    }
    let g = riccati::solve_gamma(order, GammaKind::Gamma, mode)?;
    let gh = riccati::solve_gamma(order, GammaKind::HatGamma, mode)?;
    for k in 1..=order {
        a.push(format!("Gamma^({k})"), Item::Poly(g.coeff(k).clone()));
    }
    for k in 1..=order {
        a.push(format!("HatGamma^({k})"), Item::Poly(gh.coeff(k).clone()));
    }
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Route {
    Gen,
    Dress,
}

pub fn hierarchy_u(route: Route, n: u32, mode: Mode) -> Result<Artifact, Failure> {
    let (op, tag) = match route {
        Route::Gen => (generate_u(n, mode)?, "gen"),
        Route::Dress => (dress_u(n, mode)?, "dress"),
    };
    let mut a = Artifact::new(format!("hierarchy-u-{tag}-{}", mode_name(mode)), mode);
    a.push(format!("U^({n})"), Item::Series(op.series));
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum KindArg {
    #[value(name = "H")]
    H,
    #[value(name = "I")]
    I,
}

pub fn hierarchy_charges(kind: KindArg, max_k: usize) -> Result<Artifact, Failure> {
    let (kind, tag, mode) = match kind {
        KindArg::H => (ChargeKind::H, "H", Mode::Scalar),
        KindArg::I => (ChargeKind::I, "I", Mode::Trace),
    };
    let mut a = Artifact::new(format!("charges-{tag}"), mode);
    for c in charges(kind, max_k)? {
        a.push(format!("{tag}^({})", c.k), Item::Poly(c.density));
    }
    Ok(a)
}

pub fn hierarchy_verify(k: usize) -> Result<Artifact, Failure> {
    let mut a = Artifact::new("conservation", Mode::Scalar);
    match verify_conservation(k) {
        Ok(p) => {
            a.push(format!("H^({k})"), Item::Poly(p.density));
            a.push("reduced d/dx density", Item::Poly(p.dx_density));
            a.push("flux", Item::Poly(p.flux));
            a.push("status", Item::Text(format!("d/dx H^({k}) = d/dt flux")));
        }
        Err(AlgebraError::NotConserved(why)) => {
            a.push("status", Item::Text(format!("not conserved: {why}")));
            a.ok = false;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(a)
}

pub fn hierarchy_eom(n: u32, mode: Mode) -> Result<Artifact, Failure> {
    let eom = extract_eom(&dress_u(n, mode)?, &LaxOperator::v(mode))?;
    let mut a = Artifact::new(format!("eom-{n}-{}", mode_name(mode)), mode);
    let rel: Vec<String> = eom.first_order_relations().iter().map(|(g, fx)| format!("{g} = {fx}")).collect();
    a.push("relations", Item::Text(rel.join("; ")));
    for eq in eom.evolution_equations()? {
        let lead = eq
            .terms()
            .find_map(|(w, _)| match w.atoms() {
                [x] if x.dt == 1 && x.dx == 0 => Some(x.base.name()),
                _ => None,
            })
            .unwrap_or_else(|| "?".into());
        a.push(format!("eom {lead}"), Item::Poly(eq));
    }
    Ok(a)
}

fn residual_text(r: &RationalMatrix) -> String {
    if r.is_zero() {
        return "residual ≡ 0".into();
    }
    let mut out = Vec::new();
    for i in 0..r.dim {
        for j in 0..r.dim {
            if !r.get(i, j).is_zero() {
                out.push(format!("({}, {}): {}", i + 1, j + 1, r.get(i, j)));
            }
        }
    }
    format!("residual ≠ 0 at {}", out.join("; "))
}

pub fn reflect_check() -> Artifact {
    let mut a = Artifact::new("boundary-reflect", Mode::Scalar);
    for side in [Side::Plus, Side::Minus] {
        let r = reflection_residual(&k_matrix(side));
        a.ok &= r.is_zero();
        a.push(format!("K{}", side.sign()), Item::Text(residual_text(&r)));
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum WhichArg {
    #[value(name = "V")]
    V,
    #[value(name = "U")]
    U,
}

pub fn poisson_check(which: WhichArg) -> Result<Artifact, Failure> {
    let (w, tag) = match which {
        WhichArg::V => (LaxChoice::V, "V"),
        WhichArg::U => (LaxChoice::U, "U"),
    };
    let mut a = Artifact::new(format!("boundary-poisson-{tag}"), Mode::Scalar);
    match poisson_residual(w) {
        Ok(r) => {
            a.ok = r.is_zero();
            a.push(tag, Item::Text(residual_text(&r)));
        }
        Err(AlgebraError::Inconsistent(why)) => {
            a.ok = false;
            a.push(tag, Item::Text(why));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(a)
}

/// `sym` keeps the constant symbolic; anything else must be a number.
pub fn parse_param(name: &str, raw: Option<&str>) -> Result<Param, Failure> {
    match raw.map(str::trim) {
        None | Some("sym") => Ok(Param::Symbolic),
        Some(s) => {
            let p = parse_poly(s, Mode::Scalar).map_err(|e| Failure::Usage(format!("{name}: {e}")))?;
            if !p.is_constant() {
                return Err(Failure::Usage(format!("{name} must be a number, got `{s}`")));
            }
            Ok(Param::Value(p.constant_term()))
        }
    }
}

pub fn boundary_charges(params: &BoundaryParams, order: usize) -> Result<Artifact, Failure> {
    let oc = open_charge_expansion(params, order)?;
    let mut a = Artifact::new("boundary-charges", Mode::Scalar);
    for k in 1..=order {
        a.push(format!("bulk^({k})"), Item::Poly(oc.bulk[k - 1].clone()));
        a.push(format!("H+^({k})"), Item::Poly(oc.plus[k - 1].clone()));
        a.push(format!("H-^({k})"), Item::Poly(oc.minus[k - 1].clone()));
        let (cp, cm) = &oc.constants[k - 1];
        a.push(format!("constants^({k})"), Item::Text(format!("+: {cp}; -: {cm}")));
    }
    Ok(a)
}

fn bc_items(a: &mut Artifact, bc: &BoundaryConditions, tag: char) {
    a.push(format!("bc{tag}"), Item::Text(bc.equation_strings().join("; ")));
    let flags: Vec<String> = bc.flags.iter().map(|f| f.to_string()).collect();
    a.push(format!("flags{tag}"), Item::Text(flags.join("; ")));
}

pub fn extract_bc(params: &BoundaryParams) -> Result<Artifact, Failure> {
    let bulk = bulk_u2();
    let mut a = Artifact::new("boundary-bc", Mode::Scalar);
    for side in [Side::Plus, Side::Minus] {
        let bc = extract_boundary_conditions(&bulk, &boundary_u(side, params)?)?;
        bc_items(&mut a, &bc, side.sign());
    }
    Ok(a)
}

pub fn verify_numeric(target: Target, trials: usize, tol: f64, seed: u64) -> Result<Artifact, Failure> {
    if trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let report = run_target(target, trials, tol, seed)?;
    let mut a = Artifact::new("verify-numeric", Mode::Scalar);
    a.ok = report.pass;
    let json = serde_json::to_value(&report).expect("serializable");
    a.push("report", Item::Report(json, report.to_string()));
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExprOp {
    Show,
    Dt,
    Dx,
    Trace,
}

pub fn expr(src: &str, mode: Mode, op: ExprOp) -> Result<Artifact, Failure> {
    let s = parse_series(src, mode).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut a = Artifact::new("expr", mode);
    let lam_free = s.iter().all(|(k, _)| k == 0);
    if lam_free {
        let p: NCPolynomial = s.coeff(0)?.get(0, 0).clone();
        let out = match op {
            ExprOp::Show => p,
            ExprOp::Dt => p.differentiate_t(),
            ExprOp::Dx => p.differentiate_x(PHYSICAL_FLOW),
            ExprOp::Trace => p.trace()?,
        };
        a.mode = out.mode();
        a.push("expr", Item::Poly(out));
    } else {
        let out = match op {
            ExprOp::Show => s,
            ExprOp::Dt => s.differentiate_t(),
            ExprOp::Dx => s.differentiate_x(PHYSICAL_FLOW),
            ExprOp::Trace => s.try_map(|m| m.try_map(|p| p.trace()))?,
        };
        a.push("expr", Item::Series(out));
    }
    Ok(a)
}
