//! Randomized pointwise checks of the symbolic results.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{finite_difference_crosscheck, Direction, eval_poly, eval_series, max_abs, CMat, ExponentialSolution, FieldSample, FieldSource};
use crate::boundary::{bracket_table, k_matrix, CommPoly, LaxChoice, Var};
use crate::error::AlgebraError;
use crate::hierarchy::{charges, dress_u, extract_eom, generate_u, verify_conservation, zero_curvature_residual, ChargeKind, LaxOperator};
use crate::ncpoly::{LaurentSeries, Mode, NCPolynomial, Side, PHYSICAL_FLOW};
use crate::riccati::{self, GammaKind};

pub const DEFAULT_TOL: f64 = 1e-9;
/// Tolerance on the exponential solutions, evaluated close to the origin.
pub const EXP_TOL: f64 = 1e-12;

const RICCATI_ORDER: usize = 5;
const MAX_FLOW: u32 = 4;
const MAX_CHARGE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Riccati,
    Eom,
    Conservation,
    Boundary,
    Hierarchy,
    All,
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "riccati" => Target::Riccati,
            "eom" => Target::Eom,
            "conservation" => Target::Conservation,
            "boundary" => Target::Boundary,
            "hierarchy" => Target::Hierarchy,
            "all" => Target::All,
            _ => return Err(format!("unknown target `{s}`")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub tol: f64,
    pub max_residual: f64,
    /// Sample seed of the worst trial; `FieldSample::random_with_point`
    /// (or the exponential draw) reproduces it.
    pub worst_seed: u64,
    /// `(t, x)`; the algebra checks record `(Re lam, Re mu)` instead.
    pub worst_point: [f64; 2],
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericReport {
    pub target: Target,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

impl std::fmt::Display for NumericReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<40} max {:.3e} (tol {:.0e}, seed {}, t = {:.4}, x = {:.4})",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.max_residual,
                c.tol,
                c.worst_seed,
                c.worst_point[0],
                c.worst_point[1]
            )?;
        }
        write!(f, "{}", if self.pass { "all checks passed" } else { "some checks failed" })
    }
}

/// Per-check seed stream, so adding a check does not shift the others.
fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

struct Run {
    report: CheckReport,
}

impl Run {
    fn new(name: impl Into<String>, trials: usize, tol: f64) -> Self {
        Run {
            report: CheckReport {
                name: name.into(),
                trials,
                tol,
                max_residual: 0.0,
                worst_seed: 0,
                worst_point: [0.0, 0.0],
                pass: true,
            },
        }
    }

    fn record(&mut self, r: f64, seed: u64, t: f64, x: f64) {
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if r >= self.report.max_residual {
            self.report.max_residual = r;
            self.report.worst_seed = seed;
            self.report.worst_point = [t, x];
        }
    }

    fn finish(mut self) -> CheckReport {
        self.report.pass = self.report.max_residual <= self.report.tol;
        self.report
    }
}

/// Residual function on a random trig sample at `(t, x)`.
type Residual<'a> = dyn Fn(&dyn FieldSource, f64, f64) -> Result<f64, AlgebraError> + 'a;

fn on_trig(name: &str, mode: Mode, trials: usize, tol: f64, seed: u64, f: &Residual<'_>) -> Result<CheckReport, AlgebraError> {
    let mut rng = stream(seed, name);
    let mut run = Run::new(name, trials, tol);
    for _ in 0..trials {
        let s = rng.gen::<u64>();
        let (sample, (t, x)) = FieldSample::random_with_point(s, mode);
        run.record(f(&sample, t, x)?, s, t, x);
    }
    Ok(run.finish())
}

/// Exponential solutions, each evaluated at a few points in `[-1/4, 1/4]^2`.
fn on_exponential(name: &str, trials: usize, tol: f64, seed: u64, f: &Residual<'_>) -> Result<CheckReport, AlgebraError> {
    let mut rng = stream(seed, name);
    let mut run = Run::new(name, trials, tol);
    for _ in 0..trials {
        let s = rng.gen::<u64>();
        let mut draw = ChaCha8Rng::seed_from_u64(s);
        let sol = ExponentialSolution::random(&mut draw);
        let (t, x) = (draw.gen_range(-0.25..0.25), draw.gen_range(-0.25..0.25));
        run.record(f(&sol, t, x)?, s, t, x);
    }
    Ok(run.finish())
}

fn oracle_err(e: super::OracleError) -> AlgebraError {
    AlgebraError::Unsupported(e.to_string())
}

fn ev(p: &NCPolynomial, src: &dyn FieldSource, t: f64, x: f64) -> Result<CMat, AlgebraError> {
    eval_poly(p, src, t, x).map_err(oracle_err)
}

fn ev_series(s: &LaurentSeries, lam: Complex64, src: &dyn FieldSource, t: f64, x: f64) -> Result<CMat, AlgebraError> {
    eval_series(s, lam, src, t, x).map_err(oracle_err)
}

/// `lhs - rhs` on random trig samples of `lhs`'s mode.
pub fn identity_check(
    name: &str,
    lhs: &NCPolynomial,
    rhs: &NCPolynomial,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, AlgebraError> {
    let mode = if lhs.mode() == Mode::Scalar { Mode::Scalar } else { Mode::Matrix };
    on_trig(name, mode, trials, tol, seed, &|src, t, x| Ok(max_abs(&(ev(lhs, src, t, x)? - ev(rhs, src, t, x)?))))
}

fn random_lambda(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(4.0..12.0), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn mode_tag(mode: Mode) -> &'static str {
    match mode {
        Mode::Scalar => "scalar",
        Mode::Matrix => "matrix",
        Mode::Trace => "trace",
    }
}

/// The Riccati residual of the numeric partial sum `W(lam)` against the
/// terms the symbolic residual keeps below the truncation order.
fn riccati_checks(trials: usize, tol: f64, seed: u64) -> Result<Vec<CheckReport>, AlgebraError> {
    let mut out = Vec::new();
    for mode in [Mode::Scalar, Mode::Matrix] {
        let sol = riccati::solve_w_z(RICCATI_ORDER, mode)?;
        let w = sol.w_series();
        let wt = w.differentiate_t();
        let v = riccati::v_operator(mode);
        let (vd, va) = (v.diagonal_part(), v.off_diagonal_part());
        // what a correct solution leaves behind: orders below 2 - order
        let full = sol.residual()?;
        let cut = 2 - RICCATI_ORDER as i32;
        let tail = LaurentSeries::from_coeffs(&full.zero_matrix(), full.iter().filter(|(k, _)| *k < cut).map(|(k, m)| (k, m.clone())), None)?;
        let name = format!("riccati residual {} order {}", mode_tag(mode), RICCATI_ORDER);
        let lam_rng = std::cell::RefCell::new(stream(seed, &format!("{name} lambda")));
        out.push(on_trig(&name, mode, trials, tol, seed, &|src, t, x| {
            let lam = random_lambda(&mut *lam_rng.borrow_mut());
            let w = ev_series(&w, lam, src, t, x)?;
            let wt = ev_series(&wt, lam, src, t, x)?;
            let vd = ev_series(&vd, lam, src, t, x)?;
            let va = ev_series(&va, lam, src, t, x)?;
            let numeric = &wt + &w * &vd - &vd * &w + &w * &va * &w - &va;
            let kept = ev_series(&tail, lam, src, t, x)?;
            Ok(max_abs(&(numeric - kept)))
        })?);
        let gamma = riccati::solve_gamma(RICCATI_ORDER, GammaKind::Gamma, mode)?;
        let hat = riccati::solve_gamma(RICCATI_ORDER, GammaKind::HatGamma, mode)?;
        for k in 1..=RICCATI_ORDER {
            out.push(identity_check(
                &format!("Gamma^({k}) = W^({k})_21 {}", mode_tag(mode)),
                gamma.coeff(k),
                sol.w(k).get(1, 0),
                trials,
                tol,
                seed,
            )?);
            out.push(identity_check(
                &format!("Gamma^^({k}) = W^({k})_12 {}", mode_tag(mode)),
                hat.coeff(k),
                sol.w(k).get(0, 1),
                trials,
                tol,
                seed,
            )?);
        }
    }
    Ok(out)
}

fn hierarchy_checks(trials: usize, tol: f64, seed: u64) -> Result<Vec<CheckReport>, AlgebraError> {
    let mut out = Vec::new();
    for mode in [Mode::Scalar, Mode::Matrix] {
        for n in 1..=MAX_FLOW {
            let gen = generate_u(n, mode)?.series;
            let dressed = dress_u(n, mode)?.series;
            let name = format!("generated U^({n}) = dressed U^({n}) {}", mode_tag(mode));
            let lam_rng = std::cell::RefCell::new(stream(seed, &format!("{name} lambda")));
            out.push(on_trig(&name, mode, trials, tol, seed, &|src, t, x| {
                let lam = random_lambda(&mut *lam_rng.borrow_mut());
                let g = ev_series(&gen, lam, src, t, x)?;
                let d = ev_series(&dressed, lam, src, t, x)?;
                let shift = CMat::identity(g.nrows(), g.ncols()) * (lam.powi(n as i32 - 1) / 2.0);
                Ok(max_abs(&(g - d - shift)))
            })?);
        }
    }
    let h = charges(ChargeKind::H, MAX_CHARGE)?;
    let i = charges(ChargeKind::I, MAX_CHARGE)?;
    let g = riccati::solve_gamma(MAX_CHARGE + 1, GammaKind::Gamma, Mode::Matrix)?;
    let (uh, pi) = (
        NCPolynomial::field(Mode::Matrix, crate::ncpoly::Base::UHat),
        NCPolynomial::field(Mode::Matrix, crate::ncpoly::Base::Pi),
    );
    for k in 1..=MAX_CHARGE {
        // the trace is taken numerically here, not by word rotation
        let (a, b) = (g.coeff(k + 1).clone(), g.coeff(k).clone());
        let density = i[k - 1].density.clone();
        out.push(on_trig(&format!("I^({k}) = tr(uh Gamma^({}) + pi Gamma^({k}))", k + 1), Mode::Matrix, trials, tol, seed, &|src, t, x| {
            let direct = ev(&uh, src, t, x)? * ev(&a, src, t, x)? + ev(&pi, src, t, x)? * ev(&b, src, t, x)?;
            Ok((ev(&density, src, t, x)?[(0, 0)] - direct.trace()).norm())
        })?);
        out.push(identity_check(&format!("I^({k}) at N = M = 1 equals H^({k})"), &i[k - 1].density.to_scalar(), &h[k - 1].density, trials, tol, seed)?);
    }
    Ok(out)
}

fn eom_checks(trials: usize, seed: u64) -> Result<Vec<CheckReport>, AlgebraError> {
    let mode = Mode::Scalar;
    let u2 = dress_u(PHYSICAL_FLOW, mode)?;
    let v = LaxOperator::v(mode);
    let eom = extract_eom(&u2, &v)?;
    let mut out = Vec::new();
    for (idx, eq) in eom.evolution_equations()?.iter().enumerate() {
        let name = format!("evolution equation {} on exponentials", idx + 1);
        out.push(on_exponential(&name, trials, EXP_TOL, seed, &|src, t, x| Ok(max_abs(&ev(eq, src, t, x)?)))?);
    }
    for (g, fx) in eom.first_order_relations() {
        let lhs = NCPolynomial::atom(mode, g)?;
        let rhs = NCPolynomial::atom(mode, fx)?;
        out.push(on_exponential(&format!("{g} = {fx} on exponentials"), trials, EXP_TOL, seed, &|src, t, x| {
            Ok(max_abs(&(ev(&lhs, src, t, x)? - ev(&rhs, src, t, x)?)))
        })?);
    }
    let zc = zero_curvature_residual(&u2, &v)?;
    let name = "zero curvature of (U^(2), V) on exponentials";
    let lam_rng = std::cell::RefCell::new(stream(seed, &format!("{name} lambda")));
    out.push(on_exponential(name, trials, EXP_TOL, seed, &|src, t, x| {
        let lam = random_lambda(&mut *lam_rng.borrow_mut()) / 4.0;
        Ok(max_abs(&ev_series(&zc, lam, src, t, x)?))
    })?);
    Ok(out)
}

fn conservation_checks(trials: usize, tol: f64, seed: u64) -> Result<Vec<CheckReport>, AlgebraError> {
    let mut out = Vec::new();
    for k in 1..=MAX_CHARGE {
        let proof = verify_conservation(k)?;
        let flux_t = proof.flux.differentiate_t();
        out.push(identity_check(&format!("reduced d/dx H^({k}) = d/dt j^({k})"), &proof.dx_density, &flux_t, trials, tol, seed)?);
        let raw = proof.density.differentiate_x(PHYSICAL_FLOW);
        out.push(on_exponential(&format!("d/dx H^({k}) = d/dt j^({k}) on exponentials"), trials, EXP_TOL * 10.0, seed, &|src, t, x| {
            Ok(max_abs(&(ev(&raw, src, t, x)? - ev(&flux_t, src, t, x)?)))
        })?);
    }
    Ok(out)
}

fn comm_values(rng: &mut impl Rng) -> impl Fn(Var) -> Complex64 {
    let vals: Vec<Complex64> = Var::ALL
        .iter()
        .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect();
    move |v| vals[Var::ALL.iter().position(|w| *w == v).expect("listed")]
}

fn numeric_k(side: Side, lam: Complex64, val: &impl Fn(Var) -> Complex64) -> CMat {
    let k = k_matrix(side);
    let at = |v: Var| if v == Var::Lam { lam } else { val(v) };
    DMatrix::from_fn(2, 2, |i, j| k.get(i, j).eval(&at))
}

fn perm() -> CMat {
    let mut p = CMat::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            p[(a * 2 + b, b * 2 + a)] = Complex64::new(1.0, 0.0);
        }
    }
    p
}

fn boundary_checks(trials: usize, tol: f64, seed: u64) -> Result<Vec<CheckReport>, AlgebraError> {
    let mut out = Vec::new();
    let id = CMat::identity(2, 2);
    for side in [Side::Plus, Side::Minus] {
        let name = format!("reflection equation K{}", side.sign());
        let mut rng = stream(seed, &name);
        let mut run = Run::new(&name, trials, tol);
        for _ in 0..trials {
            let s = rng.gen::<u64>();
            let mut r = ChaCha8Rng::seed_from_u64(s);
            let val = comm_values(&mut r);
            let (lam, mu) = (val(Var::Lam), val(Var::Mu));
            let (kl, km) = (numeric_k(side, lam, &val), numeric_k(side, mu, &val));
            let (k1, k2) = (kl.kronecker(&id), id.kronecker(&km));
            let p = perm();
            let (rm, rp) = (&p / (lam - mu), &p / (lam + mu));
            let res = &rm * &k1 * &k2 - &k1 * &k2 * &rm + &k1 * &rp * &k2 - &k2 * &rp * &k1;
            run.record(max_abs(&res), s, lam.re, mu.re);
        }
        out.push(run.finish());
    }
    for which in [LaxChoice::V, LaxChoice::U] {
        let name = format!("linear Poisson algebra of {which:?}");
        let table = bracket_table(which);
        let l: Vec<CommPoly> = which.matrix();
        let mut rng = stream(seed, &name);
        let mut run = Run::new(&name, trials, tol);
        for _ in 0..trials {
            let s = rng.gen::<u64>();
            let mut r = ChaCha8Rng::seed_from_u64(s);
            let val = comm_values(&mut r);
            let (lam, mu) = (val(Var::Lam), val(Var::Mu));
            let val = &val;
            let at = |z: Complex64| move |v: Var| if v == Var::Lam { z } else { val(v) };
            let l_lam = DMatrix::from_fn(2, 2, |i, j| l[i * 2 + j].eval(&at(lam)));
            let l_mu = DMatrix::from_fn(2, 2, |i, j| l[i * 2 + j].eval(&at(mu)));
            let sum = l_lam.kronecker(&id) + id.kronecker(&l_mu);
            let p = perm();
            let rhs = (&p * &sum - &sum * &p) / (lam - mu);
            let lhs = DMatrix::from_fn(4, 4, |i, j| table.get(i, j).eval(&val));
            run.record(max_abs(&(lhs - rhs)), s, lam.re, mu.re);
        }
        out.push(run.finish());
    }
    Ok(out)
}

/// Exact trig derivatives against central differences on the `u` field.
/// The second-difference step is `FD_HK / k`, with `k` the largest
/// frequency along the direction, so truncation error dominates roundoff
/// even for slowly varying samples.
const FD_HK: f64 = 5e-2;

fn fd_step(f: &super::TrigPoly, dir: Direction) -> f64 {
    let k = f
        .modes
        .iter()
        .map(|&(_, w, k)| match dir {
            Direction::T => w.abs(),
            Direction::X => k.abs(),
        })
        .fold(0.0, f64::max);
    FD_HK / k.max(1e-3)
}

/// 3x3 grid of points with spacing 0.3 starting at `(t, x)`.
fn fd_grid(t: f64, x: f64) -> Vec<(f64, f64)> {
    (0..9).map(|j| (t + 0.3 * (j / 3) as f64, x + 0.3 * (j % 3) as f64)).collect()
}

fn finite_difference_checks(trials: usize, seed: u64) -> Vec<CheckReport> {
    let mut out = Vec::new();
    let name = "central difference d/dt u, h = 1e-4";
    let mut rng = stream(seed, name);
    let mut run = Run::new(name, trials, 1e-7);
    for _ in 0..trials {
        let s = rng.gen::<u64>();
        let (sample, (t, x)) = FieldSample::random_with_point(s, Mode::Scalar);
        let f = &sample.field(crate::ncpoly::Base::U).expect("u is sampled")[0];
        let r = finite_difference_crosscheck(f, Direction::T, 1, &[(t, x)], 1e-4);
        let scale = f.eval(1, 0, t, x).norm().max(1.0);
        run.record(r.errors[0] / scale, s, t, x);
    }
    out.push(run.finish());
    for (dir, tag) in [(Direction::T, "t"), (Direction::X, "x")] {
        let name = format!("second difference d2/d{tag}2 u converges at order 2, h k = {FD_HK:e}");
        let mut rng = stream(seed, &name);
        let mut run = Run::new(&name, trials, 0.2);
        for _ in 0..trials {
            let s = rng.gen::<u64>();
            let (sample, (t, x)) = FieldSample::random_with_point(s, Mode::Scalar);
            let f = &sample.field(crate::ncpoly::Base::U).expect("u is sampled")[0];
            let r = finite_difference_crosscheck(f, dir, 2, &fd_grid(t, x), fd_step(f, dir));
            run.record((r.ratio - 4.0).abs() / 4.0, s, t, x);
        }
        out.push(run.finish());
    }
    out
}

/// Runs every check of `target` and collects a deterministic report.
pub fn run_target(target: Target, trials: usize, tol: f64, seed: u64) -> Result<NumericReport, AlgebraError> {
    let all = target == Target::All;
    let mut checks = Vec::new();
    if all || target == Target::Riccati {
        checks.extend(riccati_checks(trials, tol, seed)?);
    }
    if all || target == Target::Hierarchy {
        checks.extend(hierarchy_checks(trials, tol, seed)?);
    }
    if all || target == Target::Eom {
        checks.extend(eom_checks(trials, seed)?);
    }
    if all || target == Target::Conservation {
        checks.extend(conservation_checks(trials, tol, seed)?);
    }
    if all || target == Target::Boundary {
        checks.extend(boundary_checks(trials, tol, seed)?);
    }
    if all {
        checks.extend(finite_difference_checks(trials, seed));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(NumericReport { target, seed, trials, checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn identity_check_catches_a_wrong_sign() {
        let a = parse_poly("u*pi - uh*pih", Mode::Scalar).unwrap();
        let b = parse_poly("u*pi + uh*pih", Mode::Scalar).unwrap();
        assert!(identity_check("same", &a, &a, 20, DEFAULT_TOL, 1).unwrap().pass);
        assert!(!identity_check("flipped", &a, &b, 20, DEFAULT_TOL, 1).unwrap().pass);
    }

    #[test]
    fn matrix_order_matters_numerically() {
        let a = parse_poly("u*uh*u", Mode::Matrix).unwrap();
        let b = parse_poly("u*u_t*uh", Mode::Scalar).unwrap();
        let c = parse_poly("u*uh*u_t", Mode::Scalar).unwrap();
        assert!(identity_check("scalar commutes", &b, &c, 10, DEFAULT_TOL, 2).unwrap().pass);
        let d = parse_poly("u*uh*u_t", Mode::Matrix).unwrap();
        let e = parse_poly("u_t*uh*u", Mode::Matrix).unwrap();
        assert!(!identity_check("matrix does not", &d, &e, 10, DEFAULT_TOL, 2).unwrap().pass);
        assert!(identity_check("trivial", &a, &a, 3, DEFAULT_TOL, 2).unwrap().pass);
    }

    #[test]
    fn riccati_and_boundary_targets_pass() {
        for target in [Target::Riccati, Target::Boundary] {
            let r = run_target(target, 8, DEFAULT_TOL, 7).unwrap();
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn report_is_deterministic() {
        let a = run_target(Target::Boundary, 5, DEFAULT_TOL, 42).unwrap();
        let b = run_target(Target::Boundary, 5, DEFAULT_TOL, 42).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
