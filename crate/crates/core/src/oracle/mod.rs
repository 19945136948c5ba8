//! Numeric evaluation of symbolic expressions on explicit fields.
//!
//! Fields are either random trigonometric polynomials in `(t, x)` (every
//! derivative is exact) or the exponential solutions of the scalar
//! equations of motion. Nothing here integrates a PDE; every check is a
//! pointwise identity.

mod checks;
mod fd;

pub use checks::{
    identity_check, run_target, CheckReport, NumericReport, Target, DEFAULT_TOL, EXP_TOL,
};
pub use fd::{finite_difference_crosscheck, Direction, FdReport};

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ncpoly::{Base, Dim, FieldAtom, LaurentSeries, Mode, NCPolynomial, PolyMatrix, PHYSICAL_FLOW};

pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("no numeric value for `{0}`")]
    Unhoused(String),
}

/// Something that can put numbers on atoms.
pub trait FieldSource {
    /// Block sizes `(N, M)`.
    fn dims(&self) -> (usize, usize);
    fn atom(&self, a: &FieldAtom, t: f64, x: f64) -> Result<CMat, OracleError>;
}

/// `sum_j a_j exp(i (w_j t + k_j x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    pub modes: Vec<(Complex64, f64, f64)>,
}

impl TrigPoly {
    pub fn random(rng: &mut impl Rng, n_modes: usize) -> TrigPoly {
        let modes = (0..n_modes)
            .map(|_| {
                let amp = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
                (amp, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            })
            .collect();
        TrigPoly { modes }
    }

    /// `d^dt/dt d^dx/dx` at `(t, x)`.
    pub fn eval(&self, dt: u32, dx: u32, t: f64, x: f64) -> Complex64 {
        let i = Complex64::i();
        self.modes
            .iter()
            .map(|(a, w, k)| a * (i * w).powu(dt) * (i * k).powu(dx) * (i * (w * t + k * x)).exp())
            .sum()
    }
}

/// Random smooth fields: every entry of every field is its own
/// trigonometric polynomial; boundary constants get random values.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    fields: BTreeMap<Base, Vec<TrigPoly>>,
    constants: BTreeMap<Base, Complex64>,
}

/// Block sizes used for matrix-mode samples; `N != M` so that shape
/// errors cannot cancel.
pub const MATRIX_DIMS: (usize, usize) = (2, 3);

impl FieldSample {
    pub fn random(seed: u64, mode: Mode) -> FieldSample {
        FieldSample::random_with_point(seed, mode).0
    }

    /// A sample together with an evaluation point in `[-1, 1]^2`, both
    /// reproducible from `seed`.
    pub fn random_with_point(seed: u64, mode: Mode) -> (FieldSample, (f64, f64)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = match mode {
            Mode::Scalar => (1, 1),
            _ => MATRIX_DIMS,
        };
        let mut fields = BTreeMap::new();
        for b in Base::FIELDS {
            let (r, c) = block_dims(b, n, m);
            fields.insert(b, (0..r * c).map(|_| TrigPoly::random(&mut rng, 3)).collect());
        }
        let mut constants = BTreeMap::new();
        for s in [crate::ncpoly::Side::Plus, crate::ncpoly::Side::Minus] {
            let xi = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let ka = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            constants.insert(Base::Xi(s), xi);
            constants.insert(Base::Kappa(s), ka);
            constants.insert(Base::KappaInv(s), 1.0 / ka);
        }
        let point = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        (FieldSample { seed, n, m, fields, constants }, point)
    }

    pub fn field(&self, b: Base) -> Option<&[TrigPoly]> {
        self.fields.get(&b).map(|v| v.as_slice())
    }
}

fn block_dims(b: Base, n: usize, m: usize) -> (usize, usize) {
    match b.matrix_shape() {
        Some(s) => (dim_size(s.rows, n, m), dim_size(s.cols, n, m)),
        None => (1, 1),
    }
}

fn dim_size(d: Dim, n: usize, m: usize) -> usize {
    match d {
        Dim::One => 1,
        Dim::N => n,
        Dim::M => m,
    }
}

fn check_flow(a: &FieldAtom) -> Result<(), OracleError> {
    if a.dx > 0 && a.flow != PHYSICAL_FLOW {
        return Err(OracleError::Unhoused(a.to_string()));
    }
    Ok(())
}

impl FieldSource for FieldSample {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    fn atom(&self, a: &FieldAtom, t: f64, x: f64) -> Result<CMat, OracleError> {
        check_flow(a)?;
        if let Some(c) = self.constants.get(&a.base) {
            return Ok(CMat::from_element(1, 1, *c));
        }
        let polys = self.fields.get(&a.base).ok_or_else(|| OracleError::Unhoused(a.to_string()))?;
        let (r, c) = block_dims(a.base, self.n, self.m);
        Ok(CMat::from_row_iterator(r, c, polys.iter().map(|p| p.eval(a.dt, a.dx, t, x))))
    }
}

/// `u = alpha e^(k x + w t)`, `uh = beta e^(-k x - w t)` with
/// `w = 2 alpha beta - k^2`; `pi = uh_x`, `pih = u_x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentialSolution {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub k: Complex64,
}

impl ExponentialSolution {
    pub fn new(alpha: Complex64, beta: Complex64, k: Complex64) -> Self {
        ExponentialSolution { alpha, beta, k }
    }

    pub fn omega(&self) -> Complex64 {
        2.0 * self.alpha * self.beta - self.k * self.k
    }

    /// Parameters with moduli at most 2.
    pub fn random(rng: &mut impl Rng) -> Self {
        let mut draw = || Complex64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
        ExponentialSolution::new(draw(), draw(), draw())
    }
}

impl FieldSource for ExponentialSolution {
    fn dims(&self) -> (usize, usize) {
        (1, 1)
    }

    fn atom(&self, a: &FieldAtom, t: f64, x: f64) -> Result<CMat, OracleError> {
        check_flow(a)?;
        let (w, k) = (self.omega(), self.k);
        let phase = (k * x + w * t).exp();
        let v = match a.base {
            Base::U | Base::PiHat => {
                let dx = a.dx + u32::from(a.base == Base::PiHat);
                self.alpha * k.powu(dx) * w.powu(a.dt) * phase
            }
            Base::UHat | Base::Pi => {
                let dx = a.dx + u32::from(a.base == Base::Pi);
                self.beta * (-k).powu(dx) * (-w).powu(a.dt) / phase
            }
            _ => return Err(OracleError::Unhoused(a.to_string())),
        };
        Ok(CMat::from_element(1, 1, v))
    }
}

fn identity(size: usize) -> CMat {
    CMat::identity(size, size)
}

/// Value of a polynomial; trace-mode polynomials give a 1x1 matrix.
pub fn eval_poly(p: &NCPolynomial, src: &dyn FieldSource, t: f64, x: f64) -> Result<CMat, OracleError> {
    let (n, m) = src.dims();
    let shape = p.shape();
    let (r, c) = match p.mode() {
        Mode::Trace => (1, 1),
        _ => (dim_size(shape.rows, n, m), dim_size(shape.cols, n, m)),
    };
    let mut acc = CMat::zeros(r, c);
    for (w, coeff) in p.terms() {
        let mut prod: Option<CMat> = None;
        let mut scalar = coeff.to_complex64();
        for a in w.atoms() {
            let v = src.atom(a, t, x)?;
            if a.base.is_constant() {
                scalar *= v[(0, 0)];
                continue;
            }
            prod = Some(match prod {
                None => v,
                Some(q) => q * v,
            });
        }
        let prod = match prod {
            Some(q) => q,
            None if p.mode() == Mode::Trace => identity(1),
            None => identity(r),
        };
        let term = match p.mode() {
            Mode::Trace => CMat::from_element(1, 1, prod.trace()),
            _ => prod,
        };
        acc += term * scalar;
    }
    Ok(acc)
}

/// Value of a block matrix, entries laid out by block size.
pub fn eval_matrix(mtx: &PolyMatrix, src: &dyn FieldSource, t: f64, x: f64) -> Result<CMat, OracleError> {
    let (n, m) = src.dims();
    let sizes = |l: &[Dim]| -> Vec<usize> {
        l.iter().map(|d| if mtx.mode() == Mode::Scalar { 1 } else { dim_size(*d, n, m) }).collect()
    };
    let (rs, cs) = (sizes(mtx.row_blocks()), sizes(mtx.col_blocks()));
    let mut out = CMat::zeros(rs.iter().sum(), cs.iter().sum());
    let mut r0 = 0;
    for (i, rsz) in rs.iter().enumerate() {
        let mut c0 = 0;
        for (j, csz) in cs.iter().enumerate() {
            let e = mtx.get(i, j);
            if !e.is_zero() {
                let v = eval_poly(e, src, t, x)?;
                out.view_mut((r0, c0), (*rsz, *csz)).copy_from(&v);
            }
            c0 += csz;
        }
        r0 += rsz;
    }
    Ok(out)
}

/// `sum_k lam^k C_k` at a numeric `lam`.
pub fn eval_series(s: &LaurentSeries, lam: Complex64, src: &dyn FieldSource, t: f64, x: f64) -> Result<CMat, OracleError> {
    let mut acc = eval_matrix(&s.zero_matrix(), src, t, x)?;
    for (k, c) in s.iter() {
        acc += eval_matrix(c, src, t, x)? * lam.powi(k);
    }
    Ok(acc)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl fmt::Display for ExponentialSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha = {}, beta = {}, k = {}", self.alpha, self.beta, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn exponential_basics() {
        let e = ExponentialSolution::new(c(1.0), c(1.0), c(0.0));
        let u = parse_poly("u", Mode::Scalar).unwrap();
        assert_eq!(eval_poly(&u, &e, 0.0, 0.0).unwrap()[(0, 0)], c(1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = ExponentialSolution::random(&mut rng);
        let p = parse_poly("u_t", Mode::Scalar).unwrap();
        for _ in 0..10 {
            let (t, x) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let lhs = eval_poly(&p, &e, t, x).unwrap()[(0, 0)];
            let rhs = e.omega() * eval_poly(&u, &e, t, x).unwrap()[(0, 0)];
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn dispersion_relation() {
        let eq = parse_poly("u_t + u_x_x - 2*uh*u*u", Mode::Scalar).unwrap();
        let companion = parse_poly("-uh_t + uh_x_x - 2*u*uh*uh", Mode::Scalar).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let e = ExponentialSolution::random(&mut rng);
            let (t, x) = (rng.gen_range(-0.25..0.25), rng.gen_range(-0.25..0.25));
            assert!(max_abs(&eval_poly(&eq, &e, t, x).unwrap()) < 1e-12);
            assert!(max_abs(&eval_poly(&companion, &e, t, x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn unhoused_atoms() {
        let s = FieldSample::random(1, Mode::Matrix);
        let p = parse_poly("u*K11", Mode::Matrix).unwrap();
        assert!(matches!(eval_poly(&p, &s, 0.0, 0.0), Err(OracleError::Unhoused(_))));
    }

    #[test]
    fn matrix_shapes_and_traces() {
        let s = FieldSample::random(5, Mode::Matrix);
        let p = parse_poly("u*uh - 2", Mode::Matrix).unwrap();
        assert_eq!(eval_poly(&p, &s, 0.1, 0.2).unwrap().shape(), (3, 3));
        let a = parse_poly("tr(u*uh*pih*pi)", Mode::Trace).unwrap();
        let b = parse_poly("tr(pi*u*uh*pih)", Mode::Trace).unwrap();
        let direct = parse_poly("pi*u*uh*pih", Mode::Matrix).unwrap();
        let va = eval_poly(&a, &s, 0.3, -0.4).unwrap()[(0, 0)];
        let vb = eval_poly(&b, &s, 0.3, -0.4).unwrap()[(0, 0)];
        let vd = eval_poly(&direct, &s, 0.3, -0.4).unwrap().trace();
        assert!((va - vb).norm() < 1e-12 && (va - vd).norm() < 1e-12);
    }

    #[test]
    fn same_seed_same_sample() {
        assert_eq!(FieldSample::random_with_point(9, Mode::Scalar), FieldSample::random_with_point(9, Mode::Scalar));
        assert_ne!(FieldSample::random(9, Mode::Scalar), FieldSample::random(10, Mode::Scalar));
    }
}
