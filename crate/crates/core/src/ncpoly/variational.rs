use std::collections::{BTreeMap, BTreeSet};

use crate::coeff::Coeff;
use crate::error::AlgebraError;

use super::atom::{canonical_word, FieldAtom, Mode, Shape, Word};
use super::linsolve;
use super::poly::NCPolynomial;

/// Outcome of the total-derivative test.
#[derive(Clone, Debug)]
pub struct TotalDerivative {
    pub is_total: bool,
    /// `j` with `d/dt j = p`, present exactly when `is_total`.
    pub witness: Option<NCPolynomial>,
    /// Nonvanishing variational derivatives, keyed by the undifferentiated
    /// atom of each jet family.
    pub euler: Vec<(FieldAtom, NCPolynomial)>,
    /// Field-independent part of the input (never a total derivative).
    pub constant_part: NCPolynomial,
}

fn check_mode(p: &NCPolynomial) -> Result<(), AlgebraError> {
    if p.mode() == Mode::Matrix {
        return Err(AlgebraError::NeedsTrace);
    }
    Ok(())
}

/// `dp / da` treating every atom as an independent variable. In trace mode
/// this is the cyclic derivative, an open matrix-mode word.
pub fn partial(p: &NCPolynomial, a: &FieldAtom) -> Result<NCPolynomial, AlgebraError> {
    check_mode(p)?;
    match p.mode() {
        Mode::Scalar => {
            let mut out = NCPolynomial::zero(Mode::Scalar, Shape::SCALAR);
            for (w, c) in p.terms() {
                for (i, b) in w.atoms().iter().enumerate() {
                    if b == a {
                        let mut rest = w.atoms().to_vec();
                        rest.remove(i);
                        out.add_raw(rest, c.clone());
                    }
                }
            }
            Ok(out)
        }
        _ => {
            let shape = a.shape(Mode::Matrix)?.transposed();
            let mut out = NCPolynomial::zero(Mode::Matrix, shape);
            for (w, c) in p.terms() {
                let atoms = w.atoms();
                for (i, b) in atoms.iter().enumerate() {
                    if b == a {
                        let mut rest = atoms[i + 1..].to_vec();
                        rest.extend_from_slice(&atoms[..i]);
                        out.add_raw(rest, c.clone());
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Variational derivatives `E_f p = sum_k (-d/dt)^k dp/df_k` for every
/// jet family `f` occurring in `p`.
pub fn euler_derivatives(p: &NCPolynomial) -> Result<Vec<(FieldAtom, NCPolynomial)>, AlgebraError> {
    check_mode(p)?;
    let mut families: BTreeMap<FieldAtom, u32> = BTreeMap::new();
    for a in p.atoms() {
        if a.base.is_constant() {
            continue;
        }
        let root = FieldAtom { dt: 0, ..*a };
        let e = families.entry(root).or_insert(0);
        *e = (*e).max(a.dt);
    }
    let mut out = Vec::new();
    for (root, top) in families {
        let mut acc: Option<NCPolynomial> = None;
        for k in 0..=top {
            let d = partial(p, &FieldAtom { dt: k, ..root })?.differentiate_t_n(k);
            let d = if k % 2 == 1 { -&d } else { d };
            acc = Some(match acc {
                None => d,
                Some(prev) => prev.checked_add(&d)?,
            });
        }
        out.push((root, acc.expect("at least order 0")));
    }
    Ok(out)
}

/// Decides whether `p` is a total time derivative (modulo cyclic
/// permutations for traces) and, if so, integrates it.
pub fn is_total_t_derivative(p: &NCPolynomial) -> Result<TotalDerivative, AlgebraError> {
    check_mode(p)?;
    let constant_part = p.filter_terms(|w, _| w.atoms().iter().all(|a| a.base.is_constant()));
    let euler: Vec<_> = euler_derivatives(p)?.into_iter().filter(|(_, e)| !e.is_zero()).collect();
    let is_total = euler.is_empty() && constant_part.is_zero();
    let witness = if is_total { Some(integrate(p)?) } else { None };
    Ok(TotalDerivative { is_total, witness, euler, constant_part })
}

fn skeleton(mode: Mode, w: &Word) -> Word {
    canonical_word(mode, w.atoms().iter().map(|a| FieldAtom { dt: 0, ..*a }).collect())
}

/// All ways of distributing `weight` time derivatives over the
/// differentiable positions of `skel`.
fn distribute(skel: &[FieldAtom], weight: u32, mode: Mode) -> BTreeSet<Word> {
    let slots: Vec<usize> = (0..skel.len()).filter(|&i| !skel[i].base.is_constant()).collect();
    let mut out = BTreeSet::new();
    let mut counts = vec![0u32; slots.len()];
    fn rec(
        i: usize,
        left: u32,
        counts: &mut Vec<u32>,
        slots: &[usize],
        skel: &[FieldAtom],
        mode: Mode,
        out: &mut BTreeSet<Word>,
    ) {
        if i == slots.len() {
            if left == 0 {
                let mut atoms = skel.to_vec();
                for (s, c) in slots.iter().zip(counts.iter()) {
                    atoms[*s].dt = *c;
                }
                out.insert(canonical_word(mode, atoms));
            }
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, counts, slots, skel, mode, out);
        }
        counts[i] = 0;
    }
    rec(0, weight, &mut counts, &slots, skel, mode, &mut out);
    out
}

/// Finds `j` with `d/dt j = p` by a linear ansatz over words sharing each
/// term's undifferentiated skeleton.
fn integrate(p: &NCPolynomial) -> Result<NCPolynomial, AlgebraError> {
    let mode = p.mode();
    let mut groups: BTreeMap<(Word, u32), Vec<(Word, Coeff)>> = BTreeMap::new();
    for (w, c) in p.terms() {
        groups.entry((skeleton(mode, w), w.dt_weight())).or_default().push((w.clone(), c.clone()));
    }
    let mut witness = NCPolynomial::zero(mode, p.shape());
    for ((skel, weight), terms) in groups {
        if weight == 0 {
            return Err(AlgebraError::Ansatz(format!("term {} carries no time derivative", terms[0].0)));
        }
        let candidates: Vec<Word> = distribute(skel.atoms(), weight - 1, mode).into_iter().collect();
        let images: Vec<NCPolynomial> = candidates
            .iter()
            .map(|w| {
                let mut q = NCPolynomial::zero(mode, p.shape());
                q.add_term(w.clone(), Coeff::one());
                q.differentiate_t()
            })
            .collect();
        let mut rows: BTreeMap<Word, usize> = BTreeMap::new();
        for (w, _) in images.iter().flat_map(|q| q.terms()).chain(terms.iter().map(|(w, c)| (w, c))) {
            let n = rows.len();
            rows.entry(w.clone()).or_insert(n);
        }
        let mut a = vec![vec![Coeff::zero(); candidates.len()]; rows.len()];
        let mut b = vec![Coeff::zero(); rows.len()];
        for (j, q) in images.iter().enumerate() {
            for (w, c) in q.terms() {
                a[rows[w]][j] = c.clone();
            }
        }
        for (w, c) in &terms {
            b[rows[w]] = c.clone();
        }
        let x = linsolve::solve(a, b)
            .ok_or_else(|| AlgebraError::Ansatz(format!("no antiderivative with skeleton {skel}")))?;
        for (w, c) in candidates.into_iter().zip(x) {
            witness.add_term(w, c);
        }
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::atom::Base;

    fn a(b: Base, dt: u32) -> NCPolynomial {
        NCPolynomial::atom(Mode::Scalar, FieldAtom::with_dt(b, dt)).unwrap()
    }

    #[test]
    fn exact_derivative() {
        let p = &(&a(Base::U, 1) * &a(Base::UHat, 0)) + &(&a(Base::U, 0) * &a(Base::UHat, 1));
        let r = is_total_t_derivative(&p).unwrap();
        assert!(r.is_total);
        assert_eq!(r.witness.unwrap(), &a(Base::U, 0) * &a(Base::UHat, 0));
    }

    #[test]
    fn u_pi_is_not() {
        let p = &a(Base::U, 0) * &a(Base::Pi, 0);
        let r = is_total_t_derivative(&p).unwrap();
        assert!(!r.is_total);
        assert!(r.euler.iter().any(|(f, e)| f.base == Base::Pi && *e == a(Base::U, 0)));
    }

    #[test]
    fn second_order_witness() {
        let p = &(&a(Base::U, 2) * &a(Base::UHat, 0)) - &(&a(Base::U, 0) * &a(Base::UHat, 2));
        let r = is_total_t_derivative(&p).unwrap();
        assert!(r.is_total);
        let j = r.witness.unwrap();
        assert_eq!(j.differentiate_t(), p);
        assert_eq!(j, &(&a(Base::U, 1) * &a(Base::UHat, 0)) - &(&a(Base::U, 0) * &a(Base::UHat, 1)));
    }

    #[test]
    fn constants_are_not_derivatives() {
        let r = is_total_t_derivative(&NCPolynomial::scalar(Coeff::from_int(3))).unwrap();
        assert!(!r.is_total);
    }

    #[test]
    fn matrix_needs_trace() {
        let m = Mode::Matrix;
        let p = &NCPolynomial::field(m, Base::U) * &NCPolynomial::field(m, Base::UHat);
        assert!(matches!(is_total_t_derivative(&p), Err(AlgebraError::NeedsTrace)));
    }

    #[test]
    fn cyclic_trace_derivative() {
        let m = Mode::Matrix;
        let u = NCPolynomial::field(m, Base::U);
        let uh = NCPolynomial::field(m, Base::UHat);
        // d/dt tr(u uh u uh) = 2 tr(u_t uh u uh) + 2 tr(u uh_t u uh) cyclically
        let q = (&(&(&u * &uh) * &u) * &uh).trace().unwrap();
        let r = is_total_t_derivative(&q.differentiate_t()).unwrap();
        assert!(r.is_total);
        assert_eq!(r.witness.unwrap().differentiate_t(), q.differentiate_t());
        let bad = (&u.differentiate_t() * &uh).trace().unwrap();
        assert!(!is_total_t_derivative(&bad).unwrap().is_total);
    }
}
