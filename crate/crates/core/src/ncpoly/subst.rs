use std::fmt;

use crate::coeff::Coeff;
use crate::error::AlgebraError;

use super::atom::{FieldAtom, Mode, Word};
use super::matrix::PolyMatrix;
use super::poly::NCPolynomial;
use super::series::LaurentSeries;

/// Default number of rewrite passes before a rule set is declared
/// non-terminating.
pub const DEFAULT_MAX_PASSES: usize = 64;

/// Left-hand side of a rewrite rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// A single atom. With prolongation, atoms carrying extra `t`/`x`
    /// derivatives also match and the replacement is differentiated.
    Atom { atom: FieldAtom, prolong: bool },
    /// A product of atoms: a contiguous subword in matrix/trace mode, a
    /// sub-multiset in scalar mode.
    Word(Vec<FieldAtom>),
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Atom { atom, .. } => write!(f, "{atom}"),
            Pattern::Word(w) => write!(f, "{}", Word(w.clone())),
        }
    }
}

/// `pattern -> replacement`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pattern: Pattern,
    replacement: NCPolynomial,
}

impl Rule {
    /// Exact atom rule.
    pub fn atom(atom: FieldAtom, replacement: NCPolynomial) -> Result<Rule, AlgebraError> {
        Rule::new(Pattern::Atom { atom, prolong: false }, replacement)
    }

    /// Atom rule that also rewrites every derivative of `atom`.
    pub fn prolonged(atom: FieldAtom, replacement: NCPolynomial) -> Result<Rule, AlgebraError> {
        Rule::new(Pattern::Atom { atom, prolong: true }, replacement)
    }

    pub fn word(atoms: Vec<FieldAtom>, replacement: NCPolynomial) -> Result<Rule, AlgebraError> {
        Rule::new(Pattern::Word(atoms), replacement)
    }

    pub fn new(pattern: Pattern, replacement: NCPolynomial) -> Result<Rule, AlgebraError> {
        let atoms = match &pattern {
            Pattern::Atom { atom, .. } => vec![*atom],
            Pattern::Word(w) => w.clone(),
        };
        if atoms.is_empty() {
            return Err(AlgebraError::Layout("empty rewrite pattern".into()));
        }
        if replacement.mode() == Mode::Trace {
            return Err(AlgebraError::Layout("a rewrite replacement cannot be a trace".into()));
        }
        let expected = Word(atoms).chain_shape(replacement.mode())?.expect("non-empty");
        if replacement.mode() == Mode::Matrix && replacement.shape() != expected {
            return Err(AlgebraError::RuleShape {
                pattern: pattern.to_string(),
                expected,
                found: replacement.shape(),
            });
        }
        Ok(Rule { pattern, replacement })
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn replacement(&self) -> &NCPolynomial {
        &self.replacement
    }

    /// Finds the first match in `atoms` and returns the rewritten terms.
    fn rewrite(&self, mode: Mode, atoms: &[FieldAtom]) -> Option<Vec<(Vec<FieldAtom>, Coeff)>> {
        match &self.pattern {
            Pattern::Atom { atom, prolong } => {
                for (i, a) in atoms.iter().enumerate() {
                    if let Some(repl) = self.match_atom(atom, *prolong, a) {
                        return Some(splice(&atoms[..i], &repl, &atoms[i + 1..]));
                    }
                }
                None
            }
            Pattern::Word(pat) => match mode {
                Mode::Scalar => {
                    let mut rest = atoms.to_vec();
                    for p in pat {
                        let pos = rest.iter().position(|a| a == p)?;
                        rest.remove(pos);
                    }
                    Some(splice(&rest, &self.replacement, &[]))
                }
                Mode::Matrix => {
                    let i = find_subword(atoms, pat)?;
                    Some(splice(&atoms[..i], &self.replacement, &atoms[i + pat.len()..]))
                }
                Mode::Trace => {
                    // cyclic: try each rotation so wrap-around matches count
                    for r in 0..atoms.len() {
                        let mut rot = atoms[r..].to_vec();
                        rot.extend_from_slice(&atoms[..r]);
                        if rot.len() >= pat.len() && rot[..pat.len()] == pat[..] {
                            return Some(splice(&[], &self.replacement, &rot[pat.len()..]));
                        }
                    }
                    None
                }
            },
        }
    }

    fn match_atom(&self, pat: &FieldAtom, prolong: bool, a: &FieldAtom) -> Option<NCPolynomial> {
        if a == pat {
            return Some(self.replacement.clone());
        }
        if !prolong || a.base != pat.base || a.dt < pat.dt || a.dx < pat.dx {
            return None;
        }
        if pat.dx > 0 && a.flow != pat.flow {
            return None;
        }
        let mut r = self.replacement.differentiate_t_n(a.dt - pat.dt);
        for _ in pat.dx..a.dx {
            r = r.differentiate_x(a.flow);
        }
        Some(r)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.pattern, self.replacement)
    }
}

fn find_subword(atoms: &[FieldAtom], pat: &[FieldAtom]) -> Option<usize> {
    if pat.len() > atoms.len() {
        return None;
    }
    (0..=atoms.len() - pat.len()).find(|&i| atoms[i..i + pat.len()] == pat[..])
}

fn splice(left: &[FieldAtom], repl: &NCPolynomial, right: &[FieldAtom]) -> Vec<(Vec<FieldAtom>, Coeff)> {
    repl.terms()
        .map(|(w, c)| {
            let mut v = Vec::with_capacity(left.len() + w.len() + right.len());
            v.extend_from_slice(left);
            v.extend_from_slice(w.atoms());
            v.extend_from_slice(right);
            (v, c.clone())
        })
        .collect()
}

/// Rewrites `p` with `rules` until nothing matches. Rules are tried in
/// order; the first matching rule fires on each word.
pub fn substitute(p: &NCPolynomial, rules: &[Rule]) -> Result<NCPolynomial, AlgebraError> {
    substitute_bounded(p, rules, DEFAULT_MAX_PASSES)
}

pub fn substitute_bounded(p: &NCPolynomial, rules: &[Rule], max_passes: usize) -> Result<NCPolynomial, AlgebraError> {
    for r in rules {
        if r.replacement.mode() == Mode::Scalar && p.mode() != Mode::Scalar {
            return Err(AlgebraError::ModeMismatch { left: p.mode(), right: Mode::Scalar });
        }
    }
    let mut current = p.clone();
    for _ in 0..max_passes {
        let mut changed = false;
        let mut next = NCPolynomial::zero(current.mode(), current.shape());
        for (w, c) in current.terms() {
            match rules.iter().find_map(|r| r.rewrite(current.mode(), w.atoms())) {
                Some(terms) => {
                    changed = true;
                    for (atoms, x) in terms {
                        next.add_raw(atoms, c * &x);
                    }
                }
                None => next.add_term(w.clone(), c.clone()),
            }
        }
        if !changed {
            return Ok(current);
        }
        current = next;
    }
    Err(AlgebraError::NonTerminating(max_passes))
}

pub fn substitute_matrix(m: &PolyMatrix, rules: &[Rule]) -> Result<PolyMatrix, AlgebraError> {
    m.try_map(|p| substitute(p, rules))
}

pub fn substitute_series(s: &LaurentSeries, rules: &[Rule]) -> Result<LaurentSeries, AlgebraError> {
    s.try_map(|m| substitute_matrix(m, rules))
}
