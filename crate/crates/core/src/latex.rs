//! LaTeX rendering. Terms come out in canonical word order, so the text
//! is stable from run to run.

use num_traits::{One, Signed, Zero};

use crate::coeff::Coeff;
use crate::hierarchy::LaxOperator;
use crate::ncpoly::{Base, FieldAtom, LaurentSeries, Mode, NCPolynomial, PolyMatrix, Word, PHYSICAL_FLOW};

pub trait ToLatex {
    fn to_latex(&self) -> String;
}

fn base_tex(b: Base) -> String {
    match b {
        Base::U => "u".into(),
        Base::UHat => "\\hat{u}".into(),
        Base::Pi => "\\pi".into(),
        Base::PiHat => "\\hat{\\pi}".into(),
        Base::K11 => "K_{11}".into(),
        Base::K22 => "K_{22}".into(),
        Base::Xi(s) => format!("\\xi^{{{}}}", s.sign()),
        Base::Kappa(s) | Base::KappaInv(s) => format!("\\kappa^{{{}}}", s.sign()),
    }
}

fn atom_tex(a: &FieldAtom) -> String {
    let mut sub = "t".repeat(a.dt as usize);
    for _ in 0..a.dx {
        if a.flow == PHYSICAL_FLOW {
            sub.push('x');
        } else {
            sub.push_str(&format!("x_{}", a.flow));
        }
    }
    let b = base_tex(a.base);
    if sub.is_empty() {
        b
    } else if matches!(a.base, Base::K11 | Base::K22) {
        format!("\\partial_{{{sub}}} {b}")
    } else {
        format!("{b}_{{{sub}}}")
    }
}

fn rational_tex(r: &num_rational::BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

/// Magnitude of a coefficient as a prefix factor; empty for 1.
fn coeff_tex(c: &Coeff) -> String {
    let (re, im) = (c.re(), c.im());
    match (re.is_zero(), im.is_zero()) {
        (_, true) if re.is_one() => String::new(),
        (_, true) => rational_tex(re),
        (true, false) if im.is_one() => "i".into(),
        (true, false) => format!("{}\\,i", rational_tex(im)),
        (false, false) => {
            let sign = if im.is_negative() { "-" } else { "+" };
            format!("\\left({} {sign} {}\\,i\\right)", rational_tex(re), rational_tex(&im.abs()))
        }
    }
}

fn factors(atoms: &[FieldAtom]) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut k = 0;
    while k < atoms.len() {
        let mut run = 1;
        while k + run < atoms.len() && atoms[k + run] == atoms[k] {
            run += 1;
        }
        let t = atom_tex(&atoms[k]);
        out.push(if run == 1 {
            t
        } else if atoms[k].dt + atoms[k].dx > 0 {
            format!("({t})^{{{run}}}")
        } else {
            format!("{t}^{{{run}}}")
        });
        k += run;
    }
    out.join(" ")
}

fn term_tex(first: bool, w: &Word, c: &Coeff, lam: &str) -> String {
    let neg = (c.im().is_zero() && c.re().is_negative()) || (c.re().is_zero() && c.im().is_negative());
    let mag = if neg { -c } else { c.clone() };
    let (num, den): (Vec<FieldAtom>, Vec<FieldAtom>) =
        w.atoms().iter().partition(|a| !matches!(a.base, Base::KappaInv(_)));
    let parts: Vec<String> = [coeff_tex(&mag), lam.to_string(), factors(&num)].into_iter().filter(|x| !x.is_empty()).collect();
    let mut body = if parts.is_empty() { "1".to_string() } else { parts.join(" ") };
    if !den.is_empty() {
        body = format!("\\frac{{{body}}}{{{}}}", factors(&den));
    }
    match (first, neg) {
        (true, true) => format!("-{body}"),
        (true, false) => body,
        (false, true) => format!(" - {body}"),
        (false, false) => format!(" + {body}"),
    }
}

fn poly_body(p: &NCPolynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.terms().enumerate().map(|(k, (w, c))| term_tex(k == 0, w, c, "")).collect()
}

impl ToLatex for NCPolynomial {
    fn to_latex(&self) -> String {
        let body = poly_body(self);
        if self.mode() == Mode::Trace {
            format!("\\mathrm{{tr}}\\left({body}\\right)")
        } else {
            body
        }
    }
}

fn pmatrix(rows: Vec<Vec<String>>) -> String {
    let body: Vec<String> = rows.into_iter().map(|r| r.join(" & ")).collect();
    format!("\\begin{{pmatrix}} {} \\end{{pmatrix}}", body.join(" \\\\ "))
}

impl ToLatex for PolyMatrix {
    fn to_latex(&self) -> String {
        pmatrix((0..self.nrows()).map(|i| (0..self.ncols()).map(|j| self.get(i, j).to_latex()).collect()).collect())
    }
}

fn lambda_power(k: i32) -> String {
    match k {
        0 => String::new(),
        1 => "\\lambda".into(),
        _ => format!("\\lambda^{{{k}}}"),
    }
}

/// One entry of a Lax matrix as `sum_k lam^k p_k`, highest power first.
fn series_entry(s: &LaurentSeries, i: usize, j: usize) -> String {
    let mut out = String::new();
    for (k, m) in s.iter().rev() {
        let p = m.get(i, j);
        if p.is_zero() {
            continue;
        }
        let lam = lambda_power(k);
        let piece = if lam.is_empty() {
            poly_body(p)
        } else if p.len() == 1 {
            let (w, c) = p.terms().next().expect("one term");
            term_tex(true, w, c, &lam)
        } else {
            format!("{lam} \\left({}\\right)", poly_body(p))
        };
        if out.is_empty() {
            out = piece;
        } else if let Some(rest) = piece.strip_prefix('-') {
            out.push_str(&format!(" - {rest}"));
        } else {
            out.push_str(&format!(" + {piece}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    if let Some(t) = s.truncation() {
        out.push_str(&format!(" + O(\\lambda^{{{}}})", -t - 1));
    }
    out
}

impl ToLatex for LaurentSeries {
    fn to_latex(&self) -> String {
        let z = self.zero_matrix();
        pmatrix((0..z.nrows()).map(|i| (0..z.ncols()).map(|j| series_entry(self, i, j)).collect()).collect())
    }
}

impl ToLatex for LaxOperator {
    fn to_latex(&self) -> String {
        self.series.to_latex()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::dress_u;
    use crate::parse::parse_poly;

    #[test]
    fn polynomials() {
        let p = parse_poly("1/2*u*u + u*xip/kap - i*pih/kap", Mode::Scalar).unwrap();
        assert_eq!(p.to_latex(), "\\frac{1}{2} u^{2} + \\frac{u \\xi^{+}}{\\kappa^{+}} - \\frac{i \\hat{\\pi}}{\\kappa^{+}}");
        let q = parse_poly("u_t_t*uh - 2*u*u_t*uh*uh", Mode::Scalar).unwrap();
        assert_eq!(q.to_latex(), "-2 u u_{t} \\hat{u}^{2} + u_{tt} \\hat{u}");
    }

    #[test]
    fn third_operator() {
        let u = dress_u(3, Mode::Matrix).unwrap();
        assert_eq!(
            u.to_latex(),
            "\\begin{pmatrix} \\frac{1}{2} \\lambda^{2} - \\hat{u} u & \\lambda \\hat{u} + \\pi \\\\ \
             \\lambda u - \\hat{\\pi} & -\\frac{1}{2} \\lambda^{2} + u \\hat{u} \\end{pmatrix}"
        );
    }

    #[test]
    fn traces() {
        let t = parse_poly("tr(u*pi - uh*pih)", Mode::Trace).unwrap();
        assert_eq!(t.to_latex(), "\\mathrm{tr}\\left(u \\pi - \\hat{u} \\hat{\\pi}\\right)");
    }
}
