//! Noncommutative differential polynomials, block matrices over them and
//! truncated Laurent series in the spectral parameter.

mod atom;
mod linsolve;
mod matrix;
mod poly;
pub mod series;
pub mod subst;
pub mod variational;

pub use atom::{Base, Dim, FieldAtom, Mode, Shape, Side, Word, PHYSICAL_FLOW};
pub use matrix::{BlockLayout, PolyMatrix};
pub use poly::NCPolynomial;
pub use subst::{substitute, substitute_matrix, substitute_series, Pattern, Rule};
pub use variational::{euler_derivatives, is_total_t_derivative, TotalDerivative};
pub(crate) use series::invertible_constant;
pub use series::{series_exp, series_invert, series_log, LaurentSeries, LogSeries};
