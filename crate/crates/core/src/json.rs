//! JSON form of polynomials, matrices and series.
//!
//! ```json
//! {"mode": "matrix", "shape": ["M", "N"],
//!  "terms": [{"word": ["u", "uh_t", "u"], "coeff": "-2/1+0/1*i"}]}
//! ```
//!
//! Matrices carry `rows`, `cols` (block dimensions) and row-major
//! `entries`; series add `truncation` and a list of `{power, matrix}`.
//! Terms are emitted in canonical order so equal values serialize to
//! identical text.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coeff::Coeff;
use crate::error::ParseError;
use crate::ncpoly::{Dim, LaurentSeries, Mode, NCPolynomial, PolyMatrix, Shape, Word};
use crate::parse::parse_atom;

#[derive(Serialize, Deserialize)]
struct TermWire {
    word: Vec<String>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    mode: Mode,
    shape: [Dim; 2],
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    mode: Mode,
    rows: Vec<Dim>,
    cols: Vec<Dim>,
    entries: Vec<NCPolynomial>,
}

#[derive(Serialize, Deserialize)]
struct CoeffWire {
    power: i32,
    matrix: PolyMatrix,
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    mode: Mode,
    rows: Vec<Dim>,
    cols: Vec<Dim>,
    truncation: Option<i32>,
    coeffs: Vec<CoeffWire>,
}

impl Serialize for NCPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let shape = self.shape();
        PolyWire {
            mode: self.mode(),
            shape: [shape.rows, shape.cols],
            terms: self
                .terms()
                .map(|(w, c)| TermWire { word: w.atoms().iter().map(|a| a.to_string()).collect(), coeff: c.to_wire() })
                .collect(),
        }
        .serialize(s)
    }
}

fn poly_from_wire(w: PolyWire) -> Result<NCPolynomial, ParseError> {
    let mut terms = Vec::new();
    for t in w.terms {
        let atoms = t.word.iter().map(|a| parse_atom(a)).collect::<Result<Vec<_>, _>>()?;
        for a in &atoms {
            if w.mode != Mode::Scalar && a.base.is_constant() {
                return Err(ParseError::Document(format!("{a} only exists in scalar mode")));
            }
        }
        terms.push((Word(atoms), t.coeff.parse::<Coeff>()?));
    }
    Ok(NCPolynomial::from_parts(w.mode, Shape::new(w.shape[0], w.shape[1]), terms)?)
}

impl<'de> Deserialize<'de> for NCPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        poly_from_wire(PolyWire::deserialize(d)?).map_err(D::Error::custom)
    }
}

impl Serialize for PolyMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixWire {
            mode: self.mode(),
            rows: self.row_blocks().to_vec(),
            cols: self.col_blocks().to_vec(),
            entries: self.entries().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        PolyMatrix::from_entries(w.mode, w.rows, w.cols, w.entries).map_err(D::Error::custom)
    }
}

impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeriesWire {
            mode: self.mode(),
            rows: self.row_blocks().to_vec(),
            cols: self.col_blocks().to_vec(),
            truncation: self.truncation(),
            coeffs: self.iter().rev().map(|(power, m)| CoeffWire { power, matrix: m.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = SeriesWire::deserialize(d)?;
        let template = PolyMatrix::zeros(w.mode, w.rows, w.cols);
        LaurentSeries::from_coeffs(&template, w.coeffs.into_iter().map(|c| (c.power, c.matrix)), w.truncation)
            .map_err(D::Error::custom)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T, ParseError> {
    serde_json::from_str(s).map_err(|e| ParseError::Document(e.to_string()))
}
