//! Comparison against checked-in tables.
//!
//! A golden file `<dir>/<artifact>.json` maps item names to plain-text
//! expressions in the parser grammar: a string for a polynomial or text
//! item, a list of rows of strings for a matrix or a Lax operator.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use laxforge_core::ncpoly::{LaurentSeries, NCPolynomial};
use laxforge_core::parse::parse_series_shaped;

use crate::artifact::{Artifact, Item};

#[derive(Deserialize)]
struct GoldenFile {
    entries: BTreeMap<String, Json>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub name: String,
    pub expected: Json,
    pub actual: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenReport {
    pub file: String,
    pub compared: Vec<String>,
    pub mismatches: Vec<Mismatch>,
    pub pass: bool,
}

impl std::fmt::Display for GoldenReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "golden {}: {} compared, {} mismatched", self.file, self.compared.len(), self.mismatches.len())?;
        for m in &self.mismatches {
            writeln!(f, "  {}: {}", m.name, m.detail)?;
            writeln!(f, "    expected {}", m.expected)?;
            writeln!(f, "    actual   {}", m.actual)?;
        }
        write!(f, "{}", if self.pass { "golden match" } else { "golden MISMATCH" })
    }
}

/// Powers of `lam` in one 1x1 series.
fn powers(s: &LaurentSeries) -> BTreeMap<i32, NCPolynomial> {
    s.iter().map(|(k, m)| (k, m.get(0, 0).clone())).collect()
}

fn same_entry(actual: &LaurentSeries, src: &str) -> Result<bool, String> {
    let template = actual.zero_matrix();
    let z = template.get(0, 0);
    let expected = parse_series_shaped(src, z.mode(), z.shape()).map_err(|e| format!("cannot parse `{src}`: {e}"))?;
    Ok(powers(actual) == powers(&expected))
}

fn rows(v: &Json) -> Option<Vec<Vec<String>>> {
    v.as_array()?
        .iter()
        .map(|r| r.as_array()?.iter().map(|e| e.as_str().map(str::to_string)).collect())
        .collect()
}

fn compare_item(item: &Item, expected: &Json) -> Result<(), String> {
    let as_str = || expected.as_str().ok_or_else(|| "golden entry must be a string".to_string());
    let as_rows = |n: usize, m: usize| {
        let r = rows(expected).ok_or_else(|| "golden entry must be a list of rows".to_string())?;
        if r.len() != n || r.iter().any(|row| row.len() != m) {
            return Err(format!("golden entry is not {n}x{m}"));
        }
        Ok(r)
    };
    let mut bad = Vec::new();
    match item {
        Item::Poly(p) => {
            let s = LaurentSeries::constant(laxforge_core::ncpoly::PolyMatrix::single(p.clone()));
            if !same_entry(&s, as_str()?)? {
                bad.push("value differs".to_string());
            }
        }
        Item::Matrix(mtx) => {
            let r = as_rows(mtx.nrows(), mtx.ncols())?;
            let s = LaurentSeries::constant(mtx.clone());
            for (i, row) in r.iter().enumerate() {
                for (j, src) in row.iter().enumerate() {
                    if !same_entry(&s.entry(i, j), src)? {
                        bad.push(format!("entry {}{} differs", i + 1, j + 1));
                    }
                }
            }
        }
        Item::Series(s) => {
            let z = s.zero_matrix();
            let r = as_rows(z.nrows(), z.ncols())?;
            for (i, row) in r.iter().enumerate() {
                for (j, src) in row.iter().enumerate() {
                    if !same_entry(&s.entry(i, j), src)? {
                        bad.push(format!("entry {}{} differs", i + 1, j + 1));
                    }
                }
            }
        }
        Item::Text(t) => {
            if t != as_str()? {
                bad.push("text differs".to_string());
            }
        }
        Item::Report(..) => return Err("reports have no golden form".into()),
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join(", "))
    }
}

fn describe(item: &Item) -> String {
    match item {
        Item::Poly(p) => p.to_string(),
        Item::Matrix(m) => m.to_string(),
        Item::Series(s) => s.to_string(),
        Item::Text(t) => t.clone(),
        Item::Report(_, t) => t.clone(),
    }
}

/// Compares every item that has a golden entry. Passing requires at
/// least one comparison.
pub fn check(artifact: &Artifact, dir: &Path) -> Result<GoldenReport, String> {
    let path = dir.join(format!("{}.json", artifact.name));
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read golden file {}: {e}", path.display()))?;
    let file: GoldenFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut report = GoldenReport { file: path.display().to_string(), compared: Vec::new(), mismatches: Vec::new(), pass: false };
    for (name, item) in &artifact.items {
        let Some(expected) = file.entries.get(name) else { continue };
        report.compared.push(name.clone());
        if let Err(detail) = compare_item(item, expected) {
            report.mismatches.push(Mismatch { name: name.clone(), expected: expected.clone(), actual: describe(item), detail });
        }
    }
    report.pass = !report.compared.is_empty() && report.mismatches.is_empty();
    Ok(report)
}
