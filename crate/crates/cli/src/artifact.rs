use serde_json::{json, Value as Json};

use laxforge_core::latex::ToLatex;
use laxforge_core::ncpoly::{LaurentSeries, Mode, NCPolynomial, PolyMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Latex,
    Plain,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "latex" => Ok(Format::Latex),
            "plain" => Ok(Format::Plain),
            _ => Err(format!("unknown output format `{s}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Item {
    Poly(NCPolynomial),
    Matrix(PolyMatrix),
    Series(LaurentSeries),
    Text(String),
    Report(Json, String),
}

impl Item {
    fn kind(&self) -> &'static str {
        match self {
            Item::Poly(_) => "poly",
            Item::Matrix(_) => "matrix",
            Item::Series(_) => "series",
            Item::Text(_) => "text",
            Item::Report(..) => "report",
        }
    }

    fn json(&self) -> Json {
        match self {
            Item::Poly(p) => serde_json::to_value(p).expect("serializable"),
            Item::Matrix(m) => serde_json::to_value(m).expect("serializable"),
            Item::Series(s) => serde_json::to_value(s).expect("serializable"),
            Item::Text(t) => Json::String(t.clone()),
            Item::Report(j, _) => j.clone(),
        }
    }

    fn plain(&self) -> String {
        match self {
            Item::Poly(p) => p.to_string(),
            Item::Matrix(m) => m.to_string(),
            Item::Series(s) => s.to_string(),
            Item::Text(t) => t.clone(),
            Item::Report(_, text) => text.clone(),
        }
    }

    fn latex(&self) -> String {
        match self {
            Item::Poly(p) => p.to_latex(),
            Item::Matrix(m) => m.to_latex(),
            Item::Series(s) => s.to_latex(),
            Item::Text(t) => format!("\\text{{{}}}", t.replace('_', "\\_")),
            Item::Report(_, text) => text.lines().map(|l| format!("% {l}")).collect::<Vec<_>>().join("\n"),
        }
    }
}

/// Everything one command produced, named for golden lookup.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub mode: Mode,
    pub items: Vec<(String, Item)>,
    /// False when a check inside the command failed.
    pub ok: bool,
}

impl Artifact {
    pub fn new(name: impl Into<String>, mode: Mode) -> Self {
        Artifact { name: name.into(), mode, items: Vec::new(), ok: true }
    }

    pub fn push(&mut self, name: impl Into<String>, item: Item) {
        self.items.push((name.into(), item));
    }

    pub fn render(&self, fmt: Format) -> String {
        match fmt {
            Format::Json => {
                let items: Vec<Json> = self
                    .items
                    .iter()
                    .map(|(n, i)| json!({"name": n, "kind": i.kind(), "value": i.json()}))
                    .collect();
                let doc = json!({"artifact": self.name, "mode": self.mode, "ok": self.ok, "items": items});
                serde_json::to_string_pretty(&doc).expect("serializable")
            }
            Format::Plain => self
                .items
                .iter()
                .map(|(n, i)| match i {
                    Item::Report(..) => i.plain(),
                    _ => format!("{n} = {}", i.plain()),
                })
                .collect::<Vec<_>>()
                .join("\n"),
            Format::Latex => self
                .items
                .iter()
                .map(|(n, i)| match i {
                    Item::Report(..) => i.latex(),
                    _ => format!("% {n}\n{}", i.latex()),
                })
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }
}
