//! `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! mode = matrix
//! seed = 7
//! tol = 1e-10
//! trials = 200
//! out = json
//! output = run.json
//! order.riccati = 6
//! xi+ = 1/2
//! kappa- = 2*i
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use laxforge_core::ncpoly::Mode;

use crate::artifact::Format;

pub const SEED_ENV: &str = "LAXFORGE_SEED";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    /// Per-task orders: `riccati`, `hierarchy`, `charges`, `boundary`, `verify`.
    pub orders: BTreeMap<String, usize>,
    /// Raw boundary constants keyed `xi+`, `xi-`, `kappa+`, `kappa-`.
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub trials: Option<usize>,
    pub out: Option<Format>,
    pub output: Option<PathBuf>,
}

const TASKS: [&str; 5] = ["riccati", "hierarchy", "charges", "boundary", "verify"];
const PARAMS: [&str; 4] = ["xi+", "xi-", "kappa+", "kappa-"];

pub fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "scalar" => Ok(Mode::Scalar),
        "matrix" => Ok(Mode::Matrix),
        _ => Err(format!("unknown mode `{s}` (expected scalar or matrix)")),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| format!("config line {}: {msg}", n + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "mode" => cfg.mode = Some(parse_mode(value).map_err(err)?),
                "seed" => cfg.seed = Some(value.parse().map_err(|_| err(format!("bad seed `{value}`")))?),
                "tol" => {
                    let t: f64 = value.parse().map_err(|_| err(format!("bad tolerance `{value}`")))?;
                    if !(t > 0.0) {
                        return Err(err("tolerance must be positive".into()));
                    }
                    cfg.tol = Some(t);
                }
                "trials" => cfg.trials = Some(value.parse().map_err(|_| err(format!("bad trial count `{value}`")))?),
                "out" => cfg.out = Some(value.parse().map_err(err)?),
                "output" => cfg.output = Some(PathBuf::from(value)),
                k if k.starts_with("order.") => {
                    let task = &k["order.".len()..];
                    if !TASKS.contains(&task) {
                        return Err(err(format!("unknown task `{task}`")));
                    }
                    let o: usize = value.parse().map_err(|_| err(format!("bad order `{value}`")))?;
                    if o == 0 {
                        return Err(err("orders must be at least 1".into()));
                    }
                    cfg.orders.insert(task.to_string(), o);
                }
                k if PARAMS.contains(&k) => {
                    cfg.params.insert(k.to_string(), value.to_string());
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        RunConfig::parse(&text)
    }

    /// Applies `LAXFORGE_SEED` on top of the file.
    pub fn with_env(mut self, env_seed: Option<String>) -> Result<RunConfig, String> {
        if let Some(s) = env_seed {
            self.seed = Some(s.trim().parse().map_err(|_| format!("{SEED_ENV} is not an integer: `{s}`"))?);
        }
        Ok(self)
    }

    pub fn order(&self, task: &str) -> Option<usize> {
        self.orders.get(task).copied()
    }
}
