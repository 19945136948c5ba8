use std::path::PathBuf;
use std::process::{Command, Output};

use laxforge_core::ncpoly::{LaurentSeries, NCPolynomial, PolyMatrix};
use laxforge_core::parse::parse_poly;
use serde_json::Value;

fn laxforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laxforge")).args(args).env_remove("LAXFORGE_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn goldens() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../goldens").display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("laxforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn help_and_usage_errors() {
    let h = laxforge(&["--help"]);
    assert_eq!(h.status.code(), Some(0));
    assert!(stdout(&h).contains("riccati"));
    assert_eq!(laxforge(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(laxforge(&["riccati", "--mode", "tensor"]).status.code(), Some(2));
    assert_eq!(laxforge(&["riccati", "--order", "0"]).status.code(), Some(2));
    assert_eq!(laxforge(&["expr", "u*(uh"]).status.code(), Some(2));
    assert_eq!(laxforge(&["boundary", "charges", "--kappa+", "u"]).status.code(), Some(2));
    assert_eq!(laxforge(&["verify", "numeric", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn plain_output() {
    let o = laxforge(&["hierarchy", "eom", "--n", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("relations = pi = uh_x; pih = u_x"), "{text}");
    let r = laxforge(&["boundary", "reflect-check"]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(stdout(&r).matches("residual ≡ 0").count(), 2);
}

#[test]
fn latex_output() {
    let o = laxforge(&["hierarchy", "u", "--n", "3", "--out", "latex"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("% U^(3)"), "{text}");
    assert!(text.contains("\\lambda"), "{text}");
}

#[test]
fn json_round_trips_through_the_core_types() {
    let o = laxforge(&["riccati", "--order", "3", "--mode", "matrix", "--out", "json"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["artifact"], "riccati-matrix");
    assert_eq!(doc["ok"], true);
    let items = doc["items"].as_array().unwrap();
    let w3 = items.iter().find(|i| i["name"] == "W^(3)").unwrap();
    assert_eq!(w3["kind"], "matrix");
    let m: PolyMatrix = serde_json::from_value(w3["value"].clone()).unwrap();
    let sol = laxforge_core::riccati::solve_w_z(3, laxforge_core::ncpoly::Mode::Matrix).unwrap();
    assert_eq!(&m, sol.w(3));
    let g2 = items.iter().find(|i| i["name"] == "Gamma^(2)").unwrap();
    let p: NCPolynomial = serde_json::from_value(g2["value"].clone()).unwrap();
    assert_eq!(p, parse_poly("-pih", laxforge_core::ncpoly::Mode::Matrix).unwrap());

    let u = laxforge(&["hierarchy", "u", "--route", "dress", "--n", "4", "--mode", "matrix", "--out", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&u)).unwrap();
    let s: LaurentSeries = serde_json::from_value(doc["items"][0]["value"].clone()).unwrap();
    assert_eq!(s, laxforge_core::hierarchy::dress_u(4, laxforge_core::ncpoly::Mode::Matrix).unwrap().series);
}

#[test]
fn golden_match_and_mismatch() {
    let g = goldens();
    let ok = laxforge(&["--golden", &g, "hierarchy", "u", "--n", "4"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("golden match"));
    let gamma = laxforge(&["--golden", &g, "riccati", "--order", "4", "--mode", "matrix"]);
    assert_eq!(gamma.status.code(), Some(0), "{}", stdout(&gamma));

    // A table with one altered sign.
    let dir = scratch("goldens");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("charges-H.json"), r#"{"entries": {"H^(1)": "u*pi + pih*uh"}}"#).unwrap();
    let bad = laxforge(&["--golden", dir.to_str().unwrap(), "--out", "json", "hierarchy", "charges", "--max-k", "2"]);
    assert_eq!(bad.status.code(), Some(1));
    let rep: Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(rep["pass"], false);
    assert_eq!(rep["mismatches"][0]["name"], "H^(1)");

    let missing = laxforge(&["--golden", dir.to_str().unwrap(), "boundary", "reflect-check"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn config_file_and_seed_precedence() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "# small run\nseed = 5\ntrials = 4\nout = json\n").unwrap();
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_laxforge"));
        c.args(["--config", cfg.to_str().unwrap(), "verify", "numeric", "--target", "boundary"]).args(extra);
        match env {
            Some(s) => c.env("LAXFORGE_SEED", s),
            None => c.env_remove("LAXFORGE_SEED"),
        };
        let o = c.output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let report = doc["items"][0]["value"].clone();
        (report["seed"].as_u64().unwrap(), report["trials"].as_u64().unwrap())
    };
    assert_eq!(run(None, &[]), (5, 4));
    assert_eq!(run(Some("11"), &[]), (11, 4));
    assert_eq!(run(Some("11"), &["--seed", "13"]), (13, 4));

    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(laxforge(&["--config", cfg.to_str().unwrap(), "riccati"]).status.code(), Some(2));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["verify", "numeric", "--target", "riccati", "--trials", "5", "--seed", "21", "--out", "json"];
    let a = laxforge(&args);
    let b = laxforge(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = laxforge(&["verify", "numeric", "--target", "riccati", "--trials", "5", "--seed", "22", "--out", "json"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn output_file() {
    let path = scratch("h.txt");
    let o = laxforge(&["--output", path.to_str().unwrap(), "hierarchy", "charges", "--max-k", "1"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), "H^(1) = u*pi - uh*pih");
}

#[test]
fn expr_operations() {
    let d = laxforge(&["expr", "u*uh", "--op", "dx"]);
    assert_eq!(stdout(&d).trim(), "expr = u*uh_x + u_x*uh");
    let t = laxforge(&["expr", "u*uh", "--mode", "matrix", "--op", "trace"]);
    assert_eq!(stdout(&t).trim(), "expr = tr(u*uh)");
    // MxM plus NxN.
    assert_eq!(laxforge(&["expr", "u*uh - uh*u", "--mode", "matrix"]).status.code(), Some(2));
}
