//! `laxforge`: command-line front end.
//!
//! Exit status 0 on success, 1 when a check or golden comparison fails,
//! 2 on a usage error.

mod artifact;
mod commands;
mod config;
mod golden;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use laxforge_core::boundary::BoundaryParams;
use laxforge_core::ncpoly::Mode;
use laxforge_core::oracle::{Target, DEFAULT_TOL};

use artifact::{Artifact, Format};
use commands::{ExprOp, Failure, KindArg, Route, WhichArg};
use config::{parse_mode, RunConfig, SEED_ENV};

#[derive(Parser)]
#[command(name = "laxforge", version, about = "Time-like NLS hierarchy: Riccati series, charges, Lax operators and boundaries")]
struct Cli {
    /// Output format (default plain).
    #[arg(long, global = true, value_enum)]
    out: Option<Format>,
    /// Compare the output with `<dir>/<artifact>.json` and report.
    #[arg(long, global = true, value_name = "DIR")]
    golden: Option<PathBuf>,
    /// key = value run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Write to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the time Riccati equation order by order.
    Riccati {
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
    },
    /// U-operators, charges, conservation and equations of motion.
    Hierarchy {
        #[command(subcommand)]
        cmd: HierarchyCmd,
    },
    /// Reflection algebra, boundary charges and boundary conditions.
    Boundary {
        #[command(subcommand)]
        cmd: BoundaryCmd,
    },
    /// Numeric cross-checks.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Parse an expression and print it back, optionally transformed.
    Expr {
        src: String,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        #[arg(long, value_enum, default_value = "show")]
        op: ExprOp,
    },
}

#[derive(Subcommand)]
enum HierarchyCmd {
    /// The U-operator of the x_n flow.
    U {
        #[arg(long, value_enum, default_value = "gen")]
        route: Route,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
    },
    /// Conserved densities H (scalar) or I (trace).
    Charges {
        #[arg(long, value_enum, default_value = "H")]
        kind: KindArg,
        #[arg(long = "max-k")]
        max_k: Option<usize>,
    },
    /// Conservation certificate for H^(k).
    Verify {
        #[arg(long)]
        k: Option<usize>,
    },
    /// Equations of motion of the pair (U^(n), V).
    Eom {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
    },
}

#[derive(Subcommand)]
enum BoundaryCmd {
    /// Reflection equation for K+ and K-.
    ReflectCheck,
    /// Linear Poisson algebra of V or U.
    PoissonCheck {
        #[arg(long, value_enum, default_value = "V")]
        which: WhichArg,
    },
    /// Bulk and boundary charge densities.
    Charges {
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Boundary conditions from matching U+- with the bulk U.
    ExtractBc {
        #[command(flatten)]
        params: ParamArgs,
    },
}

/// Boundary constants; `sym` (the default) keeps them symbolic.
#[derive(clap::Args)]
struct ParamArgs {
    #[arg(long = "xi+", value_name = "VALUE")]
    xi_plus: Option<String>,
    #[arg(long = "xi-", value_name = "VALUE")]
    xi_minus: Option<String>,
    #[arg(long = "kappa+", value_name = "VALUE")]
    kappa_plus: Option<String>,
    #[arg(long = "kappa-", value_name = "VALUE")]
    kappa_minus: Option<String>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Evaluate symbolic identities on random fields.
    Numeric {
        #[arg(long, default_value = "all")]
        target: Target,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn params(args: &ParamArgs, cfg: &RunConfig) -> Result<BoundaryParams, Failure> {
    let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| cfg.params.get(key).cloned());
    Ok(BoundaryParams {
        xi_plus: commands::parse_param("xi+", pick(&args.xi_plus, "xi+").as_deref())?,
        xi_minus: commands::parse_param("xi-", pick(&args.xi_minus, "xi-").as_deref())?,
        kappa_plus: commands::parse_param("kappa+", pick(&args.kappa_plus, "kappa+").as_deref())?,
        kappa_minus: commands::parse_param("kappa-", pick(&args.kappa_minus, "kappa-").as_deref())?,
    })
}

fn positive(name: &str, v: usize) -> Result<usize, Failure> {
    if v == 0 {
        Err(Failure::Usage(format!("{name} must be at least 1")))
    } else {
        Ok(v)
    }
}

fn dispatch(cmd: Cmd, cfg: &RunConfig) -> Result<Artifact, Failure> {
    let mode_or = |m: Option<Mode>, dflt: Mode| m.or(cfg.mode).unwrap_or(dflt);
    match cmd {
        Cmd::Riccati { order, mode } => {
            let order = positive("--order", order.or(cfg.order("riccati")).unwrap_or(5))?;
            commands::riccati(order, mode_or(mode, Mode::Scalar))
        }
        Cmd::Hierarchy { cmd } => match cmd {
            HierarchyCmd::U { route, n, mode } => {
                let n = positive("--n", n.map(|n| n as usize).or(cfg.order("hierarchy")).unwrap_or(2))?;
                commands::hierarchy_u(route, n as u32, mode_or(mode, Mode::Scalar))
            }
            HierarchyCmd::Charges { kind, max_k } => {
                commands::hierarchy_charges(kind, positive("--max-k", max_k.or(cfg.order("charges")).unwrap_or(4))?)
            }
            HierarchyCmd::Verify { k } => commands::hierarchy_verify(positive("--k", k.unwrap_or(2))?),
            HierarchyCmd::Eom { n, mode } => commands::hierarchy_eom(n, mode_or(mode, Mode::Scalar)),
        },
        Cmd::Boundary { cmd } => match cmd {
            BoundaryCmd::ReflectCheck => Ok(commands::reflect_check()),
            BoundaryCmd::PoissonCheck { which } => commands::poisson_check(which),
            BoundaryCmd::Charges { order, params: p } => {
                let order = positive("--order", order.or(cfg.order("boundary")).unwrap_or(2))?;
                commands::boundary_charges(&params(&p, cfg)?, order)
            }
            BoundaryCmd::ExtractBc { params: p } => commands::extract_bc(&params(&p, cfg)?),
        },
        Cmd::Verify { cmd: VerifyCmd::Numeric { target, trials, tol, seed } } => commands::verify_numeric(
            target,
            trials.or(cfg.trials).unwrap_or(100),
            tol.or(cfg.tol).unwrap_or(DEFAULT_TOL),
            seed.or(cfg.seed).unwrap_or(42),
        ),
        Cmd::Expr { src, mode, op } => commands::expr(&src, mode_or(mode, Mode::Scalar), op),
    }
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                // A closed pipe (`| head`) is not an error.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Compute(format!("cannot write output: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    let cfg = cfg.with_env(std::env::var(SEED_ENV).ok()).map_err(Failure::Usage)?;
    let fmt = cli.out.or(cfg.out).unwrap_or(Format::Plain);
    let output = cli.output.clone().or_else(|| cfg.output.clone());
    let artifact = dispatch(cli.cmd, &cfg)?;
    match &cli.golden {
        Some(dir) => {
            let report = golden::check(&artifact, dir).map_err(Failure::Usage)?;
            let text = match fmt {
                Format::Json => serde_json::to_string_pretty(&report).expect("serializable"),
                _ => report.to_string(),
            };
            emit(&text, output.as_ref())?;
            Ok(report.pass && artifact.ok)
        }
        None => {
            emit(&artifact.render(fmt), output.as_ref())?;
            Ok(artifact.ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
