//! `lanslab`: verification suites and solver runs for LANS-α on the torus.
//!
//! Exit codes: 0 all checks pass, 1 a check or run failed, 2 bad usage or
//! configuration, 3 nothing failed but some check was inconclusive.

mod artifact;
mod config;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lanslab_core::dynamics::Equation;
use lanslab_core::inequality::Verdict;
use serde_json::json;

use artifact::{Artifacts, RunManifest};
use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "lanslab", version = artifact::version(), about = "LANS-α spectral laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run inequality and identity checks.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
        /// Comma list of suites, or `all`.
        #[arg(long)]
        suite: String,
    },
    /// Solve one equation from seeded random data and checkpoint it.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value_t = EquationArg::Lans)]
        equation: EquationArg,
    },
    /// Split data, solve both pieces, recombine and compare with a direct solve.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
    /// Solve over the product of comma-separated parameter lists.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        nu: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        dt: Vec<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Flat TOML file of run parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "lanslab-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct Params {
    /// Grid points per axis.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EquationArg {
    Lans,
    Mlans,
    Heat,
}

impl From<EquationArg> for Equation {
    fn from(e: EquationArg) -> Self {
        match e {
            EquationArg::Lans => Equation::Lans,
            EquationArg::Mlans => Equation::Mlans,
            EquationArg::Heat => Equation::Heat,
        }
    }
}

/// Failure before any work started; maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0:#}")]
struct UsageError(anyhow::Error);

fn usage<T>(r: anyhow::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| UsageError(e).into())
}

fn resolve(common: &Common, params: Option<&Params>) -> anyhow::Result<RunConfig> {
    let mut cfg = usage(RunConfig::load(common.config.as_deref()))?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(p) = params {
        cfg.points_per_axis = p.n.unwrap_or(cfg.points_per_axis);
        cfg.alpha = p.alpha.unwrap_or(cfg.alpha);
        cfg.nu = p.nu.unwrap_or(cfg.nu);
        cfg.dt = p.dt.unwrap_or(cfg.dt);
        cfg.t_end = p.t_end.unwrap_or(cfg.t_end);
    }
    Ok(cfg)
}

fn start(
    command: &str,
    common: &Common,
    selection: serde_json::Value,
    cfg: &RunConfig,
) -> anyhow::Result<Artifacts> {
    let manifest = RunManifest::new(command, common.config.as_deref(), &common.out, selection, cfg);
    Artifacts::create(&common.out, &manifest)
}

fn write_summary(out: &Artifacts, verdict: Verdict, checks: serde_json::Value) -> anyhow::Result<()> {
    out.json("summary.json", &json!({ "verdict": verdict, "checks": checks }))
}

fn execute(cli: Cli) -> anyhow::Result<Verdict> {
    match cli.command {
        Command::Verify { common, params, suite } => {
            let suites = usage(verify::parse_suites(&suite))?;
            let cfg = resolve(&common, Some(&params))?;
            usage(cfg.grid().map_err(Into::into))?;
            let names: Vec<&str> = suites.iter().map(|s| s.name()).collect();
            let out = start("verify", &common, json!(names), &cfg)?;
            let mut checks = Vec::new();
            for s in suites {
                let dir = out.child(s.name())?;
                checks.extend(verify::run_suite(s, &cfg, &dir)?);
            }
            for c in &checks {
                println!("{:<14} {:<40} {:?}: {}", c.suite.name(), c.name, c.verdict, c.detail);
            }
            let verdict = Verdict::worst(checks.iter().map(|c| c.verdict));
            write_summary(&out, verdict, serde_json::to_value(&checks)?)?;
            Ok(verdict)
        }
        Command::Solve { common, params, equation } => {
            let cfg = resolve(&common, Some(&params))?;
            usage(cfg.lans().map_err(Into::into))?;
            let equation = Equation::from(equation);
            let out = start("solve", &common, json!({ "equation": equation }), &cfg)?;
            let verdict = run::solve(&cfg, equation, &out)?;
            write_summary(&out, verdict, json!([]))?;
            Ok(verdict)
        }
        Command::Pipeline { common, params } => {
            let cfg = resolve(&common, Some(&params))?;
            usage(run::pipeline_config(&cfg).map_err(Into::into))?;
            let out = start("pipeline", &common, json!(null), &cfg)?;
            let verdict = run::pipeline(&cfg, &out)?;
            write_summary(&out, verdict, json!([]))?;
            Ok(verdict)
        }
        Command::Sweep { common, alpha, nu, n, dt, t_end } => {
            let mut cfg = resolve(&common, None)?;
            cfg.t_end = t_end.unwrap_or(cfg.t_end);
            let axes = run::SweepAxes { alpha, nu, n, dt };
            let out = start("sweep", &common, serde_json::to_value(&axes)?, &cfg)?;
            let verdict = run::sweep(&cfg, &axes, common.config.as_deref(), &out)?;
            write_summary(&out, verdict, json!([]))?;
            Ok(verdict)
        }
    }
}

fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(v) => ExitCode::from(exit_code(v)),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
