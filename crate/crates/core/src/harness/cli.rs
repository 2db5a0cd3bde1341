use clap::{Args, Parser, Subcommand};
use serde_json::json;

use super::{
    resolve_geometry, run_convergence, run_p_sweep, solve, GluingMode, HarnessError, StudyConfig,
};
use crate::geometry::BUILTIN_NAMES;
use crate::gluing::{g1_defect, DEFAULT_LAMBDA_BETA, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(
    name = "asg1",
    version,
    about = "C1 spline projection on AS-G1 multi-patch domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the built-in geometry names.
    ListGeometries,
    /// Gluing data and AS-G1 residuals per interface, as JSON.
    Gluing(GluingArgs),
    /// One projection: conformity report and error norms, as JSON.
    Project(ProjectArgs),
    /// Conformity report only, as JSON.
    CheckC1(ProjectArgs),
    /// h-refinement study written as CSV.
    Convergence(ConvergenceArgs),
    /// Degree sweep at fixed mesh written as CSV.
    PSweep(PSweepArgs),
}

#[derive(Debug, Args)]
pub struct GluingOpts {
    /// Fit linear gluing data by regularized least squares instead of recovering it.
    #[arg(long)]
    pub fit: bool,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_BETA)]
    pub lambda_beta: f64,
    /// Certification tolerance for recovered gluing data.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

impl GluingOpts {
    fn mode(&self) -> GluingMode {
        if self.fit {
            GluingMode::Fit {
                lambda_beta: self.lambda_beta,
            }
        } else {
            GluingMode::Recover { tol: self.tol }
        }
    }
}

#[derive(Debug, Args)]
pub struct GluingArgs {
    #[arg(long)]
    pub geometry: String,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[command(flatten)]
    pub gluing: GluingOpts,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub geometry: String,
    #[arg(long, default_value = "sinsin")]
    pub function: String,
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    /// Defaults to p-2.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i32>,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Project even if the geometry is not certified.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub gluing: GluingOpts,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub geometry: String,
    #[arg(long, default_value = "sinsin")]
    pub function: String,
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i32>,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long, default_value_t = 8)]
    pub n0: usize,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub gluing: GluingOpts,
}

#[derive(Debug, Args)]
pub struct PSweepArgs {
    #[arg(long)]
    pub geometry: String,
    #[arg(long, default_value = "sinsin")]
    pub function: String,
    #[arg(long, value_delimiter = ',', default_value = "3,4,5,6")]
    pub p_list: Vec<usize>,
    /// Fixed smoothness; defaults to p-2 per degree.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i32>,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub gluing: GluingOpts,
}

/// Parses a full argument vector (program name first) without running anything.
pub fn parse_args<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args)
}

fn emit(out: &Option<String>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| HarnessError::Io {
            path: path.clone(),
            msg: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Runs the command line; returns the process exit code.
///
/// 0 on success, 1 on tolerance failure, 2 on usage or configuration errors.
pub fn cli_dispatch(args: &[String]) -> i32 {
    let cli = match parse_args(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_tolerance() {
                1
            } else {
                2
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::ListGeometries => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
            Ok(true)
        }
        Command::Gluing(a) => {
            let m = resolve_geometry(&a.geometry, a.n)?;
            let set = a.gluing.mode().compute(&m)?;
            let list: Vec<_> = m
                .interfaces
                .iter()
                .zip(&set.interfaces)
                .enumerate()
                .map(|(i, (iface, g))| {
                    json!({
                        "interface": i,
                        "left": {"patch": iface.left.patch, "side": iface.left.side.index(), "alpha": g.left.alpha, "beta": g.left.beta},
                        "right": {"patch": iface.right.patch, "side": iface.right.side.index(), "alpha": g.right.alpha, "beta": g.right.beta},
                        "reversed": iface.reversed,
                        "residual_alpha": g.report.residual_alpha,
                        "residual_beta": g.report.residual_beta,
                        "alpha_positive": g.report.alpha_positive,
                        "g1_defect": g1_defect(&m, i, &set, 50),
                        "pass": g.report.pass,
                    })
                })
                .collect();
            let mode = if a.gluing.fit { "fit" } else { "recover" };
            print!(
                "{}",
                pretty(&json!({"mode": mode, "tol": a.gluing.tol, "interfaces": list}))
            );
            Ok(set.certified())
        }
        Command::Project(a) => project(a, true),
        Command::CheckC1(a) => project(a, false),
        Command::Convergence(a) => {
            let mut c = StudyConfig::new(&a.geometry, &a.function, a.p);
            if let Some(k) = a.k {
                c.k = k;
            }
            c.levels = a.levels;
            c.n0 = a.n0;
            c.force = a.force;
            c.gluing = a.gluing.mode();
            let r = run_convergence(&c)?;
            emit(&a.out, &r.to_csv())?;
            Ok(r.conforming())
        }
        Command::PSweep(a) => {
            let mut c = StudyConfig::new(
                &a.geometry,
                &a.function,
                a.p_list.iter().copied().max().unwrap_or(3),
            );
            c.n0 = a.n;
            c.force = a.force;
            c.gluing = a.gluing.mode();
            let r = run_p_sweep(&c, &a.p_list, a.k)?;
            emit(&a.out, &r.to_csv())?;
            Ok(r.conforming())
        }
    }
}

fn project(a: ProjectArgs, with_errors: bool) -> Result<bool, HarnessError> {
    let k = a.k.unwrap_or(a.p as i32 - 2);
    let cfg = StudyConfig {
        k,
        ..StudyConfig::new(&a.geometry, &a.function, a.p)
    };
    cfg.validate()?;
    let m = resolve_geometry(&a.geometry, a.n)?;
    let s = solve(&m, &a.function, a.p, k, a.gluing.mode(), a.force)?;
    let report = &s.projection.report;
    let v = if with_errors {
        json!({
            "geometry": a.geometry,
            "function": a.function,
            "p": a.p,
            "k": k,
            "h": m.physical_mesh_size(),
            "conformity": report,
            "errors": s.errors,
        })
    } else {
        serde_json::to_value(report).expect("report serializes")
    };
    emit(&a.out, &pretty(&v))?;
    Ok(report.pass)
}
