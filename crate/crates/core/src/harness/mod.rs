//! Convergence studies, CSV output and the command line front end.

mod cli;

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::asg1::{global_project, AsgError, GlobalProjection};
use crate::fields::{FieldError, Manufactured};
use crate::geometry::{builtin, load_geometry, GeometryError, MultiPatch, BUILTIN_NAMES};
use crate::gluing::{GluingError, GluingSet, DEFAULT_LAMBDA_BETA, DEFAULT_TOL};
use crate::norms::{observed_order, physical_error_norms, ErrorTable, NormError};

pub use cli::{cli_dispatch, parse_args, Cli, Command};

pub const CSV_HEADER: &str = "level,h,p,k,e_L2,e_H1,e_H2,rate_L2,rate_H1,rate_H2";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Gluing(#[from] GluingError),
    #[error(transparent)]
    Projection(#[from] AsgError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("cannot write {path}: {msg}")]
    Io { path: String, msg: String },
}

impl HarnessError {
    /// Whether the failure is a tolerance failure rather than a usage error.
    ///
    /// A geometry that fails AS-G¹ certification counts as a tolerance failure.
    pub fn is_tolerance(&self) -> bool {
        matches!(
            self,
            HarnessError::Projection(AsgError::NotCertified { .. })
                | HarnessError::Gluing(GluingError::AlphaSign { .. })
        )
    }
}

/// How gluing data is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GluingMode {
    Recover { tol: f64 },
    Fit { lambda_beta: f64 },
}

impl Default for GluingMode {
    fn default() -> Self {
        GluingMode::Recover { tol: DEFAULT_TOL }
    }
}

impl GluingMode {
    pub fn fit_default() -> Self {
        GluingMode::Fit {
            lambda_beta: DEFAULT_LAMBDA_BETA,
        }
    }

    pub fn compute(&self, m: &MultiPatch) -> Result<GluingSet, GluingError> {
        match *self {
            GluingMode::Recover { tol } => GluingSet::recover(m, tol),
            GluingMode::Fit { lambda_beta } => GluingSet::fit(m, lambda_beta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    /// Built-in name or path to a geometry JSON file.
    pub geometry: String,
    pub function: String,
    pub p: usize,
    pub k: i32,
    pub levels: usize,
    /// Elements per direction of built-ins on the coarsest level.
    pub n0: usize,
    pub gluing: GluingMode,
    pub force: bool,
}

impl StudyConfig {
    /// Defaults: `k = p - 2`, three levels from `n0 = 8`.
    pub fn new(geometry: &str, function: &str, p: usize) -> Self {
        StudyConfig {
            geometry: geometry.to_string(),
            function: function.to_string(),
            p,
            k: p as i32 - 2,
            levels: 3,
            n0: 8,
            gluing: GluingMode::default(),
            force: false,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.k < 1 || self.k + 2 > self.p as i32 {
            return Err(HarnessError::Config(format!(
                "need 3 <= k+2 <= p, got p={} k={}",
                self.p, self.k
            )));
        }
        if self.levels == 0 {
            return Err(HarnessError::Config("levels must be at least 1".into()));
        }
        if self.n0 == 0 {
            return Err(HarnessError::Config("n0 must be at least 1".into()));
        }
        Ok(())
    }
}

/// Geometry by built-in name with `n` elements per direction, or from a file.
pub fn resolve_geometry(source: &str, n: usize) -> Result<MultiPatch, HarnessError> {
    if BUILTIN_NAMES.contains(&source) {
        Ok(builtin(source, n)?)
    } else if std::path::Path::new(source).exists() {
        Ok(load_geometry(source)?)
    } else {
        Err(HarnessError::Config(format!(
            "unknown geometry '{source}' (built-ins: {})",
            BUILTIN_NAMES.join(", ")
        )))
    }
}

fn check_mesh(m: &MultiPatch, p: usize) -> Result<(), HarnessError> {
    let h = m.parametric_h();
    let limit = 1.0 / (p as f64 + 1.0);
    if h > limit * (1.0 + 1e-12) {
        let need = (p + 1).max(1);
        return Err(HarnessError::Config(format!(
            "parametric mesh size {h} exceeds 1/(p+1) = {limit}; use at least {need} elements per direction (--n0/--n)"
        )));
    }
    Ok(())
}

/// One projection with its error table.
pub struct Solve {
    pub projection: GlobalProjection,
    pub errors: ErrorTable,
    pub gluing: GluingSet,
}

/// Projects `function` on `m` and measures the physical errors.
pub fn solve(
    m: &MultiPatch,
    function: &str,
    p: usize,
    k: i32,
    mode: GluingMode,
    force: bool,
) -> Result<Solve, HarnessError> {
    check_mesh(m, p)?;
    let u = Manufactured::by_name(function)?;
    let gluing = mode.compute(m)?;
    let projection = global_project(m, &gluing, &u, p, k, force)?;
    let errors = ErrorTable::new(
        m.patches
            .iter()
            .zip(&projection.patches)
            .map(|(patch, pp)| physical_error_norms(patch, &u, &pp.result, None))
            .collect::<Result<_, _>>()?,
    );
    Ok(Solve {
        projection,
        errors,
        gluing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub level: usize,
    pub h: f64,
    pub p: usize,
    pub k: i32,
    /// Full `L²`, `H¹`, `H²` error norms.
    pub errors: [f64; 3],
    pub rates: Option<[Option<f64>; 3]>,
    pub conforming: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub rows: Vec<StudyRow>,
}

impl StudyResult {
    pub fn conforming(&self) -> bool {
        self.rows.iter().all(|r| r.conforming)
    }

    /// Rates of the last row.
    pub fn finest_rates(&self) -> Option<[Option<f64>; 3]> {
        self.rows.last().and_then(|r| r.rates)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let rate = |i: usize| match r.rates.and_then(|v| v[i]) {
                Some(x) => sci(x),
                None => String::new(),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.level,
                sci(r.h),
                r.p,
                r.k,
                sci(r.errors[0]),
                sci(r.errors[1]),
                sci(r.errors[2]),
                rate(0),
                rate(1),
                rate(2)
            );
        }
        s
    }
}

/// Scientific notation with 6 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn rates(prev: &[f64; 3], cur: &[f64; 3]) -> [Option<f64>; 3] {
    [0, 1, 2].map(|i| observed_order(prev[i], cur[i]))
}

/// Uniform dyadic h-refinement study.
pub fn run_convergence(config: &StudyConfig) -> Result<StudyResult, HarnessError> {
    config.validate()?;
    let mut m = resolve_geometry(&config.geometry, config.n0)?;
    let mut rows: Vec<StudyRow> = Vec::with_capacity(config.levels);
    for level in 0..config.levels {
        if level > 0 {
            m = m.refined();
        }
        let s = solve(
            &m,
            &config.function,
            config.p,
            config.k,
            config.gluing,
            config.force,
        )?;
        let errors = s.errors.global.full();
        let rates = rows.last().map(|r| rates(&r.errors, &errors));
        rows.push(StudyRow {
            level,
            h: m.physical_mesh_size(),
            p: config.p,
            k: config.k,
            errors,
            rates,
            conforming: s.projection.report.pass,
        });
    }
    Ok(StudyResult {
        config: config.clone(),
        rows,
    })
}

/// Errors for each degree in `ps` at fixed mesh (`config.n0` elements),
/// with `k = p - 2` unless `fixed_k` is given.
pub fn run_p_sweep(
    config: &StudyConfig,
    ps: &[usize],
    fixed_k: Option<i32>,
) -> Result<StudyResult, HarnessError> {
    if ps.is_empty() {
        return Err(HarnessError::Config("empty degree list".into()));
    }
    let m = resolve_geometry(&config.geometry, config.n0)?;
    let mut rows = Vec::with_capacity(ps.len());
    for (level, &p) in ps.iter().enumerate() {
        let k = fixed_k.unwrap_or(p as i32 - 2);
        let cfg = StudyConfig {
            p,
            k,
            levels: 1,
            ..config.clone()
        };
        cfg.validate()?;
        let s = solve(&m, &config.function, p, k, config.gluing, config.force)?;
        rows.push(StudyRow {
            level,
            h: m.physical_mesh_size(),
            p,
            k,
            errors: s.errors.global.full(),
            rates: None,
            conforming: s.projection.report.pass,
        });
    }
    Ok(StudyResult {
        config: config.clone(),
        rows,
    })
}
