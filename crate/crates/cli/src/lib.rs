//! Command implementations behind the `toricgk` binary.
//!
//! Every command reads a [`RunConfig`], writes its result to a file or
//! stdout, and maps the outcome onto an [`Outcome`]: pass, tolerance
//! failure, or invalid input.

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;
use toric_gk::clifford::clifford_selftest;
use toric_gk::connection::ConnectionReport;
use toric_gk::curvature::curvature_sample;
use toric_gk::frame::FrameResiduals;
use toric_gk::{
    assemble_frame, connection_report, equivalence_scan, interior_grid, kappa_from_ricci, optimize, ricci_form,
    validate_params, GkError, Params64, Potential64,
};

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config {origin} at line {line}, column {column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("parameters are inadmissible: minimum eigenvalue {eigenvalue:e} at {point:?}")]
    Inadmissible { eigenvalue: f64, point: Vec<f64> },
    #[error(transparent)]
    Model(#[from] GkError),
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot encode JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// What a finished command reports to the shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    ToleranceFailure,
}

impl Outcome {
    fn from_pass(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::ToleranceFailure
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::ToleranceFailure => 1,
        }
    }
}

pub const INVALID_INPUT_EXIT: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Admissibility of C and F over the grid.
    Validate,
    /// Frame matrices and their algebraic identities at every grid point.
    Frame,
    /// Curvature values and Ricci forms at every grid point.
    Curvature,
    /// CSV scan comparing the two scalar curvatures.
    Equivalence,
    /// Connection, torsion and curvature-symmetry residuals.
    ConnectionSuite,
    /// Clifford and spinor identities on seeded random data.
    CliffordSelftest,
    /// Constant scalar curvature search in a polynomial slice.
    CscOptimize,
}

/// Where a command writes its primary output.
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn new(path: Option<PathBuf>) -> Self {
        path.map_or(Sink::Stdout, Sink::File)
    }

    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match self {
            Sink::Stdout => Box::new(std::io::stdout().lock()),
            Sink::File(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        })
    }
}

fn write_json<T: Serialize>(sink: &Sink, value: &T) -> Result<(), CliError> {
    let mut w = sink.writer()?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn coords(mu: &DVector<f64>) -> Vec<f64> {
    mu.iter().copied().collect()
}

/// Parsed model pieces shared by the grid commands.
struct Setup {
    model: Potential64,
    params: Params64,
    grid: Vec<DVector<f64>>,
}

fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    let model = cfg.potential()?;
    let params = cfg.params()?;
    let grid = interior_grid(model.polytope(), &cfg.grid)?;
    if grid.is_empty() {
        return Err(GkError::GridTooCoarse.into());
    }
    let report = validate_params(&model, &params, &grid);
    if let Some(e) = report.evaluation_failures.first() {
        return Err(CliError::Invalid(e.clone()));
    }
    if !report.passed {
        return Err(CliError::Inadmissible {
            eigenvalue: report.min_eigenvalue,
            point: report.argmin.unwrap_or_default(),
        });
    }
    Ok(Setup { model, params, grid })
}

/// Runs `command`. `config` may only be omitted for the Clifford self-test.
pub fn run(command: Command, config: Option<&Path>, sink: &Sink) -> Result<Outcome, CliError> {
    let cfg = match config {
        Some(p) => Some(RunConfig::load(p)?),
        None if command == Command::CliffordSelftest => None,
        None => return Err(CliError::Invalid("a config file is required".into())),
    };
    match (command, cfg) {
        (Command::CliffordSelftest, cfg) => clifford(cfg.as_ref(), sink),
        (cmd, Some(cfg)) => match cmd {
            Command::Validate => validate(&cfg, sink),
            Command::Frame => frame(&cfg, sink),
            Command::Curvature => curvature(&cfg, sink),
            Command::Equivalence => equivalence(&cfg, sink),
            Command::ConnectionSuite => connection(&cfg, sink),
            Command::CscOptimize => csc(&cfg, sink),
            Command::CliffordSelftest => unreachable!(),
        },
        (_, None) => unreachable!(),
    }
}

fn validate(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let s = setup(cfg)?;
    write_json(sink, &validate_params(&s.model, &s.params, &s.grid))?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct FramePoint {
    mu: Vec<f64>,
    j_plus: Vec<Vec<f64>>,
    j_minus: Vec<Vec<f64>>,
    metric: Vec<Vec<f64>>,
    b_field: Vec<Vec<f64>>,
    xi: Vec<Vec<f64>>,
    residuals: FrameResiduals,
}

#[derive(Serialize)]
struct FrameOutput {
    tolerance: f64,
    max_identity_residual: f64,
    passed: bool,
    points: Vec<FramePoint>,
}

fn frame(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let s = setup(cfg)?;
    let tol = cfg.tolerance("frame");
    let mut points = Vec::with_capacity(s.grid.len());
    let mut passed = true;
    let mut worst = 0.0f64;
    for mu in &s.grid {
        let fr = assemble_frame(&s.model, &s.params, mu)?;
        let r = fr.residuals();
        passed &= r.passes(tol);
        worst = worst.max(r.max_identity_residual());
        points.push(FramePoint {
            mu: coords(mu),
            j_plus: rows(&fr.j_plus),
            j_minus: rows(&fr.j_minus),
            metric: rows(&fr.g),
            b_field: rows(&fr.b),
            xi: rows(&fr.xi),
            residuals: r,
        });
    }
    write_json(
        sink,
        &FrameOutput {
            tolerance: tol,
            max_identity_residual: worst,
            passed,
            points,
        },
    )?;
    Ok(Outcome::from_pass(passed))
}

#[derive(Serialize)]
struct CurvaturePoint {
    mu: Vec<f64>,
    kappa_boulanger: f64,
    kappa_goto: f64,
    kappa_from_ricci: f64,
    ricci_form: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct CurvatureOutput {
    tolerance: f64,
    max_ricci_discrepancy: f64,
    passed: bool,
    points: Vec<CurvaturePoint>,
}

fn curvature(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let s = setup(cfg)?;
    let tol = cfg.tolerance("ricci");
    let mut worst = 0.0f64;
    let mut points = Vec::with_capacity(s.grid.len());
    for mu in &s.grid {
        let sample = curvature_sample(&s.model, &s.params, mu)?;
        let p1 = ricci_form(&s.model, &s.params, mu)?;
        debug_assert_eq!(kappa_from_ricci(&p1), sample.kappa_from_ricci);
        worst = worst.max((sample.kappa_from_ricci - sample.kappa_goto).abs() / (1.0 + sample.kappa_goto.abs()));
        points.push(CurvaturePoint {
            mu: sample.mu,
            kappa_boulanger: sample.kappa_boulanger,
            kappa_goto: sample.kappa_goto,
            kappa_from_ricci: sample.kappa_from_ricci,
            ricci_form: rows(&p1.p1),
        });
    }
    let passed = worst <= tol;
    write_json(
        sink,
        &CurvatureOutput {
            tolerance: tol,
            max_ricci_discrepancy: worst,
            passed,
            points,
        },
    )?;
    Ok(Outcome::from_pass(passed))
}

/// `{:.16e}` keeps 17 significant digits, enough to round-trip an `f64`.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn equivalence(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let s = setup(cfg)?;
    let tol = cfg.tolerance("equivalence");
    let ricci_tol = cfg.tolerance("ricci");
    let scan = equivalence_scan(&s.model, &s.params, &s.grid, tol);
    let n = s.model.dim();
    {
        let mut w = csv::Writer::from_writer(sink.writer()?);
        let mut header: Vec<String> = (1..=n).map(|i| format!("mu_{i}")).collect();
        header.extend(["kappa_boulanger", "kappa_goto", "kappa_from_ricci", "abs_diff"].map(String::from));
        w.write_record(&header)?;
        for sample in &scan.samples {
            let mut rec: Vec<String> = sample.mu.iter().copied().map(float).collect();
            rec.extend(
                [
                    sample.kappa_boulanger,
                    sample.kappa_goto,
                    sample.kappa_from_ricci,
                    sample.abs_diff,
                ]
                .map(float),
            );
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    let sum = &scan.summary;
    eprintln!(
        "{} points, {} failed, max relative |kappa_B - kappa_G| {:e} (tolerance {:e}), max Ricci discrepancy {:e}",
        sum.points, sum.failures, sum.max_relative_discrepancy, tol, sum.max_ricci_discrepancy
    );
    for f in &scan.failed_points {
        eprintln!("failed at {:?}: {}", f.mu, f.error);
    }
    Ok(Outcome::from_pass(sum.passed && sum.max_ricci_discrepancy <= ricci_tol))
}

#[derive(Serialize)]
struct ConnectionOutput {
    tolerances: ConnectionTolerances,
    worst: ConnectionWorst,
    passed: bool,
    points: Vec<ConnectionReport>,
}

#[derive(Serialize)]
struct ConnectionTolerances {
    constancy: f64,
    curvature_symmetry: f64,
    integrability: f64,
    epsilon: f64,
}

#[derive(Serialize, Default)]
struct ConnectionWorst {
    constancy: f64,
    curvature_symmetry: f64,
    integrability: f64,
    epsilon: f64,
}

fn connection(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let s = setup(cfg)?;
    let tol = ConnectionTolerances {
        constancy: cfg.tolerance("constancy"),
        curvature_symmetry: cfg.tolerance("curvature_symmetry"),
        integrability: cfg.tolerance("integrability"),
        epsilon: cfg.tolerance("epsilon"),
    };
    let mut worst = ConnectionWorst::default();
    let mut points = Vec::with_capacity(s.grid.len());
    for mu in &s.grid {
        let r = connection_report(&s.model, &s.params, mu)?;
        worst.constancy = worst.constancy.max(r.constancy.max());
        worst.curvature_symmetry = worst
            .curvature_symmetry
            .max(r.pair_symmetry)
            .max(r.j_minus_invariance)
            .max(r.curvature_antisymmetry);
        let i = &r.integrability;
        worst.integrability = worst
            .integrability
            .max(i.dc_sum)
            .max(i.torsion_plus)
            .max(i.torsion_minus)
            .max(r.torsion_alternation);
        worst.epsilon = worst.epsilon.max(r.epsilon_residual);
        points.push(r);
    }
    let passed = worst.constancy <= tol.constancy
        && worst.curvature_symmetry <= tol.curvature_symmetry
        && worst.integrability <= tol.integrability
        && worst.epsilon <= tol.epsilon;
    write_json(
        sink,
        &ConnectionOutput {
            tolerances: tol,
            worst,
            passed,
            points,
        },
    )?;
    Ok(Outcome::from_pass(passed))
}

const DEFAULT_SAMPLES: usize = 8;

fn clifford(cfg: Option<&RunConfig>, sink: &Sink) -> Result<Outcome, CliError> {
    let seed = cfg.map_or(config::DEFAULT_SEED, RunConfig::seed);
    let samples = cfg.and_then(|c| c.samples).unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::Invalid("samples must be at least 1".into()));
    }
    let tol = cfg.map_or(1e-12, |c| c.tolerance("clifford"));
    let report = clifford_selftest(seed, samples)?;
    let passed = report.passed && report.checks.iter().filter(|c| c.n <= 2).all(|c| c.value <= tol);
    write_json(sink, &report)?;
    Ok(Outcome::from_pass(passed))
}

fn csc(cfg: &RunConfig, sink: &Sink) -> Result<Outcome, CliError> {
    let s = setup(cfg)?;
    let basis = cfg.basis()?;
    let budget = cfg.budget.unwrap_or(200);
    let report = optimize(&s.model, &s.params, &s.grid, &basis, budget)?;
    let passed = report.final_objective <= cfg.tolerance("csc");
    write_json(sink, &report)?;
    Ok(Outcome::from_pass(passed))
}
