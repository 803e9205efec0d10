//! Experiment runner: method tables, ridge tables, ODE convergence studies,
//! and their CSV/Markdown/plot-data output.

mod config;
mod emit;
mod study;
pub mod textio;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::RngCore;

pub use config::{parse_ridge_grid, parse_specs};
pub use emit::{read_csv, render_csv, render_markdown, write_csv, write_markdown, write_plot_data, TableKind};
pub use study::{convergence_study, least_squares_slope, sparse_path, ConvergenceStudy, SparsePath};

use crate::baselines::{solve_interior_point, solve_softmax, BaselineConfig};
use crate::error::{NaveError, Result};
use crate::nave::NaveProblem;
use crate::problems::{ProblemId, R3_RHS, R4_RHS};
use crate::rng::{self, DEFAULT_SEED};
use crate::smoothing::{Theta1, Theta2};
use crate::solver::{newton_armijo_solve, SolveReport, SolveStatus, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Theta1,
    Theta2,
    Softmax,
    Ip,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Theta1, Method::Theta2, Method::Softmax, Method::Ip];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Theta1 => "theta1",
            Method::Theta2 => "theta2",
            Method::Softmax => "softmax",
            Method::Ip => "ip",
        }
    }

    /// Column heading used in Markdown tables.
    pub fn heading(&self) -> &'static str {
        match self {
            Method::Theta1 => "θ₁",
            Method::Theta2 => "θ₂",
            Method::Softmax => "SM",
            Method::Ip => "IP",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = NaveError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "theta1" | "1" => Ok(Method::Theta1),
            "theta2" | "2" => Ok(Method::Theta2),
            "softmax" | "sm" => Ok(Method::Softmax),
            "ip" => Ok(Method::Ip),
            other => Err(NaveError::ConfigError(format!("unknown method '{other}'"))),
        }
    }
}

/// Stopping parameters shared by every method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub tol: f64,
    pub max_iter: usize,
    pub eps: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        let s = SolverConfig::default();
        RunParams {
            tol: s.tol,
            max_iter: s.max_iter,
            eps: s.epsilon,
        }
    }
}

/// Solves `p` with `method`.
pub fn run_method(p: &NaveProblem, method: Method, params: RunParams) -> Result<SolveReport> {
    match method {
        Method::Theta1 | Method::Theta2 => {
            let mut cfg = match method {
                Method::Theta1 => SolverConfig::with_family(Arc::new(Theta1)),
                _ => SolverConfig::with_family(Arc::new(Theta2)),
            };
            cfg.tol = params.tol;
            cfg.max_iter = params.max_iter;
            cfg.epsilon = params.eps;
            newton_armijo_solve(p, &cfg)
        }
        Method::Softmax | Method::Ip => {
            let cfg = BaselineConfig {
                tol: params.tol,
                max_iter: params.max_iter,
                ..Default::default()
            };
            if method == Method::Softmax {
                solve_softmax(p, &cfg)
            } else {
                solve_interior_point(p, &cfg)
            }
        }
    }
}

/// One row of a methods table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub problem_id: String,
    pub methods: Vec<Method>,
    pub tol: f64,
    pub max_iter: usize,
    pub eps: f64,
    pub seed: u64,
    pub repetitions: usize,
    /// Row label; the problem id when absent.
    pub label: Option<String>,
}

impl ExperimentSpec {
    pub fn new(problem_id: impl Into<String>, methods: Vec<Method>) -> Self {
        let p = RunParams::default();
        ExperimentSpec {
            problem_id: problem_id.into(),
            methods,
            tol: p.tol,
            max_iter: p.max_iter,
            eps: p.eps,
            seed: DEFAULT_SEED,
            repetitions: 1,
            label: None,
        }
    }

    pub fn params(&self) -> RunParams {
        RunParams {
            tol: self.tol,
            max_iter: self.max_iter,
            eps: self.eps,
        }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.problem_id)
    }

    /// Checks the invariants and that the problem id resolves.
    pub fn validate(&self) -> Result<ProblemId> {
        if self.methods.is_empty() {
            return Err(NaveError::ConfigError(format!("{}: no methods", self.problem_id)));
        }
        if self.repetitions == 0 {
            return Err(NaveError::ConfigError(format!("{}: repetitions must be >= 1", self.problem_id)));
        }
        if !(self.tol > 0.0) || !(self.eps > 0.0) {
            return Err(NaveError::ConfigError(format!(
                "{}: tol and eps must be positive",
                self.problem_id
            )));
        }
        self.problem_id.parse()
    }
}

/// Seed of repetition `rep`: the spec seed itself for the first, then the
/// first draw of ChaCha stream `rep`.
pub fn repetition_seed(seed: u64, rep: usize) -> u64 {
    if rep == 0 {
        seed
    } else {
        rng::stream(seed, rep as u64).next_u64()
    }
}

/// Aggregated result of one method on one row.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub method: Method,
    /// Lower median over repetitions, or NaN.
    pub error: f64,
    pub iterations: usize,
    pub time_ms: f64,
    pub status: SolveStatus,
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub label: String,
    pub cells: Vec<Cell>,
    /// Every solve behind each cell, aligned with `cells`.
    pub reports: Vec<Vec<SolveReport>>,
}

impl PartialEq for TableRow {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.cells == other.cells
    }
}

impl TableRow {
    pub fn cell(&self, method: Method) -> Option<&Cell> {
        self.cells.iter().find(|c| c.method == method)
    }

    pub fn reports_for(&self, method: Method) -> Option<&[SolveReport]> {
        let i = self.cells.iter().position(|c| c.method == method)?;
        Some(&self.reports[i])
    }
}

fn lower_median<T: Copy>(mut v: Vec<T>, cmp: impl Fn(&T, &T) -> std::cmp::Ordering) -> T {
    v.sort_by(cmp);
    v[(v.len() - 1) / 2]
}

/// Aggregates repeated solves into one cell. The status is `Converged` only
/// when every repetition converged; otherwise it is the first failure.
pub fn aggregate(method: Method, reports: &[SolveReport]) -> Cell {
    let status = reports
        .iter()
        .map(|r| r.status)
        .find(|s| *s != SolveStatus::Converged)
        .unwrap_or(SolveStatus::Converged);
    let error = lower_median(reports.iter().map(|r| r.error).collect(), |a, b| a.total_cmp(b));
    let error = if status == SolveStatus::Converged || error.is_finite() {
        error
    } else {
        f64::NAN
    };
    Cell {
        method,
        error,
        iterations: lower_median(reports.iter().map(|r| r.iterations).collect(), |a, b| a.cmp(b)),
        time_ms: lower_median(
            reports.iter().map(|r| r.wall_time.as_secs_f64() * 1e3).collect(),
            |a, b| a.total_cmp(b),
        ),
        status,
    }
}

fn run_row(label: String, id: &ProblemId, methods: &[Method], params: RunParams, seed: u64, reps: usize) -> Result<TableRow> {
    let problems: Vec<NaveProblem> = (0..reps)
        .map(|j| id.with_seed(repetition_seed(seed, j)).build().map(|r| r.problem))
        .collect::<Result<_>>()?;
    let mut cells = Vec::with_capacity(methods.len());
    let mut reports = Vec::with_capacity(methods.len());
    for &m in methods {
        let reps: Vec<SolveReport> = problems
            .iter()
            .map(|p| run_method(p, m, params))
            .collect::<Result<_>>()?;
        cells.push(aggregate(m, &reps));
        reports.push(reps);
    }
    Ok(TableRow { label, cells, reports })
}

/// Runs every spec after validating all of them; an invalid spec aborts
/// before any solve starts.
pub fn run_methods_table(specs: &[ExperimentSpec]) -> Result<Vec<TableRow>> {
    let ids: Vec<ProblemId> = specs.iter().map(|s| s.validate()).collect::<Result<_>>()?;
    specs
        .iter()
        .zip(&ids)
        .map(|(s, id)| run_row(s.label().to_string(), id, &s.methods, s.params(), s.seed, s.repetitions))
        .collect()
}

/// One cell of the ridge grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeCell {
    pub lam: f64,
    pub mu: f64,
    pub m: usize,
    pub d: usize,
}

impl RidgeCell {
    pub fn label(&self) -> String {
        format!("({}, {}) ({}, {})", self.lam, self.mu, self.m, self.d)
    }

    pub fn problem_id(&self, seed: u64) -> ProblemId {
        ProblemId::Ridge {
            seed,
            m: self.m,
            d: self.d,
            lam: self.lam,
            mu: self.mu,
        }
    }
}

/// `(λ̄, μ̄) ∈ {(0, 100), (200, 1000)}` × `(m, d) ∈ {3, 5, 10, 20} × {10}`.
pub fn default_ridge_grid() -> Vec<RidgeCell> {
    let mut g = Vec::new();
    for (lam, mu) in [(0.0, 100.0), (200.0, 1000.0)] {
        for m in [3, 5, 10, 20] {
            g.push(RidgeCell { lam, mu, m, d: 10 });
        }
    }
    g
}

/// Both smoothing kernels on every cell, each instance drawn with `seed`.
pub fn run_ridge_table(grid: &[RidgeCell], seed: u64, params: RunParams) -> Result<Vec<TableRow>> {
    if let Some(c) = grid.iter().find(|c| c.lam == c.mu) {
        return Err(NaveError::ConfigError(format!("ridge cell {} has lam = mu", c.label())));
    }
    grid.iter()
        .map(|c| run_row(c.label(), &c.problem_id(seed), &[Method::Theta1, Method::Theta2], params, seed, 1))
        .collect()
}

/// Rows of the methods comparison: tridiagonal `d ∈ {10, 50, 200}` with
/// random `b`, then the cubic and quadratic examples with each printed
/// right-hand side.
pub fn default_methods_specs() -> Vec<ExperimentSpec> {
    let mut v = Vec::new();
    for d in [10, 50, 200] {
        let mut s = ExperimentSpec::new(format!("tridiag:d={d}:mode=random:seed={DEFAULT_SEED}"), Method::ALL.to_vec());
        s.label = Some(format!("tridiag d={d}"));
        v.push(s);
    }
    for (name, _) in R3_RHS {
        v.push(ExperimentSpec::new(format!("r3:{name}"), Method::ALL.to_vec()));
    }
    for (name, _) in R4_RHS {
        v.push(ExperimentSpec::new(format!("r4:{name}"), Method::ALL.to_vec()));
    }
    v
}
