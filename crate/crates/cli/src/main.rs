use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nave_core::harness::{
    self, convergence_study, default_methods_specs, default_ridge_grid, parse_ridge_grid, parse_specs,
    render_markdown, run_method, run_methods_table, run_ridge_table, sparse_path, textio, Method, RunParams,
    TableKind, TableRow,
};
use nave_core::problems::{sparse_random_data, OdeKind, ProblemId, SparseSign};
use nave_core::pstructure::{is_p0_matrix_exact, p0_refute_randomized, Certificate, P0Verdict, EXACT_LIMIT};
use nave_core::rng::DEFAULT_SEED;
use nave_core::smoothing::{default_candidates, family_by_name, geometric_grid, loja_verdict};
use nave_core::{NaveError, SolveStatus};

#[derive(Parser)]
#[command(name = "nave", version, about = "Smoothing Newton solvers for nonlinear absolute value equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one catalog problem.
    Solve(SolveArgs),
    /// Structural checks.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Reproduce a comparison table.
    #[command(subcommand)]
    Table(TableCommand),
    /// Solve an ODE discretization or measure its convergence order.
    Ode(OdeArgs),
    /// Coefficients of the l1 heuristic along a penalty path.
    Path(PathArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Smooth,
    Softmax,
    Ip,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem identifier, e.g. `tridiag:d=50:mode=random:seed=7` or `r3:b1`.
    #[arg(long)]
    problem: String,
    #[arg(long, value_enum, default_value = "smooth")]
    method: SolveMethod,
    /// Smoothing kernel for `--method smooth`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    theta: u8,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Seed of the random instance, overriding the one in the identifier.
    #[arg(long)]
    seed: Option<u64>,
    /// Write `k, ||H||, Theta, step, r` per iteration to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print the final iterate.
    #[arg(long)]
    print_x: bool,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// P0 test of a matrix in `dims: r c` text format.
    P0 {
        #[arg(long)]
        matrix: PathBuf,
        /// Distinguish P from P0.
        #[arg(long)]
        strict: bool,
        /// Run the randomized refuter with this many trials.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Lojasiewicz ratio of a smoothing kernel on a geometric grid.
    Loja {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1e6)]
        grid_max: f64,
        #[arg(long, default_value_t = 1.0)]
        grid_min: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Write `x,ratio` pairs here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Args)]
struct Output {
    /// Directory for the table file; Markdown goes to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum TableCommand {
    /// Smoothing kernels against the soft-max and interior-point baselines.
    Methods {
        /// Experiment blocks in `key = value` format.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Asymmetric ridge regression over a (lambda, mu) x (m, d) grid.
    Ridge {
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OdeName {
    Stiff,
    Bvp,
    Arctan,
}

impl From<OdeName> for OdeKind {
    fn from(n: OdeName) -> Self {
        match n {
            OdeName::Stiff => OdeKind::Stiff,
            OdeName::Bvp => OdeKind::Bvp,
            OdeName::Arctan => OdeKind::Arctan,
        }
    }
}

#[derive(Args)]
struct OdeArgs {
    #[arg(value_enum)]
    kind: OdeName,
    /// Run a convergence study over `--h-list`.
    #[arg(long)]
    rates: bool,
    /// Comma-separated, strictly decreasing step sizes; four halved meshes
    /// by default.
    #[arg(long, value_delimiter = ',')]
    h_list: Vec<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    theta: u8,
    /// Stopping tolerance; fine meshes may need more than the default.
    #[arg(long)]
    tol: Option<f64>,
    /// Write `h,error` rows here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PathArgs {
    /// Comma-separated penalties.
    #[arg(long, value_delimiter = ',', required = true)]
    lambdas: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    m: usize,
    #[arg(long, default_value_t = 40)]
    d: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    positive: bool,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    theta: u8,
    /// Write `lambda,coef_1,...` rows here.
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<NaveError> for Failure {
    fn from(e: NaveError) -> Self {
        match e {
            NaveError::ConfigError(_)
            | NaveError::Parse(_)
            | NaveError::InvalidInput(_)
            | NaveError::InvalidSpec(_)
            | NaveError::Io { .. } => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn theta_method(theta: u8) -> Method {
    if theta == 1 {
        Method::Theta1
    } else {
        Method::Theta2
    }
}

fn solve(a: SolveArgs) -> CliResult {
    let mut id: ProblemId = a.problem.parse()?;
    if let Some(s) = a.seed {
        id = id.with_seed(s);
    }
    let resolved = id.build()?;
    let defaults = RunParams::default();
    let params = RunParams {
        tol: a.tol.unwrap_or(defaults.tol),
        max_iter: a.max_iter.unwrap_or(defaults.max_iter),
        eps: a.eps.unwrap_or(defaults.eps),
    };
    if [params.tol, params.eps].iter().any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Failure::Config("tol and eps must be positive".into()));
    }
    let method = match a.method {
        SolveMethod::Smooth => theta_method(a.theta),
        SolveMethod::Softmax => Method::Softmax,
        SolveMethod::Ip => Method::Ip,
    };
    let rep = run_method(&resolved.problem, method, params)?;
    if let Some(path) = &a.trace {
        let mut text = rep.trace_lines().join("\n");
        text.push('\n');
        fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    }
    println!("problem: {id}");
    println!("method: {}", rep.method);
    println!("status: {}", rep.status.as_str());
    println!("iterations: {}", rep.iterations);
    println!("error: {:e}", rep.error);
    println!("time_ms: {:.3}", rep.wall_time.as_secs_f64() * 1e3);
    if let Some(ode) = &resolved.ode {
        if let Ok(e) = ode.error_inf(&rep.x_final) {
            println!("mesh_error: {e:e}");
        }
    }
    if a.print_x {
        let xs: Vec<String> = rep.x_final.iter().map(|v| format!("{v}")).collect();
        println!("x: {}", xs.join(" "));
    }
    if rep.status == SolveStatus::Converged {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "no convergence: {} after {} iterations",
            rep.status.as_str(),
            rep.iterations
        )))
    }
}

fn describe(v: &P0Verdict) {
    println!("verdict: {:?}", v.kind);
    println!("minors_checked: {}", v.minors_checked);
    match &v.certificate {
        None => println!("certificate: none"),
        Some(Certificate::IndexSet(idx)) => println!("certificate: index set {idx:?}"),
        Some(Certificate::Vector(x)) => println!("certificate: vector {x:?}"),
        Some(Certificate::MapPoint { x, index_set }) => {
            println!("certificate: point {x:?} index set {index_set:?}")
        }
    }
}

fn check(c: CheckCommand) -> CliResult {
    match c {
        CheckCommand::P0 {
            matrix,
            strict,
            trials,
            seed,
        } => {
            let a = textio::read_matrix(&matrix)?;
            if !a.is_square() {
                return Err(Failure::Config(format!("matrix is {} x {}, expected square", a.rows(), a.cols())));
            }
            if a.rows() <= EXACT_LIMIT {
                describe(&is_p0_matrix_exact(&a, strict)?);
            }
            if trials.is_some() || a.rows() > EXACT_LIMIT {
                describe(&p0_refute_randomized(&a, trials.unwrap_or(1000), seed)?);
            }
            Ok(())
        }
        CheckCommand::Loja {
            family,
            grid_max,
            grid_min,
            points,
            out,
        } => {
            let fam = family_by_name(&family)?;
            if !(grid_min > 0.0 && grid_max > grid_min) || points < 50 {
                return Err(Failure::Config("need 0 < grid-min < grid-max and at least 50 points".into()));
            }
            let grid = geometric_grid(grid_min, grid_max, points);
            let rep = loja_verdict(fam.as_ref(), &grid, &default_candidates())?;
            let rows: Vec<Vec<f64>> = rep.ratio_samples.iter().map(|&(x, r)| vec![x, r]).collect();
            match out {
                Some(path) => harness::write_plot_data(&path, &["x", "ratio"], &rows)?,
                None => {
                    println!("x,ratio");
                    for (x, r) in &rep.ratio_samples {
                        println!("{x},{r}");
                    }
                }
            }
            let witness = rep
                .condition_ii_witness
                .map(|w| format!("m={} n={} R={}", w.m, w.n, w.r_bound))
                .unwrap_or_else(|| "none".into());
            println!(
                "verdict: {:?} liminf={:e} tail_decay={:.3} witness: {witness}",
                rep.verdict, rep.liminf_estimate, rep.tail_decay
            );
            Ok(())
        }
    }
}

fn emit(rows: &[TableRow], kind: TableKind, name: &str, output: &Output) -> CliResult {
    match &output.out {
        None => print!("{}", render_markdown(rows, kind)),
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
            let path = match output.format {
                Format::Csv => dir.join(format!("{name}.csv")),
                Format::Md => dir.join(format!("{name}.md")),
            };
            match output.format {
                Format::Csv => harness::write_csv(rows, &path)?,
                Format::Md => harness::write_markdown(rows, kind, &path)?,
            }
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn table(t: TableCommand) -> CliResult {
    match t {
        TableCommand::Methods { spec, output } => {
            let specs = match spec {
                Some(p) => parse_specs(&read_text(&p)?)?,
                None => default_methods_specs(),
            };
            let rows = run_methods_table(&specs)?;
            emit(&rows, TableKind::Methods, "methods", &output)
        }
        TableCommand::Ridge { grid, seed, output } => {
            let grid = match grid {
                Some(p) => parse_ridge_grid(&read_text(&p)?)?,
                None => default_ridge_grid(),
            };
            let rows = run_ridge_table(&grid, seed, RunParams::default())?;
            emit(&rows, TableKind::Ridge, "ridge", &output)
        }
    }
}

fn ode(a: OdeArgs) -> CliResult {
    let kind = OdeKind::from(a.kind);
    let (h0, t0, x00) = kind.defaults();
    let t_end = a.t_end.unwrap_or(t0);
    let x0 = a.x0.unwrap_or(x00);
    let method = theta_method(a.theta);
    let params = RunParams {
        tol: a.tol.unwrap_or(RunParams::default().tol),
        ..RunParams::default()
    };
    if a.rates {
        let h_list = if a.h_list.is_empty() {
            kind.default_h_list().to_vec()
        } else {
            a.h_list
        };
        let study = convergence_study(kind, t_end, x0, &h_list, method, params)?;
        println!("h,error,iterations");
        for ((h, e), it) in study.points.iter().zip(&study.iterations) {
            println!("{h},{e:e},{it}");
        }
        println!("slope: {:.4}", study.slope);
        if let Some(path) = a.out {
            harness::write_plot_data(&path, &["h", "error"], &study.plot_rows())?;
        }
    } else {
        let h = a.h.unwrap_or(h0);
        let (disc, p) = kind.build(h, t_end, x0)?;
        let rep = run_method(&p, method, params)?;
        if rep.status != SolveStatus::Converged {
            return Err(Failure::Numerical(format!("no convergence at h = {h}: {}", rep.status.as_str())));
        }
        println!("h: {h}");
        println!("iterations: {}", rep.iterations);
        match disc.error_inf(&rep.x_final) {
            Ok(e) => println!("mesh_error: {e:e}"),
            Err(_) => println!("mesh_error: unavailable"),
        }
        if let Some(path) = a.out {
            let rows: Vec<Vec<f64>> = disc.nodes.iter().zip(&rep.x_final).map(|(&t, &x)| vec![t, x]).collect();
            harness::write_plot_data(&path, &["t", "x"], &rows)?;
        }
    }
    Ok(())
}

fn path(a: PathArgs) -> CliResult {
    let (m, b) = sparse_random_data(a.m, a.d, a.seed);
    let sign = if a.positive {
        SparseSign::Positive
    } else {
        SparseSign::Negative
    };
    let sp = sparse_path(&m, &b, &a.lambdas, sign, theta_method(a.theta), RunParams::default())?;
    if let Some(r) = sp.reports.iter().find(|r| r.status != SolveStatus::Converged) {
        eprintln!("warning: {} at one penalty ({})", r.status.as_str(), r.method);
    }
    let header = sp.header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    harness::write_plot_data(&a.out, &header, &sp.plot_rows())?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Check(c) => check(c),
        Command::Table(t) => table(t),
        Command::Ode(a) => ode(a),
        Command::Path(a) => path(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
