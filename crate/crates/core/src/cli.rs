//! Command-line front end.
//!
//! Exit codes: 0 all checks pass, 1 check failure, 2 solver non-success,
//! 3 input or usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::certify;
use crate::gallery::projection_example;
use crate::io::{fmt_real, fmt_vector, load_instance, load_operator, save_operator, save_report};
use crate::lcp::{
    solve, LcpError, LcpInstance, LcpSolution, SolverChoice, DEFAULT_DIM_LIMIT, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use crate::report::{to_json, Analysis, TextReport};
use crate::sweep::{range_representative, run_sweep, RankPolicy, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "LCP_BOUNDS_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "lcp-bounds",
    version,
    about = "Spectral functionals, LCP solving and solution-set bound certificates"
)]
pub struct Cli {
    /// Emit JSON instead of key = value text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral summary, duality and Penrose residuals of an operator file.
    Analyze {
        operator: PathBuf,
        /// Override the rank tolerance stored in the file.
        #[arg(long)]
        rank_tol: Option<f64>,
    },
    /// Solve an instance file.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also write the text report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and certify every bound.
    Certify {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Certify the R(T) component of the solution when it is itself a solution.
        #[arg(long)]
        range_representative: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized solve + certify over planted PSD instances.
    Sweep(SweepArgs),
    /// Write the projection example files and print the expected values.
    Example {
        k: usize,
        n: usize,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverName {
    Lemke,
    Pgs,
    #[value(alias = "enumeration")]
    Enum,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverName::Lemke)]
    pub solver: SolverName,
    #[arg(long, env = TOL_ENV, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Pivot limit (lemke), sweep limit (pgs) or dimension limit (enum).
    #[arg(long)]
    pub max_iters: Option<usize>,
}

impl SolverArgs {
    fn choice(&self) -> SolverChoice {
        match self.solver {
            SolverName::Lemke => SolverChoice::Lemke {
                max_pivots: self.max_iters,
            },
            SolverName::Pgs => SolverChoice::Pgs {
                max_iters: self.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
            },
            SolverName::Enum => SolverChoice::Enumeration {
                dim_limit: self.max_iters.unwrap_or(DEFAULT_DIM_LIMIT),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankArg {
    Full,
    Deficient,
    Mixed,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub dim_min: usize,
    #[arg(long, default_value_t = 10)]
    pub dim_max: usize,
    #[arg(long, value_enum, default_value_t = RankArg::Mixed)]
    pub rank: RankArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = TOL_ENV, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.1)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub lambda_max: f64,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Largest dimension checked against the enumeration oracle.
    #[arg(long, default_value_t = 6)]
    pub oracle_dim: usize,
}

impl SweepArgs {
    pub fn config(&self) -> SweepConfig {
        SweepConfig {
            count: self.count,
            dim_min: self.dim_min,
            dim_max: self.dim_max,
            rank_policy: match self.rank {
                RankArg::Full => RankPolicy::Full,
                RankArg::Deficient => RankPolicy::Deficient,
                RankArg::Mixed => RankPolicy::Mixed,
            },
            seed: self.seed,
            tol: self.tol,
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            threads: self.threads,
            oracle_dim: self.oracle_dim,
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
}

impl Io<'_> {
    fn emit<R: TextReport + serde::Serialize>(&mut self, report: &R) {
        let text = if self.json {
            to_json(report) + "\n"
        } else {
            report.to_text()
        };
        let _ = self.out.write_all(text.as_bytes());
    }

    fn fail(&mut self, code: i32, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {msg}");
        code
    }
}

fn solver_status(e: &LcpError) -> &'static str {
    match e {
        LcpError::RayTermination { .. } => "ray-termination",
        LcpError::PivotLimit { .. } => "pivot-limit",
        LcpError::NumericalBreakdown { .. } => "numerical-breakdown",
        LcpError::NoConvergence { .. } => "no-convergence",
        LcpError::StructuralInfeasibility { .. } => "structural-infeasibility",
        _ => "input-error",
    }
}

fn run_solver(io: &mut Io, inst: &LcpInstance, args: &SolverArgs) -> Result<LcpSolution, i32> {
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(io.fail(EXIT_INPUT, "tol must be positive"));
    }
    solve(inst, args.choice(), args.tol).map_err(|e| {
        let code = match e {
            LcpError::DimensionMismatch { .. } | LcpError::NonFinite(..) | LcpError::DimensionLimit { .. } => {
                EXIT_INPUT
            }
            _ => EXIT_SOLVER,
        };
        if code == EXIT_SOLVER && !io.json {
            let _ = writeln!(io.out, "status = {}", solver_status(&e));
            if let LcpError::NoConvergence { best } = &e {
                let _ = io.out.write_all(best.to_text().as_bytes());
            }
        }
        io.fail(code, e)
    })
}

fn cmd_analyze(io: &mut Io, path: &Path, rank_tol: Option<f64>) -> i32 {
    let op = match load_operator(path) {
        Ok(op) => op,
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    let op = match rank_tol.map(|t| op.with_rank_tol(t)) {
        None => op,
        Some(Ok(op)) => op,
        Some(Err(e)) => return io.fail(EXIT_INPUT, e),
    };
    let analysis = Analysis::of(&op);
    io.emit(&analysis);
    if analysis.identities_hold() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_solve(io: &mut Io, path: &Path, args: &SolverArgs, out: Option<&Path>) -> i32 {
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    let sol = match run_solver(io, &inst, args) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if !io.json {
        let _ = writeln!(io.out, "status = verified");
    }
    io.emit(&sol);
    if let Some(p) = out {
        if let Err(e) = save_report(p, &sol) {
            return io.fail(EXIT_INPUT, e);
        }
    }
    EXIT_OK
}

fn cmd_certify(io: &mut Io, path: &Path, args: &SolverArgs, range_rep: bool, out: Option<&Path>) -> i32 {
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    let mut sol = match run_solver(io, &inst, args) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if range_rep {
        sol = range_representative(&inst, &sol, args.tol);
    }
    let cert = match certify(&inst, &sol, args.tol) {
        Ok(c) => c,
        Err(e) => return io.fail(EXIT_CHECK_FAILED, e),
    };
    io.emit(&cert);
    if let Some(p) = out {
        if let Err(e) = save_report(p, &cert) {
            return io.fail(EXIT_INPUT, e);
        }
    }
    if cert.passes() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_sweep(io: &mut Io, args: &SweepArgs) -> i32 {
    let cfg = args.config();
    if let Err(msg) = cfg.validate() {
        return io.fail(EXIT_INPUT, msg);
    }
    let summary = run_sweep(&cfg);
    io.emit(&summary);
    if summary.any_check_failed() {
        EXIT_CHECK_FAILED
    } else if summary.solver_failures > 0 {
        EXIT_SOLVER
    } else {
        EXIT_OK
    }
}

fn cmd_example(io: &mut Io, k: usize, n: usize, dir: &Path) -> i32 {
    let ex = match projection_example(k, n) {
        Ok(ex) => ex,
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    let label = &ex.instance.label;
    let op_path = dir.join(format!("{label}.op"));
    let inst_path = dir.join(format!("{label}.lcp"));
    let saved = std::fs::create_dir_all(dir)
        .map_err(|e| e.to_string())
        .and_then(|_| save_operator(&op_path, ex.instance.operator()).map_err(|e| e.to_string()))
        .and_then(|_| {
            let text = format!("operator: {label}.op\nb: {}\n", fmt_vector(ex.instance.b()));
            std::fs::write(&inst_path, text).map_err(|e| format!("{}: {e}", inst_path.display()))
        });
    if let Err(e) = saved {
        return io.fail(EXIT_INPUT, e);
    }
    if io.json {
        let v = serde_json::json!({
            "operator_file": op_path,
            "instance_file": inst_path,
            "known_solution": ex.known_solution.as_slice(),
            "expected_distance": ex.expected_distance,
            "expected_identity": ex.expected_identity,
        });
        let _ = writeln!(io.out, "{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        let _ = writeln!(io.out, "operator_file = {}", op_path.display());
        let _ = writeln!(io.out, "instance_file = {}", inst_path.display());
        let _ = writeln!(io.out, "known_solution = {}", fmt_vector(&ex.known_solution));
        let _ = writeln!(io.out, "expected_distance = {}", fmt_real(ex.expected_distance));
        let _ = writeln!(io.out, "expected_identity = {}", fmt_real(ex.expected_identity));
    }
    EXIT_OK
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut io = Io {
        out,
        err,
        json: cli.json,
    };
    match &cli.command {
        Command::Analyze { operator, rank_tol } => cmd_analyze(&mut io, operator, *rank_tol),
        Command::Solve { instance, solver, out } => cmd_solve(&mut io, instance, solver, out.as_deref()),
        Command::Certify {
            instance,
            solver,
            range_representative,
            out,
        } => cmd_certify(&mut io, instance, solver, *range_representative, out.as_deref()),
        Command::Sweep(args) => cmd_sweep(&mut io, args),
        Command::Example { k, n, dir } => cmd_example(&mut io, *k, *n, dir),
    }
}

pub fn run_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("lcp-bounds").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("certify"));
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, _, err) = run_capture(&["frobnicate"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(!err.is_empty());
    }

    #[test]
    fn example_rejects_k_above_n() {
        let dir = std::env::temp_dir();
        let (code, _, err) = run_capture(&["example", "5", "3", "--dir", dir.to_str().unwrap()]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("k=5"));
    }

    #[test]
    fn scalar_sweep_exits_zero() {
        let (code, out, _) = run_capture(&[
            "sweep",
            "--count",
            "1",
            "--dim-min",
            "1",
            "--dim-max",
            "1",
            "--rank",
            "full",
        ]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("certificates_passed = 1"));
    }
}
