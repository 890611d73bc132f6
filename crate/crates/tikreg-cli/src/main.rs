//! Benchmark harness for the tikreg solvers.
//!
//! Loads a dataset (or generates a seeded synthetic one), runs a single solve
//! or a warm-started regularization path, and writes per-point records as
//! CSV plus an optional solution-gap trace.  Exits 0 only when every
//! requested solve converged.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use tikreg::{
    emit_csv, emit_gap_trace, load_csv, load_libsvm, render_csv, run_path, synthesize, Dataset,
    Error, LinSysStrategy, PathProtocol, RegFamily, SolverKind, SolverOptions, SynthConfig,
};

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Libsvm,
    Csv,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum RegArg {
    L1,
    Nonneg,
    L1nonneg,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SolverArg {
    Dssn,
    Pssn,
    Apg,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PathArg {
    Single,
    Lambda,
    Mu,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum LinsysArg {
    Auto,
    Chol,
    Smw,
    Cg,
}

/// Solve sparse Tikhonov-regularized least-squares instances and report
/// per-solve statistics as CSV.
#[derive(Parser, Debug)]
#[command(name = "tikreg", version, about)]
struct Cli {
    /// Dataset file; omit to generate a synthetic instance from --seed
    #[arg(long)]
    data: Option<PathBuf>,

    /// Input format of --data
    #[arg(long, value_enum, default_value_t = FormatArg::Libsvm)]
    format: FormatArg,

    /// Penalty: l1 norm, nonnegativity constraint, or both
    #[arg(long, value_enum, default_value_t = RegArg::L1)]
    reg: RegArg,

    /// Solver to run
    #[arg(long, value_enum, default_value_t = SolverArg::Dssn)]
    solver: SolverArg,

    /// Ridge weight (used by --path single; the path modes use fixed grids)
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,

    /// l1 weight coefficient: mu = mu_c * ||A^T b||_inf (mu-path grid points
    /// use k * mu_c for k = 100 down to 1)
    #[arg(long, default_value_t = 1e-3)]
    mu_c: f64,

    /// One solve, a lambda path (1.0 down to 0.1), or a mu path
    #[arg(long, value_enum, default_value_t = PathArg::Single)]
    path: PathArg,

    /// Seed each path solve with the previous solution (the default)
    #[arg(long, conflicts_with = "cold")]
    warm: bool,

    /// Start every path solve from zero
    #[arg(long)]
    cold: bool,

    /// Stopping tolerance on the optimality residual
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,

    /// Iteration cap per solve
    #[arg(long, default_value_t = 200)]
    max_iter: usize,

    /// Strategy for the reduced Newton systems
    #[arg(long, value_enum, default_value_t = LinsysArg::Auto)]
    linsys: LinsysArg,

    /// Write the record CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write the per-path solution-gap trace here
    #[arg(long)]
    trace_out: Option<PathBuf>,

    /// Seed for the synthetic instance used when --data is absent
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("tikreg: not all solves converged");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("tikreg: error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> tikreg::Result<bool> {
    if !(cli.eps > 0.0) || !cli.eps.is_finite() {
        return Err(Error::Config(format!("--eps must be positive and finite, got {}", cli.eps)));
    }

    let (dataset, name): (Dataset<f64>, String) = match &cli.data {
        Some(path) => {
            let ds = match cli.format {
                FormatArg::Libsvm => load_libsvm(path, None)?,
                FormatArg::Csv => load_csv(path)?,
            };
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".to_string());
            (ds, name)
        }
        None => {
            let cfg = SynthConfig { seed: cli.seed, ..SynthConfig::default() };
            let (ds, _) = synthesize(&cfg)?;
            (ds, format!("synthetic-{}", cli.seed))
        }
    };

    let warm_start = !cli.cold;
    let protocol = match cli.path {
        PathArg::Single => PathProtocol::single(cli.lambda, cli.mu_c),
        PathArg::Lambda => PathProtocol::lambda_path(cli.mu_c, warm_start),
        PathArg::Mu => PathProtocol::mu_path(cli.mu_c, warm_start),
    };
    let family = match cli.reg {
        RegArg::L1 => RegFamily::L1,
        RegArg::Nonneg => RegFamily::NonNeg,
        RegArg::L1nonneg => RegFamily::L1NonNeg,
    };
    let solver = match cli.solver {
        SolverArg::Dssn => SolverKind::Dssn,
        SolverArg::Pssn => SolverKind::Pssn,
        SolverArg::Apg => SolverKind::Apg,
    };
    let strategy = match cli.linsys {
        LinsysArg::Auto => LinSysStrategy::Auto,
        LinsysArg::Chol => LinSysStrategy::CholeskyM,
        LinsysArg::Smw => LinSysStrategy::Smw,
        LinsysArg::Cg => LinSysStrategy::Cg,
    };
    let opts = SolverOptions {
        eps: cli.eps,
        max_iter: cli.max_iter,
        strategy,
        ..SolverOptions::default()
    };

    let records = run_path(&dataset, &protocol, family, solver, &name, &opts)?;

    match &cli.out {
        Some(path) => emit_csv(&records, path)?,
        None => print!("{}", render_csv(&records)),
    }
    if let Some(path) = &cli.trace_out {
        emit_gap_trace(&records, path)?;
    }

    let converged = records.iter().filter(|r| r.converged).count();
    eprintln!("tikreg: {converged}/{} solves converged", records.len());
    Ok(converged == records.len())
}
