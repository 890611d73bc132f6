//! Benchmark protocols: single solves and warm-started regularization paths
//! over lambda or mu grids, with per-point run records and deterministic
//! CSV / gap-trace emission.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::apg::apg_solve_warm;
use crate::data::{compute_mu, Dataset};
use crate::dssn::dssn_solve;
use crate::error::{Error, Result};
use crate::float::{cast, Float};
use crate::linalg::dist2;
use crate::problem::{count_nonzeros, ProblemData};
use crate::pssn::pssn_solve;
use crate::regularizer::Regularizer;
use crate::solver::SolverOptions;

/// Which penalty family a benchmark run uses; the `mu` weight is supplied
/// per grid point via the `mu = mu_c * ||A^T b||_inf` rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegFamily {
    L1,
    NonNeg,
    L1NonNeg,
}

impl RegFamily {
    pub fn name(&self) -> &'static str {
        match self {
            RegFamily::L1 => "l1",
            RegFamily::NonNeg => "nonneg",
            RegFamily::L1NonNeg => "l1nonneg",
        }
    }

    /// Does the family carry an l1 weight at all?
    pub fn uses_mu(&self) -> bool {
        !matches!(self, RegFamily::NonNeg)
    }

    pub fn build<F: Float>(&self, mu: F) -> Regularizer<F> {
        match self {
            RegFamily::L1 => Regularizer::L1 { mu },
            RegFamily::NonNeg => Regularizer::NonNeg,
            RegFamily::L1NonNeg => Regularizer::L1NonNeg { mu },
        }
    }
}

/// Solver selection for benchmark runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Dssn,
    Pssn,
    Apg,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Dssn => "dssn",
            SolverKind::Pssn => "pssn",
            SolverKind::Apg => "apg",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    Single,
    Lambda,
    Mu,
}

/// A grid of (lambda, mu_c) cells and the warm-start policy for walking it.
#[derive(Clone, Debug)]
pub struct PathProtocol<F> {
    pub mode: PathMode,
    pub lambda_values: Vec<F>,
    pub mu_c_values: Vec<F>,
    pub warm_start: bool,
}

impl<F: Float> PathProtocol<F> {
    /// One solve at a fixed `(lambda, mu_c)`.
    pub fn single(lambda: F, mu_c: F) -> Self {
        PathProtocol {
            mode: PathMode::Single,
            lambda_values: vec![lambda],
            mu_c_values: vec![mu_c],
            warm_start: false,
        }
    }

    /// Sweep lambda over `{1.0, 0.9, ..., 0.1}` at a fixed `mu_c`.
    pub fn lambda_path(mu_c: F, warm_start: bool) -> Self {
        let lambda_values = (1..=10).rev().map(|k| cast::<F>(k as f64 / 10.0)).collect();
        PathProtocol { mode: PathMode::Lambda, lambda_values, mu_c_values: vec![mu_c], warm_start }
    }

    /// For each lambda in `{100, 10, 1, 0.1, 0.01}`, sweep the l1 weight over
    /// `mu_c = k * base_mu_c` with `k` running 100 down to 1.
    pub fn mu_path(base_mu_c: F, warm_start: bool) -> Self {
        let lambda_values =
            [100.0, 10.0, 1.0, 0.1, 0.01].iter().map(|&l| cast::<F>(l)).collect();
        let mu_c_values =
            (1..=100).rev().map(|k| base_mu_c * cast::<F>(k as f64)).collect();
        PathProtocol { mode: PathMode::Mu, lambda_values, mu_c_values, warm_start }
    }
}

/// Everything measured at one grid point.  `gap_to_previous` is the distance
/// `||x_l - x_{l-1}||` between consecutive solutions within a path block,
/// absent on the first point of a block.
#[derive(Clone, Debug)]
pub struct RunRecord<F> {
    pub problem: String,
    pub m: usize,
    pub n: usize,
    pub lambda: F,
    pub mu_c: F,
    pub mu: F,
    pub solver: String,
    pub nnz: usize,
    pub iterations: usize,
    pub time: f64,
    pub eta: F,
    pub converged: bool,
    pub gap_to_previous: Option<F>,
}

/// Coordinate magnitude below which an entry counts as zero in `nnz`.
pub const NNZ_THRESHOLD: f64 = 1e-10;

fn is_solve_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::LineSearch { .. } | Error::Factorization { .. } | Error::NonFinite { .. }
    )
}

/// Run every grid point of the protocol in order, one record per point.
///
/// Path blocks (the whole grid for a lambda path; one block per lambda for a
/// mu path) restart the warm chain and the gap numbering.  With warm start
/// enabled, each solve is seeded with the previous solution in its block —
/// the primal iterate for the primal solvers, the dual iterate for the dual
/// one.  A numerical failure at a grid point produces a `converged = false`
/// record at the last known point and the path continues; configuration
/// errors abort the run.
pub fn run_path<F: Float>(
    data: &Dataset<F>,
    protocol: &PathProtocol<F>,
    family: RegFamily,
    solver: SolverKind,
    problem_name: &str,
    opts: &SolverOptions<F>,
) -> Result<Vec<RunRecord<F>>> {
    if protocol.lambda_values.is_empty() || protocol.mu_c_values.is_empty() {
        return Err(Error::Config("path grids must be non-empty".into()));
    }
    let blocks: Vec<Vec<(F, F)>> = match protocol.mode {
        PathMode::Single => {
            vec![vec![(protocol.lambda_values[0], protocol.mu_c_values[0])]]
        }
        PathMode::Lambda => vec![protocol
            .lambda_values
            .iter()
            .map(|&l| (l, protocol.mu_c_values[0]))
            .collect()],
        PathMode::Mu => protocol
            .lambda_values
            .iter()
            .map(|&l| protocol.mu_c_values.iter().map(|&mc| (l, mc)).collect())
            .collect(),
    };

    let threshold = cast::<F>(NNZ_THRESHOLD);
    let mut records = Vec::new();
    for block in blocks {
        let mut warm_x: Option<Vec<F>> = None;
        let mut warm_z: Option<Vec<F>> = None;
        let mut prev_x: Option<Vec<F>> = None;
        for (lambda, mu_c) in block {
            let mu = if family.uses_mu() {
                compute_mu(mu_c, &data.a, &data.b)?
            } else {
                F::zero()
            };
            let p =
                ProblemData::new(data.a.clone(), data.b.to_vec(), lambda, family.build(mu))?;
            let seed_x = if protocol.warm_start { warm_x.as_deref() } else { None };
            let seed_z = if protocol.warm_start { warm_z.as_deref() } else { None };

            let solved = match solver {
                SolverKind::Dssn => {
                    dssn_solve(&p, opts, seed_z).map(|(x, z, r)| (x, Some(z), r))
                }
                SolverKind::Pssn => pssn_solve(&p, opts, seed_x).map(|(x, r)| (x, None, r)),
                SolverKind::Apg => apg_solve_warm(&p, seed_x, opts.eps, opts.max_iter)
                    .map(|(x, r)| (x, None, r)),
            };

            let record = match solved {
                Ok((x, z, report)) => {
                    let eta = report
                        .final_eta()
                        .unwrap_or_else(|| p.kkt_residual(&x).unwrap_or(F::infinity()));
                    let gap = prev_x.as_ref().map(|px| dist2(px, &x));
                    let rec = RunRecord {
                        problem: problem_name.to_string(),
                        m: p.m(),
                        n: p.n(),
                        lambda,
                        mu_c,
                        mu,
                        solver: solver.name().to_string(),
                        nnz: count_nonzeros(&x, threshold),
                        iterations: report.iterations,
                        time: report.wall_time,
                        eta,
                        converged: report.converged,
                        gap_to_previous: gap,
                    };
                    if protocol.warm_start {
                        warm_x = Some(x.clone());
                        warm_z = z;
                    }
                    prev_x = Some(x);
                    rec
                }
                Err(e) if is_solve_failure(&e) => {
                    // stay at the last known point and move on
                    let x = warm_x.clone().unwrap_or_else(|| vec![F::zero(); p.n()]);
                    let eta = p.kkt_residual(&x).unwrap_or(F::infinity());
                    let gap = prev_x.as_ref().map(|px| dist2(px, &x));
                    let rec = RunRecord {
                        problem: problem_name.to_string(),
                        m: p.m(),
                        n: p.n(),
                        lambda,
                        mu_c,
                        mu,
                        solver: solver.name().to_string(),
                        nnz: count_nonzeros(&x, threshold),
                        iterations: 0,
                        time: 0.0,
                        eta,
                        converged: false,
                        gap_to_previous: gap,
                    };
                    prev_x = Some(x);
                    rec
                }
                Err(e) => return Err(e),
            };
            records.push(record);
        }
    }
    Ok(records)
}

/// Format with six significant digits, choosing fixed or scientific notation
/// the way C's `%g` does, and dropping trailing fractional zeros.
fn fmt_g6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        let trimmed = trim_fraction(mantissa);
        return format!("{trimmed}e{exp}");
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_fraction(&format!("{v:.decimals$}"))
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn to_f64<F: Float>(v: F) -> f64 {
    num_traits::ToPrimitive::to_f64(&v).unwrap_or(f64::NAN)
}

pub const CSV_HEADER: &str =
    "problem,m,n,lambda,mu_c,mu,solver,nnz,iterations,time,eta,converged,gap_to_previous";

/// Render records as CSV text: a header row, then the record fields in
/// declared order.  Reals carry six significant digits except `eta`, which is
/// always scientific; a missing gap renders as an empty cell.  Identical
/// records always produce identical bytes.
pub fn render_csv<F: Float>(records: &[RunRecord<F>]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let gap = match r.gap_to_previous {
            Some(g) => fmt_g6(to_f64(g)),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{:.5e},{},{}\n",
            r.problem,
            r.m,
            r.n,
            fmt_g6(to_f64(r.lambda)),
            fmt_g6(to_f64(r.mu_c)),
            fmt_g6(to_f64(r.mu)),
            r.solver,
            r.nnz,
            r.iterations,
            fmt_g6(r.time),
            to_f64(r.eta),
            r.converged,
            gap,
        ));
    }
    out
}

pub fn emit_csv<F: Float>(records: &[RunRecord<F>], path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(render_csv(records).as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Render the per-block solution-gap trace: one `index,iterations,gap` row
/// for every record that has a gap, indexed from 2 within its block.
pub fn render_gap_trace<F: Float>(records: &[RunRecord<F>]) -> String {
    let mut out = String::from("index,iterations,gap\n");
    let mut index = 1usize;
    for r in records {
        match r.gap_to_previous {
            None => index = 1,
            Some(g) => {
                index += 1;
                out.push_str(&format!("{},{},{}\n", index, r.iterations, fmt_g6(to_f64(g))));
            }
        }
    }
    out
}

pub fn emit_gap_trace<F: Float>(records: &[RunRecord<F>], path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(render_gap_trace(records).as_bytes())?;
    f.flush()?;
    Ok(())
}
