//! Command-line driver: configures worlds, ingests or synthesizes inputs,
//! runs the kernels, validates results against serial references, and emits
//! fixed-schema CSV reports.
//!
//! Exit codes: 0 success, 1 usage or runtime error, 2 verification failure
//! (result mismatch against a reference, cross-strategy disagreement, or
//! measured traffic deviating from the analytic model).

pub mod report;

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::heat::{run_heat, HeatOptions, ProcessGrid};
use crate::pgas::SchedulePolicy;
use crate::sparse::{generate_synthetic, read_matrix_market, spmv_serial, EllpackMatrix};
use crate::spmv::{run_spmv, SpmvOptions, Strategy};
use report::ReportRow;

/// Parameters of a generated banded test matrix, written `n=..,rnz=..,bw=..`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub r_nz: usize,
    pub bandwidth: usize,
}

impl FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| {
            Error::InvalidArgument(format!(
                "invalid synthetic spec `{s}` ({what}): expected n=<dim>,rnz=<max offdiag per row>,bw=<bandwidth>"
            ))
        };
        let (mut n, mut r_nz, mut bandwidth) = (None, None, None);
        for part in s.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(|| bad("missing `=`"))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| bad(&format!("`{}` is not a number", value.trim())))?;
            match key.trim() {
                "n" => n = Some(value),
                "rnz" => r_nz = Some(value),
                "bw" => bandwidth = Some(value),
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        Ok(Self {
            n: n.ok_or_else(|| bad("n missing"))?,
            r_nz: r_nz.ok_or_else(|| bad("rnz missing"))?,
            bandwidth: bandwidth.ok_or_else(|| bad("bw missing"))?,
        })
    }
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={},rnz={},bw={}", self.n, self.r_nz, self.bandwidth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    V1,
    V2,
    /// Run v1 then v2 on identical inputs and require identical results.
    Both,
}

impl StrategyArg {
    fn expand(self) -> Vec<Strategy> {
        match self {
            StrategyArg::V1 => vec![Strategy::V1],
            StrategyArg::V2 => vec![Strategy::V2],
            StrategyArg::Both => vec![Strategy::V1, Strategy::V2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    #[value(name = "B", alias = "b")]
    Block,
    #[value(name = "P", alias = "p")]
    Ranks,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Write the CSV report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Check the kernel result against a serial reference (exact equality).
    #[arg(long)]
    verify: bool,

    /// Enable the runtime's same-window write-overlap detector.
    #[arg(long)]
    check_overlap: bool,

    /// Seed for synthetic inputs.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SpmvArgs {
    /// Number of ranks (default: available cores, capped at 8).
    #[arg(long = "P", value_name = "RANKS", env = "MINIPGAS_RANKS")]
    p: Option<usize>,

    /// Row-block size of the block-cyclic distribution.
    #[arg(long = "B", value_name = "ROWS", default_value_t = 64)]
    b: usize,

    /// Ghost-exchange strategy: v1 (block-wise pull), v2 (condensed push).
    #[arg(long, value_enum, default_value_t = StrategyArg::Both)]
    strategy: StrategyArg,

    /// Matrix Market file with the input matrix.
    #[arg(long, value_name = "PATH", conflicts_with = "synthetic")]
    matrix: Option<PathBuf>,

    /// Generate a banded matrix instead of reading one.
    #[arg(long, value_name = "SPEC")]
    synthetic: Option<SyntheticSpec>,

    /// Repeated applications x := M x.
    #[arg(long, default_value_t = 1)]
    iters: usize,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct HeatArgs {
    /// Global interior rows.
    #[arg(long = "M", value_name = "ROWS")]
    m: usize,

    /// Global interior columns.
    #[arg(long = "N", value_name = "COLS")]
    n: usize,

    /// Process grid, ROWSxCOLS; one rank per tile.
    #[arg(long, value_name = "RxC")]
    grid: ProcessGrid,

    /// Time steps.
    #[arg(long)]
    steps: usize,

    /// Diffusion number; stable for 0 < r <= 0.25.
    #[arg(long, default_value_t = 0.25)]
    r: f64,

    /// Number of ranks; must equal the grid size when given.
    #[arg(long = "P", value_name = "RANKS", env = "MINIPGAS_RANKS")]
    p: Option<usize>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Which knob to sweep while everything else stays fixed.
    #[arg(long, value_enum)]
    param: SweepParam,

    /// Values to sweep, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<usize>,

    #[command(flatten)]
    base: SpmvArgs,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Distributed sparse matrix-vector multiplication.
    Spmv(SpmvArgs),
    /// Distributed 2-D heat equation.
    Heat(HeatArgs),
    /// One SpMV run per value of B or P on the identical input.
    Sweep(SweepArgs),
}

/// In-process PGAS benchmark driver.
#[derive(Debug, Parser)]
#[command(name = "minipgas", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Parse `args` and execute; returns the process exit code.
///
/// Separated from `main` so integration tests can drive the full pipeline
/// in-process.
pub fn run_cli<I, S>(args: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn execute(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Spmv(args) => {
            let (matrix, seed) = load_matrix(args)?;
            let mut rows = Vec::new();
            let code = execute_spmv(&spmv_job(args, &matrix, seed), &mut rows)?;
            write_output(&args.common.output, &rows)?;
            Ok(code)
        }
        Cmd::Heat(args) => execute_heat(args),
        Cmd::Sweep(args) => execute_sweep(args),
    }
}

fn default_ranks() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

/// One concrete SpMV run: realized input plus every knob.
struct SpmvJob<'a> {
    matrix: &'a EllpackMatrix,
    seed: Option<u64>,
    ranks: usize,
    block: usize,
    iters: usize,
    strategies: Vec<Strategy>,
    verify: bool,
    check_overlap: bool,
}

fn spmv_job<'a>(args: &SpmvArgs, matrix: &'a EllpackMatrix, seed: Option<u64>) -> SpmvJob<'a> {
    SpmvJob {
        matrix,
        seed,
        ranks: args.p.unwrap_or_else(default_ranks),
        block: args.b,
        iters: args.iters,
        strategies: args.strategy.expand(),
        verify: args.common.verify,
        check_overlap: args.common.check_overlap,
    }
}

fn load_matrix(args: &SpmvArgs) -> Result<(EllpackMatrix, Option<u64>)> {
    let (coo, seed) = match (&args.matrix, &args.synthetic) {
        (Some(path), None) => (read_matrix_market(path)?, None),
        (None, Some(spec)) => (
            generate_synthetic(spec.n, spec.r_nz, spec.bandwidth, args.common.seed)?,
            Some(args.common.seed),
        ),
        (None, None) => {
            return Err(Error::InvalidArgument(
                "a matrix source is required: --matrix <path> or --synthetic n=..,rnz=..,bw=..".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects conflicting sources"),
    };
    Ok((EllpackMatrix::from_coo(&coo)?, seed))
}

fn serial_iterated(matrix: &EllpackMatrix, x0: &[f64], iters: usize) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    for _ in 0..iters {
        x = spmv_serial(matrix, &x)?;
    }
    Ok(x)
}

/// Run every requested strategy on the job, append one CSV row per run, and
/// return the exit code contribution (0 or 2).
fn execute_spmv(job: &SpmvJob<'_>, rows: &mut Vec<ReportRow>) -> Result<u8> {
    let x0 = vec![1.0; job.matrix.n()];
    let reference = if job.verify {
        Some(serial_iterated(job.matrix, &x0, job.iters)?)
    } else {
        None
    };
    let mut code = 0;
    let mut finals: Vec<(Strategy, Vec<f64>)> = Vec::new();
    for &strategy in &job.strategies {
        let opts = SpmvOptions {
            ranks: job.ranks,
            block: job.block,
            iters: job.iters,
            strategy,
            schedule: SchedulePolicy::Fifo,
            check_overlap: job.check_overlap,
        };
        let run = run_spmv(job.matrix, &x0, &opts)?;
        if !run.volume_match {
            report::print_volume_diff(&format!("spmv {strategy}"), &run.measured, &run.predicted);
            code = 2;
        }
        let verify_pass = reference.as_ref().map(|reference| {
            let outcome = report::verify_exact(&run.x_final, reference);
            if !outcome.pass {
                report::print_mismatches(&format!("spmv {strategy} vs serial"), &outcome);
                code = 2;
            }
            outcome.pass
        });
        rows.push(ReportRow {
            kernel: "spmv",
            strategy: Some(strategy),
            ranks: job.ranks,
            block: Some(job.block),
            grid: None,
            size: job.matrix.n().to_string(),
            iters: job.iters,
            wall_s: run.wall_s,
            avg_step_s: run.avg_step_s,
            gflops: Some(run.gflops),
            bytes_measured: run.measured.total().bytes,
            bytes_predicted: run.predicted.total().bytes,
            volume_match: run.volume_match,
            verify_pass,
            seed: job.seed,
        });
        finals.push((strategy, run.x_final));
    }
    // Strategies are interchangeable by construction; running both must give
    // identical bits even without --verify.
    if let [(_, v1), (_, v2)] = finals.as_slice() {
        let outcome = report::verify_exact(v2, v1);
        if !outcome.pass {
            report::print_mismatches("spmv v2 vs v1", &outcome);
            code = 2;
        }
    }
    Ok(code)
}

fn execute_heat(args: &HeatArgs) -> Result<u8> {
    if let Some(p) = args.p {
        if p != args.grid.ranks() {
            return Err(Error::InvalidArgument(format!(
                "--P {p} does not match process grid {} ({} ranks)",
                args.grid,
                args.grid.ranks()
            )));
        }
    }
    let mut opts = HeatOptions::new(args.m, args.n, args.steps, args.grid);
    opts.r = args.r;
    opts.check_overlap = args.common.check_overlap;
    let run = run_heat(&opts)?;

    let mut code = 0;
    if !run.volume_match {
        report::print_volume_diff("heat", &run.measured, &run.predicted);
        code = 2;
    }
    let verify_pass = if args.common.verify {
        let mut reference_opts = opts.clone();
        reference_opts.grid = ProcessGrid::new(1, 1)?;
        let reference = run_heat(&reference_opts)?;
        let outcome = report::verify_exact(&run.field, &reference.field);
        if !outcome.pass {
            report::print_mismatches("heat vs single-rank reference", &outcome);
            code = 2;
        }
        Some(outcome.pass)
    } else {
        None
    };

    let rows = vec![ReportRow {
        kernel: "heat",
        strategy: None,
        ranks: args.grid.ranks(),
        block: None,
        grid: Some(args.grid.to_string()),
        size: format!("{}x{}", args.m, args.n),
        iters: args.steps,
        wall_s: run.wall_s,
        avg_step_s: run.avg_step_s,
        gflops: None,
        bytes_measured: run.measured.total().bytes,
        bytes_predicted: run.predicted.total().bytes,
        volume_match: run.volume_match,
        verify_pass,
        seed: None,
    }];
    write_output(&args.common.output, &rows)?;
    Ok(code)
}

fn execute_sweep(args: &SweepArgs) -> Result<u8> {
    // The input is realized once: every swept run sees the identical matrix.
    let (matrix, seed) = load_matrix(&args.base)?;
    let mut rows = Vec::new();
    let mut code = 0;
    for &value in &args.values {
        let mut job = spmv_job(&args.base, &matrix, seed);
        match args.param {
            SweepParam::Block => job.block = value,
            SweepParam::Ranks => job.ranks = value,
        }
        code = code.max(execute_spmv(&job, &mut rows)?);
    }
    write_output(&args.base.common.output, &rows)?;
    Ok(code)
}

fn write_output(path: &Option<PathBuf>, rows: &[ReportRow]) -> Result<()> {
    match path {
        Some(path) => {
            let mut file = File::create(path)?;
            report::write_rows(&mut file, rows)?;
            file.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            report::write_rows(&mut stdout.lock(), rows)?;
        }
    }
    Ok(())
}
