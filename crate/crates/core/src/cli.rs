//! `polyeval` command line: generate | evaluate | sweep | bench.
//!
//! Exit codes: 0 stable, 2 stability warning, 3 degree better served by
//! Paterson-Stockmeyer, 1 any other error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::apps::{exp_taylor_coeffs, exp_taylor_strings, geometric_coeffs, uniform01, westreich_eval};
use crate::error::{Error, Result};
use crate::extprec::{PrecisionTarget, TargetFloat, TargetKind};
use crate::matrix::{evaluate_scheme, read_csv_file, write_csv, DenseMatrix};
use crate::pipeline::{generate, GenerateOptions, Generated};
use crate::psm::{ps_cost, ps_eval, Polynomial};
use crate::report::ToolReport;
use crate::scheme::{is_refused_degree, RealCoefficients, SchemeSpec, Variant};

pub const EXIT_STABLE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_WARNING: i32 = 2;
pub const EXIT_RECOMMEND_PS: i32 = 3;

/// Matrix sizes above this need `--allow-large`.
pub const LARGE_BENCH: usize = 2000;

#[derive(Debug, Parser)]
#[command(name = "polyeval", version, about = "Matrix polynomial evaluation with one product fewer than Paterson-Stockmeyer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for coefficient sets, rank them and print a JSON report.
    Generate(GenerateArgs),
    /// Evaluate a polynomial at a matrix from a report.
    Evaluate(EvaluateArgs),
    /// Generate exp Taylor coefficients over a range of degrees.
    Sweep(SweepArgs),
    /// Compare scheme, Paterson-Stockmeyer and Westreich on Psi(17, A).
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Target format: single or double.
    #[arg(long, default_value = "double")]
    pub precision: String,
    /// Structural variant (1, 2 or 3).
    #[arg(long = "type-pol", default_value_t = 1)]
    pub type_pol: u8,
    /// Working decimal digits (default 32 for double, 16 for single).
    #[arg(long)]
    pub ndigits: Option<u32>,
    /// Seed for the multistart search.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolveArgs {
    fn options(&self, s: Option<usize>) -> Result<GenerateOptions> {
        Ok(GenerateOptions {
            target: PrecisionTarget::parse(&self.precision)?,
            variant: Variant::from_type_pol(self.type_pol)?,
            ndigits: self.ndigits,
            s,
            seed: self.seed,
        })
    }
}

#[derive(Debug, Args)]
#[group(id = "source", multiple = false)]
pub struct SourceArgs {
    /// JSON array of decimal or "p/q" strings b_0..b_m.
    #[arg(long, group = "source")]
    pub coeffs: Option<PathBuf>,
    /// Taylor coefficients 1/i! of exp up to degree M.
    #[arg(long = "exp-taylor", value_name = "M", group = "source")]
    pub exp_taylor: Option<usize>,
    /// All-ones coefficients of I + A + ... + A^(N-1).
    #[arg(long, value_name = "N", group = "source")]
    pub geometric: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Block size override.
    #[arg(long)]
    pub s: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Scheme,
    Ps,
    Westreich,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub report: PathBuf,
    /// Square matrix as CSV, one row per line.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Scheme)]
    pub method: Method,
    /// Evaluate even if the report carries a stability warning.
    #[arg(long)]
    pub force: bool,
    /// Write the result CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Inclusive degree range, e.g. 8..40.
    #[arg(long = "exp-range", value_name = "A..B")]
    pub exp_range: String,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Use the standard sizes 100 and 1000, plus 10000 with --allow-large.
    #[arg(long)]
    pub table2: bool,
    /// Comma-separated matrix sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Permit sizes above 2000.
    #[arg(long)]
    pub allow_large: bool,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Map a library error to its exit code.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::RecommendPs { .. } => EXIT_RECOMMEND_PS,
        _ => EXIT_ERROR,
    }
}

pub fn warning_exit_code(warning: bool) -> i32 {
    if warning {
        EXIT_WARNING
    } else {
        EXIT_STABLE
    }
}

/// Run a parsed command; diagnostics go to `err`, results to `out`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&a, out, err),
        Command::Evaluate(a) => cmd_evaluate(&a, out, err),
        Command::Sweep(a) => cmd_sweep(&a, out, err),
        Command::Bench(a) => cmd_bench(&a, out).map(|_| EXIT_STABLE),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_exit_code(&e)
        }
    }
}

fn emit(path: Option<&Path>, out: &mut dyn Write, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Coefficients `b_0..b_m` from the chosen source (default: exp Taylor of degree 8).
pub fn load_source(src: &SourceArgs, bits: u32) -> Result<Polynomial> {
    if let Some(path) = &src.coeffs {
        let texts: Vec<String> = serde_json::from_str(&fs::read_to_string(path)?)?;
        return Polynomial::parse_bits(&texts, bits);
    }
    if let Some(n) = src.geometric {
        return geometric_coeffs(n, bits);
    }
    Ok(exp_taylor_coeffs(src.exp_taylor.unwrap_or(8), bits))
}

pub fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let opts = a.solve.options(a.s)?;
    let b = load_source(&a.source, opts.bits()?)?;
    let g = generate(&b, &opts)?;
    let report = ToolReport::from_generated(&g);
    emit(a.output.as_deref(), out, &(report.to_json()? + "\n"))?;
    writeln!(err, "{}", report.message)?;
    Ok(warning_exit_code(report.warning))
}

#[derive(Serialize)]
struct EvalSummary {
    method: Method,
    product_count: usize,
    norm1: f64,
}

fn evaluate_in<F: TargetFloat>(
    report: &ToolReport,
    a64: &DenseMatrix<f64>,
    method: Method,
) -> Result<(DenseMatrix<F>, usize)> {
    let a = a64.map(|v| F::from_f64_exact(*v));
    let spec = report.spec()?;
    let bits = crate::solver::working_bits(report.inputs.ndigits);
    let b = Polynomial::parse_bits(&report.inputs.b, bits)?;
    let r = match method {
        Method::Scheme => evaluate_scheme(&a, &spec, &report.coefficients::<F>()?)?,
        Method::Ps => ps_eval(&a, &b.rounded::<F>()?, ps_cost(spec.m).s)?,
        Method::Westreich => {
            let ones = b.coeffs.iter().all(|c| c.to_f64() == 1.0);
            if !ones {
                return Err(Error::InvalidArgument("Westreich formulas need an all-ones polynomial".into()));
            }
            westreich_eval(&a, spec.m + 1)?
        }
    };
    Ok((r.value, r.product_count))
}

pub fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let report = ToolReport::from_json(&fs::read_to_string(&a.report)?)?;
    if report.warning && !a.force && a.method == Method::Scheme {
        writeln!(err, "{}; pass --force to evaluate anyway", report.message)?;
        return Ok(EXIT_WARNING);
    }
    let a64 = read_csv_file(&a.matrix)?;
    let mut csv = Vec::new();
    let (count, norm1) = match report.target()?.kind {
        TargetKind::Double => {
            let (v, c) = evaluate_in::<f64>(&report, &a64, a.method)?;
            write_csv(&v, &mut csv)?;
            (c, v.norm1())
        }
        TargetKind::Single => {
            let (v, c) = evaluate_in::<f32>(&report, &a64, a.method)?;
            write_csv(&v, &mut csv)?;
            (c, f64::from(v.norm1()))
        }
    };
    emit(a.output.as_deref(), out, std::str::from_utf8(&csv).expect("csv is utf-8"))?;
    let summary = EvalSummary { method: a.method, product_count: count, norm1 };
    writeln!(out, "{}", serde_json::to_string(&summary)?)?;
    Ok(EXIT_STABLE)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub s: usize,
    pub p: usize,
    pub savings: i64,
    pub n_real: usize,
    pub er_min: f64,
    pub warning: bool,
}

pub fn parse_range(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("expected a range A..B, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// One row per accepted degree in `lo..=hi`, in order.
pub fn sweep_rows(lo: usize, hi: usize, opts: &GenerateOptions) -> Result<Vec<SweepRow>> {
    let degrees: Vec<usize> = (lo..=hi).filter(|&m| !is_refused_degree(m)).collect();
    if degrees.is_empty() {
        return Err(Error::RecommendPs { m: lo });
    }
    let bits = opts.bits()?;
    degrees
        .par_iter()
        .map(|&m| {
            let g = generate(&exp_taylor_coeffs(m, bits), opts)?;
            Ok(SweepRow {
                m,
                s: g.spec.s,
                p: g.spec.p,
                savings: g.report.savings,
                n_real: g.n_real(),
                er_min: g.report.er_min,
                warning: g.report.warning,
            })
        })
        .collect()
}

fn write_rows<T: Serialize>(rows: &[T], path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    emit(path, out, std::str::from_utf8(&bytes).expect("csv is utf-8"))
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (lo, hi) = parse_range(&a.exp_range)?;
    let rows = sweep_rows(lo, hi, &a.solve.options(None)?)?;
    write_rows(&rows, a.csv.as_deref(), out)?;
    let worst = rows.iter().max_by(|x, y| x.er_min.total_cmp(&y.er_min)).expect("nonempty");
    writeln!(err, "max er_min = {:.3e} at m = {}", worst.er_min, worst.m)?;
    Ok(warning_exit_code(rows.iter().any(|r| r.warning)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub trials: usize,
    /// Maximum 1-norm relative differences over the trials, in units of `u`.
    pub scheme_vs_ps: f64,
    pub scheme_vs_w: f64,
    pub w_vs_ps: f64,
}

/// Coefficients for `Psi(17, A)` in double precision.
pub fn geometric17() -> Result<Generated> {
    let opts = GenerateOptions::default();
    generate(&geometric_coeffs(17, opts.bits()?)?, &opts)
}

/// Table rows for `Psi(17, A)`: for every size, `trials` matrices from
/// `matrix(n, trial)` evaluated by the scheme, PS `(16, 4)` and Westreich.
pub fn bench_rows(
    spec: &SchemeSpec,
    coeffs: &RealCoefficients<f64>,
    sizes: &[usize],
    trials: usize,
    matrix: impl Fn(usize, usize) -> DenseMatrix<f64> + Sync,
) -> Result<Vec<BenchRow>> {
    let u = PrecisionTarget::DOUBLE.u;
    let ones = vec![1.0; 17];
    sizes
        .iter()
        .map(|&n| {
            let diffs = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let a = matrix(n, t);
                    let z = evaluate_scheme(&a, spec, coeffs)?.value;
                    let p = ps_eval(&a, &ones, 4)?.value;
                    let w = westreich_eval(&a, 17)?.value;
                    Ok([z.rel_diff(&p)?, z.rel_diff(&w)?, w.rel_diff(&p)?])
                })
                .collect::<Result<Vec<_>>>()?;
            let max = |k: usize| diffs.iter().map(|d| d[k]).fold(0.0, f64::max) / u;
            Ok(BenchRow { n, trials, scheme_vs_ps: max(0), scheme_vs_w: max(1), w_vs_ps: max(2) })
        })
        .collect()
}

/// Seeded uniform `[0, 1)` matrix for trial `t`: one ChaCha stream per trial.
pub fn trial_matrix(seed: u64, n: usize, t: usize) -> DenseMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    uniform01(n, &mut rng)
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let mut sizes = a.sizes.clone();
    if a.table2 && sizes.is_empty() {
        sizes = vec![100, 1000];
        if a.allow_large {
            sizes.push(10000);
        }
    }
    if sizes.is_empty() {
        sizes.push(100);
    }
    if let Some(&n) = sizes.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidArgument(format!("matrix size {n} is below 2")));
    }
    if !a.allow_large {
        if let Some(&n) = sizes.iter().find(|&&n| n > LARGE_BENCH) {
            return Err(Error::InvalidArgument(format!("size {n} exceeds {LARGE_BENCH}; pass --allow-large")));
        }
    }
    let g = geometric17()?;
    let coeffs = g.report.c_prec.clone();
    let rows = bench_rows(&g.spec, &coeffs, &sizes, a.trials, |n, t| trial_matrix(a.seed, n, t))?;
    write_rows(&rows, a.csv.as_deref(), out)
}

/// Exact `1/i!` strings, for writing coefficient files.
pub fn exp_taylor_json(m: usize) -> String {
    serde_json::to_string(&exp_taylor_strings(m)).expect("strings serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("8..40").unwrap(), (8, 40));
        assert!(parse_range("40..8").is_err());
        assert!(parse_range("8-40").is_err());
    }

    #[test]
    fn zero_matrix_bench_is_exact() {
        let g = geometric17().unwrap();
        let rows = bench_rows(&g.spec, &g.report.c_prec, &[2], 1, |n, _| DenseMatrix::zeros(n)).unwrap();
        assert_eq!((rows[0].scheme_vs_ps, rows[0].scheme_vs_w, rows[0].w_vs_ps), (0.0, 0.0, 0.0));
    }

    #[test]
    fn sweep_rejects_refused_only() {
        assert!(matches!(sweep_rows(9, 9, &GenerateOptions::default()), Err(Error::RecommendPs { .. })));
        let rows = sweep_rows(8, 8, &GenerateOptions::default()).unwrap();
        assert_eq!((rows[0].s, rows[0].p, rows[0].savings), (2, 0, 1));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(error_exit_code(&Error::RecommendPs { m: 9 }), 3);
        assert_eq!(error_exit_code(&Error::LeadingCoefficientZero), 1);
        assert_eq!(warning_exit_code(true), 2);
        assert_eq!(warning_exit_code(false), 0);
    }

    #[test]
    fn trial_matrices_are_reproducible() {
        assert_eq!(trial_matrix(7, 5, 3), trial_matrix(7, 5, 3));
        assert_ne!(trial_matrix(7, 5, 3), trial_matrix(7, 5, 4));
    }
}
