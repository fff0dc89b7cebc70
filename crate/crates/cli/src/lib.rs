//! Command-line front end. `run` parses arguments, executes one command and
//! returns the process exit code: 0 on success, 1 on usage or domain errors,
//! 2 when a certificate is infeasible or a soundness check fails.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use delsarte::asymptotics::{emit_csv, emit_svg, sample_curve, AsymptoticError, RateBound};
use delsarte::certificates::{eb_certificate, fraction, hamming_certificate, mrrw_certificate, Certificate, CertificateError};
use delsarte::lp::{solve_primal, LpError};
use delsarte::oracle::{max_code_size_family, sandwich_check, FamilySpec, OracleError, SearchBudget};
use delsarte::params::{ParamError, SchemeParameters};
use delsarte::scheme::{
    adjacency_product_check, extract_parameters, fundamental_p_polynomials, spectral_decomposition, validate_scheme,
    ExplicitScheme, SchemeError,
};

const JOHNSON_NOTE: &str = "For --family johnson, --d is a Hamming distance between weight-a words; \
the scheme works with Johnson distance, so d is halved (floor) before any computation: \
A(n, d, a) <= A_LP(n, floor(d/2), a).";

#[derive(Debug, Parser)]
#[command(name = "delsarte", version, about = "Exact Delsarte LP bounds, certificates and asymptotic rate curves")]
#[command(after_help = "Set DELSARTE_THREADS to cap worker threads.\n\nExit codes: 0 success, 1 usage or domain error, 2 infeasible certificate or soundness failure.")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Explicit distance-matrix schemes
    #[command(subcommand)]
    Scheme(SchemeCommand),
    /// Print valencies, multiplicities and the P and Q tables of a family
    #[command(subcommand)]
    Params(ParamsCommand),
    /// Certified upper bounds on the size of a code
    #[command(after_help = JOHNSON_NOTE)]
    Bound(BoundArgs),
    /// Check oracle <= LP <= every certificate bound
    #[command(after_help = JOHNSON_NOTE)]
    Sandwich(SearchArgs),
    /// Sample asymptotic rate bounds to CSV and optionally SVG
    Curve(CurveArgs),
    /// Exhaustive maximum-code search
    #[command(after_help = JOHNSON_NOTE)]
    Oracle(SearchArgs),
}

#[derive(Debug, Subcommand)]
enum SchemeCommand {
    /// Validate a distance-matrix file and print its parameters
    Verify { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum ParamsCommand {
    Hamming {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
    },
    Johnson {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyName {
    Hamming,
    Johnson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Hamming,
    Eb,
    Mrrw,
    Lp,
    All,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long)]
    n: u64,
    /// Alphabet size (hamming)
    #[arg(long)]
    q: Option<u64>,
    /// Word weight (johnson)
    #[arg(long)]
    a: Option<u64>,
    /// Minimum Hamming distance
    #[arg(long)]
    d: usize,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum, default_value = "all")]
    method: Method,
    /// Print each certificate as `x f(x) fhat(x)` lines
    #[arg(long)]
    dump: bool,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Wall-clock budget for the clique search in seconds
    #[arg(long)]
    time_limit: Option<u64>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Comma-separated bound identifiers, e.g. gv,hamming_q,eb_q,mrrw1_q,mrrw2
    #[arg(long, value_delimiter = ',', required = true)]
    which: Vec<String>,
    #[arg(long, conflicts_with = "alpha")]
    q: Option<u64>,
    /// Relative weight for the js_* bounds
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Failure(_) => 2,
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(err: SchemeError) -> Self {
        CliError::Domain(err.to_string())
    }
}

impl From<ParamError> for CliError {
    fn from(err: ParamError) -> Self {
        CliError::Domain(err.to_string())
    }
}

impl From<AsymptoticError> for CliError {
    fn from(err: AsymptoticError) -> Self {
        CliError::Domain(err.to_string())
    }
}

impl From<LpError> for CliError {
    fn from(err: LpError) -> Self {
        match err {
            LpError::Unexpected(_) => CliError::Failure(err.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<CertificateError> for CliError {
    fn from(err: CertificateError) -> Self {
        match err {
            CertificateError::Infeasible(_)
            | CertificateError::LaplacianFails(_)
            | CertificateError::ClosedFormExceeded { .. } => CliError::Failure(err.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(err: OracleError) -> Self {
        match err {
            OracleError::Soundness(_) => CliError::Failure(err.to_string()),
            OracleError::Lp(inner) => inner.into(),
            OracleError::Certificate(inner) => inner.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl FamilyArgs {
    fn spec(&self) -> Result<FamilySpec, CliError> {
        match (self.family, self.q, self.a) {
            (FamilyName::Hamming, Some(q), None) => Ok(FamilySpec::Hamming { n: self.n, q }),
            (FamilyName::Johnson, None, Some(a)) => Ok(FamilySpec::Johnson { n: self.n, a }),
            (FamilyName::Hamming, _, _) => Err(CliError::Domain("--family hamming needs --q and no --a".into())),
            (FamilyName::Johnson, _, _) => Err(CliError::Domain("--family johnson needs --a and no --q".into())),
        }
    }

    /// Scheme distance for the requested Hamming distance.
    fn scheme_distance(&self) -> Result<usize, CliError> {
        let d = match self.family {
            FamilyName::Hamming => self.d,
            FamilyName::Johnson => self.d / 2,
        };
        if d == 0 {
            return Err(CliError::Domain(format!("minimum distance {} gives scheme distance 0", self.d)));
        }
        Ok(d)
    }
}

fn decimal(value: &BigRational) -> String {
    value.to_f64().map_or_else(|| "inf".into(), |v| format!("{v:.6}"))
}

fn table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..columns).map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

fn matrix_rows(label: char, get: impl Fn(usize, usize) -> String, size: usize) -> Vec<Vec<String>> {
    let mut header = vec![format!("{label}[i][j]")];
    header.extend((0..size).map(|j| j.to_string()));
    let mut rows = vec![header];
    for i in 0..size {
        let mut row = vec![i.to_string()];
        row.extend((0..size).map(|j| get(i, j)));
        rows.push(row);
    }
    rows
}

fn print_params(params: &SchemeParameters, out: &mut String) {
    let n = params.n();
    let _ = writeln!(out, "{}: |X| = {}, diameter {}", params.family(), params.size(), n);
    let mut rows = vec![vec!["i".to_string(), "valency".into(), "multiplicity".into()]];
    for i in 0..=n {
        rows.push(vec![i.to_string(), params.valency(i).to_string(), params.multiplicity(i).to_string()]);
    }
    out.push_str(&table(&rows));
    // P[i][j] = p_j(i): rows indexed by eigenspace, columns by distance.
    out.push_str(&table(&matrix_rows('P', |i, j| params.p(j, i).to_string(), n + 1)));
    out.push_str(&table(&matrix_rows('Q', |i, j| params.q(j, i).to_string(), n + 1)));
    let status = match params.check_q_polynomial() {
        Ok(()) => "yes".to_string(),
        Err(violation) => format!("no ({violation})"),
    };
    let _ = writeln!(out, "Q-polynomial: {status}");
}

fn scheme_verify(file: &PathBuf, out: &mut String) -> Result<(), CliError> {
    let text = fs::read_to_string(file).map_err(|e| CliError::Domain(format!("{}: {e}", file.display())))?;
    let scheme = ExplicitScheme::parse(&text)?;
    let intersections = validate_scheme(&scheme)?;
    let adjacency = scheme.adjacency();
    adjacency_product_check(&adjacency, &intersections)?;
    fundamental_p_polynomials(&intersections)?.check_adjacency(&adjacency)?;
    let spectrum = spectral_decomposition(&adjacency)?;
    let numeric = extract_parameters(&adjacency, &spectrum)?;
    let n = scheme.diameter();
    let _ = writeln!(out, "valid distance-induced scheme: {} points, diameter {n}", scheme.size());
    let mut rows = vec![vec!["i".to_string(), "valency".into(), "multiplicity".into()]];
    for i in 0..=n {
        rows.push(vec![i.to_string(), numeric.v[i].to_string(), numeric.m[i].to_string()]);
    }
    out.push_str(&table(&rows));
    out.push_str(&table(&matrix_rows('P', |i, j| format!("{:.6}", numeric.p[j][i]), n + 1)));
    out.push_str(&table(&matrix_rows('Q', |i, j| format!("{:.6}", numeric.q[j][i]), n + 1)));
    let _ = writeln!(out, "max |PQ - |X|I| = {:.3e}", numeric.pq_deviation());
    let _ = writeln!(out, "min Krein parameter = {:.6}", numeric.min_krein());
    let status = match numeric.q_polynomial_violation() {
        None => "yes".to_string(),
        Some(violation) => format!("no ({violation})"),
    };
    let _ = writeln!(out, "Q-polynomial: {status}");
    Ok(())
}

fn certificate_row(name: &str, cert: &Certificate, detail: String) -> Vec<String> {
    vec![name.into(), cert.bound.to_string(), decimal(&cert.bound), detail]
}

fn bound(args: &BoundArgs, out: &mut String) -> Result<(), CliError> {
    let spec = args.family.spec()?;
    let d = args.family.scheme_distance()?;
    let params = spec.parameters()?;
    let wants = |m: Method| args.method == m || args.method == Method::All;
    let single = args.method != Method::All;
    let mut rows = vec![vec!["method".to_string(), "bound".into(), "decimal".into(), "detail".into()]];
    let mut dumps = Vec::new();
    // With `all`, a method whose preconditions fail is shown as `-`.
    let inapplicable = |name: &str, err: CertificateError, rows: &mut Vec<Vec<String>>| -> Result<(), CliError> {
        let err = CliError::from(err);
        if single || matches!(err, CliError::Failure(_)) {
            return Err(err);
        }
        rows.push(vec![name.into(), "-".into(), "-".into(), err.to_string()]);
        Ok(())
    };
    if wants(Method::Lp) {
        let solution = solve_primal(&params, d)?;
        rows.push(vec!["lp".into(), solution.value.to_string(), decimal(&solution.value), "exact simplex".into()]);
    }
    if wants(Method::Hamming) {
        match hamming_certificate(&params, d) {
            Ok(cert) => {
                rows.push(certificate_row("hamming", &cert, cert.construction.to_string()));
                dumps.push(("hamming", cert));
            }
            Err(err) => inapplicable("hamming", err, &mut rows)?,
        }
    }
    if wants(Method::Eb) {
        match eb_certificate(&params, d) {
            Ok((cert, data)) => {
                let detail = format!("u={}, closed form {}", data.u, data.closed_form_bound);
                rows.push(certificate_row("eb", &cert, detail));
                dumps.push(("eb", cert));
            }
            Err(err) => inapplicable("eb", err, &mut rows)?,
        }
    }
    if wants(Method::Mrrw) {
        match mrrw_certificate(&params, d) {
            Ok((cert, data)) => {
                let detail = format!("r_perp={}, r={}, closed form {}", data.r_perp, data.r, data.closed_form_bound);
                rows.push(certificate_row("mrrw", &cert, detail));
                dumps.push(("mrrw", cert));
            }
            Err(err) => inapplicable("mrrw", err, &mut rows)?,
        }
    }
    let _ = writeln!(out, "{spec}, scheme distance d={d}");
    out.push_str(&table(&rows));
    if args.dump {
        for (name, cert) in dumps {
            let _ = writeln!(out, "# {name}: x f(x) fhat(x), bound {}", fraction(&cert.bound));
            out.push_str(&cert.dump());
        }
    }
    Ok(())
}

fn budget(seconds: Option<u64>) -> SearchBudget {
    seconds.map_or_else(SearchBudget::unlimited, SearchBudget::seconds)
}

fn sandwich(args: &SearchArgs, out: &mut String) -> Result<(), CliError> {
    let report = sandwich_check(args.family.spec()?, args.family.scheme_distance()?, budget(args.time_limit))?;
    let _ = write!(out, "{report}");
    Ok(())
}

fn oracle(args: &SearchArgs, out: &mut String) -> Result<(), CliError> {
    let spec = args.family.spec()?;
    let d = args.family.scheme_distance()?;
    let search = max_code_size_family(spec, d, budget(args.time_limit))?;
    let _ = writeln!(out, "{spec}, scheme distance d={d}");
    let status = if search.proven { "maximum" } else { "best found before the time limit" };
    let _ = writeln!(out, "size {} ({status})", search.size);
    let words: Vec<String> = search.witness.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "witness point indices: {}", words.join(" "));
    Ok(())
}

fn curve(args: &CurveArgs, out: &mut String) -> Result<(), CliError> {
    let curves = args
        .which
        .iter()
        .map(|id| {
            let bound = RateBound::parse(id.trim(), args.q, args.alpha)?;
            sample_curve(bound, args.grid)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let write = |path: &PathBuf, text: String| {
        fs::write(path, text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
    };
    write(&args.out, emit_csv(&curves)?)?;
    let _ = writeln!(out, "wrote {} rows to {}", args.grid, args.out.display());
    if let Some(svg) = &args.svg {
        write(svg, emit_svg(&curves)?)?;
        let _ = writeln!(out, "wrote {}", svg.display());
    }
    Ok(())
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(value) = std::env::var("DELSARTE_THREADS") {
        let threads: usize = value
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Domain(format!("DELSARTE_THREADS={value} is not a positive integer")))?;
        // A pool may already exist when `run` is called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

fn execute(cli: &Cli, out: &mut String) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Scheme(SchemeCommand::Verify { file }) => scheme_verify(file, out),
        Command::Params(ParamsCommand::Hamming { n, q }) => {
            print_params(&delsarte::params::hamming_parameters(*n, *q)?, out);
            Ok(())
        }
        Command::Params(ParamsCommand::Johnson { n, a }) => {
            print_params(&delsarte::params::johnson_parameters(*n, *a)?, out);
            Ok(())
        }
        Command::Bound(args) => bound(args, out),
        Command::Sandwich(args) => sandwich(args, out),
        Command::Curve(args) => curve(args, out),
        Command::Oracle(args) => oracle(args, out),
    }
}

/// Run one command, writing results to `stdout` and diagnostics to `stderr`.
pub fn run_with<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            return if err.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let mut out = String::new();
    let result = execute(&cli, &mut out);
    let _ = write!(stdout, "{out}");
    match result {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.exit_code()
        }
    }
}

/// Run with the process arguments and standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}
