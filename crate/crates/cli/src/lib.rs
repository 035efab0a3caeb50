//! Command-line front end for `nnrank-core`: file formats, reports and the
//! `nnrank` subcommands.
//!
//! Every invocation prints one JSON object on stdout. Failures exit with
//! status 2 and print `{"code", "message"}` where `code` is `io`, `format`
//! or `precondition`.

pub mod formats;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nnrank_core::lowrank::factor_rank_le2;
use nnrank_core::matcore::{rank_exact, rank_float, AnyMatrix, ExactMatrix, GridSpec, DEFAULT_RANK_TOL};
use nnrank_core::nmf::{min_k_search, search_upper, DEFAULT_FIT_TOL, DEFAULT_ITERS, DEFAULT_RESTARTS};
use nnrank_core::nnfactor::{bounds, trivial_witness, AnyFactorization, FLOAT_VERIFY_TOL};
use nnrank_core::rank3geo::{nnrank_rank3, outer_polygon, Rank3Outcome};
use nnrank_core::sconelab::{
    cone_membership, growth_experiment, moments, poisson_preimage, GrowthMethods, IceCreamPoint, Membership,
    PoissonParams,
};
use nnrank_core::Error;
use serde_json::{json, Value};

use formats::{
    factorization_to_json, format_residual, grid_function_csv, growth_csv, matrix_to_json, read_factorization,
    read_matrix, write_text,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Precondition(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Format(_) => "format",
            CliError::Precondition(_) => "precondition",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "code": self.code(), "message": self.to_string() })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::EntryCount { .. } | Error::NonFinite { .. } => CliError::Format(e.to_string()),
            Error::RankNotThree { rank } => {
                let hint = if rank <= 2 { "use --method exact2" } else { "use --method nmf or --method bounds" };
                CliError::Precondition(format!("{e}; {hint}"))
            }
            Error::RankTooHigh { rank } => {
                let hint = if rank == 3 { "use --method exact3" } else { "use --method nmf or --method bounds" };
                CliError::Precondition(format!("{e}; {hint}"))
            }
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nnrank", version, about = "Nonnegative rank certificates and the cosine-kernel laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank of a matrix (exact for rational input).
    Rank {
        #[arg(long = "in")]
        input: PathBuf,
        /// Relative singular value threshold for float input.
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Nonnegative rank by one method.
    Nnrank(NnrankArgs),
    /// Best available witness, printed as factorization JSON.
    Factor {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Checks a factorization JSON against a matrix.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        /// Max-entry tolerance for float comparisons.
        #[arg(long, default_value_t = FLOAT_VERIFY_TOL)]
        tol: f64,
    },
    /// The integral operator laboratory.
    Scone {
        #[command(subcommand)]
        command: SconeCommand,
    },
    /// The 4x4 rank-three matrix with nonnegative rank four.
    DemoRobbins,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact2,
    Exact3,
    Nmf,
    Bounds,
}

#[derive(Debug, Args)]
pub struct NnrankArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Witness output (factorization JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plot data for exact3: inner points, outer polygon, witness polygon.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Fixed inner dimension for nmf; otherwise scan upward from the rank.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fit tolerance (max-entry residual).
    #[arg(long, default_value_t = DEFAULT_FIT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    pub iters: usize,
}

#[derive(Debug, Subcommand)]
pub enum SconeCommand {
    /// Ice-cream cone membership of (a, b, c).
    Membership {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Nonnegative Poisson preimage of an interior point.
    Preimage {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        /// Defaults to (R/c + 1)/2.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        offset: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nonnegative rank of kernel discretizations.
    Growth {
        #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        offset: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` and runs it: `(exit status, stdout text)`.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (0, e.to_string());
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let err = CliError::Precondition(first.trim_start_matches("error: ").to_string());
            return (2, format!("{}\n", err.to_json()));
        }
    };
    match execute(cli.command) {
        Ok(v) => (0, format!("{v}\n")),
        Err(e) => (2, format!("{}\n", e.to_json())),
    }
}

pub fn execute(command: Command) -> Result<Value, CliError> {
    match command {
        Command::Rank { input, tol } => cmd_rank(&read_matrix(&input)?, tol),
        Command::Nnrank(args) => cmd_nnrank(&args),
        Command::Factor { input, out, search } => cmd_factor(&read_matrix(&input)?, out, &search),
        Command::Verify { input, witness, tol } => cmd_verify(&read_matrix(&input)?, &read_factorization(&witness)?, tol),
        Command::Scone { command } => cmd_scone(command),
        Command::DemoRobbins => demo_robbins(),
    }
}

fn scalar_name(t: &AnyMatrix) -> &'static str {
    match t {
        AnyMatrix::Exact(_) => "rational",
        AnyMatrix::Float(_) => "float",
    }
}

/// Residual rounded to 12 significant digits.
fn residual_value(x: f64) -> Value {
    json!(format_residual(x).parse::<f64>().unwrap_or(x))
}

fn cmd_rank(t: &AnyMatrix, tol: f64) -> Result<Value, CliError> {
    let rank = match t {
        AnyMatrix::Exact(m) => rank_exact(m),
        AnyMatrix::Float(m) => rank_float(m, tol)?,
    };
    Ok(json!({
        "command": "rank",
        "rows": t.rows(),
        "cols": t.cols(),
        "scalar": scalar_name(t),
        "rank": rank,
    }))
}

fn witness_tol(t: &AnyMatrix) -> f64 {
    FLOAT_VERIFY_TOL * t.to_float().max_abs().max(1.0)
}

fn exact2_witness(t: &AnyMatrix) -> Result<AnyFactorization, CliError> {
    t.require_nonnegative()?;
    match t {
        AnyMatrix::Exact(m) => Ok(AnyFactorization::Exact(factor_rank_le2(m)?)),
        AnyMatrix::Float(m) => {
            // the exact binary values of the entries
            let f = factor_rank_le2(&m.to_exact())?;
            Ok(AnyFactorization::Float(f.to_float()))
        }
    }
}

fn cmd_nnrank(args: &NnrankArgs) -> Result<Value, CliError> {
    let t = read_matrix(&args.input)?;
    t.require_nonnegative()?;
    let mut report = match args.method {
        Method::Bounds => {
            let b = match &t {
                AnyMatrix::Exact(m) => bounds(m)?,
                AnyMatrix::Float(m) => bounds(m)?,
            };
            json!({
                "lower": b.lower,
                "upper": b.upper,
                "reference_upper": b.reference_upper,
            })
        }
        Method::Exact2 => {
            let f = exact2_witness(&t)?;
            json!({ "k": f.k(), "certified": true, "witness": factorization_to_json(&f) })
        }
        Method::Exact3 => {
            let out = nnrank_rank3(&t)?;
            if let Some(path) = &args.plot {
                write_text(path, &plot_csv(&out))?;
            }
            json!({
                "k": out.k,
                "lower_bound": out.lower_bound,
                "certified": out.is_exact(),
                "residual": residual_value(out.witness.residual(&t)?),
                "polygon": out.polygon.vertices.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
                "witness": factorization_to_json(&out.witness),
            })
        }
        Method::Nmf => nmf_report(&t, args.k, &args.search)?,
    };
    let obj = report.as_object_mut().expect("report is an object");
    obj.insert("command".into(), json!("nnrank"));
    obj.insert("method".into(), json!(format!("{:?}", args.method).to_lowercase()));
    obj.insert("rows".into(), json!(t.rows()));
    obj.insert("cols".into(), json!(t.cols()));
    if let (Some(path), Some(w)) = (&args.out, obj.get("witness")) {
        write_text(path, &format!("{w}\n"))?;
    }
    Ok(report)
}

fn nmf_report(t: &AnyMatrix, k: Option<usize>, s: &SearchArgs) -> Result<Value, CliError> {
    let m = t.to_float();
    let params = json!({ "seed": s.seed, "restarts": s.restarts, "iters": s.iters, "fit_tol": s.tol });
    let (k, found, residual, restart) = match k {
        Some(k) => {
            let rep = search_upper(&m, k, s.restarts, s.seed, s.tol, s.iters)?;
            (Some(k), rep.witness, rep.residual, rep.restart)
        }
        None => {
            let lo = t.rank();
            let hi = t.rows().min(t.cols()).max(lo);
            let rep = min_k_search(&m, lo, hi, s.restarts, s.seed, s.tol, s.iters)?;
            let residual = match (&rep.witness, rep.scanned.last()) {
                (Some(w), _) => w.residual(&m)?,
                (None, Some(last)) => last.residual,
                (None, None) => 0.0,
            };
            let restart = rep.scanned.last().and_then(|r| r.restart);
            (rep.k_best, rep.witness, residual, restart)
        }
    };
    let mut v = json!({
        "k": k,
        "found": found.is_some(),
        "residual": residual_value(residual),
        "restart": restart,
        "params": params,
    });
    if let Some(w) = found {
        v["witness"] = factorization_to_json(&AnyFactorization::Float(w));
    }
    Ok(v)
}

fn plot_csv(out: &Rank3Outcome) -> String {
    let mut s = String::from("kind,x,y\n");
    let f = formats::format_float;
    for p in &out.instance.inner {
        s.push_str(&format!("inner,{},{}\n", f(p.x), f(p.y)));
    }
    let planes: Vec<_> = out.instance.outer.iter().filter_map(|h| h.normalized()).collect();
    if let Ok(q) = outer_polygon(&planes, 1e-9) {
        for p in q {
            s.push_str(&format!("outer,{},{}\n", f(p.x), f(p.y)));
        }
    }
    for p in &out.polygon.vertices {
        s.push_str(&format!("witness,{},{}\n", f(p.x), f(p.y)));
    }
    s
}

/// Rank <= 2: exact factorization; rank 3: nested polygons; otherwise an NMF
/// search below `min(m, n)` with the trivial witness as fallback.
fn best_witness(t: &AnyMatrix, s: &SearchArgs) -> Result<(AnyFactorization, &'static str), CliError> {
    t.require_nonnegative()?;
    let rank = t.rank();
    if rank <= 2 {
        if let Ok(f) = exact2_witness(t) {
            return Ok((f, "exact2"));
        }
    }
    if rank == 3 {
        return Ok((nnrank_rank3(t)?.witness, "exact3"));
    }
    let min_dim = t.rows().min(t.cols());
    if rank < min_dim {
        let rep = min_k_search(&t.to_float(), rank, min_dim - 1, s.restarts, s.seed, s.tol, s.iters)?;
        if let Some(w) = rep.witness {
            return Ok((AnyFactorization::Float(w), "nmf"));
        }
    }
    let f = match t {
        AnyMatrix::Exact(m) => AnyFactorization::Exact(trivial_witness(m)?),
        AnyMatrix::Float(m) => AnyFactorization::Float(trivial_witness(m)?),
    };
    Ok((f, "trivial"))
}

fn cmd_factor(t: &AnyMatrix, out: Option<PathBuf>, s: &SearchArgs) -> Result<Value, CliError> {
    let (f, _) = best_witness(t, s)?;
    let v = factorization_to_json(&f);
    if let Some(path) = out {
        write_text(&path, &format!("{v}\n"))?;
    }
    Ok(v)
}

fn cmd_verify(t: &AnyMatrix, f: &AnyFactorization, tol: f64) -> Result<Value, CliError> {
    if (t.rows(), t.cols()) != (f.to_float().target_shape()) {
        return Err(CliError::Precondition(format!(
            "witness factors a {}x{} matrix, input is {}x{}",
            f.to_float().target_shape().0,
            f.to_float().target_shape().1,
            t.rows(),
            t.cols()
        )));
    }
    let exact = matches!((t, f), (AnyMatrix::Exact(_), AnyFactorization::Exact(_)));
    let valid = f.verify(t, tol)?;
    Ok(json!({
        "command": "verify",
        "valid": valid,
        "k": f.k(),
        "mode": if exact { "exact" } else { "float" },
        "tol": if exact { 0.0 } else { tol },
        "residual": residual_value(f.residual(t)?),
    }))
}

fn cmd_scone(command: SconeCommand) -> Result<Value, CliError> {
    match command {
        SconeCommand::Membership { a, b, c, tol } => {
            let m = cone_membership(&IceCreamPoint::new(a, b, c), tol)?;
            let class = match m.class {
                Membership::Inside => "inside",
                Membership::Boundary => "boundary",
                Membership::Outside => "outside",
            };
            Ok(json!({ "command": "scone membership", "a": a, "b": b, "c": c, "class": class, "margin": m.margin }))
        }
        SconeCommand::Preimage { a, b, c, r, n, offset, out } => {
            let p = IceCreamPoint::new(a, b, c);
            let r = r.unwrap_or(if c > 0.0 { (p.radius() / c + 1.0) / 2.0 } else { 0.5 });
            let grid = GridSpec::new(n, offset)?;
            let f = poisson_preimage(&p, r, &grid)?;
            let alpha = if p.is_zero() { None } else { Some(PoissonParams::for_point(&p, r)?.alpha) };
            let mom = moments(&f)?;
            if let Some(path) = &out {
                write_text(path, &grid_function_csv(&f))?;
            }
            Ok(json!({
                "command": "scone preimage",
                "a": a, "b": b, "c": c, "r": r, "n": n, "offset": offset,
                "alpha": alpha,
                "min_value": f.min_value(),
                "moments": { "a": mom.a, "b": mom.b, "c": mom.c },
                "moment_error": residual_value(mom.max_abs_diff(&p)),
            }))
        }
        SconeCommand::Growth { ns, offset, seed, out } => {
            let rows = growth_experiment(&ns, offset, GrowthMethods::default(), seed)?;
            if let Some(path) = &out {
                write_text(path, &growth_csv(&rows))?;
            }
            let table: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "rank_float": r.rank_float,
                        "k_exact3": r.k_exact3,
                        "k_nmf": r.k_nmf,
                        "residual_at_k_minus_1": r.residual_at_k_minus_1.map(residual_value),
                    })
                })
                .collect();
            Ok(json!({
                "command": "scone growth",
                "offset": offset,
                "seed": seed,
                "note": "per-n values are measurements of this implementation",
                "rows": table,
            }))
        }
    }
}

fn demo_robbins() -> Result<Value, CliError> {
    let t = ExactMatrix::robbins();
    let rank = rank_exact(&t);
    let any = AnyMatrix::Exact(t);
    let out = nnrank_rank3(&any)?;
    let exact = matches!(out.witness, AnyFactorization::Exact(_));
    let verified = out.witness.verify(&any, witness_tol(&any))?;
    Ok(json!({
        "command": "demo-robbins",
        "matrix": matrix_to_json(&any),
        "rank": rank,
        "nnrank": out.k,
        "certified": out.is_exact(),
        "verified": verified,
        "verification": if exact { "exact" } else { "float" },
        "witness": factorization_to_json(&out.witness),
    }))
}
