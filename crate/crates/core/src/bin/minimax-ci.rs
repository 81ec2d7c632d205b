#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use minimax_ci::mc::{self, SimConfig, SimEstimate};
use minimax_ci::minimax::{self, CaseId, OptimResult, DEFAULT_MESH};
use minimax_ci::multivariate;
use minimax_ci::report::{fmt_real, json_object, json_text, Cell, RunManifest, Table};
use minimax_ci::rules::{self, IntervalRule, LambdaStar, MixtureRule};

#[derive(Parser, Debug)]
#[command(name = "minimax-ci", version, about = "Coverage, minimax rules and Monte Carlo checks for invariant confidence intervals")]
struct Cli {
    /// Output format (defaults: csv for tables, json for mv-*).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout; the manifest goes to PATH.manifest.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact coverage of one interval rule over a lambda range.
    Coverage(CoverageArgs),
    /// Minimax rule at one expected length.
    Optimize(OptimizeArgs),
    /// Minimax rules over a grid of expected lengths.
    Sweep(SweepArgs),
    /// Simulation check of the coverage formula on the 60-point grid.
    VerifyMc(VerifyArgs),
    /// Constant c(p, alpha) and worst spherical miss probability.
    MvBound(MvArgs),
    /// mv-bound plus simulated coverage at a given mean and covariance.
    MvVerify(MvVerifyArgs),
}

#[derive(Args, Debug)]
struct CoverageArgs {
    /// Single value or start:stop:step.
    #[arg(long, value_parser = parse_range)]
    lambda: Grid,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "empty")]
    c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "empty")]
    c2: Option<f64>,
    /// Use the empty rule.
    #[arg(long, conflicts_with_all = ["c1", "c2"])]
    empty: bool,
    /// Add simulated coverage columns.
    #[arg(long)]
    mc_check: bool,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long, value_parser = parse_positive)]
    h: f64,
    #[arg(long, default_value_t = DEFAULT_MESH, value_parser = parse_mesh)]
    mesh: f64,
    /// Restrict the search to one case.
    #[arg(long)]
    case: Option<CaseId>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// start:stop:step (or a single value).
    #[arg(long, value_parser = parse_positive_range, required_unless_present = "h", conflicts_with = "h")]
    h_grid: Option<Grid>,
    /// Comma-separated list of h.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    h: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_MESH, value_parser = parse_mesh)]
    mesh: f64,
    #[arg(long)]
    case: Option<CaseId>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
}

#[derive(Args, Debug)]
struct MvArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    p: u32,
    #[arg(long, value_parser = parse_alpha)]
    alpha: f64,
}

#[derive(Args, Debug)]
struct MvVerifyArgs {
    #[command(flatten)]
    mv: MvArgs,
    /// Mean vector, comma separated (length p).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    mu: Vec<f64>,
    /// Covariance eigenvalues, comma separated (length p, positive).
    #[arg(long, value_delimiter = ',', required = true)]
    sigma_eigs: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be > 0, got {x}"))
    }
}

fn parse_mesh(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("mesh must lie in (0, 1), got {x}"))
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("alpha must lie in (0, 1), got {x}"))
    }
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

/// `x` or `start:stop:step`, stop included.
fn parse_range(s: &str) -> Result<Grid, String> {
    range_values(s).map(Grid)
}

fn range_values(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![parse_f64(x)?]),
        [a, b, c] => {
            let (start, stop, step) = (parse_f64(a)?, parse_f64(b)?, parse_f64(c)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("range `{s}` needs step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(format!("range `{s}` has too many points"));
            }
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(format!("malformed range `{s}`; expected x or start:stop:step")),
    }
}

fn parse_positive_range(s: &str) -> Result<Grid, String> {
    let v = range_values(s)?;
    match v.iter().find(|&&h| !(h > 0.0)) {
        Some(h) => Err(format!("every h must be > 0, got {h}")),
        None => Ok(Grid(v)),
    }
}

/// Rendered output plus whether any numerical failure was recorded.
struct Output {
    body: String,
    failed: bool,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<minimax_ci::Error> for Failure {
    fn from(e: minimax_ci::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => json_text(&table.to_json_value()),
    }
}

fn lambda_star_cell(l: LambdaStar) -> Cell {
    match l {
        LambdaStar::Finite(x) => Cell::Real(x),
        LambdaStar::AtInfinity => Cell::Text("inf".into()),
    }
}

const OPTIM_COLUMNS: [&str; 10] = [
    "h",
    "case",
    "c1",
    "a1",
    "c2",
    "p",
    "lambda_star",
    "min_coverage",
    "converged",
    "evaluations",
];

fn optim_row(r: &OptimResult) -> Vec<Cell> {
    vec![
        r.h.into(),
        r.case.name().into(),
        r.params.c1.into(),
        r.params.a1.into(),
        r.c2.into(),
        r.params.p.into(),
        lambda_star_cell(r.lambda_star),
        r.min_coverage.into(),
        r.converged.into(),
        r.evaluations.into(),
    ]
}

fn error_row(h: f64) -> Vec<Cell> {
    let mut row = vec![Cell::Real(h), Cell::Text("ERROR".into())];
    row.resize(OPTIM_COLUMNS.len(), Cell::Empty);
    row
}

fn estimate_cells(e: &SimEstimate) -> [Cell; 3] {
    [e.estimate.get().into(), e.std_error.into(), e.n.into()]
}

fn cmd_coverage(a: &CoverageArgs, seed: u64, format: Format) -> Result<Output, Failure> {
    let lambdas = &a.lambda.0;
    let rule = if a.empty {
        IntervalRule::Empty
    } else {
        let (c1, c2) = (a.c1.unwrap_or_default(), a.c2.unwrap_or_default());
        IntervalRule::new(c1, c2).map_err(|e| Failure::Usage(e.to_string()))?
    };
    let mix = MixtureRule::single(rule);
    let mut cols = vec!["lambda", "coverage"];
    if a.mc_check {
        cols.extend(["mc_estimate", "mc_se"]);
    }
    let mut t = Table::new(cols);
    for &lam in lambdas {
        let cov = rules::coverage(lam, &rule)?.get();
        let mut row = vec![lam.into(), cov.into()];
        if a.mc_check {
            let e = mc::simulate_univariate(&mix, lam, SimConfig::new(seed, a.n)?)?;
            row.extend([e.estimate.get().into(), e.std_error.into()]);
        }
        t.push(row);
    }
    Ok(Output {
        body: render(&t, format),
        failed: false,
    })
}

fn cmd_optimize(a: &OptimizeArgs, format: Format) -> Result<Output, Failure> {
    let r = match a.case {
        Some(case) => minimax::solve_restricted(a.h, a.mesh, case)?,
        None => minimax::solve(a.h, a.mesh)?,
    };
    let mut t = Table::new(OPTIM_COLUMNS);
    t.push(optim_row(&r));
    Ok(Output {
        body: render(&t, format),
        failed: false,
    })
}

fn cmd_sweep(a: &SweepArgs, format: Format) -> Result<Output, Failure> {
    let hs: Vec<f64> = match &a.h_grid {
        Some(g) => g.0.clone(),
        None => a.h.clone(),
    };
    let mut t = Table::new(OPTIM_COLUMNS);
    let mut failed = false;
    for (h, r) in minimax::sweep(&hs, a.mesh, a.case) {
        match r {
            Ok(r) => t.push(optim_row(&r)),
            Err(e) => {
                eprintln!("h = {}: {e}", fmt_real(h));
                failed = true;
                t.push(error_row(h));
            }
        }
    }
    Ok(Output {
        body: render(&t, format),
        failed,
    })
}

fn cmd_verify(a: &VerifyArgs, seed: u64, format: Format) -> Result<Output, Failure> {
    let cfg = SimConfig::new(seed, a.n)?;
    let mut t = Table::new([
        "lambda", "c1", "c2", "coverage", "mc_estimate", "mc_se", "z", "pass",
    ]);
    let mut failed = false;
    for (lam, rule) in mc::arbitration_grid() {
        let (c1, c2) = rule.endpoints().expect("grid rules are proper");
        let exact = rules::coverage(lam, &rule)?.get();
        let e = mc::simulate_univariate(&MixtureRule::single(rule), lam, cfg)?;
        let z = e.z_score(exact);
        let pass = z <= 4.0;
        failed |= !pass;
        t.push(vec![
            lam.into(),
            c1.into(),
            c2.into(),
            exact.into(),
            e.estimate.get().into(),
            e.std_error.into(),
            z.into(),
            pass.into(),
        ]);
    }
    Ok(Output {
        body: render(&t, format),
        failed,
    })
}

fn report_cells(r: &multivariate::MvBoundReport) -> Vec<(&'static str, Cell)> {
    vec![
        ("p", Cell::Int(r.p.into())),
        ("alpha", r.alpha.into()),
        ("c_simple", r.c_simple.into()),
        ("c_refined", r.c_refined.into()),
        ("a", r.a.into()),
        ("worst_miss", r.worst_miss.get().into()),
        ("worst_delta", r.worst_delta.into()),
    ]
}

fn cmd_mv_bound(a: &MvArgs, format: Format) -> Result<Output, Failure> {
    let r = multivariate::mv_bound_report(a.p, a.alpha)?;
    let cells = report_cells(&r);
    let body = match format {
        Format::Json => json_text(&json_object(cells)),
        Format::Csv => {
            let mut t = Table::new(cells.iter().map(|(k, _)| *k));
            t.push(cells.into_iter().map(|(_, c)| c).collect());
            t.to_csv()
        }
    };
    Ok(Output {
        body,
        failed: false,
    })
}

fn cmd_mv_verify(a: &MvVerifyArgs, seed: u64, format: Format) -> Result<Output, Failure> {
    let p = a.mv.p as usize;
    if a.mu.len() != p || a.sigma_eigs.len() != p {
        return Err(Failure::Usage(format!(
            "--mu and --sigma-eigs need {p} entries, got {} and {}",
            a.mu.len(),
            a.sigma_eigs.len()
        )));
    }
    if let Some(s) = a.sigma_eigs.iter().find(|s| !(**s > 0.0)) {
        return Err(Failure::Usage(format!("--sigma-eigs must be positive, got {s}")));
    }
    let r = multivariate::mv_bound_report(a.mv.p, a.mv.alpha)?;
    let cfg = SimConfig::new(seed, a.n)?;
    let mut sims = Table::new(["constant", "c", "estimate", "std_error", "n"]);
    for (label, c) in [("c_simple", r.c_simple), ("c_refined", r.c_refined)] {
        let e = mc::simulate_multivariate(&a.mu, &a.sigma_eigs, c, cfg)?;
        let [est, se, n] = estimate_cells(&e);
        sims.push(vec![label.into(), c.into(), est, se, n]);
    }
    let body = match format {
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("report".into(), json_object(report_cells(&r)));
            obj.insert("simulations".into(), sims.to_json_value());
            json_text(&Value::Object(obj))
        }
        Format::Csv => {
            let cells = report_cells(&r);
            let mut head = Table::new(cells.iter().map(|(k, _)| *k));
            head.push(cells.into_iter().map(|(_, c)| c).collect());
            format!("{}\n{}", head.to_csv(), sims.to_csv())
        }
    };
    Ok(Output {
        body,
        failed: false,
    })
}

fn manifest_params(cli: &Cli, format: Format) -> Map<String, Value> {
    let mut m = Map::new();
    let s = |v: String| Value::String(v);
    let reals = |v: &[f64]| Value::Array(v.iter().map(|x| Value::String(fmt_real(*x))).collect());
    m.insert("format".into(), s(format!("{format:?}").to_lowercase()));
    m.insert(
        "out".into(),
        cli.out.as_ref().map_or(Value::Null, |p| s(p.display().to_string())),
    );
    m.insert("seed".into(), s(cli.seed.to_string()));
    m.insert(
        "threads".into(),
        cli.threads.map_or(Value::Null, |t| Value::from(t as u64)),
    );
    match &cli.command {
        Command::Coverage(a) => {
            m.insert("lambda".into(), reals(&a.lambda.0));
            m.insert("c1".into(), a.c1.map_or(Value::Null, |x| s(fmt_real(x))));
            m.insert("c2".into(), a.c2.map_or(Value::Null, |x| s(fmt_real(x))));
            m.insert("empty".into(), Value::Bool(a.empty));
            m.insert("mc_check".into(), Value::Bool(a.mc_check));
            m.insert("n".into(), s(a.n.to_string()));
        }
        Command::Optimize(a) => {
            m.insert("h".into(), s(fmt_real(a.h)));
            m.insert("mesh".into(), s(fmt_real(a.mesh)));
            m.insert("case".into(), a.case.map_or(Value::Null, |c| s(c.to_string())));
        }
        Command::Sweep(a) => {
            let hs = a.h_grid.as_ref().map_or_else(|| a.h.clone(), |g| g.0.clone());
            m.insert("h".into(), reals(&hs));
            m.insert("mesh".into(), s(fmt_real(a.mesh)));
            m.insert("case".into(), a.case.map_or(Value::Null, |c| s(c.to_string())));
        }
        Command::VerifyMc(a) => {
            m.insert("n".into(), s(a.n.to_string()));
            m.insert("streams".into(), s(mc::DEFAULT_STREAMS.to_string()));
        }
        Command::MvBound(a) => {
            m.insert("p".into(), Value::from(a.p));
            m.insert("alpha".into(), s(fmt_real(a.alpha)));
        }
        Command::MvVerify(a) => {
            m.insert("p".into(), Value::from(a.mv.p));
            m.insert("alpha".into(), s(fmt_real(a.mv.alpha)));
            m.insert("mu".into(), reals(&a.mu));
            m.insert("sigma_eigs".into(), reals(&a.sigma_eigs));
            m.insert("n".into(), s(a.n.to_string()));
            m.insert("streams".into(), s(mc::DEFAULT_STREAMS.to_string()));
        }
    }
    m
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Coverage(_) => "coverage",
        Command::Optimize(_) => "optimize",
        Command::Sweep(_) => "sweep",
        Command::VerifyMc(_) => "verify-mc",
        Command::MvBound(_) => "mv-bound",
        Command::MvVerify(_) => "mv-verify",
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let table_default = cli.format.unwrap_or(Format::Csv);
    let mv_default = cli.format.unwrap_or(Format::Json);
    match &cli.command {
        Command::Coverage(a) => cmd_coverage(a, cli.seed, table_default),
        Command::Optimize(a) => cmd_optimize(a, table_default),
        Command::Sweep(a) => cmd_sweep(a, table_default),
        Command::VerifyMc(a) => cmd_verify(a, cli.seed, table_default),
        Command::MvBound(a) => cmd_mv_bound(a, mv_default),
        Command::MvVerify(a) => cmd_mv_verify(a, cli.seed, mv_default),
    }
}

fn emit(cli: &Cli, out: &Output) -> io::Result<()> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::MvBound(_) | Command::MvVerify(_) => Format::Json,
        _ => Format::Csv,
    });
    let manifest = RunManifest::new(subcommand_name(&cli.command), manifest_params(cli, format));
    match &cli.out {
        Some(path) => {
            fs::write(path, &out.body)?;
            let mut side = path.clone().into_os_string();
            side.push(".manifest.json");
            fs::write(side, manifest.to_json())
        }
        None => {
            io::stdout().write_all(out.body.as_bytes())?;
            eprint!("{}", manifest.to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(3);
            }
            if out.failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
