//! Command-line front end for the `nws` library: preset or custom
//! Newell–Whitehead–Segel problems, symbolic series dumps, relative-error
//! tables, and finite-difference residual checks.
//!
//! Exit codes: 0 on success, 2 on validation/usage errors, 3 when an
//! evaluation leaves the representable range. Data goes to standard output
//! (or `--out`); diagnostics go to standard error.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nws::{
    build_error_table_with_cap, build_problem, hpm_terms_with_cap, parse_rational, partial_sum,
    pde_residual, preset_case, quantize_sig, rational, render_table, ts_eval, ExactSolution, Expr,
    Problem, Rational, RenderOpts, Scalar, DEFAULT_MAX_ORDER,
};

#[derive(Parser)]
#[command(
    name = "nws",
    version,
    about = "Exact series solutions of the Newell-Whitehead-Segel equation u_t = k u_xx + a u - b u^q"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate partial sums S_0..S_N on an (x, t) grid
    Solve(SolveArgs),
    /// Reconstruct relative-error tables against the exact solution
    Table(TableArgs),
    /// Print the series terms symbolically, one t^i/i! line per order
    Dump(DumpArgs),
    /// Evaluate the PDE residual of the exact solution on a grid
    Residual(ResidualArgs),
}

/// Problem selection: either `--case <1-4>` (with `--lambda` for case 1) or
/// a fully custom problem via `--k --a --b --q --ic` (plus `--r` for a
/// constant profile).
#[derive(Args, Clone, Default)]
struct ProblemOpts {
    /// Preset case id (1-4)
    #[arg(long)]
    case: Option<u32>,
    /// Case 1 initial value, a rational in (0, 2/3) (e.g. 1/10 or 0.1)
    #[arg(long)]
    lambda: Option<String>,
    /// Custom problem: diffusion coefficient k > 0 (rational)
    #[arg(long)]
    k: Option<String>,
    /// Custom problem: linear coefficient a (rational)
    #[arg(long)]
    a: Option<String>,
    /// Custom problem: nonlinear coefficient b (rational)
    #[arg(long)]
    b: Option<String>,
    /// Custom problem: nonlinearity power q >= 2
    #[arg(long)]
    q: Option<u32>,
    /// Custom initial profile: `const:<rational>` or
    /// `kink:amp=<scalar>,numdeg=<j>,beta=<rational>,r=<rational>`
    #[arg(long)]
    ic: Option<String>,
    /// Growth rate r > 0 of w = e^{sqrt(r) x} for a `const:` profile
    #[arg(long)]
    r: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemOpts,
    /// Series order N (highest term kept)
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated x grid (ignored for x-independent problems)
    #[arg(long)]
    x: Option<String>,
    /// Comma-separated t grid
    #[arg(long)]
    t: Option<String>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Write data to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file with `key = value` lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    problem: ProblemOpts,
    /// Series order N (highest partial sum tabulated)
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated x grid (ignored for case 1)
    #[arg(long)]
    x: Option<String>,
    /// Comma-separated t grid
    #[arg(long)]
    t: Option<String>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Render the rel_error column as a percentage
    #[arg(long)]
    percent: bool,
    /// Write data to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file with `key = value` lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    problem: ProblemOpts,
    /// Series order N (highest term printed)
    #[arg(long)]
    order: Option<usize>,
    /// Write data to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file with `key = value` lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ResidualArgs {
    #[command(flatten)]
    problem: ProblemOpts,
    /// Comma-separated x grid (ignored for case 1)
    #[arg(long)]
    x: Option<String>,
    /// Comma-separated t grid
    #[arg(long)]
    t: Option<String>,
    /// Finite-difference step h > 0
    #[arg(long)]
    h: Option<String>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Write data to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file with `key = value` lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Serialize)]
struct SolveRow {
    case: u32,
    x: f64,
    t: f64,
    n: usize,
    partial_sum: f64,
}

#[derive(Serialize)]
struct ResidualRow {
    case: u32,
    x: f64,
    t: f64,
    h: f64,
    residual: f64,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve(args) => run_solve(args),
        Cmd::Table(args) => run_table(args),
        Cmd::Dump(args) => run_dump(args),
        Cmd::Residual(args) => run_residual(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(match err.downcast_ref::<nws::Error>() {
            Some(nws::Error::Range(_)) => 3,
            _ => 2,
        });
    }
}

// ---------------------------------------------------------------- config

const KNOWN_KEYS: [&str; 15] = [
    "case", "lambda", "k", "a", "b", "q", "ic", "r", "order", "x", "t", "format", "out",
    "percent", "h",
];

fn read_config(path: &Path) -> Result<HashMap<String, String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected `key = value`, got `{raw}`", i + 1))?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            bail!("config line {}: unknown key `{key}`", i + 1);
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn load_config(path: Option<&PathBuf>) -> Result<HashMap<String, String>> {
    path.map(|p| read_config(p)).unwrap_or_else(|| Ok(HashMap::new()))
}

/// Fill `slot` from the config map unless a flag already set it.
fn fill<T>(
    slot: &mut Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
    parse: impl FnOnce(&str) -> Result<T>,
) -> Result<()> {
    if slot.is_none() {
        if let Some(v) = cfg.get(key) {
            *slot = Some(parse(v).with_context(|| format!("config key `{key}`"))?);
        }
    }
    Ok(())
}

fn fill_string(slot: &mut Option<String>, cfg: &HashMap<String, String>, key: &str) {
    if slot.is_none() {
        if let Some(v) = cfg.get(key) {
            *slot = Some(v.clone());
        }
    }
}

impl ProblemOpts {
    fn merge(&mut self, cfg: &HashMap<String, String>) -> Result<()> {
        fill(&mut self.case, cfg, "case", |v| {
            v.parse().map_err(|_| anyhow!("expected a case id, got `{v}`"))
        })?;
        fill(&mut self.q, cfg, "q", |v| {
            v.parse().map_err(|_| anyhow!("expected an integer power, got `{v}`"))
        })?;
        for (slot, key) in [
            (&mut self.lambda, "lambda"),
            (&mut self.k, "k"),
            (&mut self.a, "a"),
            (&mut self.b, "b"),
            (&mut self.ic, "ic"),
            (&mut self.r, "r"),
        ] {
            fill_string(slot, cfg, key);
        }
        Ok(())
    }

    /// Build the problem; the returned case id is 0 for custom problems.
    fn build(&self) -> Result<(Problem, u32)> {
        let custom = self.k.is_some()
            || self.a.is_some()
            || self.b.is_some()
            || self.q.is_some()
            || self.ic.is_some()
            || self.r.is_some();
        match (self.case, custom) {
            (Some(_), true) => {
                bail!("choose either --case or a custom problem (--k/--a/--b/--q/--ic), not both")
            }
            (None, false) => {
                bail!("a problem is required: --case <1-4> or --k --a --b --q --ic")
            }
            (Some(id), false) => {
                let lam = self.lambda.as_deref().map(rat).transpose()?;
                Ok((preset_case(id, lam)?, id))
            }
            (None, true) => {
                if self.lambda.is_some() {
                    bail!("--lambda only applies to --case 1; custom problems set the profile via --ic");
                }
                let k = rat(self.k.as_deref().ok_or_else(|| anyhow!("--k is required"))?)?;
                let a = rat(self.a.as_deref().ok_or_else(|| anyhow!("--a is required"))?)?;
                let b = rat(self.b.as_deref().ok_or_else(|| anyhow!("--b is required"))?)?;
                let q = self.q.ok_or_else(|| anyhow!("--q is required"))?;
                let spec = self.ic.as_deref().ok_or_else(|| anyhow!("--ic is required"))?;
                let (ic, r, s) = parse_ic(spec, self.r.as_deref())?;
                Ok((build_problem(k, a, b, q, ic, r, s)?, 0))
            }
        }
    }
}

// ---------------------------------------------------------------- parsing

fn rat(s: &str) -> Result<Rational> {
    Ok(parse_rational(s)?)
}

/// `<rational>`, `sqrt(<rational>)`, or `<rational>*sqrt(<rational>)`.
fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        return Ok(Scalar::sqrt_of(rat(inner)?)?);
    }
    if let Some((c, root)) = s.split_once('*') {
        let inner = root
            .trim()
            .strip_prefix("sqrt(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| anyhow!("the factor after `*` must be sqrt(<rational>): `{s}`"))?;
        return Ok(Scalar::sqrt_of(rat(inner)?)?.scale(&rat(c)?));
    }
    Ok(Scalar::from_rational(rat(s)?))
}

/// Parse the IC mini-grammar into (profile, r, extension radicand s).
fn parse_ic(spec: &str, r_flag: Option<&str>) -> Result<(Expr, Rational, Rational)> {
    if let Some(rest) = spec.strip_prefix("const:") {
        let c = rat(rest)?;
        let r = r_flag.map(rat).transpose()?.unwrap_or_else(|| rational(1, 1));
        return Ok((Expr::constant(r.clone(), Scalar::from_rational(c)), r, rational(0, 1)));
    }
    let Some(rest) = spec.strip_prefix("kink:") else {
        bail!(
            "initial profile must be `const:<rational>` or \
             `kink:amp=<scalar>,numdeg=<j>,beta=<rational>,r=<rational>`, got `{spec}`"
        );
    };
    let mut amp = None;
    let mut numdeg = None;
    let mut beta = None;
    let mut r = None;
    for part in rest.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("kink component `{part}` is not `key=value`"))?;
        match key.trim() {
            "amp" => amp = Some(parse_scalar(value)?),
            "numdeg" => {
                numdeg = Some(
                    value
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| anyhow!("numdeg must be a nonnegative integer, got `{value}`"))?,
                )
            }
            "beta" => beta = Some(rat(value)?),
            "r" => r = Some(rat(value)?),
            other => bail!("unknown kink component `{other}`"),
        }
    }
    let amp = amp.ok_or_else(|| anyhow!("kink profile needs amp="))?;
    let numdeg = numdeg.ok_or_else(|| anyhow!("kink profile needs numdeg="))?;
    let beta = beta.ok_or_else(|| anyhow!("kink profile needs beta="))?;
    let r = r.ok_or_else(|| anyhow!("kink profile needs r="))?;
    if let Some(flag) = r_flag {
        if rat(flag)? != r {
            bail!("--r disagrees with the kink profile's r=");
        }
    }
    let s = amp.extension().clone();
    let expr = Expr::term(r.clone(), amp, numdeg, beta)?;
    Ok((expr, r, s))
}

fn parse_grid(spec: Option<&str>, what: &str) -> Result<Vec<f64>> {
    let spec = spec.ok_or_else(|| anyhow!("--{what} grid is required"))?;
    let mut vals = Vec::new();
    for part in spec.split(',') {
        let v: f64 = part
            .trim()
            .parse()
            .map_err(|_| anyhow!("invalid {what} value `{}`", part.trim()))?;
        if !v.is_finite() {
            bail!("{what} value `{v}` is not finite");
        }
        vals.push(v);
    }
    Ok(vals)
}

fn order_cap() -> Result<usize> {
    match std::env::var("NWS_MAX_ORDER") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow!("NWS_MAX_ORDER must be a nonnegative integer, got `{v}`")),
        Err(_) => Ok(DEFAULT_MAX_ORDER),
    }
}

fn parse_format(f: Option<&str>) -> Result<&str> {
    match f {
        None => Ok("csv"),
        Some("csv") => Ok("csv"),
        Some("json") => Ok("json"),
        Some(other) => Err(anyhow::Error::new(nws::Error::UnknownFormat(other.to_string()))),
    }
}

// ---------------------------------------------------------------- output

/// Shortest decimal form of the value rounded to 12 significant digits.
fn fmt12(v: f64) -> String {
    format!("{}", quantize_sig(v, 12))
}

fn emit(data: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, data).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows).context("serializing output")?;
    s.push('\n');
    Ok(s)
}

/// The x grid actually evaluated: x-independent problems collapse to the
/// placeholder x = 0, everything else requires --x.
fn effective_xs(p: &Problem, case: u32, x: Option<&str>) -> Result<Vec<f64>> {
    if case == 1 || p.ic.as_constant().is_some() {
        Ok(vec![0.0])
    } else {
        parse_grid(x, "x")
    }
}

// ------------------------------------------------------------ subcommands

fn run_solve(mut args: SolveArgs) -> Result<()> {
    let cfg = load_config(args.config.as_ref())?;
    args.problem.merge(&cfg)?;
    fill(&mut args.order, &cfg, "order", parse_order)?;
    fill_string(&mut args.x, &cfg, "x");
    fill_string(&mut args.t, &cfg, "t");
    fill_string(&mut args.format, &cfg, "format");
    fill(&mut args.out, &cfg, "out", |v| Ok(PathBuf::from(v)))?;

    let (p, case) = args.problem.build()?;
    let order = args.order.unwrap_or(5);
    let terms = hpm_terms_with_cap(&p, order, order_cap()?)?;
    let sums: Vec<_> = (0..=order)
        .map(|n| partial_sum(&terms, n))
        .collect::<nws::Result<_>>()?;
    let xs = effective_xs(&p, case, args.x.as_deref())?;
    let ts = parse_grid(args.t.as_deref(), "t")?;

    let mut rows = Vec::new();
    for &t in &ts {
        for &x in &xs {
            for (n, sum) in sums.iter().enumerate() {
                rows.push(SolveRow { case, x, t, n, partial_sum: ts_eval(sum, x, t)? });
            }
        }
    }
    let data = match parse_format(args.format.as_deref())? {
        "json" => to_json(&rows)?,
        _ => {
            let mut s = String::from("case,x,t,n,partial_sum\n");
            for row in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.case,
                    fmt12(row.x),
                    fmt12(row.t),
                    row.n,
                    fmt12(row.partial_sum)
                ));
            }
            s
        }
    };
    emit(&data, args.out.as_deref())
}

fn parse_order(v: &str) -> Result<usize> {
    v.parse().map_err(|_| anyhow!("expected a nonnegative integer order, got `{v}`"))
}

fn run_table(mut args: TableArgs) -> Result<()> {
    let cfg = load_config(args.config.as_ref())?;
    args.problem.merge(&cfg)?;
    fill(&mut args.order, &cfg, "order", parse_order)?;
    fill_string(&mut args.x, &cfg, "x");
    fill_string(&mut args.t, &cfg, "t");
    fill_string(&mut args.format, &cfg, "format");
    fill(&mut args.out, &cfg, "out", |v| Ok(PathBuf::from(v)))?;
    let percent = args.percent
        || cfg.get("percent").is_some_and(|v| v.trim().eq_ignore_ascii_case("true"));

    let (p, case) = args.problem.build()?;
    if case == 0 {
        bail!("table requires a preset case: only those have an exact reference solution");
    }
    let order = args.order.unwrap_or(5);
    let xs = if case == 1 { Vec::new() } else { parse_grid(args.x.as_deref(), "x")? };
    let ts = parse_grid(args.t.as_deref(), "t")?;
    let tbl = build_error_table_with_cap(&p, case, &xs, &ts, order, order_cap()?)?;
    let format = parse_format(args.format.as_deref())?;
    let data = render_table(&tbl, format, &RenderOpts { percent })?;
    emit(&data, args.out.as_deref())
}

fn run_dump(mut args: DumpArgs) -> Result<()> {
    let cfg = load_config(args.config.as_ref())?;
    args.problem.merge(&cfg)?;
    fill(&mut args.order, &cfg, "order", parse_order)?;
    fill(&mut args.out, &cfg, "out", |v| Ok(PathBuf::from(v)))?;

    let (p, _case) = args.problem.build()?;
    let order = args.order.unwrap_or(5);
    let terms = hpm_terms_with_cap(&p, order, order_cap()?)?;
    let mut text = partial_sum(&terms, order)?.render_dump();
    text.push('\n');
    emit(&text, args.out.as_deref())
}

fn run_residual(mut args: ResidualArgs) -> Result<()> {
    let cfg = load_config(args.config.as_ref())?;
    args.problem.merge(&cfg)?;
    fill_string(&mut args.x, &cfg, "x");
    fill_string(&mut args.t, &cfg, "t");
    fill_string(&mut args.h, &cfg, "h");
    fill_string(&mut args.format, &cfg, "format");
    fill(&mut args.out, &cfg, "out", |v| Ok(PathBuf::from(v)))?;

    let (p, case) = args.problem.build()?;
    if case == 0 {
        bail!("residual requires a preset case: only those have an exact solution to check");
    }
    let h: f64 = match args.h.as_deref() {
        Some(v) => v.trim().parse().map_err(|_| anyhow!("invalid step `{v}`"))?,
        None => 1e-3,
    };
    let sol = ExactSolution::from_problem(case, &p)?;
    let u = |x: f64, t: f64| sol.eval(x, t);
    let xs = effective_xs(&p, case, args.x.as_deref())?;
    let ts = parse_grid(args.t.as_deref(), "t")?;

    let mut rows = Vec::new();
    for &t in &ts {
        for &x in &xs {
            let residual = pde_residual(&u, &p, x, t, h)?.abs();
            rows.push(ResidualRow { case, x, t, h, residual });
        }
    }
    let data = match parse_format(args.format.as_deref())? {
        "json" => to_json(&rows)?,
        _ => {
            let mut s = String::from("case,x,t,h,residual\n");
            for row in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.case,
                    fmt12(row.x),
                    fmt12(row.t),
                    fmt12(row.h),
                    fmt12(row.residual)
                ));
            }
            s
        }
    };
    emit(&data, args.out.as_deref())
}
