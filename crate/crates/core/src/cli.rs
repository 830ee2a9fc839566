//! Command-line surface: `mean`, `sweep`, `verify`, `identities`, `conjecture`, `taylor-compare`.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{
    conjecture2_probe, conjecture1_scan, csv_table, lemma_l3_sweep, num, section4_nonrepresentability, taylor_compare,
    theorem_suite, PrecisionConfig, SuiteReport, SweepResult, TaylorComparison, Theorem,
};
use crate::funcmodel::FunctionModel;
use crate::identities::{check_identity, identity_grid, parse_rational, summarize, verify_claim5, Identity, IdentityReport};
use crate::mean::{mean_of, mean_power, MeanSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "hermite-means", version, about = "Means from intersecting Hermite interpolants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output to this file instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct Interval {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one mean M_{f,m1,m2}(a, b).
    Mean {
        /// Model literal: power:<p>, logpower:<k> or exp.
        #[arg(long = "f", allow_hyphen_values = true)]
        model: Option<String>,
        /// Exponent of the power family (integers 0..=n use x^k log x).
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        m2: usize,
        #[command(flatten)]
        interval: Interval,
        #[command(flatten)]
        common: Common,
    },
    /// Means of the power family along a grid of exponents.
    Sweep {
        #[arg(long = "p-grid", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        p_grid: Vec<f64>,
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        m2: usize,
        #[command(flatten)]
        interval: Interval,
        #[command(flatten)]
        common: Common,
    },
    /// Run theorem suites (T3 T4 T5 T7 T8 T10 T11), `section4`, `l3`, or `all`.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Exact identity checks: the whole grid, or one instance with --name.
    Identities {
        #[arg(long = "max-m", default_value_t = 8)]
        max_m: i64,
        /// One identity: L0 L1 L2 lid rid lid2 rid2 lrid claim5 claim6 claim7.
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value_t = 2)]
        m1: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m2: i64,
        /// Rational parameter `num/den` (b, or y for L1).
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Gap to the harmonic mean as n grows (`--kind 1`), or spread across (m1, m2) (`--kind 2`).
    Conjecture {
        #[arg(long, default_value_t = 1)]
        kind: u8,
        #[arg(long, allow_hyphen_values = true, default_value_t = 2.5)]
        p: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        a: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 2.0)]
        b: f64,
        #[arg(long = "n-max", default_value_t = 21)]
        n_max: usize,
        #[arg(long, default_value_t = 60)]
        digits: u32,
        /// Models for `--kind 2`; repeatable.
        #[arg(long = "f", allow_hyphen_values = true)]
        models: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Taylor-polynomial mean of order r next to M_{p,m1,m2}.
    TaylorCompare {
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long = "p-grid", value_delimiter = ',', allow_hyphen_values = true)]
        p_grid: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        m2: usize,
        #[command(flatten)]
        interval: Interval,
        #[command(flatten)]
        common: Common,
    },
}

/// Exit status and the text destined for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { status: 0, stdout, stderr: String::new() }
    }

    fn failed(stdout: String, stderr: String) -> Self {
        Outcome { status: 1, stdout, stderr }
    }

    fn usage(stderr: String) -> Self {
        Outcome { status: 2, stdout: String::new(), stderr }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { Outcome::usage(text) } else { Outcome::ok(text) };
        }
    };
    let (common, result) = dispatch(cli.command);
    match result {
        Ok(Rendered { body, ok }) => {
            let body = match &common.out {
                Some(path) => match std::fs::write(path, &body) {
                    Ok(()) => String::new(),
                    Err(e) => return Outcome::failed(String::new(), format!("error: cannot write {path}: {e}\n")),
                },
                None => body,
            };
            if ok {
                Outcome::ok(body)
            } else {
                Outcome::failed(body, "error: verification failed\n".into())
            }
        }
        Err(Failure::Usage(msg)) => Outcome::usage(format!("error: {msg}\n")),
        Err(Failure::Compute(e)) => Outcome::failed(String::new(), format!("error: {e}\n")),
    }
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

struct Rendered {
    body: String,
    ok: bool,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn dispatch(cmd: Command) -> (Common, std::result::Result<Rendered, Failure>) {
    match cmd {
        Command::Mean { model, p, m1, m2, interval, common } => {
            let r = cmd_mean(model, p, m1, m2, &interval, common.format);
            (common, r)
        }
        Command::Sweep { p_grid, m1, m2, interval, common } => {
            let r = cmd_sweep(&p_grid, m1, m2, &interval, common.format);
            (common, r)
        }
        Command::Verify { suite, common } => {
            let r = cmd_verify(&suite, common.format);
            (common, r)
        }
        Command::Identities { max_m, name, m1, m2, b, common } => {
            let r = cmd_identities(max_m, name.as_deref(), m1, m2, b.as_deref(), common.format);
            (common, r)
        }
        Command::Conjecture { kind, p, a, b, n_max, digits, models, common } => {
            let r = match kind {
                1 => cmd_conjecture1(p, a, b, n_max, digits, common.format),
                2 => cmd_conjecture2(&models, common.format),
                k => Err(Failure::Usage(format!("--kind {k}: expected 1 or 2"))),
            };
            (common, r)
        }
        Command::TaylorCompare { p, p_grid, r, m1, m2, interval, common } => {
            let res = cmd_taylor(p, &p_grid, r, m1, m2, &interval, common.format);
            (common, res)
        }
    }
}

#[derive(Serialize)]
struct MeanOutput {
    value: f64,
    residual: f64,
    iterations: usize,
    method: String,
    model: String,
    m1: usize,
    m2: usize,
    a: f64,
    b: f64,
}

fn cmd_mean(model: Option<String>, p: Option<f64>, m1: usize, m2: usize, iv: &Interval, format: Format) -> std::result::Result<Rendered, Failure> {
    if m2 >= m1 {
        return Err(Failure::Usage(format!("--m2 {m2} must be smaller than --m1 {m1}")));
    }
    let (label, result) = match (model, p) {
        (Some(m), None) => {
            let f: FunctionModel = m.parse().map_err(|e: Error| Failure::Usage(format!("--f: {e}")))?;
            let spec = MeanSpec::new(f, m1, m2).map_err(|e| Failure::Usage(e.to_string()))?;
            (m, mean_of(&spec, iv.a, iv.b)?)
        }
        (None, Some(p)) => (format!("power:{p}"), mean_power(p, m1, m2, iv.a, iv.b)?),
        _ => return Err(Failure::Usage("mean needs exactly one of --f or --p".into())),
    };
    let out = MeanOutput {
        value: result.value,
        residual: result.residual,
        iterations: result.iterations,
        method: result.method.to_string(),
        model: label,
        m1,
        m2,
        a: iv.a,
        b: iv.b,
    };
    let body = match format {
        Format::Json => json(&out),
        Format::Csv => csv_table(
            &["model", "m1", "m2", "a", "b", "value", "residual", "iterations", "method"],
            [vec![
                out.model.clone(),
                m1.to_string(),
                m2.to_string(),
                num(iv.a),
                num(iv.b),
                num(out.value),
                num(out.residual),
                out.iterations.to_string(),
                out.method.to_string(),
            ]],
        ),
        Format::Text => format!(
            "value {}\nresidual {}\niterations {}\nmethod {}\n",
            num(out.value),
            num(out.residual),
            out.iterations,
            out.method
        ),
    };
    Ok(Rendered { body, ok: true })
}

fn render_sweep(s: &SweepResult, format: Format) -> String {
    match format {
        Format::Json => json(s),
        Format::Csv => s.to_csv(),
        Format::Text => {
            let mut t = String::new();
            for i in 0..s.values.len() {
                let gap = s.gaps.get(i).map(|g| format!(" gap {}", num(*g))).unwrap_or_default();
                let _ = writeln!(t, "{} {} {} mean {}{gap}", s.axis, num(s.values[i]), s.labels[i], num(s.means[i]));
            }
            let _ = writeln!(t, "{}: {}", s.verdict_kind, if s.monotone { "yes" } else { "no" });
            t
        }
    }
}

fn cmd_sweep(grid: &[f64], m1: usize, m2: usize, iv: &Interval, format: Format) -> std::result::Result<Rendered, Failure> {
    let means = grid.iter().map(|&p| mean_power(p, m1, m2, iv.a, iv.b).map(|r| r.value)).collect::<Result<Vec<_>>>()?;
    let labels = vec![format!("({m1},{m2})"); grid.len()];
    let s = SweepResult::increasing_means("p", grid.to_vec(), labels, means).map_err(|e| Failure::Usage(format!("--p-grid: {e}")))?;
    Ok(Rendered { body: render_sweep(&s, format), ok: true })
}

fn suite_text(r: &SuiteReport) -> String {
    let mut t = format!(
        "{} cases {} failures {} worst {} {}\n",
        r.name,
        r.cases,
        r.failures.len(),
        num(r.worst_residual),
        if r.passed() { "pass" } else { "FAIL" }
    );
    for f in &r.failures {
        let _ = writeln!(t, "  {f}");
    }
    t
}

fn l3_report() -> SuiteReport {
    let sweep = lemma_l3_sweep(100, 0x13);
    let mut r = SuiteReport::new("L3");
    r.cases = sweep.cases;
    r.failures = sweep.errors;
    for (c, z) in &sweep.rows {
        if z.zeta_p >= z.zeta_q {
            r.failures.push(format!("{c:?}: zeta_P = {} >= zeta_Q = {}", z.zeta_p, z.zeta_q));
        }
    }
    r
}

fn section4_report() -> Result<SuiteReport> {
    let s = section4_nonrepresentability()?;
    let mut r = SuiteReport::new("section4");
    r.cases = 2;
    if !s.estimates_pass {
        r.failures.push(format!("derivative estimates {:?} miss {:?}", s.estimates, s.exact));
    }
    if !s.not_representable || s.solution.p != "-7/10" || s.solution.r != "-1/2" {
        r.failures.push(format!("constraint solve gave p = {}, r = {}", s.solution.p, s.solution.r));
    }
    Ok(r)
}

fn cmd_verify(suite: &str, format: Format) -> std::result::Result<Rendered, Failure> {
    let mut reports = Vec::new();
    let all = suite.eq_ignore_ascii_case("all");
    if all {
        reports.extend(Theorem::ALL.into_iter().map(theorem_suite));
    }
    if all || suite.eq_ignore_ascii_case("section4") {
        reports.push(section4_report()?);
    }
    if all || suite.eq_ignore_ascii_case("l3") {
        reports.push(l3_report());
    }
    if reports.is_empty() {
        let t: Theorem = suite.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
        reports.push(theorem_suite(t));
    }
    let ok = reports.iter().all(SuiteReport::passed);
    let body = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Summary<'a> {
                name: &'a str,
                cases: usize,
                failures: &'a [String],
                worst_residual: f64,
            }
            let s: Vec<_> = reports
                .iter()
                .map(|r| Summary { name: &r.name, cases: r.cases, failures: &r.failures, worst_residual: r.worst_residual })
                .collect();
            json(&s)
        }
        Format::Csv => csv_table(&SuiteReport::CSV_HEADER, reports.iter().flat_map(|r| r.csv_rows())),
        Format::Text => reports.iter().map(suite_text).collect(),
    };
    Ok(Rendered { body, ok })
}

fn render_identities(reports: &[IdentityReport], format: Format) -> String {
    let summary = summarize(reports);
    match format {
        Format::Json => json(&summary),
        Format::Csv => csv_table(
            &["name", "m1", "m2", "param_name", "param", "lhs", "rhs", "sqrt_factor", "equal"],
            reports.iter().map(|r| {
                vec![
                    r.name.clone(),
                    r.m1.to_string(),
                    r.m2.map(|m| m.to_string()).unwrap_or_default(),
                    r.param_name.to_string(),
                    r.param.to_string(),
                    r.lhs.to_string(),
                    r.rhs.to_string(),
                    r.sqrt_factor.to_string(),
                    r.equal.to_string(),
                ]
            }),
        ),
        Format::Text => {
            let mut out: String = reports.iter().map(|r| r.line() + "\n").collect();
            if summary.equal == summary.total {
                let _ = writeln!(out, "all {} instances equal", summary.total);
            } else {
                let _ = writeln!(out, "{} of {} instances equal", summary.equal, summary.total);
            }
            out
        }
    }
}

fn cmd_identities(max_m: i64, name: Option<&str>, m1: i64, m2: i64, b: Option<&str>, format: Format) -> std::result::Result<Rendered, Failure> {
    let reports = match name {
        None => {
            if !(0..=30).contains(&max_m) {
                return Err(Failure::Usage(format!("--max-m {max_m}: expected 0..=30")));
            }
            identity_grid(max_m)
        }
        Some(n) => {
            let b = b.ok_or_else(|| Failure::Usage("--name needs --b <num/den>".into()))?;
            let b = parse_rational(b).map_err(|e| Failure::Usage(format!("--b: {e}")))?;
            if n.eq_ignore_ascii_case("claim5") {
                verify_claim5(m1, m2, &b)?
            } else {
                let id: Identity = n.parse().map_err(|e: Error| Failure::Usage(format!("--name: {e}")))?;
                vec![check_identity(id, m1, m2, &b)?]
            }
        }
    };
    let ok = reports.iter().all(|r| r.equal);
    Ok(Rendered { body: render_identities(&reports, format), ok })
}

fn cmd_conjecture1(p: f64, a: f64, b: f64, n_max: usize, digits: u32, format: Format) -> std::result::Result<Rendered, Failure> {
    let s = conjecture1_scan(p, a, b, n_max, PrecisionConfig::new(digits))?;
    Ok(Rendered { body: render_sweep(&s, format), ok: true })
}

fn cmd_conjecture2(models: &[String], format: Format) -> std::result::Result<Rendered, Failure> {
    let models: Vec<FunctionModel> = if models.is_empty() {
        vec![FunctionModel::power(-1.0), FunctionModel::power(2.5), FunctionModel::exp(), FunctionModel::log_power(0)]
    } else {
        models
            .iter()
            .map(|m| m.parse().map_err(|e: Error| Failure::Usage(format!("--f: {e}"))))
            .collect::<std::result::Result<_, _>>()?
    };
    let report = conjecture2_probe(&models, &[(1, 0), (2, 0), (3, 1), (4, 2)])?;
    let ok = report.rows.iter().all(|r| r.pass != Some(false));
    let body = match format {
        Format::Json => json(&report),
        Format::Csv | Format::Text => csv_table(
            &["model", "spread", "reciprocal", "means"],
            report.rows.iter().map(|r| {
                let means: Vec<String> = r.means.iter().map(|m| num(*m)).collect();
                vec![r.model.clone(), num(r.spread), r.reciprocal.to_string(), means.join(";")]
            }),
        ),
    };
    Ok(Rendered { body, ok })
}

fn cmd_taylor(p: Option<f64>, grid: &[f64], r: usize, m1: usize, m2: usize, iv: &Interval, format: Format) -> std::result::Result<Rendered, Failure> {
    let ps: Vec<f64> = match (p, grid.is_empty()) {
        (Some(p), true) => vec![p],
        (None, false) => grid.to_vec(),
        _ => return Err(Failure::Usage("taylor-compare needs exactly one of --p or --p-grid".into())),
    };
    let rows = ps
        .iter()
        .map(|&p| taylor_compare(p, r, m1, m2, iv.a, iv.b))
        .collect::<Result<Vec<TaylorComparison>>>()?;
    let body = match format {
        Format::Json => json(&rows),
        Format::Csv | Format::Text => csv_table(
            &["p", "r", "m1", "m2", "a", "b", "taylor", "hermite", "difference"],
            rows.iter().map(|c| {
                vec![
                    num(c.p),
                    c.r.to_string(),
                    c.m1.to_string(),
                    c.m2.to_string(),
                    num(c.a),
                    num(c.b),
                    num(c.taylor),
                    num(c.hermite),
                    num(c.difference),
                ]
            }),
        ),
    };
    Ok(Rendered { body, ok: true })
}
