//! The `abeliand` command line.
//!
//! Exit codes: `0` success, `1` a verification suite failed, `2` usage or
//! parameter error. Tables go to standard output as CSV (header row, LF line
//! endings) or as a single JSON document; diagnostics go to standard error.
//!
//! The default seed for `sample` and `verify` is
//! [`DEFAULT_SEED`](crate::sampler::DEFAULT_SEED) unless the `ABELIAND_SEED`
//! environment variable holds an unsigned integer; `--seed` overrides both.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dist::float::{moments_f64, pmf_table_float};
use crate::dist::{
    avalanche_mean, convergence_table, moments, pmf_table, Family, FloatParams, Params,
};
use crate::error::Error;
use crate::rational::{fmt_fraction, parse_rational, to_f64};
use crate::sampler::{monte_carlo, SampleStats, DEFAULT_SEED};
use crate::verify::{self, Fault, Suite, VerifyConfig};

pub const SEED_ENV: &str = "ABELIAND_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "abeliand",
    version,
    about = "Abelian and Avalanche distributions: exact tables, moments, limits and sampling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability table over the full support.
    Pmf(PmfArgs),
    /// Mean, second moment and variance.
    Moments(MomentsArgs),
    /// Variance against its large-N limit alpha/(1-alpha)^3.
    Limit(LimitArgs),
    /// Monte Carlo draws of the Avalanche distribution.
    Sample(SampleArgs),
    /// Run the self-check suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Number of units.
    #[arg(long = "N", short = 'N')]
    pub n: u64,
    /// Dissipation alpha in (0, 1); p = alpha/N. Fraction ("1/2") or decimal.
    #[arg(long, conflicts_with = "p", required_unless_present = "p")]
    pub alpha: Option<String>,
    /// Probability p in (0, 1/N). Fraction ("1/4") or decimal.
    #[arg(long)]
    pub p: Option<String>,
}

impl ParamArgs {
    fn params(&self) -> Result<Params, Error> {
        match (&self.alpha, &self.p) {
            (Some(a), _) => Params::with_alpha(self.n, parse_rational(a)?),
            (None, Some(p)) => Params::new(self.n, parse_rational(p)?),
            (None, None) => Err(Error::Precondition(
                "one of --alpha or --p is required".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[arg(long, value_enum, default_value_t = Family::Abelian)]
    pub family: Family,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Output::Csv)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, value_enum, default_value_t = Family::Abelian)]
    pub family: Family,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Output::Csv)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long)]
    pub alpha: String,
    /// Comma-separated list of N values.
    #[arg(long = "n-list", alias = "N-list", value_delimiter = ',', default_values_t = [100u64, 1_000, 10_000])]
    pub n_list: Vec<u64>,
    #[arg(long, value_enum, default_value_t = Output::Csv)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of draws M.
    #[arg(long, alias = "M", default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restrict to the named suites (repeatable).
    #[arg(long, value_enum)]
    pub suite: Vec<Suite>,
    /// Largest N for the exact sweeps.
    #[arg(long, default_value_t = 25)]
    pub max_n: u64,
    /// Largest N for the float suites.
    #[arg(long, default_value_t = 10_000)]
    pub float_max_n: u64,
    /// Draws per sampler configuration.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

/// Everything a run produced; the binary prints it and exits with `code`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: 0,
        }
    }

    fn usage(message: impl std::fmt::Display) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
            code: 2,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                }
            };
        }
    };
    execute(&cli.command)
}

pub fn execute(command: &Command) -> Outcome {
    match command {
        Command::Pmf(args) => run_pmf(args),
        Command::Moments(args) => run_moments(args),
        Command::Limit(args) => run_limit(args),
        Command::Sample(args) => run_sample(args),
        Command::Verify(args) => run_verify(args),
    }
}

fn default_seed() -> Result<u64, String> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV}={v:?} is not an unsigned integer")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn csv_string<R>(header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer();
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("ascii output")
}

fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn alpha_text(params: &Params) -> String {
    fmt_fraction(&params.effective_alpha())
}

pub fn run_pmf(args: &PmfArgs) -> Outcome {
    let params = match args.params.params() {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let family = args.family;
    let text = match args.mode {
        ModeArg::Exact => {
            let table = pmf_table(family, &params);
            let probs = table.probs_exact.unwrap_or_default();
            match args.output {
                Output::Csv => csv_string(
                    &["b", "prob_num", "prob_den"],
                    table.support.iter().zip(&probs).map(|(b, q)| {
                        vec![b.to_string(), q.numer().to_string(), q.denom().to_string()]
                    }),
                ),
                Output::Json => json_string(&json!({
                    "family": family,
                    "N": params.n(),
                    "p": fmt_fraction(params.p()),
                    "alpha": alpha_text(&params),
                    "mode": "exact",
                    "rows": table.support.iter().zip(&probs).map(|(b, q)| json!({
                        "b": b,
                        "prob": fmt_fraction(q),
                        "prob_num": q.numer().to_string(),
                        "prob_den": q.denom().to_string(),
                    })).collect::<Vec<_>>(),
                })),
            }
        }
        ModeArg::Float => {
            let fp = params.to_float();
            let table = pmf_table_float(family, &fp);
            let probs = table.probs_float.unwrap_or_default();
            match args.output {
                Output::Csv => csv_string(
                    &["b", "prob"],
                    table
                        .support
                        .iter()
                        .zip(&probs)
                        .map(|(b, q)| vec![b.to_string(), q.to_string()]),
                ),
                Output::Json => json_string(&json!({
                    "family": family,
                    "N": params.n(),
                    "p": fp.p(),
                    "alpha": fp.effective_alpha(),
                    "mode": "float",
                    "rows": table.support.iter().zip(&probs)
                        .map(|(b, q)| json!({"b": b, "prob": q}))
                        .collect::<Vec<_>>(),
                })),
            }
        }
    };
    Outcome::ok(text)
}

pub fn run_moments(args: &MomentsArgs) -> Outcome {
    let params = match args.params.params() {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    if args.family == Family::Abelian && params.alpha().is_none() {
        return Outcome::usage(Error::AlphaRequired);
    }
    let header = ["N", "alpha", "mean", "second_moment", "variance"];
    let n = params.n().to_string();
    let row: Vec<String> = match args.mode {
        ModeArg::Exact => match moments(args.family, &params) {
            Ok(m) => vec![
                n,
                alpha_text(&params),
                fmt_fraction(&m.mean),
                fmt_fraction(&m.second_moment),
                fmt_fraction(&m.variance),
            ],
            Err(e) => return Outcome::usage(e),
        },
        ModeArg::Float => {
            let fp = params.to_float();
            let m = moments_f64(args.family, &fp);
            vec![
                n,
                fp.effective_alpha().to_string(),
                m.mean.to_string(),
                m.second_moment.to_string(),
                m.variance.to_string(),
            ]
        }
    };
    let text = match args.output {
        Output::Csv => csv_string(&header, [row]),
        Output::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("family".into(), json!(args.family));
            obj.insert(
                "mode".into(),
                json!(if args.mode == ModeArg::Exact {
                    "exact"
                } else {
                    "float"
                }),
            );
            for (k, v) in header.iter().zip(row) {
                obj.insert((*k).into(), json!(v));
            }
            json_string(&obj)
        }
    };
    Outcome::ok(text)
}

pub fn run_limit(args: &LimitArgs) -> Outcome {
    let alpha = match parse_rational(&args.alpha) {
        Ok(a) => to_f64(&a),
        Err(e) => return Outcome::usage(e),
    };
    if args.n_list.is_empty() {
        return Outcome::usage("the N list is empty");
    }
    let rows = match convergence_table(alpha, &args.n_list) {
        Ok(rows) => rows,
        Err(e) => return Outcome::usage(e),
    };
    let stderr: String = rows
        .iter()
        .filter_map(|r| {
            r.error
                .as_ref()
                .map(|e| format!("warning: N = {}: {e}\n", r.n))
        })
        .collect();
    let stdout = match args.output {
        Output::Csv => csv_string(
            &["N", "variance", "limit", "abs_error"],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.variance.to_string(),
                    r.limit.to_string(),
                    r.abs_error.to_string(),
                ]
            }),
        ),
        Output::Json => json_string(&json!({
            "alpha": alpha,
            "rows": rows.iter().map(|r| json!({
                "N": r.n,
                "variance": finite_or_null(r.variance),
                "limit": r.limit,
                "abs_error": finite_or_null(r.abs_error),
                "error": r.error,
            })).collect::<Vec<_>>(),
        })),
    };
    Outcome {
        stdout,
        stderr,
        code: 0,
    }
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        serde_json::Value::Null
    }
}

#[derive(Serialize)]
struct SampleReport<'a> {
    #[serde(flatten)]
    stats: &'a SampleStats,
    exact_mean: f64,
    exact_mean_fraction: String,
}

pub fn run_sample(args: &SampleArgs) -> Outcome {
    let params = match args.params.params() {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let seed = match args.seed.map(Ok).unwrap_or_else(default_seed) {
        Ok(s) => s,
        Err(e) => return Outcome::usage(e),
    };
    let fp: FloatParams = params.to_float();
    let stats = match monte_carlo(&fp, args.samples, seed) {
        Ok(s) => s,
        Err(e) => return Outcome::usage(e),
    };
    let exact = avalanche_mean(&params);
    Outcome::ok(json_string(&SampleReport {
        stats: &stats,
        exact_mean: to_f64(&exact),
        exact_mean_fraction: fmt_fraction(&exact),
    }))
}

pub fn run_verify(args: &VerifyArgs) -> Outcome {
    if args.max_n < 2 || args.float_max_n < 1_000 || args.samples == 0 {
        return Outcome::usage(
            "verify needs --max-n >= 2, --float-max-n >= 1000 and --samples >= 1",
        );
    }
    let seed = match args.seed.map(Ok).unwrap_or_else(default_seed) {
        Ok(s) => s,
        Err(e) => return Outcome::usage(e),
    };
    let config = VerifyConfig {
        max_n: args.max_n,
        float_max_n: args.float_max_n,
        samples: args.samples,
        seed,
        suites: args.suite.clone(),
        fault: args.inject_fault,
    };
    let report = verify::run(&config);
    Outcome {
        code: if report.all_passed() { 0 } else { 1 },
        stdout: report.render(),
        stderr: String::new(),
    }
}
