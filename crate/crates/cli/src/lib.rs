//! Command-line front end for `orbicrystal`: series export and identity suites.
//!
//! Exit codes: 0 all checks pass, 1 some check failed, 2 configuration error.
//! Output depends only on the resolved [`RunConfig`], never on timing or
//! thread count.

pub mod config;
pub mod suites;

use clap::error::ErrorKind;
use clap::Parser;
use config::{Cli, Command, Format, RunConfig, Suite};
use orbicrystal::crystal::{z_series, ModelKind};
use orbicrystal::report::CheckReport;
use orbicrystal::scalars::format_exact;
use orbicrystal::Error;
use serde_json::{json, Value};
use std::ffi::OsString;

pub const ZSERIES_SCHEMA: &str = "orbicrystal.zseries/1";
pub const CHECK_SCHEMA: &str = "orbicrystal.check/1";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn config_error(msg: impl std::fmt::Display) -> Self {
        Outcome { code: EXIT_CONFIG, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: EXIT_PASS, stdout: text, stderr: String::new() },
                _ => Outcome { code: EXIT_CONFIG, stdout: String::new(), stderr: text },
            };
        }
    };
    match cli.command {
        Command::Zseries(m) => match RunConfig::resolve("zseries", None, &m) {
            Ok((cfg, ctx)) => {
                let model: ModelKind = cfg.model.map(Into::into).unwrap_or(ModelKind::First);
                let z = z_series(&ctx, model, cfg.charge);
                Outcome { code: EXIT_PASS, stdout: render_zseries(&cfg, model, &z), stderr: String::new() }
            }
            Err(e) => Outcome::config_error(e),
        },
        Command::Check { suite, model } => match RunConfig::resolve("check", Some(suite), &model) {
            Ok((cfg, ctx)) => check(suite, &cfg, &ctx),
            Err(e) => Outcome::config_error(e),
        },
    }
}

fn check(suite: Suite, cfg: &RunConfig, ctx: &orbicrystal::scalars::Context) -> Outcome {
    let results = suites::run_jobs(suites::jobs(suite, cfg, ctx), suites::thread_count());
    let mut reports = vec![];
    for r in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e @ Error::Unsolvable { .. }) => reports.push(suites::unsolvable_report(suite, &e)),
            Err(e) => return Outcome::config_error(e),
        }
    }
    reports.sort_by(|x, y| x.check.cmp(&y.check));
    let pass = reports.iter().all(CheckReport::passed);
    let stdout = match cfg.output {
        Format::Json => check_json(cfg, suite, pass, &reports),
        Format::Csv => check_csv(cfg, &reports),
    };
    Outcome { code: if pass { EXIT_PASS } else { EXIT_FAIL }, stdout, stderr: String::new() }
}

fn config_value(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn check_json(cfg: &RunConfig, suite: Suite, pass: bool, reports: &[CheckReport]) -> String {
    pretty(&json!({
        "schema": CHECK_SCHEMA,
        "config": config_value(cfg),
        "suite": suite,
        "status": if pass { "pass" } else { "fail" },
        "reports": reports,
    }))
}

/// Quotes a CSV field when needed.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_header(cfg: &RunConfig) -> String {
    format!("# config {}\n", serde_json::to_string(&config_value(cfg)).expect("json serializes"))
}

/// One row per (check, cutoff); exact checks have one row with an empty cutoff.
fn check_csv(cfg: &RunConfig, reports: &[CheckReport]) -> String {
    let mut out = csv_header(cfg);
    out.push_str("check,status,exact,cutoff,residual,precision_bits\n");
    for r in reports {
        let status = if r.passed() { "pass" } else { "fail" };
        if r.exact {
            out.push_str(&format!("{},{status},true,,{},\n", field(&r.check), field(&r.max_residual)));
        } else {
            for c in &r.residuals_by_cutoff {
                out.push_str(&format!("{},{status},false,{},{},{}\n", field(&r.check), c.cutoff, c.residual, cfg.precision_bits));
            }
        }
    }
    out
}

fn render_zseries(cfg: &RunConfig, model: ModelKind, z: &orbicrystal::crystal::ZSeries) -> String {
    let rows = z.rows();
    match cfg.output {
        Format::Json => {
            let mut coefficients: Vec<Vec<Value>> = vec![vec![]; z.series.coeffs.len()];
            for (e, mono, c) in &rows {
                coefficients[(e - z.series.offset) as usize].push(json!({ "monomial": mono, "coefficient": format_exact(c) }));
            }
            pretty(&json!({
                "schema": ZSERIES_SCHEMA,
                "config": config_value(cfg),
                "model": model.name(),
                "charge": z.charge,
                "offset": z.series.offset,
                "coefficients": coefficients,
            }))
        }
        Format::Csv => {
            let mut out = csv_header(cfg);
            out.push_str("q_exponent,monomial,coefficient\n");
            for (e, mono, c) in &rows {
                out.push_str(&format!("{e},{},{}\n", field(mono), format_exact(c)));
            }
            out
        }
    }
}
