//! `latmoment`: batch front-end for the latmoment library.
//!
//! Every option can also be given in a flat `key = value` config file
//! (`--config`); flags win over the file. Tables are written as CSV (default)
//! or JSON, the verification report as JSON.

mod commands;
mod config;
mod output;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::{ConfigError, RunConfig};
use output::{Table, SCHEMA};

#[derive(Parser, Debug)]
#[command(name = "latmoment", version, about = "Moments of lattice-point counts over number fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Degree, signature, discriminant, roots of unity and units (--field).
    FieldInfo,
    /// Weil height of one element or projective heights of a tuple (--field, --x).
    Height,
    /// Grassmannian height, lattice determinant and 𝔇 of a subspace (--field, --rows).
    GrHeight,
    /// Exact Poisson moments m_n(λ) (--n, --lambda; both accept lists).
    Poisson,
    /// Bounds for E[ρ²] (--field, --t, --v, --k, --c0, --c1).
    SecondMoment,
    /// Bounds for E[ρ^n] (--field, --t, --n, --v, --k, --c-s, --c0, --c1).
    MomentBounds,
    /// Dedekind zeta enclosures (--field, --s, --trunc-p; --trunc-t adds a height zeta partial sum over ℚ).
    Zeta,
    /// Ideal-sum thresholds t0 for M = 1, 2, ... (--k list, --c0, --ratio or --field).
    T0Table,
    /// Run a verification suite and write a JSON report (--suite, --seed).
    Verify,
    /// Empirical moments of random code-lift lattices over ℚ (--t, --n, --v, --p, --samples, --seed).
    Empirical,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// key = value config file; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Q, Q(sqrt,D) or Q(zeta,n)
    #[arg(long, global = true)]
    field: Option<String>,
    #[arg(long, global = true)]
    t: Option<String>,
    #[arg(long, global = true)]
    n: Option<String>,
    /// ball volume V
    #[arg(long, global = true)]
    v: Option<String>,
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true)]
    c0: Option<String>,
    #[arg(long, global = true)]
    c1: Option<String>,
    /// stand-in for the non-explicit constant C_S
    #[arg(long = "c-s", global = true)]
    c_s: Option<String>,
    /// largest prime P in Euler products
    #[arg(long = "trunc-p", global = true)]
    trunc_p: Option<String>,
    /// height cutoff T
    #[arg(long = "trunc-t", global = true)]
    trunc_t: Option<String>,
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// zeta argument
    #[arg(long, global = true)]
    s: Option<String>,
    /// element(s): coordinates in the power basis joined by ':', elements by ','
    #[arg(long, global = true)]
    x: Option<String>,
    /// matrix rows separated by ';'
    #[arg(long, global = true)]
    rows: Option<String>,
    /// prime for code-lift lattices
    #[arg(long, global = true)]
    p: Option<String>,
    #[arg(long, global = true)]
    suite: Option<String>,
    /// rank ratio 2r/d for t0-table
    #[arg(long, global = true)]
    ratio: Option<String>,
    /// write here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

impl Opts {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("field", &self.field),
            ("t", &self.t),
            ("n", &self.n),
            ("v", &self.v),
            ("k", &self.k),
            ("c0", &self.c0),
            ("c1", &self.c1),
            ("c-s", &self.c_s),
            ("trunc-p", &self.trunc_p),
            ("trunc-t", &self.trunc_t),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("lambda", &self.lambda),
            ("s", &self.s),
            ("x", &self.x),
            ("rows", &self.rows),
            ("p", &self.p),
            ("suite", &self.suite),
            ("ratio", &self.ratio),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(o) = &self.output {
            cfg.set("output", &o.to_string_lossy())?;
        }
        if let Some(f) = self.format {
            cfg.set("format", if f == Format::Json { "json" } else { "csv" })?;
        }
        Ok(cfg)
    }
}

enum Outcome {
    Done,
    VerificationFailed,
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(s) = std::env::var("LATMOMENT_THREADS") {
        let n: usize = s
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| config::bad(format!("LATMOMENT_THREADS must be a positive integer, got `{s}`")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn emit(cfg: &RunConfig, text: &str) -> anyhow::Result<()> {
    match cfg.raw("output") {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn format_of(cfg: &RunConfig, default: Format) -> anyhow::Result<Format> {
    match cfg.raw("format") {
        None => Ok(default),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(config::bad(format!("unknown format `{other}` (csv or json)"))),
    }
}

fn run(command: Command, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    if let Command::Verify = command {
        let suite = cfg.raw("suite").unwrap_or("core");
        let seed: u64 = cfg.get_or("seed", 0)?;
        let records = verify::run_suite(suite, seed)?;
        let failed = records.iter().filter(|r| !r.verdict).count();
        let doc =
            json!({ "schema": SCHEMA, "suite": suite, "seed": seed, "all_pass": failed == 0, "records": records });
        let text = match format_of(cfg, Format::Json)? {
            Format::Json => serde_json::to_string_pretty(&doc)? + "\n",
            Format::Csv => verify_csv(&records)?,
        };
        emit(cfg, &text)?;
        eprintln!("verify {suite} (seed {seed}): {} checks, {failed} failed", records.len());
        for r in records.iter().filter(|r| !r.verdict) {
            eprintln!("  FAILED {} {:?}: estimate {} ± {} vs {}", r.check, r.params, r.estimate, r.sigma, r.bound);
        }
        return Ok(if failed == 0 { Outcome::Done } else { Outcome::VerificationFailed });
    }
    let table = match command {
        Command::FieldInfo => commands::field_info(cfg)?,
        Command::Height => commands::height(cfg)?,
        Command::GrHeight => commands::gr_height_cmd(cfg)?,
        Command::Poisson => commands::poisson(cfg)?,
        Command::SecondMoment => commands::second_moment(cfg)?,
        Command::MomentBounds => commands::moment_bounds_cmd(cfg)?,
        Command::Zeta => commands::zeta(cfg)?,
        Command::T0Table => commands::t0_table(cfg)?,
        Command::Empirical => commands::empirical(cfg)?,
        Command::Verify => unreachable!(),
    };
    let text = match format_of(cfg, Format::Csv)? {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json()?,
    };
    emit(cfg, &text)?;
    eprintln!("{}: {} rows", table.command, table.rows.len());
    Ok(Outcome::Done)
}

fn verify_csv(records: &[latmoment::oracle::VerificationRecord]) -> anyhow::Result<String> {
    let mut t = Table::new("verify", &["check", "params", "estimate", "estimate_pm", "bound", "verdict"]);
    for r in records {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        t.push(vec![
            r.check.clone().into(),
            params.join(" ").into(),
            output::num(r.estimate),
            output::num(r.sigma),
            output::num(r.bound),
            r.verdict.into(),
        ]);
    }
    t.to_csv()
}

/// 2 for bad input or unmet preconditions, 1 for internal failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<latmoment::Error>() {
        Some(latmoment::Error::Internal(_)) | None => 1,
        Some(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| cli.opts.config()).and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(latmoment::Error::BelowThreshold { t0, .. }) = e.downcast_ref::<latmoment::Error>() {
                eprintln!("t0 = {t0}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
