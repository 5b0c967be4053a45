use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::acceptance;
use crate::commands::{self, LabError, Series};
use crate::config::{Format, RunConfig};
use crate::session::Session;

#[derive(Debug, Parser)]
#[command(name = "gamow", version, about = "Resonant-state expansion of decay from a delta-shell potential")]
pub struct Cli {
    /// TOML configuration; built-in defaults when absent.
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,
    /// Shell strength lambda.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Shell radius R.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub radius: Option<f64>,
    /// Box mode m of the initial state.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mode: Option<i64>,
    /// Number of resonance pairs N.
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Significant digits.
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Resonance poles k_n, n = 1..N, with residuals and amplitudes.
    Poles,
    /// Sum rule, f_N and Delta_N diagnostics against truncation.
    Sumrules,
    /// S(t), P(t) and the Green remainder on the time grid.
    Probabilities,
    /// Late-time power-law exponents (JSON).
    Tailfit {
        #[arg(long, value_enum, ignore_case = true)]
        series: Option<Series>,
    },
    /// Crank-Nicolson oracle against the expansion over the horizon.
    OracleCompare,
    /// Run every acceptance criterion; nonzero exit if any fails.
    Report,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("unknown format `{s}`, expected csv or json")),
    }
}

impl Cli {
    /// File values with command-line overrides, validated.
    pub fn effective_config(&self) -> Result<RunConfig, LabError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.lambda {
            cfg.model.lambda = v;
        }
        if let Some(v) = self.radius {
            cfg.model.radius = v;
        }
        if let Some(v) = self.mode {
            cfg.initial_state.mode = v;
        }
        if let Some(v) = self.truncation {
            cfg.truncation_n = v;
        }
        if let Some(v) = self.format {
            cfg.output.format = v;
        }
        if let Some(v) = &self.output {
            cfg.output.path = Some(v.display().to_string());
        }
        if let Some(v) = self.precision {
            cfg.output.precision = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Run one invocation; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, LabError> {
    let cfg = cli.effective_config()?;
    let (text, code) = match &cli.command {
        Command::Report => {
            let results = acceptance::run_all(&cfg)?;
            for c in &results {
                eprintln!("{}", c.line());
            }
            let ok = results.iter().all(|c| c.passed());
            (acceptance::to_json(&cfg, &results), if ok { 0 } else { 1 })
        }
        other => {
            let session = Session::new(&cfg)?;
            let text = match other {
                Command::Poles => commands::poles(&session)?,
                Command::Sumrules => commands::sumrules(&session)?,
                Command::Probabilities => commands::probabilities(&session)?,
                Command::Tailfit { series } => commands::tailfit(&session, *series)?,
                Command::OracleCompare => commands::oracle_compare(&session)?,
                Command::Report => unreachable!(),
            };
            (text, 0)
        }
    };
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(code)
}
