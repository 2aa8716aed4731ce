//! Command line front end: argument parsing, config merging and output.

pub mod config;
pub mod experiments;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{ConfigError, Format, Output, Settings, OUTPUT_KEYS};
use experiments::{
    BoundsConfig, CircuitConfig, EncodingCompareConfig, Fermi1dConfig, Fermi2dConfig, RunError,
    RunResult,
};
use table::{json_document, Table};

#[derive(Debug, Parser)]
#[command(
    name = "fqnoise",
    version,
    about = "Noise propagation in fermionic simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// 1D Fermi sea: error at k_F and q0 against N, or sensitivity against k.
    Fermi1d,
    /// 2D Fermi sea sensitivity over the Brillouin zone.
    Fermi2d,
    /// Hopping and number-operator errors under several encodings.
    EncodingCompare,
    /// Noisy Gaussian circuits against the explicit bound.
    Circuit,
    /// Analytic bounds and regimes.
    Bounds,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fermi1d => "fermi1d",
            Command::Fermi2d => "fermi2d",
            Command::EncodingCompare => "encoding-compare",
            Command::Circuit => "circuit",
            Command::Bounds => "bounds",
        }
    }
}

/// Every flag is a string override of the config key of the same name.
#[derive(Debug, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub p: Option<String>,
    #[arg(long = "L", global = true)]
    pub size: Option<String>,
    #[arg(long, global = true)]
    pub n_occ: Option<String>,
    #[arg(long, global = true)]
    pub depth: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub encoding: Option<String>,
    #[arg(long, global = true)]
    pub phi0: Option<String>,
    #[arg(long, global = true)]
    pub mode: Option<String>,
    #[arg(long, global = true)]
    pub dim: Option<String>,
    #[arg(long, global = true)]
    pub radius: Option<String>,
    #[arg(long, global = true)]
    pub gates: Option<String>,
    #[arg(long, global = true)]
    pub mu: Option<String>,
    #[arg(long = "K", global = true)]
    pub k: Option<String>,
    #[arg(long, global = true)]
    pub fill: Option<String>,
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    #[arg(long, global = true)]
    pub n_grid: Option<String>,
    #[arg(long, global = true)]
    pub bk_n: Option<String>,
    #[arg(long, global = true)]
    pub k_f: Option<String>,
    #[arg(long, global = true)]
    pub delta: Option<String>,
}

impl Flags {
    pub fn pairs(&self) -> Vec<(String, String)> {
        let all = [
            ("out", &self.out),
            ("format", &self.format),
            ("p", &self.p),
            ("L", &self.size),
            ("n_occ", &self.n_occ),
            ("depth", &self.depth),
            ("seed", &self.seed),
            ("encoding", &self.encoding),
            ("phi0", &self.phi0),
            ("mode", &self.mode),
            ("dim", &self.dim),
            ("radius", &self.radius),
            ("gates", &self.gates),
            ("mu", &self.mu),
            ("K", &self.k),
            ("fill", &self.fill),
            ("sweep", &self.sweep),
            ("n_grid", &self.n_grid),
            ("bk_n", &self.bk_n),
            ("k_f", &self.k_f),
            ("delta", &self.delta),
        ];
        all.into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

/// Rendered output of one subcommand.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub text: String,
}

fn render<C: Serialize>(cfg: &C, table: Table, format: Format) -> Report {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => json_document(cfg, &table),
    };
    Report { table, text }
}

fn allowed(keys: &[&'static str]) -> Vec<&'static str> {
    keys.iter().chain(OUTPUT_KEYS.iter()).copied().collect()
}

/// Runs a subcommand on merged settings and renders it.
pub fn execute(command: Command, settings: &Settings) -> RunResult<(Report, Output)> {
    let output = Output::from_settings(settings)?;
    let report = match command {
        Command::Fermi1d => {
            settings.require_known(&allowed(&Fermi1dConfig::KEYS), command.name())?;
            let cfg = Fermi1dConfig::from_settings(settings)?;
            render(&cfg, experiments::run_fermi1d(&cfg)?, output.format)
        }
        Command::Fermi2d => {
            settings.require_known(&allowed(&Fermi2dConfig::KEYS), command.name())?;
            let cfg = Fermi2dConfig::from_settings(settings)?;
            render(&cfg, experiments::run_fermi2d(&cfg)?, output.format)
        }
        Command::EncodingCompare => {
            settings.require_known(&allowed(&EncodingCompareConfig::KEYS), command.name())?;
            let cfg = EncodingCompareConfig::from_settings(settings)?;
            render(
                &cfg,
                experiments::run_encoding_compare(&cfg)?,
                output.format,
            )
        }
        Command::Circuit => {
            settings.require_known(&allowed(&CircuitConfig::KEYS), command.name())?;
            let cfg = CircuitConfig::from_settings(settings)?;
            render(&cfg, experiments::run_circuit(&cfg)?, output.format)
        }
        Command::Bounds => {
            settings.require_known(&allowed(&BoundsConfig::KEYS), command.name())?;
            let cfg = BoundsConfig::from_settings(settings)?;
            let format = if settings.raw("format").is_some() {
                output.format
            } else {
                Format::Json
            };
            render(&cfg, experiments::run_bounds(&cfg)?, format)
        }
    };
    Ok((report, output))
}

fn write_report(report: &Report, output: &Output) -> RunResult<()> {
    match &output.out {
        Some(path) => std::fs::write(path, &report.text).map_err(|e| {
            ConfigError::new("out", format!("cannot write {}: {e}", path.display())).into()
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(report.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| RunError::Invariant(format!("stdout: {e}")))
        }
    }
}

/// Parses arguments, runs, writes output. Returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = Settings::from_sources(cli.flags.config.as_deref(), &cli.flags.pairs())
        .map_err(RunError::from)
        .and_then(|s| execute(cli.command, &s))
        .and_then(|(report, output)| write_report(&report, &output));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
