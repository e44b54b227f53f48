//! Command-line driver: figure data as CSV/JSON and verification runs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
pub mod table;

pub use config::RunConfig;
pub use table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lnmodal", version, about = "Modal-qubit devices in Ti:LiNbO3 channel waveguides")]
pub struct Cli {
    /// Run configuration (TOML). Defaults are used for anything missing.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; without it the artifact goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// n_eff and β of the two lowest modes against strip width.
    Dispersion {
        #[arg(long)]
        pol: Option<lnmodal::Polarization>,
        /// Width range start (µm).
        #[arg(long)]
        from: Option<f64>,
        /// Width range end (µm), inclusive.
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Mode amplitudes along a coupler.
    CouplerEvolution {
        /// Launch label, e.g. TM-odd, TE-even, TM-o2, or 1/2 for a custom coupler.
        #[arg(long)]
        input: Option<String>,
    },
    /// Rotator voltages against the rotation angle.
    RotatorCurve {
        #[arg(long)]
        points: Option<usize>,
    },
    /// Truth table, fidelity and entanglement test of a circuit file.
    CnotVerify {
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Solve the path lengths that equalize the component phases.
    PhasePlan,
    /// Seeded property checks of the analytic layers.
    Selftest,
}

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Verification(String),
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<lnmodal::Error> for CliError {
    fn from(e: lnmodal::Error) -> Self {
        use lnmodal::Error as E;
        match e {
            E::Domain(_) | E::Config(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced. `passed = false` turns into exit status 1
/// after the artifact has been written.
pub struct Outcome {
    pub name: &'static str,
    pub table: Table,
    pub passed: bool,
    pub summary: String,
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let ctx = config::Context::new(cfg)?;
    let outcome = match &cli.command {
        Command::Dispersion { pol, from, to, step } => {
            let mut d = ctx.cfg.dispersion.clone();
            d.pol = pol.unwrap_or(d.pol);
            d.from_um = from.unwrap_or(d.from_um);
            d.to_um = to.unwrap_or(d.to_um);
            d.step_um = step.unwrap_or(d.step_um);
            commands::dispersion::run(&ctx, &d)?
        }
        Command::CouplerEvolution { input } => {
            let mut e = ctx.cfg.coupler_evolution.clone();
            if let Some(i) = input {
                e.input = i.clone();
            }
            commands::evolution::run(&ctx, &e)?
        }
        Command::RotatorCurve { points } => {
            let mut r = ctx.cfg.rotator.clone();
            r.points = points.unwrap_or(r.points);
            commands::rotator::run(&ctx, &r)?
        }
        Command::CnotVerify { circuit } => {
            let path = circuit.clone().or_else(|| ctx.cfg.cnot.circuit.clone());
            commands::cnot::run(&ctx, path.as_deref())?
        }
        Command::PhasePlan => commands::phase_plan::run(&ctx)?,
        Command::Selftest => commands::selftest::run(&ctx)?,
    };
    Ok(outcome)
}

/// Write the artifact to `out/<name>.<ext>` or stdout.
pub fn emit(outcome: &Outcome, format: Format, out: Option<&Path>) -> CliResult<()> {
    let bytes = match format {
        Format::Csv => outcome.table.to_csv()?,
        Format::Json => outcome.table.to_json()?,
    };
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{}.{}", outcome.name, format.extension())), bytes)?;
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    Ok(())
}

pub fn main_with(cli: Cli) -> ExitCode {
    let result = run(&cli).and_then(|o| {
        emit(&o, cli.format, cli.out.as_deref())?;
        Ok(o)
    });
    match result {
        Ok(o) => {
            eprintln!("{}", o.summary);
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("lnmodal: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
