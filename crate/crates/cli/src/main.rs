//! `negwit`: time series and reports for the ENM witness, intermediate-map
//! divisibility, contractive-function scans and depolarizing profile matching.
//!
//! Exit status is 0 when every checked property held, 1 when one failed
//! (the report is still written) and 2 on invalid input or I/O errors.

mod commands;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use table::Format;

#[derive(Debug, Parser)]
#[command(name = "negwit", version, about = "Negativity-based witnessing of non-Markovian qubit dynamics")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct RunConfig {
    /// ENM exponent (>= 1).
    #[arg(long, global = true, default_value_t = 2.0)]
    pub alpha: f64,
    /// ENM rate scale (> 0).
    #[arg(long, global = true, default_value_t = 0.5)]
    pub c: f64,
    /// Time at which the witness state is prepared.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tstar: f64,
    #[arg(long, global = true, default_value_t = 6.0)]
    pub tmax: f64,
    /// Number of uniform grid points on [0, tmax].
    #[arg(long, global = true, default_value_t = 600)]
    pub steps: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    TraceDistance,
    Infidelity,
    RelativeEntropy,
    Renyi,
    /// Two-qubit negativity with the map acting on the first qubit (scan only).
    Negativity,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Witness negativity E^{AB|C}(t): full, shortcut and closed form.
    Fig1,
    /// Choi spectrum and convex decomposition of Λ_t∘Λ_s⁻¹ for (s, t) pairs.
    Divisibility {
        /// Comma-separated s values, paired with --t.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        s: Vec<f64>,
        /// Comma-separated t values; a single value is broadcast.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        t: Vec<f64>,
        /// Without --s/--t: all s <= t pairs from this many points on [0, tmax].
        #[arg(long, default_value_t = 7)]
        grid_points: usize,
    },
    /// Monotonicity of a contractive function along the dynamics for random inputs.
    Scan {
        #[arg(long, value_enum, default_value_t = Kind::TraceDistance)]
        kind: Kind,
        #[arg(long, default_value_t = 2.0)]
        renyi_order: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Constant rates G1,G2,G3 replacing the ENM dynamics.
        #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
        rates: Option<Vec<f64>>,
    },
    /// Depolarizing rates a_i reproducing a monotone target profile.
    ProfileMatch {
        /// File with `t,target` rows; `#` lines and a header are skipped.
        #[arg(long, required_unless_present = "from_enm", conflicts_with = "from_enm")]
        targets: Option<PathBuf>,
        /// Use the ENM profile of (rho, sigma) on the --tmax/--steps grid.
        #[arg(long)]
        from_enm: bool,
        #[arg(long, value_enum, default_value_t = Kind::TraceDistance)]
        kind: Kind,
        #[arg(long, default_value_t = 2.0)]
        renyi_order: f64,
        /// Bloch vector of the first initial state.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,0,0.5")]
        rho: Vec<f64>,
        /// Bloch vector of the second initial state.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,0,-0.5")]
        sigma: Vec<f64>,
    },
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tmax > 0.0 && self.tmax.is_finite()) {
            bail!("--tmax must be > 0, got {}", self.tmax);
        }
        if self.steps < 2 {
            bail!("--steps must be >= 2, got {}", self.steps);
        }
        if !(self.tstar > 0.0 && self.tstar.is_finite()) {
            bail!("--tstar must be > 0, got {}", self.tstar);
        }
        negwit::dynamics::EnmParams::new(self.alpha, self.c)?;
        Ok(())
    }
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = cli.config;
    cfg.validate()?;
    let report = match cli.command {
        Command::Fig1 => commands::fig1(&cfg)?,
        Command::Divisibility { s, t, grid_points } => commands::divisibility(&cfg, &s, &t, grid_points)?,
        Command::Scan {
            kind,
            renyi_order,
            trials,
            rates,
        } => commands::scan(&cfg, kind, renyi_order, trials, rates.as_deref())?,
        Command::ProfileMatch {
            targets,
            from_enm: _,
            kind,
            renyi_order,
            rho,
            sigma,
        } => commands::profile_match(&cfg, targets.as_deref(), kind, renyi_order, &rho, &sigma)?,
    };
    let mut out: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    report.table.write(cfg.format, &mut out)?;
    out.flush()?;
    Ok(report.held)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
