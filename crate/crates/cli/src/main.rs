//! `strichartz`: verification suites, tables and plot data for the
//! Penrose-transform Strichartz library.

mod commands;
mod output;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;
use suites::{Fault, Suite};

/// Largest degree accepted without `--allow-large-lmax`.
const LMAX_GUARD: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "strichartz", version, about = "Sharp Strichartz deficits via the Penrose transform")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Accept --lmax above the default guardrail of 16.
    #[arg(long, global = true)]
    allow_large_lmax: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sharp constants, extremizer norms, gap and lower-bound constants.
    Constants {
        /// Dimensions, e.g. `3`, `3,5` or `2..6`.
        #[arg(long, default_value = "3..5", value_parser = parse_dims)]
        d: Dims,
    },
    /// The criticality integral I(d) for even d and first-variation residuals for odd d.
    Criticality {
        #[arg(long, default_value = "2..10", value_parser = parse_dims)]
        d: Dims,
        /// Random orthogonal directions per odd dimension.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Degree of the random directions; 8 for d ≤ 7 and 4 above.
        #[arg(long)]
        lmax: Option<usize>,
        /// Method agreement for even d, relative residual for odd d.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Spectral gaps of the second variation in d = 3 and d = 5.
    Gap {
        #[arg(long, default_value = "3,5", value_parser = parse_dims)]
        d: Dims,
        /// Last degree scanned by the d = 5 dominance certificate.
        #[arg(long, default_value_t = 200)]
        lscan: usize,
        /// Degree of the random data used for Rayleigh quotients.
        #[arg(long, default_value_t = 8)]
        lmax: usize,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// ψ and φ for given or random data.
    Deficit {
        #[command(flatten)]
        data: DataArgs,
        /// Evaluate at f⋆ + ε·f with f projected orthogonally to f⋆.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Upper bound for the distance to the extremizer manifold.
    Dist {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// ψ(f⋆+εf)/ε² against Q(f) for random orthogonal directions.
    Taylor {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 6)]
        lmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.05, 0.025])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 3.0)]
        decay: f64,
        /// Relative error allowed for the extrapolated limit.
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Seeded random data pair as JSON.
    RandomData {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 4)]
        lmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coefficients decay like (1+ℓ)^(−decay).
        #[arg(long, default_value_t = 3.0)]
        decay: f64,
        /// Remove the degrees ℓ ≤ 1 (orthogonal to f⋆ and its tangent space).
        #[arg(long)]
        orthogonal: bool,
    },
    /// Run the invariant suites; exit 1 when any check fails.
    Verify {
        /// Suites to run (repeatable); all when omitted.
        #[arg(long, value_enum)]
        suite: Vec<Suite>,
        #[arg(long, default_value_t = 200)]
        lscan: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override a check tolerance, e.g. `quadform.q3_vs_oracle=1e-9` (repeatable).
        #[arg(long, value_parser = parse_override)]
        tolerance: Vec<(String, f64)>,
        /// Corrupt one ingredient to confirm the suites catch it.
        #[arg(long, value_enum)]
        inject: Option<Fault>,
    },
    /// Plot-ready CSV tables.
    PlotData {
        #[arg(long, value_enum)]
        kind: commands::PlotKind,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 6)]
        lmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.05, 0.025, 0.0125, 0.00625])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 40)]
        lscan: usize,
    },
}

/// Data from `--input` or generated from (d, lmax, seed, decay).
#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// DataPair JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    lmax: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    decay: f64,
}

pub type Dims = Vec<usize>;

/// `3`, `3,5`, `4..10` (inclusive), or a mix such as `2,4..6`.
fn parse_dims(s: &str) -> Result<Dims, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad dimension {x:?}: {e}"));
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty range {part}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if let Some(&d) = out.iter().find(|&&d| !(2..=16).contains(&d)) {
        return Err(format!("dimension {d} outside 2..16"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let v: f64 = v.parse().map_err(|e| format!("bad tolerance {v:?}: {e}"))?;
    if !(v >= 0.0) {
        return Err(format!("tolerance must be nonnegative, got {v}"));
    }
    Ok((k.to_string(), v))
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable input, impossible configuration: exit 2.
    Usage(String),
    /// A computation could not reach its accuracy or a check failed to run: exit 1.
    Failure(String),
}

impl From<penrose_strichartz::Error> for CliError {
    fn from(e: penrose_strichartz::Error) -> Self {
        use penrose_strichartz::Error as E;
        match e {
            E::Parameter(_) | E::Format(_) | E::Configuration(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli);
    match result {
        Ok((report, default_format)) => {
            let text = report.render(cli.format.unwrap_or(default_format));
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            match report.passed {
                Some(false) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
