use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod parse;

/// Inertia and related properties of Loewner matrices of `t^r`.
#[derive(Debug, Parser)]
#[command(name = "loewner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Mantissa bits for floating routes (53 is f64).
    #[arg(long, env = "LOEWNER_PRECISION_BITS", default_value_t = 53)]
    pub precision_bits: u32,
    /// Relative zero threshold for eigenvalues and minors.
    #[arg(long)]
    pub zero_rel_tol: Option<f64>,
    /// Relative residual accepted by convergence and identity checks.
    #[arg(long)]
    pub residual_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Loewner,
    /// Hyperbolic form at `x_i = ln(p_i) / 2`.
    Sinh,
    PowerSum,
    /// Two-sequence matrix against `--q`.
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    SignedLog,
    None,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a matrix.
    Build {
        /// Comma-separated nodes; integers and fractions like 7/2 are exact.
        #[arg(long)]
        points: String,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, value_enum, default_value_t = Kind::Loewner)]
        kind: Kind,
        /// Second node list for `--kind cross`.
        #[arg(long)]
        q: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the computed inertia of L_r with the predicted one.
    Verify {
        #[arg(long)]
        points: String,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "r_range", required_unless_present = "r_range")]
        r: Option<f64>,
        /// `a:b:steps`, inclusive.
        #[arg(long, allow_hyphen_values = true)]
        r_range: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalue trajectories over an exponent grid (CSV by default).
    Sweep {
        #[arg(long)]
        points: String,
        #[arg(long, allow_hyphen_values = true)]
        r_range: String,
        #[arg(long, value_enum, default_value_t = Scale::SignedLog)]
        scale: Scale,
        /// Signed-log scale; defaults to the smallest zero threshold.
        #[arg(long)]
        tau: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Count zeros of `Σ c_j (x^r - p_j^r)/(x - p_j)` on a geometric grid.
    Zeros {
        #[arg(long)]
        points: String,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        r: f64,
        /// Scan interval `lo:hi`; defaults to `[min p / 100, 100 max p]`.
        #[arg(long)]
        interval: Option<String>,
        #[arg(long)]
        grid_points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Sign pattern of all minors of L_r.
    Ssr {
        #[arg(long)]
        points: String,
        #[arg(long)]
        r: f64,
        /// Largest minor size; defaults to n.
        #[arg(long)]
        k_max: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Closed forms of det L_3 and det L_4 for three nodes.
    DetId {
        #[arg(long)]
        points: String,
        #[command(flatten)]
        common: Common,
    },
    /// Sampled norm of the derivative of `A ↦ A^r` at `diag(p)`.
    Dk {
        #[arg(long)]
        points: String,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Zeros of `z ↦ det L_z` in a rectangle by the argument principle.
    ComplexZeros {
        #[arg(long)]
        points: String,
        /// Real range `a:b`.
        #[arg(long, allow_hyphen_values = true)]
        re: String,
        /// Imaginary range `a:b`.
        #[arg(long, allow_hyphen_values = true)]
        im: String,
        /// Cells per axis, `nx,ny` or `n`.
        #[arg(long, default_value = "8")]
        grid: String,
        #[command(flatten)]
        common: Common,
    },
    /// Inertia of `[(p_i + p_j)^r]` against that of L_{r+1}.
    PrCompare {
        #[arg(long)]
        points: String,
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        common: Common,
    },
}

pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<loewner_core::error::Error> for Failure {
    fn from(e: loewner_core::error::Error) -> Self {
        use loewner_core::error::Error;
        match e {
            Error::NoConvergence { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// A rendered report and whether the checked property held.
pub struct Outcome {
    pub body: String,
    pub holds: bool,
}

fn run(cmd: Command) -> Result<(Outcome, Option<PathBuf>), Failure> {
    use commands as c;
    let (outcome, common) = match cmd {
        Command::Build {
            points,
            r,
            kind,
            q,
            common,
        } => (c::build(&points, r, kind, q.as_deref(), &common)?, common),
        Command::Verify {
            points,
            r,
            r_range,
            common,
        } => (c::verify(&points, r, r_range.as_deref(), &common)?, common),
        Command::Sweep {
            points,
            r_range,
            scale,
            tau,
            common,
        } => (c::sweep(&points, &r_range, scale, tau, &common)?, common),
        Command::Zeros {
            points,
            coeffs,
            r,
            interval,
            grid_points,
            common,
        } => (c::zeros(&points, &coeffs, r, interval.as_deref(), grid_points, &common)?, common),
        Command::Ssr {
            points,
            r,
            k_max,
            common,
        } => (c::ssr(&points, r, k_max, &common)?, common),
        Command::DetId { points, common } => (c::det_id(&points, &common)?, common),
        Command::Dk {
            points,
            r,
            samples,
            seed,
            common,
        } => (c::dk(&points, r, samples, seed, &common)?, common),
        Command::ComplexZeros {
            points,
            re,
            im,
            grid,
            common,
        } => (c::complex_zeros(&points, &re, &im, &grid, &common)?, common),
        Command::PrCompare { points, r, common } => (c::pr_compare(&points, r, &common)?, common),
    };
    Ok((outcome, common.out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, out) = match run(cli.command) {
        Ok(v) => v,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let written = match &out {
        Some(path) => std::fs::write(path, &outcome.body),
        None => std::io::stdout().write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if outcome.holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
