use std::path::PathBuf;

use apforge_core::protocols::DEFAULT_K_MAX;
use apforge_core::solver::{SolveOptions, DEFAULT_M_MAX, DEFAULT_TOL};
use apforge_core::BoundaryConditions;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

/// Minimum-time on-off Roland-Cerf pulse sequences for two-level adiabatic
/// passage with detuning-only control.
///
/// Angles are in radians, detunings in units of Ω, physical times in 1/Ω.
#[derive(Debug, Parser)]
#[command(name = "apforge", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shortest sequence for one amplitude bound v.
    Solve(SolveArgs),
    /// Optimal duration over a grid of amplitude bounds.
    Staircase(StaircaseArgs),
    /// Constant-control resonances (u_k, T_k).
    Resonances(ResonanceArgs),
    /// Waveform and trajectories of a sequence in both frames.
    Simulate(SimulateArgs),
    /// Recompute every check on a saved solve result.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct BoundaryArgs {
    /// Initial field angle θi.
    #[arg(long, allow_hyphen_values = true)]
    pub theta_i: Option<f64>,
    /// Final field angle θf (< θi).
    #[arg(long, allow_hyphen_values = true)]
    pub theta_f: Option<f64>,
    /// Initial detuning, in units of Ω.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_i: Option<f64>,
    /// Final detuning, in units of Ω.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_f: Option<f64>,
    /// Rabi frequency Ω.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

impl BoundaryArgs {
    pub fn given(&self) -> bool {
        self.theta_i.is_some() || self.theta_f.is_some() || self.delta_i.is_some() || self.delta_f.is_some()
    }

    /// Exactly one of the angle pair or the detuning pair must be given.
    pub fn resolve(&self) -> Result<BoundaryConditions, CliError> {
        let bc = match (self.theta_i, self.theta_f, self.delta_i, self.delta_f) {
            (Some(ti), Some(tf), None, None) => BoundaryConditions::new(ti, tf, self.omega),
            (None, None, Some(di), Some(df)) => {
                // detunings are in units of Ω
                BoundaryConditions::from_detunings(di * self.omega, df * self.omega, self.omega)
            }
            _ => return Err(CliError::Usage("give either --theta-i and --theta-f, or --delta-i and --delta-f".into())),
        };
        Ok(bc?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Largest number of off pulses tried.
    #[arg(long, default_value_t = DEFAULT_M_MAX)]
    pub m_max: usize,
    /// Root tolerance on Im a_y.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

impl SearchArgs {
    pub fn options(&self) -> Result<SolveOptions, CliError> {
        if self.m_max < 1 {
            return Err(CliError::Usage("--m-max must be at least 1".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        Ok(SolveOptions { m_max: self.m_max, tol: self.tol, ..SolveOptions::default() })
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    /// Maximum control amplitude.
    #[arg(long)]
    pub v: f64,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Uniform samples for the verifying integration.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StaircaseArgs {
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    #[arg(long)]
    pub v_start: f64,
    #[arg(long)]
    pub v_stop: f64,
    #[arg(long, default_value_t = 200)]
    pub v_count: usize,
    /// Logarithmic instead of linear spacing.
    #[arg(long)]
    pub v_log: bool,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl StaircaseArgs {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let (a, b, n) = (self.v_start, self.v_stop, self.v_count);
        if n < 1 {
            return Err(CliError::Usage("--v-count must be at least 1".into()));
        }
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b >= a) || (n > 1 && b == a) {
            return Err(CliError::Usage("need 0 < --v-start < --v-stop".into()));
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        let step = |i: usize| i as f64 / (n - 1) as f64;
        let grid = (0..n).map(|i| {
            if i + 1 == n {
                b
            } else if self.v_log {
                (a.ln() + (b.ln() - a.ln()) * step(i)).exp()
            } else {
                a + (b - a) * step(i)
            }
        });
        Ok(grid.collect())
    }
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Solve result (JSON) to simulate.
    #[arg(long, conflicts_with_all = ["rc_k", "m"])]
    pub input: Option<PathBuf>,
    /// Constant control at the k-th resonance instead of a solved sequence.
    #[arg(long, conflicts_with = "m")]
    pub rc_k: Option<usize>,
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    /// Inline sequence: amplitude.
    #[arg(long)]
    pub v: Option<f64>,
    /// Inline sequence: number of off pulses.
    #[arg(long, requires_all = ["v", "tau1", "tau2"])]
    pub m: Option<usize>,
    #[arg(long)]
    pub tau1: Option<f64>,
    #[arg(long)]
    pub tau2: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub tau3: f64,
    /// Uniform samples (segment boundaries are added).
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    /// Output directory for original.csv, adiabatic.csv and waveform.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Solve result (JSON) to check.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
