use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nv_cli::commands;
use nv_cli::error::CliError;

/// Simulate and analyze camera-integrated NV-center Rabi measurements.
///
/// Exit codes: 0 success, 2 input error, 3 numerical failure, 4 fit
/// non-convergence. Set NVSIM_THREADS to pin the worker-thread count;
/// results are identical for any value, only faster or slower.
#[derive(Parser)]
#[command(name = "nvsim", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-resolved level populations over the steady measurement cycle
    SimulatePopulations {
        /// Run configuration (TOML)
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (t_s, n1..n7, n_c, n_E)
        #[arg(long)]
        output: PathBuf,
        /// Emit every cycle from the thermal start, not just the converged one
        #[arg(long)]
        all_cycles: bool,
    },
    /// Contrast versus RF duration over the configured τ grid
    SimulateRabi {
        /// Run configuration (TOML)
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (tau_s, contrast)
        #[arg(long)]
        output: PathBuf,
        /// Also fit the damped cosine and report its parameters
        #[arg(long)]
        fit: bool,
    },
    /// Fit the damped cosine to an existing contrast curve CSV
    FitRabi {
        /// Input CSV with columns tau_s, contrast
        #[arg(long)]
        input: PathBuf,
        /// Starting amplitude (all four --guess-* flags go together)
        #[arg(long)]
        guess_a: Option<f64>,
        /// Starting decay time, s
        #[arg(long)]
        guess_b_s: Option<f64>,
        /// Starting angular frequency, rad/s
        #[arg(long)]
        guess_c: Option<f64>,
        /// Starting phase, rad
        #[arg(long)]
        guess_d: Option<f64>,
    },
    /// Stationary excited-state population versus pump rate, with the
    /// saturation fit and derived optical scales
    Saturation {
        /// Run configuration (TOML)
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (w_p_per_s, n_e)
        #[arg(long)]
        output: PathBuf,
        /// Lowest pump rate of the log-spaced scan, 1/s
        #[arg(long)]
        w_min: Option<f64>,
        /// Highest pump rate of the log-spaced scan, 1/s
        #[arg(long)]
        w_max: Option<f64>,
        /// Number of scan points
        #[arg(long)]
        points: Option<usize>,
        /// Gaussian beam waist for the intensity→power conversion, µm
        #[arg(long, default_value_t = 18.0)]
        w0_um: f64,
        /// Laser power (mW) to report a saturation parameter for; repeatable
        #[arg(long = "power-mw")]
        powers_mw: Vec<f64>,
    },
    /// Collapse a contrast stack into a field profile along x
    MapRf {
        /// Input stack file
        #[arg(long)]
        stack: PathBuf,
        /// y pixel index at the centre of the averaging window
        #[arg(long)]
        y_center: usize,
        /// Averaging window height in pixels
        #[arg(long)]
        window: usize,
        /// Output CSV path (x_um, nu_R_Hz, B_R_mT)
        #[arg(long)]
        output: PathBuf,
        /// Wire position in µm; enables the inverse-distance fit
        #[arg(long)]
        c_w_um: Option<f64>,
        /// Lower x bound (µm) of the points used by the wire fit
        #[arg(long)]
        x_min_um: Option<f64>,
        /// Upper x bound (µm) of the points used by the wire fit
        #[arg(long)]
        x_max_um: Option<f64>,
    },
}

fn init_thread_pool() -> Result<(), CliError> {
    match std::env::var("NVSIM_THREADS") {
        Ok(raw) => {
            let count: usize = raw
                .trim()
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    CliError::input(format!(
                        "NVSIM_THREADS = '{raw}' must be a positive integer"
                    ))
                })?;
            // Ignore the error from a pool that is already initialized (it
            // can only happen in-process, e.g. under tests).
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(count)
                .build_global();
            Ok(())
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::input(format!("NVSIM_THREADS: {e}"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SimulatePopulations {
            config,
            output,
            all_cycles,
        } => commands::simulate_populations::run(&config, &output, all_cycles),
        Command::SimulateRabi {
            config,
            output,
            fit,
        } => commands::simulate_rabi::run(&config, &output, fit),
        Command::FitRabi {
            input,
            guess_a,
            guess_b_s,
            guess_c,
            guess_d,
        } => commands::fit_rabi::run(&input, [guess_a, guess_b_s, guess_c, guess_d]),
        Command::Saturation {
            config,
            output,
            w_min,
            w_max,
            points,
            w0_um,
            powers_mw,
        } => {
            let opts = commands::saturation::ScanOptions {
                w_min,
                w_max,
                points,
                w0_um,
                powers_mw,
            };
            commands::saturation::run(&config, &output, &opts)
        }
        Command::MapRf {
            stack,
            y_center,
            window,
            output,
            c_w_um,
            x_min_um,
            x_max_um,
        } => {
            let wire = commands::map_rf::WireOptions {
                c_w_um,
                x_min_um,
                x_max_um,
            };
            commands::map_rf::run(&stack, y_center, window, &output, &wire)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_thread_pool().and_then(|()| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nvsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
