//! Run configuration: a TOML file with optional sections whose defaults
//! reproduce the standard measurement cycle (10 µs laser, 400 ns wait, π RF
//! pulse, a tenth of optical saturation).
//!
//! The drive strength may be given either as a pump rate `drive.w_p` (s⁻¹)
//! or as a saturation parameter `drive.s` (converted via W_p = s·W_p^Sat),
//! never both. The laser-phase decoherence rate defaults to the optically
//! induced value Γ_c(s) = Γ_c^∞·s/(s+1); the wait and RF phases default to
//! the intrinsic dark rate.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nv_model::{PhysicalConstants, TransitionRates};
use pulse_engine::PulseSequence;
use serde::Deserialize;

use crate::error::CliError;

/// Fully resolved configuration: every field concrete, drive expressed as a
/// pump rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub rates: TransitionRates,
    pub constants: PhysicalConstants,
    /// Laser (pump + readout) phase duration, s.
    pub laser_s: f64,
    /// Dark wait between laser-off and RF-on, s.
    pub wait_s: f64,
    /// RF phase duration used by single-cycle runs, s.
    pub rf_s: f64,
    /// Optical pump rate during the laser phase, s⁻¹.
    pub w_p: f64,
    /// RF Rabi angular frequency, rad·s⁻¹.
    pub omega_r: f64,
    /// Ground-coherence decay rate during the laser phase, s⁻¹.
    pub gamma_2_laser: f64,
    /// Ground-coherence decay rate during wait and RF phases, s⁻¹.
    pub gamma_2_dark: f64,
    /// RF-duration grid for contrast sweeps, s.
    pub tau_start_s: f64,
    pub tau_stop_s: f64,
    pub tau_step_s: f64,
    /// Integrator step, s.
    pub dt_s: f64,
    /// Steady-cycle convergence tolerance (max-norm between cycle-final
    /// states).
    pub tol: f64,
    /// Cycle cap for steady-cycle iteration.
    pub max_cycles: usize,
    /// Seed reserved for synthetic-noise generation in future commands;
    /// carried so runs stay reproducible if noise injection is enabled.
    pub seed: u64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    rates: Option<RatesSection>,
    constants: Option<ConstantsSection>,
    sequence: Option<SequenceSection>,
    drive: Option<DriveSection>,
    tau_grid: Option<TauGridSection>,
    integration: Option<IntegrationSection>,
    rng: Option<RngSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatesSection {
    k41: Option<f64>,
    k52: Option<f64>,
    k63: Option<f64>,
    k47: Option<f64>,
    k57: Option<f64>,
    k67: Option<f64>,
    k71: Option<f64>,
    k72: Option<f64>,
    k73: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsSection {
    gamma_c_inf: Option<f64>,
    gamma_gyro: Option<f64>,
    sigma: Option<f64>,
    lambda: Option<f64>,
    planck_h: Option<f64>,
    light_c: Option<f64>,
    w_p_sat: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceSection {
    laser_s: Option<f64>,
    wait_s: Option<f64>,
    rf_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DriveSection {
    w_p: Option<f64>,
    s: Option<f64>,
    omega_r: Option<f64>,
    gamma_2_laser: Option<f64>,
    gamma_2_dark: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TauGridSection {
    start_s: Option<f64>,
    stop_s: Option<f64>,
    step_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegrationSection {
    dt_s: Option<f64>,
    tol: Option<f64>,
    max_cycles: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RngSection {
    seed: Option<u64>,
}

fn require_non_negative(key: &str, value: f64) -> Result<(), CliError> {
    if !value.is_finite() || value < 0.0 {
        return Err(CliError::input(format!(
            "{key} = {value} must be finite and non-negative"
        )));
    }
    Ok(())
}

fn require_positive(key: &str, value: f64) -> Result<(), CliError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(CliError::input(format!(
            "{key} = {value} must be finite and positive"
        )));
    }
    Ok(())
}

impl RunConfig {
    /// Parse and resolve a configuration file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::input(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    /// Parse and resolve a configuration from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text)
            .map_err(|e| CliError::input(format!("config parse error: {e}")))?;
        Self::resolve(raw)
    }

    fn resolve(raw: RawConfig) -> Result<Self, CliError> {
        let base_rates = TransitionRates::default();
        let r = raw.rates.unwrap_or_default();
        let rates = TransitionRates {
            k41: r.k41.unwrap_or(base_rates.k41),
            k52: r.k52.unwrap_or(base_rates.k52),
            k63: r.k63.unwrap_or(base_rates.k63),
            k47: r.k47.unwrap_or(base_rates.k47),
            k57: r.k57.unwrap_or(base_rates.k57),
            k67: r.k67.unwrap_or(base_rates.k67),
            k71: r.k71.unwrap_or(base_rates.k71),
            k72: r.k72.unwrap_or(base_rates.k72),
            k73: r.k73.unwrap_or(base_rates.k73),
        };
        rates.validate()?;

        let base_constants = PhysicalConstants::default();
        let c = raw.constants.unwrap_or_default();
        let constants = PhysicalConstants {
            gamma_c_inf: c.gamma_c_inf.unwrap_or(base_constants.gamma_c_inf),
            gamma_gyro: c.gamma_gyro.unwrap_or(base_constants.gamma_gyro),
            sigma: c.sigma.unwrap_or(base_constants.sigma),
            lambda: c.lambda.unwrap_or(base_constants.lambda),
            planck_h: c.planck_h.unwrap_or(base_constants.planck_h),
            light_c: c.light_c.unwrap_or(base_constants.light_c),
            w_p_sat: c.w_p_sat.unwrap_or(base_constants.w_p_sat),
        };
        for (key, value) in [
            ("constants.gamma_c_inf", constants.gamma_c_inf),
            ("constants.gamma_gyro", constants.gamma_gyro),
            ("constants.sigma", constants.sigma),
            ("constants.lambda", constants.lambda),
            ("constants.planck_h", constants.planck_h),
            ("constants.light_c", constants.light_c),
            ("constants.w_p_sat", constants.w_p_sat),
        ] {
            require_positive(key, value)?;
        }

        let d = raw.drive.unwrap_or_default();
        let w_p = match (d.w_p, d.s) {
            (Some(_), Some(_)) => {
                return Err(CliError::input(
                    "drive.w_p and drive.s are mutually exclusive; set exactly one"
                        .to_string(),
                ))
            }
            (Some(w), None) => {
                require_non_negative("drive.w_p", w)?;
                w
            }
            (None, Some(s)) => {
                require_non_negative("drive.s", s)?;
                constants.pump_rate(s)
            }
            (None, None) => 1.9e6,
        };
        let s_param = w_p / constants.w_p_sat;
        let omega_r = d.omega_r.unwrap_or(1.5e7);
        require_non_negative("drive.omega_r", omega_r)?;
        let gamma_2_laser = d.gamma_2_laser.unwrap_or_else(|| constants.gamma_c(s_param));
        require_non_negative("drive.gamma_2_laser", gamma_2_laser)?;
        let gamma_2_dark = d.gamma_2_dark.unwrap_or(5.0e5);
        require_non_negative("drive.gamma_2_dark", gamma_2_dark)?;

        let q = raw.sequence.unwrap_or_default();
        let laser_s = q.laser_s.unwrap_or(10.0e-6);
        let wait_s = q.wait_s.unwrap_or(400.0e-9);
        // Default single-cycle RF duration: a π pulse at the configured
        // drive (no RF drive → no RF phase).
        let rf_s = q
            .rf_s
            .unwrap_or(if omega_r > 0.0 { PI / omega_r } else { 0.0 });
        require_non_negative("sequence.laser_s", laser_s)?;
        require_non_negative("sequence.wait_s", wait_s)?;
        require_non_negative("sequence.rf_s", rf_s)?;

        let g = raw.tau_grid.unwrap_or_default();
        let tau_start_s = g.start_s.unwrap_or(0.05e-6);
        let tau_stop_s = g.stop_s.unwrap_or(4.0e-6);
        let tau_step_s = g.step_s.unwrap_or(0.02e-6);
        require_non_negative("tau_grid.start_s", tau_start_s)?;
        require_positive("tau_grid.step_s", tau_step_s)?;
        if !tau_stop_s.is_finite() || tau_stop_s <= tau_start_s {
            return Err(CliError::input(format!(
                "tau_grid.stop_s = {tau_stop_s} must exceed tau_grid.start_s = {tau_start_s}"
            )));
        }

        let i = raw.integration.unwrap_or_default();
        let dt_s = i.dt_s.unwrap_or(1.0e-9);
        let tol = i.tol.unwrap_or(1.0e-8);
        let max_cycles = i.max_cycles.unwrap_or(1000);
        require_positive("integration.dt_s", dt_s)?;
        require_positive("integration.tol", tol)?;
        if max_cycles == 0 {
            return Err(CliError::input(
                "integration.max_cycles must be at least 1".to_string(),
            ));
        }

        let seed = raw.rng.unwrap_or_default().seed.unwrap_or(0);

        Ok(RunConfig {
            rates,
            constants,
            laser_s,
            wait_s,
            rf_s,
            w_p,
            omega_r,
            gamma_2_laser,
            gamma_2_dark,
            tau_start_s,
            tau_stop_s,
            tau_step_s,
            dt_s,
            tol,
            max_cycles,
            seed,
        })
    }

    /// Saturation parameter implied by the resolved pump rate.
    pub fn s(&self) -> f64 {
        self.w_p / self.constants.w_p_sat
    }

    /// The laser → wait → RF measurement cycle described by this config.
    pub fn sequence(&self) -> PulseSequence {
        PulseSequence::standard(
            self.laser_s,
            self.wait_s,
            self.rf_s,
            self.w_p,
            self.omega_r,
            self.gamma_2_laser,
            self.gamma_2_dark,
        )
    }

    /// The RF-duration grid: start, start+step, … up to stop (inclusive
    /// within a relative rounding slack of the span).
    pub fn tau_values(&self) -> Vec<f64> {
        let span = self.tau_stop_s - self.tau_start_s;
        let last = (span / self.tau_step_s + 1e-9).floor() as usize;
        (0..=last)
            .map(|k| self.tau_start_s + k as f64 * self.tau_step_s)
            .collect()
    }

    /// Serialize the fully resolved configuration. Parsing the result
    /// reproduces this config exactly (floats are written with
    /// shortest-round-trip precision), which is what makes run artifacts
    /// self-reproducing.
    pub fn to_effective_toml(&self) -> String {
        let mut out = String::with_capacity(1024);
        out.push_str("# Effective configuration (all defaults resolved).\n");
        out.push_str("# Re-running with this file reproduces the run byte for byte.\n\n");
        let _ = write!(
            out,
            "[rates]\nk41 = {:e}\nk52 = {:e}\nk63 = {:e}\nk47 = {:e}\nk57 = {:e}\nk67 = {:e}\nk71 = {:e}\nk72 = {:e}\nk73 = {:e}\n\n",
            self.rates.k41,
            self.rates.k52,
            self.rates.k63,
            self.rates.k47,
            self.rates.k57,
            self.rates.k67,
            self.rates.k71,
            self.rates.k72,
            self.rates.k73,
        );
        let _ = write!(
            out,
            "[constants]\ngamma_c_inf = {:e}\ngamma_gyro = {:e}\nsigma = {:e}\nlambda = {:e}\nplanck_h = {:e}\nlight_c = {:e}\nw_p_sat = {:e}\n\n",
            self.constants.gamma_c_inf,
            self.constants.gamma_gyro,
            self.constants.sigma,
            self.constants.lambda,
            self.constants.planck_h,
            self.constants.light_c,
            self.constants.w_p_sat,
        );
        let _ = write!(
            out,
            "[sequence]\nlaser_s = {:e}\nwait_s = {:e}\nrf_s = {:e}\n\n",
            self.laser_s, self.wait_s, self.rf_s,
        );
        let _ = write!(
            out,
            "[drive]\nw_p = {:e}\nomega_r = {:e}\ngamma_2_laser = {:e}\ngamma_2_dark = {:e}\n\n",
            self.w_p, self.omega_r, self.gamma_2_laser, self.gamma_2_dark,
        );
        let _ = write!(
            out,
            "[tau_grid]\nstart_s = {:e}\nstop_s = {:e}\nstep_s = {:e}\n\n",
            self.tau_start_s, self.tau_stop_s, self.tau_step_s,
        );
        let _ = write!(
            out,
            "[integration]\ndt_s = {:e}\ntol = {:e}\nmax_cycles = {}\n\n",
            self.dt_s, self.tol, self.max_cycles,
        );
        let _ = write!(out, "[rng]\nseed = {}\n", self.seed);
        out
    }

    /// Write the effective config next to `output` as
    /// `<output stem>.effective.toml`, returning the path written.
    pub fn write_effective_beside(&self, output: &Path) -> Result<PathBuf, CliError> {
        let path = output.with_extension("effective.toml");
        std::fs::write(&path, self.to_effective_toml()).map_err(|e| {
            CliError::input(format!("cannot write {}: {e}", path.display()))
        })?;
        Ok(path)
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::resolve(RawConfig::default()).expect("built-in defaults are valid")
    }
}
