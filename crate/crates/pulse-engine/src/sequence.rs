use nv_model::DriveParams;

use crate::error::EngineError;

/// One laser → wait → RF measurement cycle.
///
/// Each phase carries its own drive parameters so the dephasing rate can
/// follow the optical environment: during the laser pulse the optically
/// induced rate applies, while in the dark the (much slower) intrinsic rate
/// takes over. Structural rules are enforced by [`PulseSequence::validate`]:
/// the laser phase must not drive the spin, the wait phase must be fully
/// dark, and the RF phase must not pump.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    /// Laser pulse length in seconds. PL is integrated over this phase.
    pub laser_duration: f64,
    /// Dark interval between laser and RF, in seconds.
    pub wait_duration: f64,
    /// RF drive length τ in seconds.
    pub rf_duration: f64,
    /// Drive during the laser phase: pumping on, RF off.
    pub laser_phase: DriveParams,
    /// Drive during the wait: everything off, only relaxation acts.
    pub wait_phase: DriveParams,
    /// Drive during the RF phase: spin drive on, pumping off.
    pub rf_phase: DriveParams,
}

impl PulseSequence {
    /// Standard cycle: laser with pump rate `w_p` and dephasing
    /// `gamma_2_laser`, a dark wait, then an RF pulse with Rabi frequency
    /// `omega_r` and dark dephasing `gamma_2_dark` (which also applies
    /// during the wait).
    pub fn standard(
        laser_duration: f64,
        wait_duration: f64,
        rf_duration: f64,
        w_p: f64,
        omega_r: f64,
        gamma_2_laser: f64,
        gamma_2_dark: f64,
    ) -> Self {
        PulseSequence {
            laser_duration,
            wait_duration,
            rf_duration,
            laser_phase: DriveParams {
                w_p,
                omega_r: 0.0,
                gamma_2: gamma_2_laser,
            },
            wait_phase: DriveParams {
                w_p: 0.0,
                omega_r: 0.0,
                gamma_2: gamma_2_dark,
            },
            rf_phase: DriveParams {
                w_p: 0.0,
                omega_r,
                gamma_2: gamma_2_dark,
            },
        }
    }

    /// Copy of this sequence with a different RF duration. Used by sweeps.
    pub fn with_rf_duration(&self, tau: f64) -> Self {
        let mut seq = self.clone();
        seq.rf_duration = tau;
        seq
    }

    /// Copy of this sequence with the RF drive turned off. This is the
    /// reference branch of a contrast measurement: identical timing,
    /// Ω_R = 0.
    pub fn reference(&self) -> Self {
        let mut seq = self.clone();
        seq.rf_phase.omega_r = 0.0;
        seq
    }

    /// Total wall-clock length of one cycle in seconds.
    pub fn cycle_duration(&self) -> f64 {
        self.laser_duration + self.wait_duration + self.rf_duration
    }

    /// Check durations and the per-phase structural rules.
    pub fn validate(&self) -> Result<(), EngineError> {
        let durations = [
            ("laser_duration", self.laser_duration),
            ("wait_duration", self.wait_duration),
            ("rf_duration", self.rf_duration),
        ];
        for (field, value) in durations {
            if !value.is_finite() || value < 0.0 {
                return Err(EngineError::InvalidSequence { field, value });
            }
        }
        self.laser_phase.validate()?;
        self.wait_phase.validate()?;
        self.rf_phase.validate()?;
        if self.laser_phase.omega_r != 0.0 {
            return Err(EngineError::InvalidSequence {
                field: "laser_phase.omega_r",
                value: self.laser_phase.omega_r,
            });
        }
        if self.wait_phase.w_p != 0.0 {
            return Err(EngineError::InvalidSequence {
                field: "wait_phase.w_p",
                value: self.wait_phase.w_p,
            });
        }
        if self.wait_phase.omega_r != 0.0 {
            return Err(EngineError::InvalidSequence {
                field: "wait_phase.omega_r",
                value: self.wait_phase.omega_r,
            });
        }
        if self.rf_phase.w_p != 0.0 {
            return Err(EngineError::InvalidSequence {
                field: "rf_phase.w_p",
                value: self.rf_phase.w_p,
            });
        }
        Ok(())
    }
}
