//! Fitting and spectral analysis for simulated or measured contrast data.
//!
//! The pieces compose into two pipelines:
//!
//! * **Rabi pipeline** — [`fit_rabi`] extracts amplitude, decay time, angular
//!   frequency, and phase from a contrast-vs-τ curve with a damped-cosine
//!   model; [`fft_rabi_frequency`] gives an independent spectral estimate;
//!   [`b_field_from_rabi`] converts a Rabi frequency into the driving field
//!   amplitude; [`map_field_profile`] applies the spectral estimate across a
//!   spatial contrast stack and [`fit_wire_decay`] fits the resulting field
//!   profile with an inverse-distance law.
//! * **Saturation pipeline** — [`saturation_scan`] tabulates the stationary
//!   excited-state population versus pump rate, [`fit_saturation`] extracts
//!   the saturation pump rate, and [`saturation_intensity`],
//!   [`saturation_power`], and [`saturation_parameter`] chain it to laser
//!   units. [`depletion_time`] and [`polarization_time`] measure the two
//!   pumping timescales by direct simulation.
//!
//! All fits use the same damped Gauss–Newton core with analytic Jacobians
//! and are deterministic: identical inputs produce bit-identical outputs.

mod error;
mod field_map;
mod lsq;
mod rabi;
mod saturation;
mod spectrum;

pub use error::AnalysisError;
pub use field_map::{fit_wire_decay, map_field_profile, ContrastStack, FieldProfile, WireFit};
pub use rabi::{fit_rabi, fit_rabi_points, second_harmonic_residual, RabiFit};
pub use saturation::{
    depletion_time, depletion_time_at, fit_saturation, polarization_time, saturation_intensity,
    saturation_parameter, saturation_power, saturation_scan, SaturationFit,
};
pub use spectrum::{b_field_from_rabi, fft_rabi_frequency};
