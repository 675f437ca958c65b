//! Pulse scheduling and camera-gated detection on top of the seven-level
//! model.
//!
//! A measurement cycle is laser → wait → RF. The laser phase pumps and reads
//! out simultaneously (the camera integrates photoluminescence over the whole
//! laser pulse); the wait lets the metastable singlet drain back to the
//! ground manifold; the RF phase drives the m_s = 0 ↔ −1 transition for a
//! duration τ. Cycles are iterated from thermal equilibrium until the state
//! returned at the end of a cycle stops changing, emulating the many cycles
//! accumulated during one camera exposure. Contrast compares the converged
//! integrated PL against the identical sequence with the RF drive off.

mod cycle;
mod error;
mod sequence;
mod sweep;

pub use cycle::{
    contrast_at_tau, iterate_to_steady_cycle, run_cycle, run_cycle_traced, CycleResult,
    SteadyCycle, TraceMode,
};
pub use error::EngineError;
pub use sequence::PulseSequence;
pub use sweep::{simulate_rabi_sweep, RabiCurve, SweepMetadata};
