//! Seven-level model of a nitrogen-vacancy center under optical pumping and
//! resonant RF drive.
//!
//! The state tracks the populations of three ground sublevels (`n1`..`n3`,
//! with `n1` the m_s = 0 state), three excited sublevels (`n4`..`n6`), the
//! metastable singlet (`n7`), and the single coherence term `n_c` between the
//! two RF-driven ground sublevels. Optical pumping, radiative decay, and
//! intersystem crossing are incoherent rate processes; the RF drive enters
//! through Bloch-type coupling between `n1`, `n2`, and `n_c`.
//!
//! Everything here is a pure function of its inputs: integration is
//! fixed-step RK4, and the stationary state of the undriven system is solved
//! exactly by linear algebra. Callers may freely evaluate these from
//! concurrent workers.

mod dynamics;
mod error;
mod state;
mod steady;
mod types;

pub use dynamics::{integrate, integrate_with, Derivative};
pub use error::ModelError;
pub use state::{SystemState, Trace};
pub use steady::steady_state;
pub use types::{gamma_c, DriveParams, PhysicalConstants, TransitionRates};

pub use dynamics::derivative;
