use crate::ModelError;

/// Instantaneous state of the seven-level system: populations `n1`..`n7`
/// (indices 0..6) plus the ground-state coherence `n_c`.
///
/// Populations are dimensionless occupation probabilities summing to 1; the
/// coherence is the imaginary part of the rotating-frame off-diagonal density
/// matrix element between the two RF-coupled ground sublevels, bounded by
/// |n_c| ≤ 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    pub populations: [f64; 7],
    pub coherence: f64,
}

impl SystemState {
    /// Room-temperature thermal equilibrium: the three ground sublevels
    /// equally occupied, everything else empty.
    pub fn thermal() -> Self {
        Self {
            populations: [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0],
            coherence: 0.0,
        }
    }

    /// All population in the m_s = 0 ground sublevel.
    pub fn polarized() -> Self {
        let mut populations = [0.0; 7];
        populations[0] = 1.0;
        Self {
            populations,
            coherence: 0.0,
        }
    }

    pub fn new(populations: [f64; 7], coherence: f64) -> Self {
        Self {
            populations,
            coherence,
        }
    }

    /// Excited-state population `n4 + n5 + n6`; the photoluminescence rate is
    /// proportional to this.
    pub fn excited_population(&self) -> f64 {
        self.populations[3] + self.populations[4] + self.populations[5]
    }

    /// Total ground-manifold population `n1 + n2 + n3`.
    pub fn ground_population(&self) -> f64 {
        self.populations[0] + self.populations[1] + self.populations[2]
    }

    /// Fraction of the ground manifold residing in m_s = 0:
    /// `n1 / (n1 + n2 + n3)`. NaN if the ground manifold is empty.
    pub fn ground_polarization(&self) -> f64 {
        self.populations[0] / self.ground_population()
    }

    pub fn population_sum(&self) -> f64 {
        self.populations.iter().sum()
    }

    /// Checks all entries are finite.
    pub fn validate(&self) -> Result<(), ModelError> {
        const NAMES: [&str; 7] = ["n1", "n2", "n3", "n4", "n5", "n6", "n7"];
        for (i, &n) in self.populations.iter().enumerate() {
            if !n.is_finite() {
                return Err(ModelError::InvalidState {
                    name: NAMES[i],
                    value: n,
                });
            }
        }
        if !self.coherence.is_finite() {
            return Err(ModelError::InvalidState {
                name: "n_c",
                value: self.coherence,
            });
        }
        Ok(())
    }

    /// Zeroes tiny negative populations left by roundoff. Intended for phase
    /// boundaries only — clamping mid-integration would mask integrator bugs.
    pub fn clamp_tiny_negatives(&mut self, epsilon: f64) {
        for n in &mut self.populations {
            if *n < 0.0 && *n > -epsilon {
                *n = 0.0;
            }
        }
    }

    /// Rescales populations to sum to exactly 1 (roundoff drift correction).
    pub fn renormalize(&mut self) {
        let sum = self.population_sum();
        if sum > 0.0 && sum.is_finite() {
            for n in &mut self.populations {
                *n /= sum;
            }
        }
    }

    /// Max-norm distance over all eight state entries.
    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        let mut d = (self.coherence - other.coherence).abs();
        for i in 0..7 {
            d = d.max((self.populations[i] - other.populations[i]).abs());
        }
        d
    }
}

/// Time-sampled trajectory produced by the integrator: `times[i]` pairs with
/// `states[i]`, one entry per RK4 grid point including the initial state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub times: Vec<f64>,
    pub states: Vec<SystemState>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, t: f64, state: SystemState) {
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &SystemState)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}
