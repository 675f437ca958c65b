use crate::{DriveParams, ModelError, SystemState, Trace, TransitionRates};

/// Time derivative of a [`SystemState`], in the same layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub populations: [f64; 7],
    pub coherence: f64,
}

/// Evaluates the coupled rate/Bloch equations at `state`.
///
/// `dn7` is reported as the negative sum of `dn1..dn6`, so the seven
/// population derivatives add to exactly zero and total population is
/// conserved by construction.
pub fn derivative(
    state: &SystemState,
    rates: &TransitionRates,
    drive: &DriveParams,
) -> Result<Derivative, ModelError> {
    rates.validate()?;
    drive.validate()?;
    state.validate()?;
    let [n1, n2, n3, n4, n5, n6, n7] = state.populations;
    let (d, dc) = eval(n1, n2, n3, n4, n5, n6, n7, state.coherence, rates, drive);
    Ok(Derivative {
        populations: d,
        coherence: dc,
    })
}

/// Right-hand side shared by the public derivative and the integrator.
#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn eval(
    n1: f64,
    n2: f64,
    n3: f64,
    n4: f64,
    n5: f64,
    n6: f64,
    n7: f64,
    nc: f64,
    r: &TransitionRates,
    drive: &DriveParams,
) -> ([f64; 7], f64) {
    let w = drive.w_p;
    let om = drive.omega_r;
    let d1 = -n1 * w + n4 * r.k41 + n7 * r.k71 + om * nc;
    let d2 = -n2 * w + n5 * r.k52 + n7 * r.k72 - om * nc;
    let d3 = -n3 * w + n6 * r.k63 + n7 * r.k73;
    let d4 = n1 * w - n4 * (r.k41 + r.k47);
    let d5 = n2 * w - n5 * (r.k52 + r.k57);
    let d6 = n3 * w - n6 * (r.k63 + r.k67);
    let d7 = -(((((d1 + d2) + d3) + d4) + d5) + d6);
    let dc = -drive.gamma_2 * nc + 0.5 * om * (n2 - n1);
    ([d1, d2, d3, d4, d5, d6, d7], dc)
}

/// Seven-component working vector: `n1..n6` plus the coherence. `n7` is
/// closed algebraically as `1 − (n1+…+n6)` at every evaluation point, which
/// keeps total population pinned to 1 throughout the integration.
type Working = [f64; 7];

#[inline(always)]
fn rhs(y: &Working, rates: &TransitionRates, drive: &DriveParams) -> Working {
    let n7 = 1.0 - (((((y[0] + y[1]) + y[2]) + y[3]) + y[4]) + y[5]);
    let (d, dc) = eval(y[0], y[1], y[2], y[3], y[4], y[5], n7, y[6], rates, drive);
    [d[0], d[1], d[2], d[3], d[4], d[5], dc]
}

/// Advances `state` by `duration` with fixed-step RK4, invoking `observer`
/// with `(t, state)` at t = 0 and after every step. The step count is
/// `round(duration / dt)` (at least 1) so the integration always lands
/// exactly on `duration`; the final state is renormalized before the last
/// observation.
///
/// A zero `duration` returns the state unchanged without observing anything.
pub fn integrate_with(
    state: SystemState,
    rates: &TransitionRates,
    drive: &DriveParams,
    duration: f64,
    dt: f64,
    mut observer: impl FnMut(f64, &SystemState),
) -> Result<SystemState, ModelError> {
    rates.validate()?;
    drive.validate()?;
    state.validate()?;
    if duration == 0.0 {
        return Ok(state);
    }
    if !(dt > 0.0) || !duration.is_finite() || duration < 0.0 || dt > duration {
        return Err(ModelError::InvalidStep { dt, duration });
    }

    let steps = ((duration / dt).round() as usize).max(1);
    let h = duration / steps as f64;

    let mut current = state;
    let mut y: Working = [
        current.populations[0],
        current.populations[1],
        current.populations[2],
        current.populations[3],
        current.populations[4],
        current.populations[5],
        current.coherence,
    ];
    observer(0.0, &current);

    for step in 1..=steps {
        let k1 = rhs(&y, rates, drive);
        let y2 = add_scaled(&y, &k1, 0.5 * h);
        let k2 = rhs(&y2, rates, drive);
        let y3 = add_scaled(&y, &k2, 0.5 * h);
        let k3 = rhs(&y3, rates, drive);
        let y4 = add_scaled(&y, &k3, h);
        let k4 = rhs(&y4, rates, drive);
        let w = h / 6.0;
        for i in 0..7 {
            y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let sum6 = ((((y[0] + y[1]) + y[2]) + y[3]) + y[4]) + y[5];
        if !sum6.is_finite() || !y[6].is_finite() {
            return Err(ModelError::NonFiniteState { step });
        }
        current.populations = [y[0], y[1], y[2], y[3], y[4], y[5], 1.0 - sum6];
        current.coherence = y[6];

        let t = if step == steps {
            current.renormalize();
            duration
        } else {
            step as f64 * h
        };
        observer(t, &current);
    }
    Ok(current)
}

#[inline(always)]
fn add_scaled(y: &Working, k: &Working, f: f64) -> Working {
    let mut out = *y;
    for i in 0..7 {
        out[i] += f * k[i];
    }
    out
}

/// [`integrate_with`], collecting the sampled trajectory into a [`Trace`].
pub fn integrate(
    state: SystemState,
    rates: &TransitionRates,
    drive: &DriveParams,
    duration: f64,
    dt: f64,
) -> Result<(SystemState, Trace), ModelError> {
    let mut trace = Trace::default();
    if duration > 0.0 && dt > 0.0 {
        trace = Trace::with_capacity((duration / dt).round() as usize + 1);
    }
    let final_state = integrate_with(state, rates, drive, duration, dt, |t, s| {
        trace.push(t, *s);
    })?;
    Ok((final_state, trace))
}
