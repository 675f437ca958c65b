//! Damped Gauss–Newton (Levenberg–Marquardt style) least squares for the
//! small fixed-size models used in this crate. All models are smooth with
//! cheap analytic derivatives, so no numerical differentiation is needed.

/// Outcome of a least-squares run. `converged` reflects the relative
/// parameter-change criterion; callers decide how to treat a stalled fit.
#[derive(Debug, Clone)]
pub(crate) struct FitOutcome<const P: usize> {
    pub params: [f64; P],
    /// Sum of squared residuals at `params`.
    pub ssr: f64,
    /// √(SSR / n): root-mean-square residual.
    pub residual_rms: f64,
    /// σ²·(JᵀJ)⁻¹ with σ² = SSR/(n−P); zeros when n ≤ P or JᵀJ is singular.
    pub covariance: [[f64; P]; P],
    /// Pearson correlation matrix of the Jacobian columns at the solution.
    /// Near-unity off-diagonal magnitude means the data cannot separate the
    /// corresponding parameters.
    pub jacobian_correlation: [[f64; P]; P],
    pub iterations: usize,
    pub converged: bool,
}

/// Relative parameter change below which iteration stops.
const PARAM_TOL: f64 = 1e-10;
/// RMS residual, relative to the RMS of the data, at which the model
/// explains the data to (accumulated) machine precision. Below this floor
/// the objective surface is rounding noise: relative-change tests on
/// parameters whose true value is zero never look small there, so the fit
/// declares convergence on the residual level itself.
const RESIDUAL_FLOOR: f64 = 1e-14;
/// Relative SSR reduction below which an accepted step counts as converged
/// (the fit is crawling along the floor of the objective).
const SSR_TOL: f64 = 1e-13;
/// When no damping level yields a downhill step, the fit sits where the
/// objective cannot be reduced in f64. That is the minimum — not a failure —
/// exactly when the near-undamped Gauss–Newton proposal is already tiny;
/// this is its relative-size threshold.
const STALL_TOL: f64 = 1e-6;
/// Outer iteration cap.
const MAX_ITERATIONS: usize = 200;
/// Damping bounds. λ outside this range means the step search failed.
const LAMBDA_MIN: f64 = 1e-14;
const LAMBDA_MAX: f64 = 1e14;

/// Solve a small dense symmetric system in place by Gaussian elimination
/// with partial pivoting. Returns `None` on a (numerically) singular pivot.
fn solve<const P: usize>(mut a: [[f64; P]; P], mut b: [f64; P]) -> Option<[f64; P]> {
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let floor = scale * 1e-14;
    for col in 0..P {
        let pivot_row = (col..P)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= floor {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..P {
            let f = a[row][col] / a[col][col];
            for k in col..P {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; P];
    for col in (0..P).rev() {
        let mut acc = b[col];
        for k in col + 1..P {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

/// Invert a small dense matrix; `None` if singular.
fn invert<const P: usize>(a: [[f64; P]; P]) -> Option<[[f64; P]; P]> {
    let mut inv = [[0.0; P]; P];
    for j in 0..P {
        let mut e = [0.0; P];
        e[j] = 1.0;
        let col = solve(a, e)?;
        for i in 0..P {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

/// Build SSR, JᵀJ and Jᵀr for the current parameters. Returns `None` when
/// the model produced a non-finite value somewhere (caller treats the
/// parameter vector as unusable).
#[allow(clippy::type_complexity)]
fn normal_equations<const P: usize>(
    xs: &[f64],
    ys: &[f64],
    params: &[f64; P],
    model: &impl Fn(f64, &[f64; P]) -> (f64, [f64; P]),
) -> Option<(f64, [[f64; P]; P], [f64; P])> {
    let mut ssr = 0.0;
    let mut jtj = [[0.0; P]; P];
    let mut jtr = [0.0; P];
    for (&x, &y) in xs.iter().zip(ys) {
        let (value, grad) = model(x, params);
        let r = y - value;
        if !r.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return None;
        }
        ssr += r * r;
        for i in 0..P {
            jtr[i] += grad[i] * r;
            for j in i..P {
                jtj[i][j] += grad[i] * grad[j];
            }
        }
    }
    for i in 0..P {
        for j in 0..i {
            jtj[i][j] = jtj[j][i];
        }
    }
    Some((ssr, jtj, jtr))
}

fn ssr_only<const P: usize>(
    xs: &[f64],
    ys: &[f64],
    params: &[f64; P],
    model: &impl Fn(f64, &[f64; P]) -> (f64, [f64; P]),
) -> f64 {
    let mut ssr = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - model(x, params).0;
        ssr += r * r;
    }
    ssr
}

/// Minimize Σ (y − f(x; p))² over `p` starting from `p0`.
///
/// `model` returns the value and the gradient ∂f/∂p at one sample point.
/// The damping parameter multiplies the diagonal of JᵀJ (Marquardt
/// scaling), shrinking on accepted steps and growing on rejected ones.
/// Iteration stops when the relative parameter change falls below 1e-10,
/// the residual falls to the machine-precision floor of the data, or 200
/// iterations elapse.
pub(crate) fn fit<const P: usize>(
    xs: &[f64],
    ys: &[f64],
    p0: [f64; P],
    model: impl Fn(f64, &[f64; P]) -> (f64, [f64; P]),
) -> FitOutcome<P> {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut params = p0;
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    // All-zero data keeps the floor at exactly zero.
    let data_scale: f64 = ys.iter().map(|y| y * y).sum();
    let ssr_floor = RESIDUAL_FLOOR * RESIDUAL_FLOOR * data_scale;

    let (mut ssr, mut jtj, mut jtr) = match normal_equations(xs, ys, &params, &model) {
        Some(v) => v,
        None => {
            // The starting point is already outside the model's domain.
            return finish(xs, ys, params, f64::INFINITY, n, 0, false, &model);
        }
    };

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        if ssr <= ssr_floor {
            converged = true;
            break;
        }

        // Marquardt scaling: work in variables normalized by √(JᵀJ)ᵢᵢ.
        // Parameters here differ by many orders of magnitude (seconds vs
        // rad/s), and the raw normal matrix would look numerically singular
        // to the pivoting floor even though it is perfectly solvable once
        // equilibrated. The scaled matrix has a unit diagonal, so damping
        // is a plain +λ.
        let mut scale = [0.0; P];
        for i in 0..P {
            let d = jtj[i][i].sqrt();
            // A parameter with zero gradient everywhere keeps scale 1; its
            // scaled row is then all zero except the damping diagonal, which
            // pins its step to zero instead of poisoning the solve.
            scale[i] = if d > 0.0 { d } else { 1.0 };
        }
        let mut scaled = [[0.0; P]; P];
        let mut grad = [0.0; P];
        for i in 0..P {
            grad[i] = jtr[i] / scale[i];
            for j in 0..P {
                scaled[i][j] = jtj[i][j] / (scale[i] * scale[j]);
            }
        }

        // Try steps with increasing damping until one reduces the SSR.
        let mut stepped = false;
        while lambda <= LAMBDA_MAX {
            let mut damped = scaled;
            for i in 0..P {
                damped[i][i] += lambda;
            }
            let Some(mut delta) = solve(damped, grad) else {
                lambda *= 10.0;
                continue;
            };
            for i in 0..P {
                delta[i] /= scale[i];
            }
            let mut trial = params;
            for i in 0..P {
                trial[i] += delta[i];
            }
            let trial_ssr = ssr_only(xs, ys, &trial, &model);
            if trial_ssr.is_finite() && trial_ssr < ssr {
                let rel_change = (0..P).fold(0.0_f64, |acc, i| {
                    acc.max(delta[i].abs() / params[i].abs().max(1e-30))
                });
                if rel_change < PARAM_TOL || ssr - trial_ssr < SSR_TOL * ssr {
                    converged = true;
                }
                params = trial;
                lambda = (lambda * 0.3).max(LAMBDA_MIN);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if !stepped {
            // No damping level went downhill: f64 cannot express a lower
            // SSR from here. Distinguish "parked at the minimum" from
            // "wedged somewhere bad" by the size of the nearly undamped
            // Gauss–Newton proposal — at a minimum the gradient, and with
            // it that proposal, is negligible.
            let mut probe = scaled;
            for i in 0..P {
                probe[i][i] += 1e-9;
            }
            if let Some(delta) = solve(probe, grad) {
                let rel = (0..P).fold(0.0_f64, |acc, i| {
                    acc.max((delta[i] / scale[i]).abs() / params[i].abs().max(1e-30))
                });
                converged = rel < STALL_TOL;
            }
            break;
        }
        match normal_equations(xs, ys, &params, &model) {
            Some(v) => (ssr, jtj, jtr) = v,
            None => break,
        }
        if converged {
            break;
        }
    }

    finish(xs, ys, params, ssr, n, iterations, converged, &model)
}

#[allow(clippy::too_many_arguments)]
fn finish<const P: usize>(
    xs: &[f64],
    ys: &[f64],
    params: [f64; P],
    ssr: f64,
    n: usize,
    iterations: usize,
    converged: bool,
    model: &impl Fn(f64, &[f64; P]) -> (f64, [f64; P]),
) -> FitOutcome<P> {
    let mut covariance = [[0.0; P]; P];
    let mut jacobian_correlation = [[0.0; P]; P];
    if let Some((_, jtj, _)) = normal_equations(xs, ys, &params, model) {
        if n > P {
            // Invert in the same equilibrated variables the solver uses and
            // unscale afterwards: (JᵀJ)⁻¹ = D⁻¹·(D⁻¹JᵀJD⁻¹)⁻¹·D⁻¹.
            let mut scale = [0.0; P];
            for i in 0..P {
                let d = jtj[i][i].sqrt();
                scale[i] = if d > 0.0 { d } else { 1.0 };
            }
            let mut scaled = [[0.0; P]; P];
            for i in 0..P {
                for j in 0..P {
                    scaled[i][j] = jtj[i][j] / (scale[i] * scale[j]);
                }
            }
            let sigma2 = ssr / (n - P) as f64;
            if let Some(inv) = invert(scaled) {
                for i in 0..P {
                    for j in 0..P {
                        covariance[i][j] = sigma2 * inv[i][j] / (scale[i] * scale[j]);
                    }
                }
            }
        }
        for i in 0..P {
            for j in 0..P {
                let d = (jtj[i][i] * jtj[j][j]).sqrt();
                jacobian_correlation[i][j] = if d > 0.0 { jtj[i][j] / d } else { 0.0 };
            }
        }
    }
    let residual_rms = if n > 0 { (ssr / n as f64).sqrt() } else { 0.0 };
    FitOutcome {
        params,
        ssr,
        residual_rms,
        covariance,
        jacobian_correlation,
        iterations,
        converged,
    }
}

/// Run [`fit`] from several starting points and keep the best result.
///
/// Converged outcomes always beat stalled ones; among equals the lower SSR
/// wins, and ties keep the earliest start, so the result is deterministic.
pub(crate) fn fit_multi_start<const P: usize>(
    xs: &[f64],
    ys: &[f64],
    starts: &[[f64; P]],
    model: impl Fn(f64, &[f64; P]) -> (f64, [f64; P]) + Copy,
) -> FitOutcome<P> {
    let mut best: Option<FitOutcome<P>> = None;
    for &p0 in starts {
        let outcome = fit(xs, ys, p0, model);
        let better = match &best {
            None => true,
            Some(b) => match (outcome.converged, b.converged) {
                (true, false) => true,
                (false, true) => false,
                _ => outcome.ssr < b.ssr,
            },
        };
        if better {
            best = Some(outcome);
        }
    }
    best.expect("at least one starting point")
}
