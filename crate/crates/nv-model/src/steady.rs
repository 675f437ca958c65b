use crate::{DriveParams, ModelError, SystemState, TransitionRates};

/// Stationary population distribution of the undriven system (`omega_r` must
/// be 0, making the populations a linear rate system).
///
/// Solves the rate matrix null space directly, with the normalization
/// Σnᵢ = 1 replacing the redundant balance row. With no pumping the ground
/// manifold is left at its thermal distribution (excited and metastable
/// levels empty), since nothing selects among ground states.
pub fn steady_state(
    rates: &TransitionRates,
    drive: &DriveParams,
) -> Result<SystemState, ModelError> {
    rates.validate()?;
    drive.validate()?;
    if drive.omega_r != 0.0 {
        return Err(ModelError::DriveInSteadyState {
            omega_r: drive.omega_r,
        });
    }

    let w = drive.w_p;
    let r = rates;
    let all_rates_zero = [
        r.k41, r.k52, r.k63, r.k47, r.k57, r.k67, r.k71, r.k72, r.k73,
    ]
    .iter()
    .all(|&k| k == 0.0);
    if all_rates_zero && w == 0.0 {
        return Err(ModelError::DegenerateRates { pivot: 0.0 });
    }
    if w == 0.0 {
        return Ok(SystemState::thermal());
    }

    // Balance rows for n1..n7; the last is replaced by Σn = 1.
    #[rustfmt::skip]
    let mut m = [
        [-w,  0.0, 0.0, r.k41, 0.0,   0.0,   r.k71],
        [0.0, -w,  0.0, 0.0,   r.k52, 0.0,   r.k72],
        [0.0, 0.0, -w,  0.0,   0.0,   r.k63, r.k73],
        [w,   0.0, 0.0, -(r.k41 + r.k47), 0.0, 0.0, 0.0],
        [0.0, w,   0.0, 0.0, -(r.k52 + r.k57), 0.0, 0.0],
        [0.0, 0.0, w,   0.0, 0.0, -(r.k63 + r.k67), 0.0],
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    ];
    let mut b = [0.0; 7];
    b[6] = 1.0;

    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let populations = solve(&mut m, &mut b, 1e-12 * scale)?;

    let mut state = SystemState::new(populations, 0.0);
    state.clamp_tiny_negatives(1e-9);
    state.renormalize();
    Ok(state)
}

/// Gaussian elimination with partial pivoting on a 7×7 system.
fn solve(m: &mut [[f64; 7]; 7], b: &mut [f64; 7], pivot_floor: f64) -> Result<[f64; 7], ModelError> {
    for col in 0..7 {
        let pivot_row = (col..7)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("non-empty range");
        let pivot = m[pivot_row][col];
        if pivot.abs() <= pivot_floor {
            return Err(ModelError::DegenerateRates { pivot });
        }
        m.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..7 {
            let f = m[row][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            m[row][col] = 0.0;
            for k in (col + 1)..7 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 7];
    for row in (0..7).rev() {
        let mut acc = b[row];
        for k in (row + 1)..7 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}
