//! Integration tests for the coupled rate/Bloch dynamics: hand-checked
//! derivative balances, closed-form oracles for limiting cases, and the
//! fixed-step integrator's contract.

use approx::{assert_abs_diff_eq, assert_relative_eq};
use nv_model::{
    derivative, integrate, integrate_with, DriveParams, ModelError, SystemState, TransitionRates,
};

fn dark() -> DriveParams {
    DriveParams {
        w_p: 0.0,
        omega_r: 0.0,
        gamma_2: 0.0,
    }
}

fn laser(w_p: f64, gamma_2: f64) -> DriveParams {
    DriveParams {
        w_p,
        omega_r: 0.0,
        gamma_2,
    }
}

fn rf(omega_r: f64, gamma_2: f64) -> DriveParams {
    DriveParams {
        w_p: 0.0,
        omega_r,
        gamma_2,
    }
}

#[test]
fn derivative_balances_pumping_by_hand() {
    // Ground manifold only, laser on: every ground level drains at W_p into
    // its excited partner, nothing comes back yet.
    let rates = TransitionRates::default();
    let state = SystemState::new([0.5, 0.3, 0.2, 0.0, 0.0, 0.0, 0.0], 0.0);
    let d = derivative(&state, &rates, &laser(3.0e6, 0.0)).unwrap();

    assert_relative_eq!(d.populations[0], -1.5e6, max_relative = 1e-12);
    assert_relative_eq!(d.populations[1], -0.9e6, max_relative = 1e-12);
    assert_relative_eq!(d.populations[2], -0.6e6, max_relative = 1e-12);
    assert_relative_eq!(d.populations[3], 1.5e6, max_relative = 1e-12);
    assert_relative_eq!(d.populations[4], 0.9e6, max_relative = 1e-12);
    assert_relative_eq!(d.populations[5], 0.6e6, max_relative = 1e-12);
    assert_abs_diff_eq!(d.populations[6], 0.0, epsilon = 1e-9);
    assert_eq!(d.coherence, 0.0);
}

#[test]
fn derivative_couples_spin_drive_by_hand() {
    // Pure spin drive, no optical rates: the coherence shuttles population
    // between the two lowest levels and dephases at gamma_2.
    let rates = TransitionRates {
        k41: 0.0,
        k52: 0.0,
        k63: 0.0,
        k47: 0.0,
        k57: 0.0,
        k67: 0.0,
        k71: 0.0,
        k72: 0.0,
        k73: 0.0,
    };
    let state = SystemState::new([0.6, 0.4, 0.0, 0.0, 0.0, 0.0, 0.0], 0.1);
    let d = derivative(&state, &rates, &rf(2.0e6, 5.0e5)).unwrap();

    assert_relative_eq!(d.populations[0], 2.0e5, max_relative = 1e-12);
    assert_relative_eq!(d.populations[1], -2.0e5, max_relative = 1e-12);
    for i in 2..6 {
        assert_eq!(d.populations[i], 0.0, "level {}", i + 1);
    }
    // -gamma_2 * n_c + (omega_r / 2) * (n2 - n1)
    assert_relative_eq!(d.coherence, -2.5e5, max_relative = 1e-12);
}

#[test]
fn derivative_metastable_returns_by_hand() {
    // Everything parked in the metastable level: it drains into the ground
    // manifold through the three return rates and nothing else moves.
    let rates = TransitionRates::default();
    let state = SystemState::new([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 0.0);
    let d = derivative(&state, &rates, &dark()).unwrap();

    assert_relative_eq!(d.populations[0], rates.k71, max_relative = 1e-12);
    assert_relative_eq!(d.populations[1], rates.k72, max_relative = 1e-12);
    assert_relative_eq!(d.populations[2], rates.k73, max_relative = 1e-12);
    assert_relative_eq!(
        d.populations[6],
        -rates.metastable_decay_total(),
        max_relative = 1e-12
    );
    assert_eq!(d.coherence, 0.0);
}

#[test]
fn population_derivatives_sum_to_exactly_zero() {
    // The seventh derivative is constructed as the negative left-fold of the
    // first six, so the left-fold over all seven is zero in exact bits, not
    // merely small.
    let rates = TransitionRates::default();
    let state = SystemState::new([0.11, 0.13, 0.17, 0.19, 0.23, 0.07, 0.1], -0.01);
    let drive = DriveParams {
        w_p: 1.7e6,
        omega_r: 1.1e7,
        gamma_2: 5.0e5,
    };
    let d = derivative(&state, &rates, &drive).unwrap();
    let total: f64 = d.populations.iter().sum();
    assert_eq!(total, 0.0);
}

#[test]
fn two_level_rabi_matches_closed_form() {
    // With every optical rate off and no dephasing, levels 1 and 2 plus the
    // coherence reduce to an exactly solvable two-level problem:
    //   n1 = (1 + cos Ωt)/2, n2 = (1 − cos Ωt)/2, n_c = −sin(Ωt)/2.
    let rates = TransitionRates {
        k41: 0.0,
        k52: 0.0,
        k63: 0.0,
        k47: 0.0,
        k57: 0.0,
        k67: 0.0,
        k71: 0.0,
        k72: 0.0,
        k73: 0.0,
    };
    let omega = 1.5e7;
    let mut worst = 0.0_f64;
    integrate_with(
        SystemState::polarized(),
        &rates,
        &rf(omega, 0.0),
        1.0e-6,
        1.0e-9,
        |t, s| {
            let (sin, cos) = (omega * t).sin_cos();
            worst = worst
                .max((s.populations[0] - 0.5 * (1.0 + cos)).abs())
                .max((s.populations[1] - 0.5 * (1.0 - cos)).abs())
                .max((s.coherence + 0.5 * sin).abs());
        },
    )
    .unwrap();
    assert!(worst < 1e-6, "two-level deviation {worst:e}");
}

#[test]
fn metastable_decay_is_a_pure_exponential() {
    // Starting entirely in the metastable level in the dark, its population
    // is exp(-t * (k71 + k72 + k73)) and each ground level accumulates its
    // branching fraction of what has left.
    let rates = TransitionRates::default();
    let k7 = rates.metastable_decay_total();
    assert_relative_eq!(k7, 2852238.805970149, max_relative = 1e-12);

    let start = SystemState::new([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 0.0);
    let mut worst = 0.0_f64;
    let end = integrate_with(start, &rates, &dark(), 1.0e-6, 1.0e-9, |t, s| {
        let expected = (-k7 * t).exp();
        worst = worst.max((s.populations[6] - expected).abs());
    })
    .unwrap();
    assert!(worst < 1e-9, "metastable decay deviation {worst:e}");

    let drained = 1.0 - (-k7 * 1.0e-6).exp();
    assert_abs_diff_eq!(
        end.populations[0],
        rates.k71 / k7 * drained,
        epsilon = 1e-9
    );
    assert_abs_diff_eq!(
        end.populations[1],
        rates.k72 / k7 * drained,
        epsilon = 1e-9
    );
    assert_abs_diff_eq!(
        end.populations[2],
        rates.k73 / k7 * drained,
        epsilon = 1e-9
    );
    assert_eq!(end.coherence, 0.0);
}

#[test]
fn zero_duration_returns_state_unchanged_without_observing() {
    let rates = TransitionRates::default();
    let state = SystemState::new([0.2, 0.2, 0.2, 0.1, 0.1, 0.1, 0.1], 0.05);
    let mut calls = 0usize;
    let out = integrate_with(state, &rates, &laser(1.9e6, 0.0), 0.0, 1.0e-9, |_, _| {
        calls += 1;
    })
    .unwrap();
    assert_eq!(out, state);
    assert_eq!(calls, 0);

    let (end, trace) = integrate(state, &rates, &dark(), 0.0, 1.0e-9).unwrap();
    assert_eq!(end, state);
    assert!(trace.is_empty());
}

#[test]
fn invalid_steps_are_rejected() {
    let rates = TransitionRates::default();
    let state = SystemState::thermal();
    let cases = [
        (0.0, 1.0e-6),     // dt = 0
        (-1.0e-9, 1.0e-6), // dt < 0
        (f64::NAN, 1.0e-6),
        (2.0e-9, 1.0e-9),  // dt > duration
        (1.0e-9, -1.0e-6), // negative duration
        (1.0e-9, f64::INFINITY),
    ];
    for (dt, duration) in cases {
        let err = integrate_with(state, &rates, &dark(), duration, dt, |_, _| {}).unwrap_err();
        assert!(
            matches!(err, ModelError::InvalidStep { .. }),
            "dt={dt} duration={duration} gave {err:?}"
        );
    }
}

#[test]
fn runaway_drive_reports_non_finite_state() {
    // A pump rate far beyond 1/dt overflows the RK4 stages; the integrator
    // must say where it died instead of returning garbage.
    let rates = TransitionRates::default();
    let err = integrate_with(
        SystemState::thermal(),
        &rates,
        &laser(1.0e300, 0.0),
        1.0e-8,
        1.0e-9,
        |_, _| {},
    )
    .unwrap_err();
    assert!(matches!(err, ModelError::NonFiniteState { .. }), "{err:?}");
}

#[test]
fn trace_covers_every_step_and_lands_on_duration() {
    let rates = TransitionRates::default();
    let (_, trace) = integrate(
        SystemState::thermal(),
        &rates,
        &laser(1.9e6, 0.0),
        10.0e-9,
        1.0e-9,
    )
    .unwrap();
    assert_eq!(trace.len(), 11);
    let times: Vec<f64> = trace.iter().map(|(t, _)| t).collect();
    assert_eq!(times[0], 0.0);
    assert_eq!(*times.last().unwrap(), 10.0e-9);
    for w in times.windows(2) {
        assert!(w[1] > w[0]);
    }
}

#[test]
fn population_sum_stays_normalized_over_long_integration() {
    // n7 is closed algebraically against the other six, so the sum cannot
    // drift beyond rounding noise even over ten thousand steps.
    let rates = TransitionRates::default();
    let mut worst = 0.0_f64;
    let end = integrate_with(
        SystemState::thermal(),
        &rates,
        &laser(1.9e6, 0.0),
        10.0e-6,
        1.0e-9,
        |_, s| {
            worst = worst.max((s.population_sum() - 1.0).abs());
        },
    )
    .unwrap();
    assert!(worst < 1e-9, "population sum drifted by {worst:e}");
    assert_abs_diff_eq!(end.population_sum(), 1.0, epsilon = 1e-12);
}

#[test]
fn halving_the_step_changes_a_full_cycle_by_less_than_1e8() {
    // Representative measurement cycle (laser, dark wait, π spin drive),
    // integrated at 1 ns and again at 0.5 ns. Fourth-order convergence means
    // the 1 ns answer is already far inside the acceptance band.
    let rates = TransitionRates::default();
    let omega = 1.5e7;
    let phases = [
        (laser(1.9e6, 7272727.2727272725), 1.0e-6),
        (dark_with_dephasing(), 400.0e-9),
        (rf(omega, 5.0e5), std::f64::consts::PI / omega),
    ];

    let run = |dt: f64| -> SystemState {
        let mut state = SystemState::thermal();
        for (drive, duration) in &phases {
            state = integrate_with(state, &rates, drive, *duration, dt, |_, _| {}).unwrap();
        }
        state
    };

    let coarse = run(1.0e-9);
    let fine = run(0.5e-9);
    let diff = coarse.max_abs_difference(&fine);
    assert!(diff < 1e-8, "step-halving difference {diff:e}");
}

fn dark_with_dephasing() -> DriveParams {
    DriveParams {
        w_p: 0.0,
        omega_r: 0.0,
        gamma_2: 5.0e5,
    }
}

#[test]
fn validation_rejects_bad_inputs() {
    let mut rates = TransitionRates::default();
    rates.k52 = f64::NAN;
    assert!(matches!(
        rates.validate(),
        Err(ModelError::InvalidRate { name: "k52", .. })
    ));
    rates.k52 = -1.0;
    assert!(matches!(
        rates.validate(),
        Err(ModelError::InvalidRate { name: "k52", .. })
    ));

    let drive = DriveParams {
        w_p: -1.0,
        omega_r: 0.0,
        gamma_2: 0.0,
    };
    assert!(matches!(
        drive.validate(),
        Err(ModelError::InvalidDrive { name: "w_p", .. })
    ));

    let state = SystemState::new([f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 0.0);
    assert!(matches!(
        state.validate(),
        Err(ModelError::InvalidState { .. })
    ));

    let good = TransitionRates::default();
    let bad_drive = DriveParams {
        w_p: 0.0,
        omega_r: f64::INFINITY,
        gamma_2: 0.0,
    };
    let err = derivative(&SystemState::thermal(), &good, &bad_drive).unwrap_err();
    assert!(matches!(err, ModelError::InvalidDrive { .. }));
}
