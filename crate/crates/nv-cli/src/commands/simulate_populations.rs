//! `simulate-populations`: time-resolved level occupations over the steady
//! measurement cycle.

use std::path::Path;

use pulse_engine::{iterate_to_steady_cycle, TraceMode};

use crate::config::RunConfig;
use crate::csv_io;
use crate::error::CliError;

/// Output columns: time, the seven level populations, the ground coherence,
/// and the total excited-manifold population the camera sees.
pub const COLUMNS: [&str; 10] = [
    "t_s", "n1", "n2", "n3", "n4", "n5", "n6", "n7", "n_c", "n_E",
];

/// Run the cycle to convergence and dump the sampled trajectory. With
/// `all_cycles` the output covers every cycle from the thermal start instead
/// of just the converged one.
pub fn run(config_path: &Path, output: &Path, all_cycles: bool) -> Result<(), CliError> {
    let cfg = RunConfig::load(config_path)?;
    cfg.write_effective_beside(output)?;

    let seq = cfg.sequence();
    if seq.cycle_duration() == 0.0 {
        // Nothing evolves and there is nothing to sample; still a valid run.
        csv_io::write_csv(output, &COLUMNS, Vec::<[f64; 10]>::new())?;
        return Ok(());
    }

    let mode = if all_cycles {
        TraceMode::AllCycles
    } else {
        TraceMode::LastCycle
    };
    let steady = iterate_to_steady_cycle(&seq, &cfg.rates, cfg.dt_s, cfg.tol, cfg.max_cycles, mode)?;
    let trace = steady.result.trace.unwrap_or_default();

    let rows = trace.iter().map(|(t, state)| {
        let p = state.populations;
        [
            t,
            p[0],
            p[1],
            p[2],
            p[3],
            p[4],
            p[5],
            p[6],
            state.coherence,
            state.excited_population(),
        ]
    });
    csv_io::write_csv(output, &COLUMNS, rows)
}
