//! Time evolution: unitary, mean-field, master equation and quantum jumps.

mod config;
mod lindblad;
mod mcwf;
mod meanfield;
mod record;
mod rk4;
mod schrodinger;

pub use config::IntegratorConfig;
pub use lindblad::{integrate_lindblad, TRACE_DRIFT_LIMIT};
pub use mcwf::{
    run_mcwf_ensemble, run_mcwf_trajectory, trajectory_seed, EnsembleConfig, EnsembleResult,
    MAX_BISECTION_STEPS,
};
pub use meanfield::{integrate_meanfield, MeanFieldState, MEANFIELD_COLUMNS};
pub use record::{FinalState, TrajectoryRecord};
pub use schrodinger::{propagate_schrodinger, NORM_DRIFT_LIMIT};

use crate::error::{Error, Result};

/// Default relative change allowed when halving the step.
pub const CONVERGENCE_LIMIT: f64 = 1e-6;

/// Reruns with half the step and compares the final recorded row.
///
/// Returns the largest relative change; values below `1e-10` in magnitude
/// are compared absolutely.
pub fn check_step_convergence<F>(cfg: &IntegratorConfig, limit: f64, run: F) -> Result<f64>
where
    F: Fn(&IntegratorConfig) -> Result<TrajectoryRecord>,
{
    let coarse = run(cfg)?;
    let fine = run(&cfg.halved())?;
    let mut worst: f64 = 0.0;
    let mut worst_col = String::new();
    for ((a, b), name) in coarse
        .last_row()
        .iter()
        .zip(fine.last_row())
        .zip(&coarse.columns)
    {
        if !a.is_finite() || !b.is_finite() {
            continue;
        }
        let change = (a - b).abs() / b.abs().max(1e-10);
        if change > worst {
            worst = change;
            worst_col = name.clone();
        }
    }
    if worst > limit {
        return Err(Error::NotConverged {
            name: worst_col,
            change: worst,
            limit,
        });
    }
    Ok(worst)
}
