use num_complex::Complex64;

use super::config::IntegratorConfig;
use super::record::{FinalState, TrajectoryRecord};
use super::rk4::LinearRk4;
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, SparseOperator, StateVector};
use crate::observables::ObservableSet;

/// Per-step norm drift above which a run is rejected as under-resolved.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

pub(crate) fn check_hamiltonian(h: &SparseOperator, space: &HilbertSpace) -> Result<()> {
    space.check_same(h.space())?;
    if !h.is_hermitian(1e-10) {
        return Err(Error::NotHermitian {
            deviation: h.hermiticity_error(),
        });
    }
    Ok(())
}

pub(crate) fn evaluate_pure(
    set: &ObservableSet,
    space: &HilbertSpace,
    amps: &[Complex64],
) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Ok(Vec::new());
    }
    let psi = StateVector::new(space.clone(), amps.to_vec())?;
    set.evaluate(&psi)
}

pub(crate) fn renormalize(amps: &mut [Complex64]) -> f64 {
    let n2 = crate::hilbert::norm_sqr(amps);
    let s = n2.sqrt().recip();
    for z in amps.iter_mut() {
        *z *= s;
    }
    n2
}

/// Unitary evolution of `psi0` under a fixed Hermitian `h`.
///
/// The state is renormalized after every step; the largest pre-correction
/// drift is reported and anything above [`NORM_DRIFT_LIMIT`] is an error.
pub fn propagate_schrodinger(
    h: &SparseOperator,
    psi0: &StateVector,
    cfg: &IntegratorConfig,
    observables: &ObservableSet,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let space = psi0.space().clone();
    check_hamiltonian(h, &space)?;
    psi0.require_normalized()?;
    observables.check_space(&space)?;

    let dt = cfg.step();
    let mut rk = LinearRk4::new(h.scale(Complex64::new(0.0, -1.0)));
    let mut psi = psi0.amplitudes().to_vec();
    let mut times = vec![0.0];
    let mut rows = vec![evaluate_pure(observables, &space, &psi)?];
    let mut max_drift: f64 = 0.0;

    for step in 1..=cfg.n_steps() {
        rk.step(&mut psi, dt);
        let drift = (renormalize(&mut psi) - 1.0).abs();
        max_drift = max_drift.max(drift);
        if !(drift <= NORM_DRIFT_LIMIT) {
            return Err(Error::NormDrift {
                drift,
                limit: NORM_DRIFT_LIMIT,
            });
        }
        if cfg.is_record_step(step) {
            times.push(cfg.time_at(step));
            rows.push(evaluate_pure(observables, &space, &psi)?);
        }
    }

    Ok(TrajectoryRecord {
        seed: None,
        times,
        columns: observables.columns(),
        rows,
        jump_times: Vec::new(),
        final_state: FinalState::Pure(StateVector::new(space, psi)?),
        max_norm_drift: max_drift,
    })
}
