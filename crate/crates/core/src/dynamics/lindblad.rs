use nalgebra::DMatrix;
use num_complex::Complex64;

use super::config::IntegratorConfig;
use super::record::{FinalState, TrajectoryRecord};
use super::schrodinger::check_hamiltonian;
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, SparseOperator};
use crate::observables::ObservableSet;

/// Accumulated trace drift above which a run is rejected.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;

/// Builds `H_eff = H − (i/2) Σ c†c`.
pub(crate) fn effective_hamiltonian(
    h: &SparseOperator,
    jumps: &[SparseOperator],
) -> Result<SparseOperator> {
    let mut heff = h.clone();
    for c in jumps {
        let cc = c.adjoint().matmul(c)?;
        heff = heff.add(&cc.scale(Complex64::new(0.0, -0.5)))?;
    }
    Ok(heff)
}

struct Liouvillian<'a> {
    heff: SparseOperator,
    jumps: &'a [SparseOperator],
}

impl Liouvillian<'_> {
    /// `−i(H_eff ρ − ρ H_eff†) + Σ c ρ c†`, symmetrized.
    fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let x = self.heff.mul_dense(rho);
        let mut out = (&x - x.adjoint()) * Complex64::new(0.0, -1.0);
        for c in self.jumps {
            let y = c.mul_dense(rho);
            out += c.mul_dense(&y.adjoint());
        }
        (&out + out.adjoint()) * Complex64::new(0.5, 0.0)
    }
}

/// Master-equation evolution `ρ̇ = −i[H, ρ] + Σ (c ρ c† − {c†c, ρ}/2)`.
///
/// With `c = √(2κ) a` and `H = 0` the photon number decays as `e^{−2κt}`.
pub fn integrate_lindblad(
    h: &SparseOperator,
    jumps: &[SparseOperator],
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
    observables: &ObservableSet,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    rho0.validate()?;
    let space = rho0.space().clone();
    check_hamiltonian(h, &space)?;
    for c in jumps {
        space.check_same(c.space())?;
    }
    observables.check_space(&space)?;

    let l = Liouvillian {
        heff: effective_hamiltonian(h, jumps)?,
        jumps,
    };
    let dt = Complex64::new(cfg.step(), 0.0);
    let half = dt * 0.5;
    let mut rho = rho0.matrix().clone();
    let eval = |m: &DMatrix<Complex64>| -> Result<Vec<f64>> {
        if observables.is_empty() {
            return Ok(Vec::new());
        }
        observables.evaluate(&DensityMatrix::new_unchecked(space.clone(), m.clone()))
    };
    let mut times = vec![0.0];
    let mut rows = vec![eval(&rho)?];
    let mut max_drift: f64 = 0.0;

    for step in 1..=cfg.n_steps() {
        let k1 = l.apply(&rho);
        let k2 = l.apply(&(&rho + &k1 * half));
        let k3 = l.apply(&(&rho + &k2 * half));
        let k4 = l.apply(&(&rho + &k3 * dt));
        let two = Complex64::new(2.0, 0.0);
        rho += (k1 + k2 * two + k3 * two + k4) * (dt / 6.0);

        let drift = (rho.trace().re - 1.0).abs();
        max_drift = max_drift.max(drift);
        if !(drift <= TRACE_DRIFT_LIMIT) {
            return Err(Error::TraceDrift {
                drift,
                limit: TRACE_DRIFT_LIMIT,
            });
        }
        if cfg.is_record_step(step) {
            times.push(cfg.time_at(step));
            rows.push(eval(&rho)?);
        }
    }

    Ok(TrajectoryRecord {
        seed: None,
        times,
        columns: observables.columns(),
        rows,
        jump_times: Vec::new(),
        final_state: FinalState::Mixed(DensityMatrix::new_unchecked(space, rho)),
        max_norm_drift: max_drift,
    })
}
