//! Atoms in a classical cavity field: the atomic state evolves under
//! `J (b_l†b_r + h.c.) + 2 Re α · J̃ (n_l − n_r)` while
//! `α̇ = (iδ − κ) α − i J̃ <n_l − n_r>` with `δ = Δ_c − U₀N`.

use num_complex::Complex64;

use super::config::IntegratorConfig;
use super::record::{FinalState, TrajectoryRecord};
use super::schrodinger::NORM_DRIFT_LIMIT;
use crate::error::{Error, Result};
use crate::hilbert::{StateVector, NORM_TOL};
use crate::models::TwoSiteParams;

pub const MEANFIELD_COLUMNS: [&str; 4] = ["photon_number", "re_alpha", "im_alpha", "imbalance"];

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldState {
    pub atomic_amplitudes: Vec<Complex64>,
    pub alpha: Complex64,
}

impl MeanFieldState {
    pub fn new(atoms: &StateVector, alpha: Complex64) -> Result<Self> {
        atoms.require_normalized()?;
        Ok(Self {
            atomic_amplitudes: atoms.amplitudes().to_vec(),
            alpha,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.atomic_amplitudes.len().saturating_sub(1)
    }

    /// `<n_l − n_r>`, summed over mirror pairs so a mirror-symmetric state
    /// gives exactly zero.
    pub fn imbalance(&self) -> f64 {
        imbalance(&self.atomic_amplitudes)
    }
}

fn imbalance(c: &[Complex64]) -> f64 {
    let n = c.len() - 1;
    let mut d = 0.0;
    for k in 0..(n + 1) / 2 {
        d += (n - 2 * k) as f64 * (c[k].norm_sqr() - c[n - k].norm_sqr());
    }
    d
}

struct Rhs {
    n: usize,
    tunneling: f64,
    jtilde: f64,
    /// `iδ − κ`
    decay: Complex64,
    /// hop amplitude between k and k + 1
    hop: Vec<f64>,
}

impl Rhs {
    fn new(p: &TwoSiteParams) -> Self {
        let n = p.n_atoms;
        let hop = (0..n)
            .map(|k| (((n - k) * (k + 1)) as f64).sqrt())
            .collect();
        Self {
            n,
            tunneling: p.tunneling,
            jtilde: p.jtilde,
            decay: Complex64::new(-p.kappa, p.effective_detuning()),
            hop,
        }
    }

    /// `y = (c_0..c_N, α)`
    fn eval(&self, y: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        let c = &y[..=n];
        let alpha = y[n + 1];
        let field = 2.0 * alpha.re * self.jtilde;
        let mi = Complex64::new(0.0, -1.0);
        for k in 0..=n {
            let below = if k > 0 {
                self.hop[k - 1] * c[k - 1]
            } else {
                Complex64::new(0.0, 0.0)
            };
            let above = if k < n {
                self.hop[k] * c[k + 1]
            } else {
                Complex64::new(0.0, 0.0)
            };
            let d = (n as f64) - 2.0 * k as f64;
            out[k] = mi * (self.tunneling * (below + above) + field * d * c[k]);
        }
        out[n + 1] = self.decay * alpha + mi * (self.jtilde * imbalance(c));
    }
}

/// Co-integrates the atomic state and the classical field amplitude.
///
/// Columns: [`MEANFIELD_COLUMNS`].
pub fn integrate_meanfield(
    p: &TwoSiteParams,
    s0: &MeanFieldState,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryRecord> {
    p.validate()?;
    cfg.validate()?;
    let n = p.n_atoms;
    if s0.atomic_amplitudes.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: s0.atomic_amplitudes.len(),
        });
    }
    let n2: f64 = s0.atomic_amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr: n2 });
    }

    let rhs = Rhs::new(p);
    let dt = cfg.step();
    let mut y: Vec<Complex64> = s0
        .atomic_amplitudes
        .iter()
        .copied()
        .chain([s0.alpha])
        .collect();
    let zero = vec![Complex64::new(0.0, 0.0); n + 2];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero);

    let row = |y: &[Complex64]| {
        let a = y[n + 1];
        vec![a.norm_sqr(), a.re, a.im, imbalance(&y[..=n])]
    };
    let mut times = vec![0.0];
    let mut rows = vec![row(&y)];
    let mut max_drift: f64 = 0.0;

    for step in 1..=cfg.n_steps() {
        rhs.eval(&y, &mut k1);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        rhs.eval(&tmp, &mut k2);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * dt * k2[i];
        }
        rhs.eval(&tmp, &mut k3);
        for i in 0..y.len() {
            tmp[i] = y[i] + dt * k3[i];
        }
        rhs.eval(&tmp, &mut k4);
        let w = dt / 6.0;
        for i in 0..y.len() {
            y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let n2: f64 = y[..=n].iter().map(|z| z.norm_sqr()).sum();
        let drift = (n2 - 1.0).abs();
        max_drift = max_drift.max(drift);
        if !(drift <= NORM_DRIFT_LIMIT) {
            return Err(Error::NormDrift {
                drift,
                limit: NORM_DRIFT_LIMIT,
            });
        }
        let s = n2.sqrt().recip();
        for z in &mut y[..=n] {
            *z *= s;
        }
        if cfg.is_record_step(step) {
            times.push(cfg.time_at(step));
            rows.push(row(&y));
        }
    }

    let alpha = y[n + 1];
    y.truncate(n + 1);
    Ok(TrajectoryRecord {
        seed: None,
        times,
        columns: MEANFIELD_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
        jump_times: Vec::new(),
        final_state: FinalState::MeanField(MeanFieldState {
            atomic_amplitudes: y,
            alpha,
        }),
        max_norm_drift: max_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::twosite::atomic_state;
    use crate::models::AtomicPreparation;

    fn params(tunneling: f64) -> TwoSiteParams {
        TwoSiteParams {
            tunneling,
            jtilde: 0.3,
            u0: -0.25,
            delta_c: -2.0 / 3.0,
            kappa: 1.0,
            n_atoms: 4,
            photon_cutoff: 2,
        }
    }

    #[test]
    fn symmetric_state_is_stationary() {
        let atoms = atomic_state(4, AtomicPreparation::Superfluid).unwrap();
        let s0 = MeanFieldState::new(&atoms, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(s0.imbalance(), 0.0);
        let cfg = IntegratorConfig::new(0.01, 20.0, 100).unwrap();
        let rec = integrate_meanfield(&params(0.05), &s0, &cfg).unwrap();
        for row in &rec.rows {
            assert_eq!(row[0], 0.0);
            assert_eq!(row[3], 0.0);
        }
    }

    #[test]
    fn frozen_left_relaxes_to_steady_field() {
        let p = params(0.0);
        let atoms = atomic_state(4, AtomicPreparation::AllLeft).unwrap();
        let s0 = MeanFieldState::new(&atoms, Complex64::new(0.0, 0.0)).unwrap();
        let cfg = IntegratorConfig::new(0.001, 5.0, 500).unwrap();
        let rec = integrate_meanfield(&p, &s0, &cfg).unwrap();
        // α(t) = α_ss (1 − e^{(iδ − κ)t}) with α_ss = −iJ̃N / (κ − iδ)
        let z = Complex64::new(-p.kappa, p.effective_detuning());
        let ss =
            Complex64::new(0.0, -p.jtilde * 4.0) / Complex64::new(p.kappa, -p.effective_detuning());
        for (t, row) in rec.times.iter().zip(&rec.rows) {
            let exact = ss * (1.0 - (z * *t).exp());
            assert!((row[1] - exact.re).abs() < 1e-10, "t={t}");
            assert!((row[2] - exact.im).abs() < 1e-10);
            assert!((row[3] - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_start_locks_in() {
        let atoms = atomic_state(4, AtomicPreparation::Imbalanced(0.02)).unwrap();
        let s0 = MeanFieldState::new(&atoms, Complex64::new(0.0, 0.0)).unwrap();
        let mut p = params(0.05);
        p.jtilde = 0.5;
        let cfg = IntegratorConfig::new(0.01, 300.0, 1000).unwrap();
        let rec = integrate_meanfield(&p, &s0, &cfg).unwrap();
        let d = rec.series("imbalance").unwrap();
        assert!(d.last().unwrap().abs() > 10.0 * d[0].abs());
    }
}
