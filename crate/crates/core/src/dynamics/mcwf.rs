//! Quantum-jump unraveling of the master equation.
//!
//! Between jumps `|ψ>` follows `H_eff = H − (i/2) Σ c†c` without
//! renormalization. A uniform `r` is drawn; when `‖ψ‖²` falls to `r` the
//! crossing time is located by a bracketed root search, a channel is chosen with weight `‖c_j ψ‖²`,
//! the jump is applied and a fresh `r` is drawn.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::IntegratorConfig;
use super::lindblad::effective_hamiltonian;
use super::record::{FinalState, TrajectoryRecord};
use super::rk4::LinearRk4;
use super::schrodinger::{
    check_hamiltonian, evaluate_pure, propagate_schrodinger, renormalize, NORM_DRIFT_LIMIT,
};
use crate::error::{Error, Result};
use crate::hilbert::{norm_sqr, DensityMatrix, HilbertSpace, SparseOperator, StateVector};
use crate::observables::ObservableSet;

pub const MAX_BISECTION_STEPS: usize = 50;

/// Trajectories are reduced in fixed blocks of this size, so results do not
/// depend on the number of worker threads.
const CHUNK: usize = 64;

/// Seed of trajectory `k` in an ensemble (splitmix64 of a counter).
pub fn trajectory_seed(master_seed: u64, k: usize) -> u64 {
    let mut z = master_seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn draw_threshold(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let r: f64 = rng.random();
        if r > 0.0 {
            return r;
        }
    }
}

struct Engine<'a> {
    generator: SparseOperator,
    jumps: &'a [SparseOperator],
    /// `Σ c†c`, giving `d ln‖ψ‖²/dt = −<Σ c†c>/‖ψ‖²`
    decay: Option<SparseOperator>,
    cfg: IntegratorConfig,
}

struct RunOutput {
    jump_times: Vec<f64>,
    final_amps: Vec<Complex64>,
    max_drift: f64,
}

impl<'a> Engine<'a> {
    fn new(h: &SparseOperator, jumps: &'a [SparseOperator], cfg: IntegratorConfig) -> Result<Self> {
        let mut decay: Option<SparseOperator> = None;
        for c in jumps {
            let cc = c.adjoint().matmul(c)?;
            decay = Some(match decay {
                None => cc,
                Some(d) => d.add(&cc)?,
            });
        }
        Ok(Self {
            generator: effective_hamiltonian(h, jumps)?.scale(Complex64::new(0.0, -1.0)),
            jumps,
            decay,
            cfg,
        })
    }

    fn log_norm_slope(&self, psi: &[Complex64], n2: f64) -> f64 {
        self.decay
            .as_ref()
            .map_or(0.0, |d| -d.sandwich(psi, psi).re / n2)
    }

    /// Runs one trajectory; `on_record` sees the normalized state at every
    /// record step, in order.
    fn run(
        &self,
        psi0: &[Complex64],
        seed: u64,
        mut on_record: impl FnMut(&[Complex64]) -> Result<()>,
    ) -> Result<RunOutput> {
        let cfg = &self.cfg;
        let dt = cfg.step();
        let mut rk = LinearRk4::new(self.generator.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r = draw_threshold(&mut rng);
        let mut psi = psi0.to_vec();
        let mut jump_times = Vec::new();
        let mut max_drift: f64 = 0.0;
        let mut normalized = psi.clone();
        on_record(&psi)?;

        for step in 1..=cfg.n_steps() {
            if self.jumps.is_empty() {
                rk.step(&mut psi, dt);
                let drift = (renormalize(&mut psi) - 1.0).abs();
                max_drift = max_drift.max(drift);
                if !(drift <= NORM_DRIFT_LIMIT) {
                    return Err(Error::NormDrift {
                        drift,
                        limit: NORM_DRIFT_LIMIT,
                    });
                }
            } else {
                let mut t = cfg.time_at(step - 1);
                let mut remaining = dt;
                loop {
                    let trial = rk.stepped(&psi, remaining);
                    let n2_end = norm_sqr(&trial);
                    if n2_end > r {
                        psi = trial;
                        break;
                    }
                    let (tau, at_crossing) =
                        self.locate_crossing(&mut rk, &psi, remaining, &trial, n2_end, r, dt)?;
                    psi = at_crossing;
                    t += tau;
                    remaining -= tau;
                    self.jump(&mut psi, &mut rng)?;
                    jump_times.push(t.min(cfg.t_final));
                    r = draw_threshold(&mut rng);
                    if remaining <= 1e-14 * dt {
                        break;
                    }
                }
            }
            if cfg.is_record_step(step) {
                normalized.copy_from_slice(&psi);
                renormalize(&mut normalized);
                on_record(&normalized)?;
            }
        }
        renormalize(&mut psi);
        Ok(RunOutput {
            jump_times,
            final_amps: psi,
            max_drift,
        })
    }

    /// Sub-step `τ ∈ (0, h]` at which `‖ψ(τ)‖² = r`. The first guess is the
    /// root of the cubic Hermite model of `ln ‖ψ‖²` built from both ends;
    /// the bracket is then refined by regula falsi (Illinois variant).
    fn locate_crossing(
        &self,
        rk: &mut LinearRk4,
        psi: &[Complex64],
        h: f64,
        end: &[Complex64],
        n2_end: f64,
        r: f64,
        dt: f64,
    ) -> Result<(f64, Vec<Complex64>)> {
        let target = r.ln();
        let (mut lo, mut hi) = (0.0, h);
        let n2_start = norm_sqr(psi);
        let mut f_lo = n2_start.ln() - target;
        let mut f_hi = n2_end.ln() - target;
        let mut guess = Some(
            h * hermite_root(
                f_lo,
                f_hi,
                h * self.log_norm_slope(psi, n2_start),
                h * self.log_norm_slope(end, n2_end),
            ),
        );
        let mut side = 0i8;
        for _ in 0..MAX_BISECTION_STEPS {
            let mut mid = guess
                .take()
                .unwrap_or_else(|| hi - f_hi * (hi - lo) / (f_hi - f_lo));
            if !(mid > lo && mid < hi) {
                mid = 0.5 * (lo + hi);
            }
            let cand = rk.stepped(psi, mid);
            let f = norm_sqr(&cand).ln() - target;
            if f.abs() <= 1e-10 || hi - lo <= 1e-13 * dt {
                return Ok((mid, cand));
            }
            if f > 0.0 {
                lo = mid;
                f_lo = f;
                if side == 1 {
                    f_hi *= 0.5;
                }
                side = 1;
            } else {
                hi = mid;
                f_hi = f;
                if side == -1 {
                    f_lo *= 0.5;
                }
                side = -1;
            }
        }
        Err(Error::JumpBisection(MAX_BISECTION_STEPS))
    }

    fn jump(&self, psi: &mut Vec<Complex64>, rng: &mut ChaCha8Rng) -> Result<()> {
        let mut candidates: Vec<Vec<Complex64>> = self
            .jumps
            .iter()
            .map(|c| c.apply(psi))
            .collect::<Result<_>>()?;
        let weights: Vec<f64> = candidates.iter().map(|v| norm_sqr(v)).collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidState(
                "jump requested with zero jump rate".into(),
            ));
        }
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = weights.len() - 1;
        for (j, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = j;
                break;
            }
        }
        *psi = candidates.swap_remove(pick);
        renormalize(psi);
        Ok(())
    }
}

/// Root in `[0, 1]` of the cubic Hermite interpolant with end values
/// `f0 > 0 >= f1` and end slopes `m0`, `m1` (per unit interval).
fn hermite_root(f0: f64, f1: f64, m0: f64, m1: f64) -> f64 {
    let p = |s: f64| {
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * f0
            + (s3 - 2.0 * s2 + s) * m0
            + (3.0 * s2 - 2.0 * s3) * f1
            + (s3 - s2) * m1
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_inputs(
    h: &SparseOperator,
    jumps: &[SparseOperator],
    psi0: &StateVector,
    cfg: &IntegratorConfig,
    observables: &ObservableSet,
) -> Result<()> {
    cfg.validate()?;
    let space = psi0.space();
    check_hamiltonian(h, space)?;
    for c in jumps {
        space.check_same(c.space())?;
    }
    psi0.require_normalized()?;
    observables.check_space(space)
}

/// One quantum-jump trajectory, fully determined by `(seed, cfg)`.
///
/// Without jump operators this is exactly [`propagate_schrodinger`].
pub fn run_mcwf_trajectory(
    h: &SparseOperator,
    jumps: &[SparseOperator],
    psi0: &StateVector,
    cfg: &IntegratorConfig,
    observables: &ObservableSet,
    seed: u64,
) -> Result<TrajectoryRecord> {
    if jumps.is_empty() {
        let mut rec = propagate_schrodinger(h, psi0, cfg, observables)?;
        rec.seed = Some(seed);
        return Ok(rec);
    }
    check_inputs(h, jumps, psi0, cfg, observables)?;
    let space = psi0.space().clone();
    let engine = Engine::new(h, jumps, *cfg)?;
    let mut rows = Vec::new();
    let out = engine.run(psi0.amplitudes(), seed, |amps| {
        rows.push(evaluate_pure(observables, &space, amps)?);
        Ok(())
    })?;
    Ok(TrajectoryRecord {
        seed: Some(seed),
        times: cfg.record_times(),
        columns: observables.columns(),
        rows,
        jump_times: out.jump_times,
        final_state: FinalState::Pure(StateVector::new(space, out.final_amps)?),
        max_norm_drift: out.max_drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub n_traj: usize,
    pub master_seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Keep the averaged density matrix at every record time.
    pub keep_density: bool,
}

impl EnsembleConfig {
    pub fn new(n_traj: usize, master_seed: u64) -> Self {
        Self {
            n_traj,
            master_seed,
            threads: None,
            keep_density: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    /// Ensemble means; nonlinear observables are evaluated on the averaged
    /// density matrix. `final_state` is the averaged final density matrix.
    pub record: TrajectoryRecord,
    /// Standard error of each column mean; NaN for nonlinear columns.
    pub std_errors: Vec<Vec<f64>>,
    /// Averaged density matrix per record time, if requested.
    pub densities: Vec<DensityMatrix>,
    pub trajectory_seeds: Vec<u64>,
    pub jump_counts: Vec<usize>,
}

struct TrajOut {
    linear: Vec<Vec<f64>>,
    states: Vec<Vec<Complex64>>,
    final_amps: Vec<Complex64>,
    jump_times: Vec<f64>,
    max_drift: f64,
}

/// Averages `n_traj` trajectories with seeds [`trajectory_seed`]`(master, k)`.
///
/// Output is bit-identical for any thread count.
pub fn run_mcwf_ensemble(
    h: &SparseOperator,
    jumps: &[SparseOperator],
    psi0: &StateVector,
    cfg: &IntegratorConfig,
    observables: &ObservableSet,
    ens: &EnsembleConfig,
) -> Result<EnsembleResult> {
    if ens.n_traj == 0 {
        return Err(Error::param("n_traj", "must be >= 1"));
    }
    check_inputs(h, jumps, psi0, cfg, observables)?;
    match ens.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::param("threads", e.to_string()))?;
            pool.install(|| ensemble_inner(h, jumps, psi0, cfg, observables, ens))
        }
        None => ensemble_inner(h, jumps, psi0, cfg, observables, ens),
    }
}

fn ensemble_inner(
    h: &SparseOperator,
    jumps: &[SparseOperator],
    psi0: &StateVector,
    cfg: &IntegratorConfig,
    observables: &ObservableSet,
    ens: &EnsembleConfig,
) -> Result<EnsembleResult> {
    let space: HilbertSpace = psi0.space().clone();
    let dim = space.dim();
    let engine = Engine::new(h, jumps, *cfg)?;
    let times = cfg.record_times();
    let n_rec = times.len();
    let need_density = ens.keep_density || !observables.all_linear();
    let lin_idx = observables.linear_columns();
    let n_lin = lin_idx.len();
    let seeds: Vec<u64> = (0..ens.n_traj)
        .map(|k| trajectory_seed(ens.master_seed, k))
        .collect();

    let zero = Complex64::new(0.0, 0.0);
    let mut sum = vec![vec![0.0; n_lin]; n_rec];
    let mut sum_sq = vec![vec![0.0; n_lin]; n_rec];
    let mut rho_sum: Vec<DMatrix<Complex64>> = if need_density {
        vec![DMatrix::from_element(dim, dim, zero); n_rec]
    } else {
        Vec::new()
    };
    let mut final_sum = DMatrix::from_element(dim, dim, zero);
    let mut all_jumps = Vec::new();
    let mut jump_counts = Vec::with_capacity(ens.n_traj);
    let mut max_drift: f64 = 0.0;

    for chunk in seeds.chunks(CHUNK) {
        let outs: Vec<TrajOut> = chunk
            .par_iter()
            .map(|&seed| {
                let mut linear = Vec::with_capacity(n_rec);
                let mut states = Vec::new();
                let out = engine.run(psi0.amplitudes(), seed, |amps| {
                    linear.push(observables.evaluate_linear(amps));
                    if need_density {
                        states.push(amps.to_vec());
                    }
                    Ok(())
                })?;
                Ok(TrajOut {
                    linear,
                    states,
                    final_amps: out.final_amps,
                    jump_times: out.jump_times,
                    max_drift: out.max_drift,
                })
            })
            .collect::<Result<_>>()?;

        for o in &outs {
            for (r, vals) in o.linear.iter().enumerate() {
                for (j, v) in vals.iter().enumerate() {
                    sum[r][j] += v;
                    sum_sq[r][j] += v * v;
                }
            }
            jump_counts.push(o.jump_times.len());
            all_jumps.extend_from_slice(&o.jump_times);
            max_drift = max_drift.max(o.max_drift);
        }
        let stack = |col: &dyn Fn(&TrajOut) -> &[Complex64]| {
            DMatrix::from_fn(dim, outs.len(), |i, k| col(&outs[k])[i])
        };
        let fin = stack(&|o| &o.final_amps);
        final_sum += &fin * fin.adjoint();
        if need_density {
            rho_sum.par_iter_mut().enumerate().for_each(|(r, acc)| {
                let psi = stack(&|o| &o.states[r]);
                *acc += &psi * psi.adjoint();
            });
        }
    }

    let n = ens.n_traj as f64;
    let scale = Complex64::new(1.0 / n, 0.0);
    let densities: Vec<DensityMatrix> = rho_sum
        .into_iter()
        .map(|m| DensityMatrix::new_unchecked(space.clone(), m * scale))
        .collect();
    let n_cols = observables.columns().len();
    let mut rows = Vec::with_capacity(n_rec);
    let mut std_errors = Vec::with_capacity(n_rec);
    for r in 0..n_rec {
        let mut row = if need_density && n_lin < n_cols {
            observables.evaluate(&densities[r])?
        } else {
            vec![f64::NAN; n_cols]
        };
        let mut err = vec![f64::NAN; n_cols];
        for (j, &c) in lin_idx.iter().enumerate() {
            let mean = sum[r][j] / n;
            row[c] = mean;
            err[c] = if ens.n_traj > 1 {
                ((sum_sq[r][j] / n - mean * mean).max(0.0) * n / (n - 1.0) / n).sqrt()
            } else {
                0.0
            };
        }
        rows.push(row);
        std_errors.push(err);
    }
    all_jumps.sort_by(f64::total_cmp);

    Ok(EnsembleResult {
        record: TrajectoryRecord {
            seed: Some(ens.master_seed),
            times,
            columns: observables.columns(),
            rows,
            jump_times: all_jumps,
            final_state: FinalState::Mixed(DensityMatrix::new_unchecked(space, final_sum * scale)),
            max_norm_drift: max_drift,
        },
        std_errors,
        densities: if ens.keep_density {
            densities
        } else {
            Vec::new()
        },
        trajectory_seeds: seeds,
        jump_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, destroy, number};
    use crate::observables::ObservableKind;

    fn damped(cutoff: usize, kappa: f64) -> (SparseOperator, Vec<SparseOperator>, ObservableSet) {
        let space = HilbertSpace::single("field", cutoff).unwrap();
        let a = destroy("field", cutoff).unwrap();
        let set = ObservableSet::new()
            .with("n", ObservableKind::Real(number("field", cutoff).unwrap()))
            .unwrap()
            .with("a", ObservableKind::Complex(a.clone()))
            .unwrap();
        (
            SparseOperator::zero(space),
            vec![a.scale_real((2.0 * kappa).sqrt())],
            set,
        )
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let s: Vec<u64> = (0..100).map(|k| trajectory_seed(7, k)).collect();
        let mut u = s.clone();
        u.sort();
        u.dedup();
        assert_eq!(u.len(), 100);
        assert_eq!(trajectory_seed(7, 3), s[3]);
        assert_ne!(trajectory_seed(8, 3), s[3]);
    }

    #[test]
    fn coherent_state_stays_coherent() {
        let kappa = 1.0;
        let alpha0 = Complex64::new(2.0, 0.0);
        let (h, jumps, set) = damped(30, kappa);
        let psi = coherent_state(alpha0, 30).unwrap();
        let cfg = IntegratorConfig::new(0.002, 1.0, 50).unwrap();
        let rec = run_mcwf_trajectory(&h, &jumps, &psi, &cfg, &set, 11).unwrap();
        assert!(!rec.jump_times.is_empty());
        for (t, row) in rec.times.iter().zip(&rec.rows) {
            let alpha = alpha0 * (-kappa * t).exp();
            assert!((row[1] - alpha.re).abs() < 1e-6, "t={t}");
            assert!((row[0] - alpha.norm_sqr()).abs() < 1e-6);
        }
        assert!(rec.jump_times.iter().all(|&t| (0.0..=1.0).contains(&t)));
    }

    #[test]
    fn no_jumps_equals_schrodinger() {
        let h = number("field", 5).unwrap();
        let raw = crate::hilbert::coherent_state_with_tolerance(Complex64::new(0.5, 0.1), 5, 1e-3)
            .unwrap();
        let psi = StateVector::normalized(raw.space().clone(), raw.amplitudes().to_vec()).unwrap();
        let cfg = IntegratorConfig::new(0.01, 1.0, 10).unwrap();
        let set = ObservableSet::new()
            .with("a", ObservableKind::Complex(destroy("field", 5).unwrap()))
            .unwrap();
        let a = run_mcwf_trajectory(&h, &[], &psi, &cfg, &set, 3).unwrap();
        let b = propagate_schrodinger(&h, &psi, &cfg, &set).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn ensemble_of_one_is_pure() {
        let (h, jumps, set) = damped(12, 0.5);
        let psi = StateVector::basis(HilbertSpace::single("field", 12).unwrap(), 3).unwrap();
        let cfg = IntegratorConfig::new(0.01, 1.0, 20).unwrap();
        let mut ens = EnsembleConfig::new(1, 5);
        ens.keep_density = true;
        let res = run_mcwf_ensemble(&h, &jumps, &psi, &cfg, &set, &ens).unwrap();
        let single =
            run_mcwf_trajectory(&h, &jumps, &psi, &cfg, &set, res.trajectory_seeds[0]).unwrap();
        assert_eq!(res.record.rows, single.rows);
        for d in &res.densities {
            assert!((d.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ensemble_is_thread_independent() {
        let (h, jumps, set) = damped(16, 0.5);
        let set = set
            .with(
                "n_var",
                ObservableSet::variance(number("field", 16).unwrap()).unwrap(),
            )
            .unwrap();
        let psi = coherent_state(Complex64::new(1.2, 0.4), 16).unwrap();
        let cfg = IntegratorConfig::new(0.01, 1.0, 20).unwrap();
        let mut ens = EnsembleConfig::new(150, 42);
        ens.threads = Some(1);
        let a = run_mcwf_ensemble(&h, &jumps, &psi, &cfg, &set, &ens).unwrap();
        ens.threads = Some(4);
        let b = run_mcwf_ensemble(&h, &jumps, &psi, &cfg, &set, &ens).unwrap();
        assert_eq!(a.record, b.record);
        assert!(a
            .record
            .rows
            .iter()
            .all(|r| r.iter().all(|v| v.is_finite())));
    }

    #[test]
    fn ensemble_matches_decay() {
        let kappa = 0.5;
        let (h, jumps, set) = damped(12, kappa);
        // Fock |3>: photon number is exactly 3 e^{-2κt} on average.
        let psi = StateVector::basis(HilbertSpace::single("field", 12).unwrap(), 3).unwrap();
        let cfg = IntegratorConfig::new(0.01, 2.0, 20).unwrap();
        let res =
            run_mcwf_ensemble(&h, &jumps, &psi, &cfg, &set, &EnsembleConfig::new(400, 1)).unwrap();
        for (i, t) in res.record.times.iter().enumerate() {
            let exact = 3.0 * (-2.0 * kappa * t).exp();
            let err = res.std_errors[i][0];
            assert!(
                (res.record.rows[i][0] - exact).abs() <= 4.0 * err + 1e-9,
                "t={t}"
            );
        }
    }
}
