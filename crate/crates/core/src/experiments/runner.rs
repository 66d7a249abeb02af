use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use super::scenario::{CavityParams, Model, Scenario, Solver};
use crate::dynamics::{
    integrate_lindblad, integrate_meanfield, propagate_schrodinger, run_mcwf_ensemble,
    EnsembleConfig, IntegratorConfig, MeanFieldState, TrajectoryRecord, CONVERGENCE_LIMIT,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    coherent_state_on, destroy, level_projector, number, tensor_product_op, HilbertSpace,
    SparseOperator, StateVector, COHERENT_TRUNCATION_TOL,
};
use crate::models::fullspace::{self, FullSpaceParams, RIGHT_WELL};
use crate::models::seesaw::{self, PHI_LABEL, X_LABEL};
use crate::models::twosite::{self, atomic_state, ATOMS_LABEL};
use crate::models::{
    build_fullspace_hamiltonian, build_twosite_hamiltonian, AtomicPreparation, TwoSiteParams,
};
use crate::observables::{MotionBasis, ObservableKind, ObservableSet};

/// Truncation loss allowed when seeding a full-space run with a coherent
/// field; the state is renormalized afterwards.
const SEED_FIELD_TOL: f64 = 1e-4;

/// Largest population seen on the outermost retained level(s) of a
/// truncated factor.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    pub label: String,
    pub levels: String,
    pub max_population: f64,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    /// Per-cell standard errors for ensemble runs.
    pub std_errors: Option<Vec<Vec<f64>>>,
    pub truncation: Vec<TruncationReport>,
    pub max_norm_drift: f64,
    /// Largest relative change of the final row under `dt/2`, when checked.
    pub convergence: Option<f64>,
    pub jump_count: usize,
    pub trajectory_seeds: Vec<u64>,
    pub wall_time: Duration,
}

impl ScenarioOutput {
    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// `timeseries.csv` contents: `time` then the requested columns, 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("time");
        for c in &self.columns {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for (t, row) in self.times.iter().zip(&self.rows) {
            let _ = write!(s, "{t:.16e}");
            for v in row {
                let _ = write!(s, ",{v:.16e}");
            }
            s.push('\n');
        }
        s
    }
}

struct System {
    h: SparseOperator,
    jumps: Vec<SparseOperator>,
    psi0: StateVector,
    set: ObservableSet,
    /// Columns of `set` that belong to the requested outputs.
    n_requested: usize,
    monitors: Vec<(String, String)>,
}

fn embed(space: &HilbertSpace, label: &str, op: &SparseOperator) -> Result<SparseOperator> {
    tensor_product_op(space, &[(label, op)])
}

fn unknown_observable(name: &str, model: &Model) -> Error {
    Error::ConfigField {
        field: "outputs.observables".into(),
        message: format!("`{name}` is not defined for model `{}`", model.kind()),
    }
}

fn field_kinds(
    name: &str,
    space: &HilbertSpace,
    label: &str,
    cutoff: usize,
) -> Result<Option<ObservableKind>> {
    let a = embed(space, label, &destroy(label, cutoff)?)?;
    Ok(match name {
        "photon_number" => Some(ObservableKind::Real(embed(
            space,
            label,
            &number(label, cutoff)?,
        )?)),
        "a" => Some(ObservableKind::Complex(a)),
        "abs_mean_a_sq" => Some(ObservableKind::AbsSquared(a)),
        _ => None,
    })
}

/// Projector on the highest Fock level of a factor.
fn top_level(space: &HilbertSpace, label: &str) -> Result<SparseOperator> {
    let dim = space.factor_dim(label)?;
    embed(space, label, &level_projector(label, dim, dim - 1)?)
}

fn finish_set(
    mut set: ObservableSet,
    monitors: Vec<(String, String, SparseOperator)>,
) -> Result<(ObservableSet, usize, Vec<(String, String)>)> {
    let n_requested = set.columns().len();
    let mut names = Vec::new();
    for (label, levels, op) in monitors {
        set.push(&format!("__top_{label}"), ObservableKind::Real(op))?;
        names.push((label, levels));
    }
    Ok((set, n_requested, names))
}

fn seesaw_system(s: &Scenario, p: &seesaw::SeesawParams) -> Result<System> {
    let space = p.space()?;
    let h = seesaw::build_seesaw_hamiltonian(p)?;
    let x = seesaw::position_operator(p, X_LABEL)?;
    let phi = seesaw::position_operator(p, PHI_LABEL)?;
    let mut set = ObservableSet::new();
    for name in &s.outputs {
        let kind = match name.as_str() {
            "negativity" => ObservableKind::Negativity(X_LABEL.into()),
            "var_x" => ObservableSet::variance(x.clone())?,
            "var_phi" => ObservableSet::variance(phi.clone())?,
            "mean_x" => ObservableKind::Real(x.clone()),
            "mean_phi" => ObservableKind::Real(phi.clone()),
            "n_x" => ObservableKind::Real(embed(&space, X_LABEL, &number(X_LABEL, p.cutoff_x)?)?),
            "n_phi" => {
                ObservableKind::Real(embed(&space, PHI_LABEL, &number(PHI_LABEL, p.cutoff_phi)?)?)
            }
            "energy" => ObservableKind::Real(h.clone()),
            _ => return Err(unknown_observable(name, &s.model)),
        };
        set.push(name, kind)?;
    }
    let monitors = vec![
        (
            X_LABEL.to_string(),
            format!("{}", p.cutoff_x - 1),
            top_level(&space, X_LABEL)?,
        ),
        (
            PHI_LABEL.to_string(),
            format!("{}", p.cutoff_phi - 1),
            top_level(&space, PHI_LABEL)?,
        ),
    ];
    let (set, n_requested, monitors) = finish_set(set, monitors)?;
    Ok(System {
        psi0: seesaw::product_ground_state(p)?,
        h,
        jumps: Vec::new(),
        set,
        n_requested,
        monitors,
    })
}

fn qubit_pair_system(s: &Scenario, coupling: f64) -> Result<System> {
    let space = HilbertSpace::new([("a", 2), ("b", 2)])?;
    let sx = |l: &str| destroy(l, 2)?.add(&destroy(l, 2)?.adjoint());
    let h = tensor_product_op(&space, &[("a", &sx("a")?), ("b", &sx("b")?)])?.scale_real(coupling);
    let mut set = ObservableSet::new();
    for name in &s.outputs {
        let kind = match name.as_str() {
            "negativity" => ObservableKind::Negativity("a".into()),
            "energy" => ObservableKind::Real(h.clone()),
            "excitation_a" => ObservableKind::Real(embed(&space, "a", &number("a", 2)?)?),
            "excitation_b" => ObservableKind::Real(embed(&space, "b", &number("b", 2)?)?),
            _ => return Err(unknown_observable(name, &s.model)),
        };
        set.push(name, kind)?;
    }
    let (set, n_requested, monitors) = finish_set(set, Vec::new())?;
    Ok(System {
        psi0: StateVector::basis(space, 0)?,
        h,
        jumps: Vec::new(),
        set,
        n_requested,
        monitors,
    })
}

fn preparation(s: &Scenario) -> AtomicPreparation {
    match s.initial.recipe.as_str() {
        "mott" => AtomicPreparation::Mott,
        "all-left" => AtomicPreparation::AllLeft,
        "asymmetric" => AtomicPreparation::Imbalanced(s.initial.asymmetry),
        _ => AtomicPreparation::Superfluid,
    }
}

fn twosite_system(s: &Scenario, p: &TwoSiteParams) -> Result<System> {
    let model = build_twosite_hamiltonian(p)?;
    let space = p.space()?;
    let n = p.n_atoms;
    let (nl, nr) = twosite::site_number_ops(n)?;
    let d = twosite::imbalance_op(n)?;
    let mut set = ObservableSet::new();
    for name in &s.outputs {
        let kind = match name.as_str() {
            "imbalance" => ObservableKind::Real(embed(&space, ATOMS_LABEL, &d)?),
            "imbalance_sq" => ObservableKind::Real(embed(&space, ATOMS_LABEL, &d.matmul(&d)?)?),
            "pair_correlation" => {
                ObservableKind::Real(embed(&space, ATOMS_LABEL, &nl.matmul(&nr)?)?)
            }
            "negativity" => ObservableKind::Negativity(ATOMS_LABEL.into()),
            "energy" => ObservableKind::Real(model.hamiltonian.clone()),
            other => field_kinds(other, &space, twosite::FIELD_LABEL, p.photon_cutoff)?
                .ok_or_else(|| unknown_observable(other, &s.model))?,
        };
        set.push(name, kind)?;
    }
    let monitors = vec![(
        twosite::FIELD_LABEL.to_string(),
        format!("{}", p.photon_cutoff - 1),
        top_level(&space, twosite::FIELD_LABEL)?,
    )];
    let (set, n_requested, monitors) = finish_set(set, monitors)?;
    let atoms = atomic_state(n, preparation(s))?;
    let vacuum = StateVector::basis(
        HilbertSpace::single(twosite::FIELD_LABEL, p.photon_cutoff)?,
        0,
    )?;
    Ok(System {
        psi0: atoms.tensor(&vacuum)?,
        h: model.hamiltonian,
        jumps: model.jumps,
        set,
        n_requested,
        monitors,
    })
}

/// Position width of the harmonic ground state of one lattice well.
pub fn well_ground_width(p: &FullSpaceParams) -> f64 {
    let omega = (2.0 * p.v0.abs() * p.recoil_ratio).sqrt();
    (p.recoil_ratio / (2.0 * omega)).sqrt()
}

fn fullspace_initial(s: &Scenario, p: &FullSpaceParams) -> Result<StateVector> {
    let nm = p.n_momentum;
    let field_space = HilbertSpace::single(fullspace::FIELD_LABEL, p.photon_cutoff)?;
    let vacuum = StateVector::basis(field_space, 0)?;
    match s.initial.recipe.as_str() {
        "flat+vacuum" => fullspace::flat_state(nm)?.tensor(&vacuum),
        recipe => {
            let width = s.initial.width.unwrap_or_else(|| well_ground_width(p));
            let atom = fullspace::localized_state(nm, RIGHT_WELL, width)?;
            if recipe == "right-localized+vacuum" {
                return atom.tensor(&vacuum);
            }
            let alpha = match s.initial.alpha {
                Some(a) => a,
                None => {
                    let sin = fullspace::sin_kx(nm)?;
                    let mean_sin = sin.sandwich(atom.amplitudes(), atom.amplitudes()).re;
                    fullspace::steady_field_amplitude(p, mean_sin)
                }
            };
            let field = coherent_state_on(
                fullspace::FIELD_LABEL,
                alpha,
                p.photon_cutoff,
                SEED_FIELD_TOL,
            )?;
            atom.tensor(&field)
        }
    }
}

fn fullspace_system(s: &Scenario, p: &FullSpaceParams) -> Result<System> {
    let model = build_fullspace_hamiltonian(p)?;
    let space = p.space()?;
    let nm = p.n_momentum;
    let ml = fullspace::MOTION_LABEL;
    let mut set = ObservableSet::new();
    for name in &s.outputs {
        let kind = match name.as_str() {
            "negativity" => ObservableKind::Negativity(ml.into()),
            "mean_x" => {
                ObservableKind::Phase(embed(&space, ml, &fullspace::momentum_shift(nm, 1)?)?)
            }
            "var_x" => ObservableKind::PositionVariance(ml.into(), MotionBasis::PlaneWave),
            "sin_kx" => ObservableKind::Real(embed(&space, ml, &fullspace::sin_kx(nm)?)?),
            "kinetic" => {
                let k = fullspace::momentum_op(nm)?;
                ObservableKind::Real(embed(
                    &space,
                    ml,
                    &k.matmul(&k)?.scale_real(p.recoil_ratio / 2.0),
                )?)
            }
            "energy" => ObservableKind::Real(model.hamiltonian.clone()),
            other => field_kinds(other, &space, fullspace::FIELD_LABEL, p.photon_cutoff)?
                .ok_or_else(|| unknown_observable(other, &s.model))?,
        };
        set.push(name, kind)?;
    }
    let n_max = p.n_max();
    let edges = level_projector(ml, nm, 0)?.add(&level_projector(ml, nm, nm - 1)?)?;
    let monitors = vec![
        (
            fullspace::FIELD_LABEL.to_string(),
            format!("{}", p.photon_cutoff - 1),
            top_level(&space, fullspace::FIELD_LABEL)?,
        ),
        (
            ml.to_string(),
            format!("±{n_max}"),
            embed(&space, ml, &edges)?,
        ),
    ];
    let (set, n_requested, monitors) = finish_set(set, monitors)?;
    Ok(System {
        psi0: fullspace_initial(s, p)?,
        h: model.hamiltonian,
        jumps: model.jumps,
        set,
        n_requested,
        monitors,
    })
}

fn cavity_system(s: &Scenario, p: &CavityParams) -> Result<System> {
    let space = HilbertSpace::single("field", p.photon_cutoff)?;
    let h = number("field", p.photon_cutoff)?.scale_real(-p.detuning);
    let jump = destroy("field", p.photon_cutoff)?.scale_real((2.0 * p.kappa).sqrt());
    let mut set = ObservableSet::new();
    for name in &s.outputs {
        let kind = field_kinds(name, &space, "field", p.photon_cutoff)?
            .ok_or_else(|| unknown_observable(name, &s.model))?;
        set.push(name, kind)?;
    }
    let monitors = vec![(
        "field".to_string(),
        format!("{}", p.photon_cutoff - 1),
        top_level(&space, "field")?,
    )];
    let (set, n_requested, monitors) = finish_set(set, monitors)?;
    let psi0 = match s.initial.recipe.as_str() {
        "fock" => StateVector::basis(space, s.initial.photons)?,
        _ => coherent_state_on(
            "field",
            s.initial.alpha.unwrap_or_default(),
            p.photon_cutoff,
            COHERENT_TRUNCATION_TOL,
        )?,
    };
    Ok(System {
        psi0,
        h,
        jumps: vec![jump],
        set,
        n_requested,
        monitors,
    })
}

fn build_system(s: &Scenario) -> Result<System> {
    match &s.model {
        Model::Seesaw(p) => seesaw_system(s, p),
        Model::QubitPair { coupling } => qubit_pair_system(s, *coupling),
        Model::TwoSiteQuantum(p) => twosite_system(s, p),
        Model::FullSpace(p) => fullspace_system(s, p),
        Model::Cavity(p) => cavity_system(s, p),
        Model::TwoSiteMeanField(_) => unreachable!("mean-field runs have no quantum system"),
    }
}

/// Largest relative change between two final rows. Entries smaller than
/// the largest magnitude in the row are compared against that magnitude,
/// so observables that vanish by symmetry are not judged on rounding noise.
fn relative_change(a: &[f64], b: &[f64]) -> (f64, usize) {
    let scale = b
        .iter()
        .filter(|v| v.is_finite())
        .fold(1e-10f64, |m, v| m.max(v.abs()));
    let mut worst = (0.0, 0);
    for (j, (x, y)) in a.iter().zip(b).enumerate() {
        if x.is_finite() && y.is_finite() {
            let c = (x - y).abs() / y.abs().max(scale);
            if c > worst.0 {
                worst = (c, j);
            }
        }
    }
    worst
}

fn convergence(
    cfg: &IntegratorConfig,
    coarse: &TrajectoryRecord,
    n_cols: usize,
    run: impl Fn(&IntegratorConfig) -> Result<TrajectoryRecord>,
) -> Result<f64> {
    let fine = run(&cfg.halved())?;
    let (change, j) = relative_change(&coarse.last_row()[..n_cols], &fine.last_row()[..n_cols]);
    if change > CONVERGENCE_LIMIT {
        return Err(Error::NotConverged {
            name: coarse.columns[j].clone(),
            change,
            limit: CONVERGENCE_LIMIT,
        });
    }
    Ok(change)
}

fn meanfield_output(s: &Scenario, p: &TwoSiteParams) -> Result<ScenarioOutput> {
    let atoms = atomic_state(p.n_atoms, preparation(s))?;
    let s0 = MeanFieldState::new(&atoms, Complex64::new(0.0, 0.0))?;
    let run = |cfg: &IntegratorConfig| integrate_meanfield(p, &s0, cfg);
    let rec = run(&s.integrator)?;
    let conv = if s.convergence_check {
        Some(convergence(&s.integrator, &rec, rec.columns.len(), run)?)
    } else {
        None
    };
    let mut picks = Vec::new();
    let mut columns = Vec::new();
    for name in &s.outputs {
        let cols: &[&str] = match name.as_str() {
            "alpha" => &["re_alpha", "im_alpha"],
            "photon_number" => &["photon_number"],
            _ => &["imbalance"],
        };
        for c in cols {
            picks.push(rec.column_index(c).expect("mean-field column"));
            columns.push(c.to_string());
        }
    }
    Ok(ScenarioOutput {
        columns,
        rows: rec
            .rows
            .iter()
            .map(|r| picks.iter().map(|&j| r[j]).collect())
            .collect(),
        times: rec.times,
        std_errors: None,
        truncation: Vec::new(),
        max_norm_drift: rec.max_norm_drift,
        convergence: conv,
        jump_count: 0,
        trajectory_seeds: Vec::new(),
        wall_time: Duration::ZERO,
    })
}

/// Runs a scenario in memory.
pub fn execute(s: &Scenario) -> Result<ScenarioOutput> {
    let start = Instant::now();
    let mut out = match &s.model {
        Model::TwoSiteMeanField(p) => meanfield_output(s, p)?,
        _ => quantum_output(s)?,
    };
    out.wall_time = start.elapsed();
    Ok(out)
}

fn quantum_output(s: &Scenario) -> Result<ScenarioOutput> {
    let sys = build_system(s)?;
    let n_req = sys.n_requested;
    let cfg = &s.integrator;
    let (rec, std_errors, seeds, jump_count, conv) = match s.solver {
        Solver::Mcwf => {
            let ens = EnsembleConfig {
                n_traj: s.n_traj,
                master_seed: s.master_seed,
                threads: s.threads,
                keep_density: false,
            };
            let res = run_mcwf_ensemble(&sys.h, &sys.jumps, &sys.psi0, cfg, &sys.set, &ens)?;
            let jumps = res.jump_counts.iter().sum();
            (
                res.record,
                Some(res.std_errors),
                res.trajectory_seeds,
                jumps,
                None,
            )
        }
        Solver::Schrodinger | Solver::Lindblad => {
            let run = |c: &IntegratorConfig| match s.solver {
                Solver::Schrodinger => propagate_schrodinger(&sys.h, &sys.psi0, c, &sys.set),
                _ => integrate_lindblad(&sys.h, &sys.jumps, &sys.psi0.to_density(), c, &sys.set),
            };
            let rec = run(cfg)?;
            let conv = if s.convergence_check {
                Some(convergence(cfg, &rec, n_req, run)?)
            } else {
                None
            };
            (rec, None, Vec::new(), 0, conv)
        }
        Solver::MeanField => unreachable!("validated at load"),
    };

    let truncation = sys
        .monitors
        .iter()
        .enumerate()
        .map(|(i, (label, levels))| TruncationReport {
            label: label.clone(),
            levels: levels.clone(),
            max_population: rec.rows.iter().map(|r| r[n_req + i]).fold(0.0, f64::max),
        })
        .collect();
    let trim = |rows: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        rows.into_iter()
            .map(|mut r| {
                r.truncate(n_req);
                r
            })
            .collect()
    };
    Ok(ScenarioOutput {
        columns: rec.columns[..n_req].to_vec(),
        times: rec.times,
        rows: trim(rec.rows),
        std_errors: std_errors.map(trim),
        truncation,
        max_norm_drift: rec.max_norm_drift,
        convergence: conv,
        jump_count,
        trajectory_seeds: seeds,
        wall_time: Duration::ZERO,
    })
}

/// `meta.txt` contents.
pub fn format_meta(s: &Scenario, out: &ScenarioOutput) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "# resolved configuration");
    m.push_str(&s.to_config_string());
    let _ = writeln!(m, "\n# run");
    let _ = writeln!(m, "rows = {}", out.rows.len());
    let _ = writeln!(m, "steps = {}", s.integrator.n_steps());
    let _ = writeln!(m, "dt_used = {:?}", s.integrator.step());
    let _ = writeln!(m, "max_norm_drift = {:e}", out.max_norm_drift);
    match out.convergence {
        Some(c) => {
            let _ = writeln!(
                m,
                "convergence_dt_half_max_rel_change = {c:e} (limit {CONVERGENCE_LIMIT:e})"
            );
        }
        None => {
            let _ = writeln!(m, "convergence_dt_half_max_rel_change = not checked");
        }
    }
    if s.solver == Solver::Mcwf {
        let _ = writeln!(m, "\n# seeds");
        let _ = writeln!(m, "master_seed = {}", s.master_seed);
        let _ = writeln!(m, "n_traj = {}", s.n_traj);
        let _ = writeln!(
            m,
            "trajectory_seed_rule = splitmix64(master_seed + (k + 1) * 0x9E3779B97F4A7C15)"
        );
        for (k, seed) in out.trajectory_seeds.iter().enumerate().take(8) {
            let _ = writeln!(m, "trajectory_seed[{k}] = {seed}");
        }
        if out.trajectory_seeds.len() > 8 {
            let _ = writeln!(m, "# ... {} more", out.trajectory_seeds.len() - 8);
        }
        let _ = writeln!(m, "total_jumps = {}", out.jump_count);
    }
    let _ = writeln!(
        m,
        "\n# truncation (max population on the highest retained level)"
    );
    if out.truncation.is_empty() {
        let _ = writeln!(m, "none (no truncated factors)");
    }
    for t in &out.truncation {
        let _ = writeln!(
            m,
            "top_level_population[{}, level {}] = {:e}",
            t.label, t.levels, t.max_population
        );
    }
    let _ = writeln!(m, "\n# timing");
    let _ = writeln!(m, "wall_time_seconds = {:.3}", out.wall_time.as_secs_f64());
    m
}

/// Runs a scenario and writes `timeseries.csv` and `meta.txt` into `out_dir`.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<ScenarioOutput> {
    let out = execute(s)?;
    let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
    for (file, text) in [
        ("timeseries.csv", out.to_csv()),
        ("meta.txt", format_meta(s, &out)),
    ] {
        let path = out_dir.join(file);
        std::fs::write(&path, text).map_err(|e| io(&path, e))?;
    }
    Ok(out)
}
