use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::config::{ConfigDoc, Reader};
use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::models::{compute_wannier_couplings, FullSpaceParams, SeesawParams, TwoSiteParams};

const SECTIONS: [&str; 6] = [
    "scenario",
    "params",
    "initial",
    "integrator",
    "ensemble",
    "outputs",
];

/// Damped single cavity mode, `H = −Δ a†a`, jump `√(2κ) a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub kappa: f64,
    pub detuning: f64,
    pub photon_cutoff: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Seesaw(SeesawParams),
    /// Two qubits with `H = g σx ⊗ σx`.
    QubitPair {
        coupling: f64,
    },
    TwoSiteQuantum(TwoSiteParams),
    TwoSiteMeanField(TwoSiteParams),
    FullSpace(FullSpaceParams),
    Cavity(CavityParams),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Seesaw(_) => "seesaw",
            Model::QubitPair { .. } => "qubit-pair",
            Model::TwoSiteQuantum(_) => "twosite-quantum",
            Model::TwoSiteMeanField(_) => "twosite-meanfield",
            Model::FullSpace(_) => "fullspace-mcwf",
            Model::Cavity(_) => "damped-cavity",
        }
    }

    fn default_solver(&self) -> Solver {
        match self {
            Model::Seesaw(_) | Model::QubitPair { .. } => Solver::Schrodinger,
            Model::TwoSiteQuantum(_) | Model::Cavity(_) => Solver::Lindblad,
            Model::TwoSiteMeanField(_) => Solver::MeanField,
            Model::FullSpace(_) => Solver::Mcwf,
        }
    }

    fn allowed_solvers(&self) -> &'static [Solver] {
        match self {
            Model::Seesaw(_) | Model::QubitPair { .. } => &[Solver::Schrodinger, Solver::Lindblad],
            Model::TwoSiteQuantum(_) | Model::Cavity(_) | Model::FullSpace(_) => {
                &[Solver::Lindblad, Solver::Mcwf]
            }
            Model::TwoSiteMeanField(_) => &[Solver::MeanField],
        }
    }

    /// Observable names the runner knows for this model.
    pub fn available_observables(&self) -> &'static [&'static str] {
        match self {
            Model::Seesaw(_) => &[
                "negativity",
                "var_x",
                "var_phi",
                "mean_x",
                "mean_phi",
                "n_x",
                "n_phi",
                "energy",
            ],
            Model::QubitPair { .. } => &["negativity", "energy", "excitation_a", "excitation_b"],
            Model::TwoSiteQuantum(_) => &[
                "photon_number",
                "a",
                "abs_mean_a_sq",
                "imbalance",
                "imbalance_sq",
                "pair_correlation",
                "negativity",
                "energy",
            ],
            Model::TwoSiteMeanField(_) => &["photon_number", "alpha", "imbalance"],
            Model::FullSpace(_) => &[
                "photon_number",
                "a",
                "abs_mean_a_sq",
                "negativity",
                "mean_x",
                "var_x",
                "sin_kx",
                "kinetic",
                "energy",
            ],
            Model::Cavity(_) => &["photon_number", "a", "abs_mean_a_sq"],
        }
    }

    fn default_outputs(&self) -> &'static [&'static str] {
        match self {
            Model::Seesaw(_) => &["negativity", "var_x", "var_phi"],
            Model::QubitPair { .. } => &["negativity"],
            Model::TwoSiteQuantum(_) => &[
                "photon_number",
                "negativity",
                "pair_correlation",
                "imbalance",
            ],
            Model::TwoSiteMeanField(_) => &["photon_number", "alpha", "imbalance"],
            Model::FullSpace(_) => &["photon_number", "abs_mean_a_sq", "negativity", "mean_x"],
            Model::Cavity(_) => &["photon_number", "a"],
        }
    }

    fn initial_states(&self) -> &'static [&'static str] {
        match self {
            Model::Seesaw(_) | Model::QubitPair { .. } => &["product-ground"],
            Model::TwoSiteQuantum(_) | Model::TwoSiteMeanField(_) => {
                &["superfluid", "mott", "all-left", "asymmetric"]
            }
            Model::FullSpace(_) => &[
                "flat+vacuum",
                "right-localized+coherent",
                "right-localized+vacuum",
            ],
            Model::Cavity(_) => &["coherent", "fock"],
        }
    }

    fn is_stochastic(solver: Solver) -> bool {
        solver == Solver::Mcwf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Schrodinger,
    Lindblad,
    Mcwf,
    MeanField,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Schrodinger => "schrodinger",
            Solver::Lindblad => "lindblad",
            Solver::Mcwf => "mcwf",
            Solver::MeanField => "meanfield",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Solver::Schrodinger,
            Solver::Lindblad,
            Solver::Mcwf,
            Solver::MeanField,
        ]
        .into_iter()
        .find(|v| v.name() == s)
    }
}

/// Named initial-state recipe with its options.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub recipe: String,
    /// Population imbalance `(n_l − n_r)/N` for `asymmetric`.
    pub asymmetry: f64,
    /// Position width of a localized packet, in 1/k; `None` uses the
    /// harmonic ground-state width of a lattice well.
    pub width: Option<f64>,
    /// Coherent amplitude; `None` means the steady-state field of the
    /// localized atom (full space) or is an error (cavity).
    pub alpha: Option<Complex64>,
    /// Fock level for the cavity `fock` recipe.
    pub photons: usize,
}

/// A complete, validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub model: Model,
    pub solver: Solver,
    pub initial: InitialState,
    pub integrator: IntegratorConfig,
    /// Halve `dt` and compare final observables (deterministic solvers).
    pub convergence_check: bool,
    pub n_traj: usize,
    pub master_seed: u64,
    pub threads: Option<usize>,
    pub outputs: Vec<String>,
    /// `(v0, recoil_ratio)` when two-site couplings were derived from
    /// lattice orbitals.
    pub couplings_from_lattice: Option<(f64, f64)>,
}

fn field_error(field: &str, message: impl Into<String>) -> Error {
    Error::ConfigField {
        field: field.to_string(),
        message: message.into(),
    }
}

fn as_field_error(e: Error, section: &str) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => {
            field_error(&format!("{section}.{name}"), reason)
        }
        other => other,
    }
}

impl Scenario {
    pub fn from_config_str(text: &str) -> Result<Self> {
        let doc = ConfigDoc::parse(text)?;
        let mut r = Reader::new(&doc);

        let name = r.str("scenario", "name")?;
        let description = r.str_opt("scenario", "description").unwrap_or_default();
        let kind = r.str("scenario", "model")?;
        let (model, lattice) = read_model(&mut r, &kind)?;

        let solver = match r.str_opt("scenario", "solver") {
            None => model.default_solver(),
            Some(s) => Solver::parse(&s)
                .ok_or_else(|| field_error("scenario.solver", format!("unknown solver `{s}`")))?,
        };
        if !model.allowed_solvers().contains(&solver) {
            return Err(field_error(
                "scenario.solver",
                format!(
                    "solver `{}` is not available for model `{}`",
                    solver.name(),
                    model.kind()
                ),
            ));
        }

        let recipe = r.str("scenario", "initial_state")?;
        if !model.initial_states().contains(&recipe.as_str()) {
            return Err(field_error(
                "scenario.initial_state",
                format!(
                    "`{recipe}` is not valid for model `{}` (expected one of: {})",
                    model.kind(),
                    model.initial_states().join(", ")
                ),
            ));
        }
        let alpha_re: Option<f64> = r.parse_opt("initial", "alpha_re")?;
        let alpha_im: Option<f64> = r.parse_opt("initial", "alpha_im")?;
        let alpha = match (alpha_re, alpha_im) {
            (None, None) => None,
            (re, im) => Some(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
        };
        let initial = InitialState {
            recipe,
            asymmetry: r.parse_or("initial", "asymmetry", 0.02)?,
            width: r.parse_opt("initial", "width")?,
            alpha,
            photons: r.parse_or("initial", "photons", 0)?,
        };
        validate_initial(&model, &initial)?;

        let integrator = IntegratorConfig {
            dt: r.parse("integrator", "dt")?,
            t_final: r.parse("integrator", "t_final")?,
            record_stride: r.parse_or("integrator", "record_stride", 1)?,
        };
        integrator
            .validate()
            .map_err(|e| as_field_error(e, "integrator"))?;
        let convergence_check = r.parse_or(
            "integrator",
            "convergence_check",
            !Model::is_stochastic(solver),
        )?;

        let n_traj: usize = r.parse_or("ensemble", "n_traj", 1)?;
        if n_traj == 0 {
            return Err(field_error("ensemble.n_traj", "must be >= 1"));
        }
        let master_seed = r.parse_or("ensemble", "master_seed", 0)?;
        let threads: Option<usize> = r.parse_opt("ensemble", "threads")?;
        if threads == Some(0) {
            return Err(field_error("ensemble.threads", "must be >= 1"));
        }

        let outputs: Vec<String> = match r.str_opt("outputs", "observables") {
            None => model
                .default_outputs()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            Some(list) => list
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        };
        if outputs.is_empty() {
            return Err(field_error(
                "outputs.observables",
                "no observables requested",
            ));
        }
        for (i, o) in outputs.iter().enumerate() {
            if !model.available_observables().contains(&o.as_str()) {
                return Err(field_error(
                    "outputs.observables",
                    format!(
                        "`{o}` is not defined for model `{}` (available: {})",
                        model.kind(),
                        model.available_observables().join(", ")
                    ),
                ));
            }
            if outputs[..i].contains(o) {
                return Err(field_error(
                    "outputs.observables",
                    format!("`{o}` listed twice"),
                ));
            }
        }
        r.finish(&SECTIONS)?;

        Ok(Scenario {
            name,
            description,
            model,
            solver,
            initial,
            integrator,
            convergence_check,
            n_traj,
            master_seed,
            threads,
            outputs,
            couplings_from_lattice: lattice,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_config_str(&text)
    }

    /// Resolved configuration, in the same format it is read from; parsing
    /// the result gives back an equal scenario.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[scenario]");
        let _ = writeln!(s, "name = {}", self.name);
        if !self.description.is_empty() {
            let _ = writeln!(s, "description = {}", self.description);
        }
        let _ = writeln!(s, "model = {}", self.model.kind());
        let _ = writeln!(s, "solver = {}", self.solver.name());
        let _ = writeln!(s, "initial_state = {}", self.initial.recipe);
        let _ = writeln!(s, "\n[params]");
        match &self.model {
            Model::Seesaw(p) => {
                let _ = writeln!(s, "omega_x = {:?}", p.omega_x);
                let _ = writeln!(s, "omega_phi = {:?}", p.omega_phi);
                let _ = writeln!(s, "coupling = {:?}", p.coupling);
                let _ = writeln!(s, "cutoff_x = {}", p.cutoff_x);
                let _ = writeln!(s, "cutoff_phi = {}", p.cutoff_phi);
            }
            Model::QubitPair { coupling } => {
                let _ = writeln!(s, "coupling = {coupling:?}");
            }
            Model::TwoSiteQuantum(p) | Model::TwoSiteMeanField(p) => {
                match self.couplings_from_lattice {
                    Some((v0, recoil)) => {
                        let _ = writeln!(s, "v0 = {v0:?}");
                        let _ = writeln!(s, "recoil_ratio = {recoil:?}");
                        let _ = writeln!(s, "# derived tunneling = {:?}", p.tunneling);
                        let _ = writeln!(s, "# derived jtilde = {:?}", p.jtilde);
                    }
                    None => {
                        let _ = writeln!(s, "tunneling = {:?}", p.tunneling);
                        let _ = writeln!(s, "jtilde = {:?}", p.jtilde);
                    }
                }
                let _ = writeln!(s, "u0 = {:?}", p.u0);
                let _ = writeln!(s, "delta_c = {:?}", p.delta_c);
                let _ = writeln!(s, "kappa = {:?}", p.kappa);
                let _ = writeln!(s, "n_atoms = {}", p.n_atoms);
                let _ = writeln!(s, "photon_cutoff = {}", p.photon_cutoff);
            }
            Model::FullSpace(p) => {
                let _ = writeln!(s, "v0 = {:?}", p.v0);
                let _ = writeln!(s, "u0 = {:?}", p.u0);
                let _ = writeln!(s, "delta_c = {:?}", p.delta_c);
                let _ = writeln!(s, "kappa = {:?}", p.kappa);
                let _ = writeln!(s, "recoil_ratio = {:?}", p.recoil_ratio);
                let _ = writeln!(s, "n_momentum = {}", p.n_momentum);
                let _ = writeln!(s, "photon_cutoff = {}", p.photon_cutoff);
            }
            Model::Cavity(p) => {
                let _ = writeln!(s, "kappa = {:?}", p.kappa);
                let _ = writeln!(s, "detuning = {:?}", p.detuning);
                let _ = writeln!(s, "photon_cutoff = {}", p.photon_cutoff);
            }
        }
        let _ = writeln!(s, "\n[initial]");
        let _ = writeln!(s, "asymmetry = {:?}", self.initial.asymmetry);
        if let Some(w) = self.initial.width {
            let _ = writeln!(s, "width = {w:?}");
        }
        if let Some(a) = self.initial.alpha {
            let _ = writeln!(s, "alpha_re = {:?}", a.re);
            let _ = writeln!(s, "alpha_im = {:?}", a.im);
        }
        let _ = writeln!(s, "photons = {}", self.initial.photons);
        let _ = writeln!(s, "\n[integrator]");
        let _ = writeln!(s, "dt = {:?}", self.integrator.dt);
        let _ = writeln!(s, "t_final = {:?}", self.integrator.t_final);
        let _ = writeln!(s, "record_stride = {}", self.integrator.record_stride);
        let _ = writeln!(s, "convergence_check = {}", self.convergence_check);
        let _ = writeln!(s, "\n[ensemble]");
        let _ = writeln!(s, "n_traj = {}", self.n_traj);
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        if let Some(t) = self.threads {
            let _ = writeln!(s, "threads = {t}");
        }
        let _ = writeln!(s, "\n[outputs]");
        let _ = writeln!(s, "observables = {}", self.outputs.join(", "));
        s
    }
}

fn read_model(r: &mut Reader<'_>, kind: &str) -> Result<(Model, Option<(f64, f64)>)> {
    let model = match kind {
        "seesaw" => {
            let p = SeesawParams {
                omega_x: r.parse("params", "omega_x")?,
                omega_phi: r.parse("params", "omega_phi")?,
                coupling: r.parse("params", "coupling")?,
                cutoff_x: r.parse("params", "cutoff_x")?,
                cutoff_phi: r.parse("params", "cutoff_phi")?,
            };
            p.validate().map_err(|e| as_field_error(e, "params"))?;
            Model::Seesaw(p)
        }
        "qubit-pair" => {
            let coupling: f64 = r.parse("params", "coupling")?;
            if !coupling.is_finite() {
                return Err(field_error("params.coupling", "must be finite"));
            }
            Model::QubitPair { coupling }
        }
        "twosite-quantum" | "twosite-meanfield" => {
            let u0: f64 = r.parse("params", "u0")?;
            let lattice = if r.has("params", "v0") {
                if r.has("params", "tunneling") || r.has("params", "jtilde") {
                    return Err(field_error(
                        "params.v0",
                        "give either v0 (couplings from lattice orbitals) or tunneling and jtilde, not both",
                    ));
                }
                let v0: f64 = r.parse("params", "v0")?;
                let recoil: f64 = r.parse("params", "recoil_ratio")?;
                Some((v0, recoil))
            } else {
                None
            };
            let (tunneling, jtilde) = match lattice {
                Some((v0, recoil)) => {
                    let w = compute_wannier_couplings(v0, u0, recoil).map_err(|e| as_field_error(e, "params"))?;
                    (w.tunneling, w.jtilde)
                }
                None => (r.parse("params", "tunneling")?, r.parse("params", "jtilde")?),
            };
            let p = TwoSiteParams {
                tunneling,
                jtilde,
                u0,
                delta_c: r.parse("params", "delta_c")?,
                kappa: r.parse_or("params", "kappa", 1.0)?,
                n_atoms: r.parse("params", "n_atoms")?,
                photon_cutoff: r.parse_or("params", "photon_cutoff", 2)?,
            };
            p.validate().map_err(|e| as_field_error(e, "params"))?;
            let m = if kind == "twosite-quantum" {
                Model::TwoSiteQuantum(p)
            } else {
                Model::TwoSiteMeanField(p)
            };
            return Ok((m, lattice));
        }
        "fullspace-mcwf" => {
            let p = FullSpaceParams {
                v0: r.parse("params", "v0")?,
                u0: r.parse("params", "u0")?,
                delta_c: r.parse("params", "delta_c")?,
                kappa: r.parse_or("params", "kappa", 1.0)?,
                recoil_ratio: r.parse("params", "recoil_ratio")?,
                n_momentum: r.parse("params", "n_momentum")?,
                photon_cutoff: r.parse("params", "photon_cutoff")?,
            };
            p.validate().map_err(|e| as_field_error(e, "params"))?;
            Model::FullSpace(p)
        }
        "damped-cavity" => {
            let p = CavityParams {
                kappa: r.parse_or("params", "kappa", 1.0)?,
                detuning: r.parse_or("params", "detuning", 0.0)?,
                photon_cutoff: r.parse("params", "photon_cutoff")?,
            };
            if !(p.kappa > 0.0) {
                return Err(field_error("params.kappa", "must be > 0"));
            }
            if p.photon_cutoff < 2 {
                return Err(field_error("params.photon_cutoff", "must be >= 2"));
            }
            Model::Cavity(p)
        }
        other => {
            return Err(field_error(
                "scenario.model",
                format!(
                    "unknown model `{other}` (expected seesaw, qubit-pair, twosite-quantum, twosite-meanfield, \
                     fullspace-mcwf or damped-cavity)"
                ),
            ))
        }
    };
    Ok((model, None))
}

fn validate_initial(model: &Model, init: &InitialState) -> Result<()> {
    if !(-1.0..=1.0).contains(&init.asymmetry) {
        return Err(field_error("initial.asymmetry", "must lie in [-1, 1]"));
    }
    if let Some(w) = init.width {
        if !(w > 0.0) {
            return Err(field_error("initial.width", "must be > 0"));
        }
    }
    match model {
        Model::TwoSiteQuantum(p) | Model::TwoSiteMeanField(p)
            if init.recipe == "mott" && p.n_atoms % 2 != 0 =>
        {
            Err(field_error(
                "scenario.initial_state",
                "mott needs an even n_atoms",
            ))
        }
        Model::Cavity(p) if init.recipe == "coherent" && init.alpha.is_none() => Err(field_error(
            "initial.alpha_re",
            format!(
                "coherent start needs alpha_re/alpha_im (cutoff {})",
                p.photon_cutoff
            ),
        )),
        Model::Cavity(p) if init.recipe == "fock" && init.photons >= p.photon_cutoff => Err(
            field_error("initial.photons", "must be below photon_cutoff"),
        ),
        _ => Ok(()),
    }
}
