//! Two lattice sites coupled to one lossy cavity mode.
//!
//! Atoms live in the fixed-N symmetric sector `|n_l, N − n_l>`, basis index
//! `k = N − n_l` (index 0 is every atom on the left site). The full space
//! is `atoms[N+1] ⊗ field[photon_cutoff]`:
//!
//! ```text
//! H = J (b_l†b_r + b_r†b_l) − (Δ_c − U₀ N) a†a + J̃ (a + a†)(n_l − n_r)
//! c = √(2κ) a
//! ```

use num_complex::Complex64;

use super::CavityModel;
use crate::error::{Error, Result};
use crate::hilbert::{
    create, destroy, number, tensor_product_op, HilbertSpace, SparseOperator, StateVector,
};

pub const ATOMS_LABEL: &str = "atoms";
pub const FIELD_LABEL: &str = "field";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteParams {
    /// Tunneling between the wells.
    pub tunneling: f64,
    /// Cavity coupling `J̃ = J̃_ll = −J̃_rr`.
    pub jtilde: f64,
    pub u0: f64,
    pub delta_c: f64,
    pub kappa: f64,
    pub n_atoms: usize,
    pub photon_cutoff: usize,
}

impl TwoSiteParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tunneling", self.tunneling),
            ("jtilde", self.jtilde),
            ("u0", self.u0),
            ("delta_c", self.delta_c),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if !(self.kappa > 0.0) {
            return Err(Error::param("kappa", "must be > 0"));
        }
        if self.n_atoms < 1 {
            return Err(Error::param("n_atoms", "must be >= 1"));
        }
        if self.photon_cutoff < 2 {
            return Err(Error::param("photon_cutoff", "must be >= 2"));
        }
        Ok(())
    }

    /// Effective cavity detuning `Δ_c − U₀ N`.
    pub fn effective_detuning(&self) -> f64 {
        self.delta_c - self.u0 * self.n_atoms as f64
    }

    pub fn atomic_dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new([
            (ATOMS_LABEL, self.atomic_dim()),
            (FIELD_LABEL, self.photon_cutoff),
        ])
    }

    pub fn atomic_space(&self) -> Result<HilbertSpace> {
        HilbertSpace::single(ATOMS_LABEL, self.atomic_dim())
    }
}

/// Occupation of the left site for atomic basis index `k`.
pub fn left_occupation(n_atoms: usize, k: usize) -> usize {
    n_atoms - k
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(n_l, n_r)` on the atomic factor alone.
pub fn site_number_ops(n_atoms: usize) -> Result<(SparseOperator, SparseOperator)> {
    let space = HilbertSpace::single(ATOMS_LABEL, n_atoms + 1)?;
    let nl: Vec<Complex64> = (0..=n_atoms).map(|k| real((n_atoms - k) as f64)).collect();
    let nr: Vec<Complex64> = (0..=n_atoms).map(|k| real(k as f64)).collect();
    Ok((
        SparseOperator::diagonal(space.clone(), &nl)?,
        SparseOperator::diagonal(space, &nr)?,
    ))
}

/// `n_l − n_r` on the atomic factor alone.
pub fn imbalance_op(n_atoms: usize) -> Result<SparseOperator> {
    let (nl, nr) = site_number_ops(n_atoms)?;
    nl.sub(&nr)
}

/// `b_l†b_r + b_r†b_l` on the atomic factor alone.
pub fn hopping_op(n_atoms: usize) -> Result<SparseOperator> {
    let space = HilbertSpace::single(ATOMS_LABEL, n_atoms + 1)?;
    // b_l†b_r |n_l, n_r> = sqrt((n_l + 1) n_r) |n_l + 1, n_r − 1>, i.e. k -> k − 1
    let mut entries = Vec::with_capacity(2 * n_atoms);
    for k in 1..=n_atoms {
        let nl = (n_atoms - k) as f64;
        let nr = k as f64;
        let amp = real(((nl + 1.0) * nr).sqrt());
        entries.push((k - 1, k, amp));
        entries.push((k, k - 1, amp));
    }
    SparseOperator::from_triplets(space, entries)
}

pub fn build_twosite_hamiltonian(p: &TwoSiteParams) -> Result<CavityModel> {
    p.validate()?;
    let space = p.space()?;
    let n = p.n_atoms;
    let a = destroy(FIELD_LABEL, p.photon_cutoff)?;
    let quad = a.add(&create(FIELD_LABEL, p.photon_cutoff)?)?;

    let hop = tensor_product_op(
        &space,
        &[(ATOMS_LABEL, &hopping_op(n)?.scale_real(p.tunneling))],
    )?;
    let cavity = tensor_product_op(
        &space,
        &[(
            FIELD_LABEL,
            &number(FIELD_LABEL, p.photon_cutoff)?.scale_real(-p.effective_detuning()),
        )],
    )?;
    let coupling = tensor_product_op(
        &space,
        &[
            (ATOMS_LABEL, &imbalance_op(n)?.scale_real(p.jtilde)),
            (FIELD_LABEL, &quad),
        ],
    )?;
    let hamiltonian = hop.add(&cavity)?.add(&coupling)?;
    let jump = tensor_product_op(&space, &[(FIELD_LABEL, &a)])?.scale_real((2.0 * p.kappa).sqrt());
    Ok(CavityModel {
        hamiltonian,
        jumps: vec![jump],
        field_label: FIELD_LABEL,
        atom_label: ATOMS_LABEL,
    })
}

/// Cavity field slaved to the atoms in the bad-cavity limit, acting on the
/// atomic sector only:
///
/// `a_eff = −i J̃ / (κ − i(Δ_c − U₀N)) · (n_l − n_r)`
pub fn eliminated_field_operator(p: &TwoSiteParams) -> Result<SparseOperator> {
    if !(p.kappa > 0.0) {
        return Err(Error::param("kappa", "must be > 0"));
    }
    if p.n_atoms < 1 {
        return Err(Error::param("n_atoms", "must be >= 1"));
    }
    Ok(imbalance_op(p.n_atoms)?.scale(eliminated_field_prefactor(p)))
}

/// Scalar prefactor `−i J̃ / (κ − i(Δ_c − U₀N))`.
pub fn eliminated_field_prefactor(p: &TwoSiteParams) -> Complex64 {
    Complex64::new(0.0, -p.jtilde) / Complex64::new(p.kappa, -p.effective_detuning())
}

/// Fixed-N atomic states used as initial conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomicPreparation {
    /// Every atom in the even superposition of both wells.
    Superfluid,
    /// Exactly `N/2` atoms per well; requires even `N`.
    Mott,
    /// All atoms on the left site.
    AllLeft,
    /// Every atom in `√p_l |l> + √p_r |r>` with `p_l − p_r` = given fraction.
    Imbalanced(f64),
}

/// Atomic amplitudes over the fixed-N basis for a preparation.
pub fn atomic_state(n_atoms: usize, prep: AtomicPreparation) -> Result<StateVector> {
    let space = HilbertSpace::single(ATOMS_LABEL, n_atoms + 1)?;
    match prep {
        AtomicPreparation::Mott => {
            if n_atoms % 2 != 0 {
                return Err(Error::param(
                    "initial_state",
                    "Mott state needs an even atom number",
                ));
            }
            StateVector::basis(space, n_atoms / 2)
        }
        AtomicPreparation::AllLeft => StateVector::basis(space, 0),
        AtomicPreparation::Superfluid => atomic_state(n_atoms, AtomicPreparation::Imbalanced(0.0)),
        AtomicPreparation::Imbalanced(fraction) => {
            if !(-1.0..=1.0).contains(&fraction) {
                return Err(Error::param("imbalance", "fraction must lie in [-1, 1]"));
            }
            let pl = (1.0 + fraction) / 2.0;
            let pr = (1.0 - fraction) / 2.0;
            // (√p_l b_l† + √p_r b_r†)^N / √N! |0>: binomial amplitudes.
            // Every sum below is a commutative pair so that p_l = p_r gives
            // bitwise mirror-symmetric amplitudes.
            let log_pow = |count: usize, p: f64| {
                if count == 0 {
                    0.0
                } else {
                    count as f64 * p.ln()
                }
            };
            let amps = (0..=n_atoms)
                .map(|k| {
                    let nl = n_atoms - k;
                    let log_mag =
                        0.5 * (ln_binomial(n_atoms, k) + (log_pow(nl, pl) + log_pow(k, pr)));
                    real(log_mag.exp())
                })
                .collect();
            StateVector::normalized(space, amps)
        }
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let lf = |m: usize| (1..=m).map(|i| (i as f64).ln()).sum::<f64>();
    lf(n) - (lf(k) + lf(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::hermitian_spectrum;

    fn fig4() -> TwoSiteParams {
        TwoSiteParams {
            tunneling: 0.01,
            jtilde: 1.6,
            u0: -2.0,
            delta_c: -6.0,
            kappa: 1.0,
            n_atoms: 2,
            photon_cutoff: 8,
        }
    }

    #[test]
    fn fig4_builds_hermitian() {
        let m = build_twosite_hamiltonian(&fig4()).unwrap();
        assert!(m.hamiltonian.is_hermitian(1e-12));
        assert_eq!(m.hamiltonian.dim(), 3 * 8);
        assert!((fig4().effective_detuning() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn conserves_atom_number() {
        // N̂ on the fixed-N sector is N·1; check the commutator with the
        // explicit n_l + n_r instead of assuming it
        let p = fig4();
        let m = build_twosite_hamiltonian(&p).unwrap();
        let (nl, nr) = site_number_ops(p.n_atoms).unwrap();
        let total = tensor_product_op(&p.space().unwrap(), &[(ATOMS_LABEL, &nl.add(&nr).unwrap())])
            .unwrap();
        let comm = m.hamiltonian.commutator(&total).unwrap();
        assert_eq!(comm.nnz(), 0);
    }

    #[test]
    fn single_atom_coupling_is_projector_difference() {
        let d = imbalance_op(1).unwrap();
        assert_eq!(d.get(0, 0), real(1.0));
        assert_eq!(d.get(1, 1), real(-1.0));
        assert_eq!(d.nnz(), 2);
    }

    #[test]
    fn hopping_elements() {
        let h = hopping_op(2).unwrap();
        // |1,1> -> |2,0>: sqrt(2·1)
        assert!((h.get(0, 1).re - 2f64.sqrt()).abs() < 1e-15);
        assert!((h.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn decoupled_when_jtilde_zero() {
        let mut p = fig4();
        p.jtilde = 0.0;
        let m = build_twosite_hamiltonian(&p).unwrap();
        let spec = hermitian_spectrum(&m.hamiltonian.to_dense()).unwrap();
        let atomic =
            hermitian_spectrum(&hopping_op(2).unwrap().scale_real(p.tunneling).to_dense()).unwrap();
        let mut expected: Vec<f64> = atomic
            .iter()
            .flat_map(|e| (0..p.photon_cutoff).map(move |n| e + 2.0 * n as f64))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in spec.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mott_is_null_for_eliminated_field() {
        let p = fig4();
        let a_eff = eliminated_field_operator(&p).unwrap();
        let mott = atomic_state(2, AtomicPreparation::Mott).unwrap();
        let out = a_eff.apply(mott.amplitudes()).unwrap();
        assert!(out.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn single_atom_photon_number_is_state_independent() {
        let p = TwoSiteParams {
            n_atoms: 1,
            ..fig4()
        };
        let a_eff = eliminated_field_operator(&p).unwrap();
        let nph = a_eff.adjoint().matmul(&a_eff).unwrap();
        let d = p.effective_detuning();
        let expected = p.jtilde * p.jtilde / (p.kappa * p.kappa + d * d);
        assert!((nph.get(0, 0).re - expected).abs() < 1e-14);
        assert!((nph.get(1, 1).re - expected).abs() < 1e-14);
        assert_eq!(nph.nnz(), 2);
    }

    #[test]
    fn all_left_eigenvalue() {
        let p = TwoSiteParams {
            n_atoms: 3,
            ..fig4()
        };
        let a_eff = eliminated_field_operator(&p).unwrap();
        let n = p.n_atoms as f64;
        let expected =
            Complex64::new(0.0, -p.jtilde * n) / Complex64::new(p.kappa, -p.effective_detuning());
        assert!((a_eff.get(0, 0) - expected).norm() < 1e-14);
    }

    #[test]
    fn superfluid_amplitudes() {
        let sf = atomic_state(2, AtomicPreparation::Superfluid).unwrap();
        let a = sf.amplitudes();
        assert!((a[0].re - 0.5).abs() < 1e-15);
        assert!((a[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[2].re - 0.5).abs() < 1e-15);
        // exact mirror symmetry matters for the mean-field stationarity
        assert_eq!(a[0], a[2]);
        assert!(atomic_state(3, AtomicPreparation::Mott).is_err());
    }

    #[test]
    fn imbalanced_preparation_has_requested_imbalance() {
        let psi = atomic_state(4, AtomicPreparation::Imbalanced(0.02)).unwrap();
        let d = imbalance_op(4).unwrap();
        let val = d.sandwich(psi.amplitudes(), psi.amplitudes()).re;
        assert!((val - 0.08).abs() < 1e-12);
    }
}
