//! Hamiltonians and jump operators for the seesaw, two-site and
//! full-space models, plus Wannier-derived lattice couplings.
//!
//! Units throughout: ħ = 1 and κ = 1 for the cavity models, lengths in 1/k.

pub mod fullspace;
pub mod seesaw;
pub mod twosite;
pub mod wannier;

pub use fullspace::{build_fullspace_hamiltonian, FullSpaceParams};
pub use seesaw::{build_seesaw_hamiltonian, classify_seesaw_stability, SeesawParams, Stability};
pub use twosite::{
    build_twosite_hamiltonian, eliminated_field_operator, AtomicPreparation, TwoSiteParams,
};
pub use wannier::{compute_wannier_couplings, WannierData};

use crate::hilbert::{HilbertSpace, SparseOperator};

/// Hamiltonian plus cavity-loss jump operator(s) `√(2κ) a` on an
/// `atom ⊗ field` space.
#[derive(Debug, Clone)]
pub struct CavityModel {
    pub hamiltonian: SparseOperator,
    pub jumps: Vec<SparseOperator>,
    pub atom_label: &'static str,
    pub field_label: &'static str,
}

impl CavityModel {
    pub fn space(&self) -> &HilbertSpace {
        self.hamiltonian.space()
    }
}
