//! Particle on a tilting seesaw, linearized into two position-coupled
//! oscillators.
//!
//! ```text
//! H = ω_x a_x†a_x + ω_φ a_φ†a_φ − (J/4)(a_φ† + a_φ)(a_x† + a_x)     (ħ = 1)
//! ```

use crate::error::{Error, Result};
use crate::hilbert::{
    create, destroy, number, tensor_product_op, HilbertSpace, SparseOperator, StateVector,
};

pub const X_LABEL: &str = "x";
pub const PHI_LABEL: &str = "phi";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawParams {
    pub omega_x: f64,
    pub omega_phi: f64,
    pub coupling: f64,
    pub cutoff_x: usize,
    pub cutoff_phi: usize,
}

impl SeesawParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_x > 0.0) {
            return Err(Error::param("omega_x", "must be > 0"));
        }
        if !(self.omega_phi > 0.0) {
            return Err(Error::param("omega_phi", "must be > 0"));
        }
        if !self.coupling.is_finite() {
            return Err(Error::param("coupling", "must be finite"));
        }
        if self.cutoff_x < 2 {
            return Err(Error::param("cutoff_x", "must be >= 2"));
        }
        if self.cutoff_phi < 2 {
            return Err(Error::param("cutoff_phi", "must be >= 2"));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new([(X_LABEL, self.cutoff_x), (PHI_LABEL, self.cutoff_phi)])
    }
}

pub fn build_seesaw_hamiltonian(p: &SeesawParams) -> Result<SparseOperator> {
    p.validate()?;
    let space = p.space()?;
    let nx = number(X_LABEL, p.cutoff_x)?;
    let nphi = number(PHI_LABEL, p.cutoff_phi)?;
    let qx = quadrature_sum(X_LABEL, p.cutoff_x)?;
    let qphi = quadrature_sum(PHI_LABEL, p.cutoff_phi)?;

    let free = tensor_product_op(&space, &[(X_LABEL, &nx.scale_real(p.omega_x))])?.add(
        &tensor_product_op(&space, &[(PHI_LABEL, &nphi.scale_real(p.omega_phi))])?,
    )?;
    let coupling = tensor_product_op(&space, &[(X_LABEL, &qx), (PHI_LABEL, &qphi)])?
        .scale_real(-p.coupling / 4.0);
    free.add(&coupling)
}

/// `a + a†` on a single factor.
fn quadrature_sum(label: &str, dim: usize) -> Result<SparseOperator> {
    destroy(label, dim)?.add(&create(label, dim)?)
}

/// Position quadrature `x = (a + a†)/√2` of the named oscillator, embedded
/// in the seesaw space.
pub fn position_operator(p: &SeesawParams, label: &str) -> Result<SparseOperator> {
    let space = p.space()?;
    let dim = space.factor_dim(label)?;
    let x = quadrature_sum(label, dim)?.scale_real(std::f64::consts::FRAC_1_SQRT_2);
    tensor_product_op(&space, &[(label, &x)])
}

/// Product of the two uncoupled oscillator ground states, `|0>_x |0>_φ`.
pub fn product_ground_state(p: &SeesawParams) -> Result<StateVector> {
    StateVector::basis(p.space()?, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

/// Classical stability of the balanced point `x = φ = 0`: unstable when
/// `J > ω_x ω_φ`, marginal at equality (relative tolerance 1e-12).
pub fn classify_seesaw_stability(omega_x: f64, omega_phi: f64, coupling: f64) -> Result<Stability> {
    if !(omega_x > 0.0) {
        return Err(Error::param("omega_x", "must be > 0"));
    }
    if !(omega_phi > 0.0) {
        return Err(Error::param("omega_phi", "must be > 0"));
    }
    let threshold = omega_x * omega_phi;
    if (coupling - threshold).abs() <= 1e-12 * threshold {
        Ok(Stability::Marginal)
    } else if coupling > threshold {
        Ok(Stability::Unstable)
    } else {
        Ok(Stability::Stable)
    }
}
