use nalgebra::DMatrix;
use num_complex::Complex64;

use super::linalg::hermitian_spectrum;
use super::operator::SparseOperator;
use super::space::HilbertSpace;
use crate::error::{Error, Result};

/// Tolerance on `| ||psi||^2 - 1 |` for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-9;
/// Default tolerance on the norm lost by truncating a coherent state.
pub const COHERENT_TRUNCATION_TOL: f64 = 1e-8;

/// Pure state over a [`HilbertSpace`].
///
/// The `normalized` flag is set by [`StateVector::normalize`] or when the
/// amplitudes passed to [`StateVector::new`] already have unit norm. Code
/// that evolves unnormalized vectors (quantum trajectories between jumps)
/// works on the raw amplitudes and renormalizes explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amps: Vec<Complex64>,
    normalized: bool,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amps.len(),
            });
        }
        let normalized = (norm_sqr(&amps) - 1.0).abs() <= NORM_TOL;
        Ok(Self {
            space,
            amps,
            normalized,
        })
    }

    /// Builds and normalizes; fails on the zero vector.
    pub fn normalized(space: HilbertSpace, amps: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::new(space, amps)?;
        s.normalize()?;
        Ok(s)
    }

    pub fn basis(space: HilbertSpace, index: usize) -> Result<Self> {
        let dim = space.dim();
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(space, amps)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::InvalidState(format!(
                "cannot normalize vector with norm^2 = {n2}"
            )));
        }
        let inv = 1.0 / n2.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= inv);
        self.normalized = true;
        Ok(())
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized {
                norm_sqr: self.norm_sqr(),
            })
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.space.check_same(&other.space)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`, with `self`'s factors first.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let space = self.space.product(&other.space)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Self::new(space, amps)
    }

    /// Linear combination `sum_k c_k |psi_k>` of states on the same space.
    pub fn superpose(terms: &[(Complex64, &StateVector)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidState("empty superposition".into()))?;
        let space = first.1.space.clone();
        let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
        for (c, psi) in terms {
            space.check_same(&psi.space)?;
            for (acc, a) in amps.iter_mut().zip(&psi.amps) {
                *acc += c * a;
            }
        }
        Self::new(space, amps)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityMatrix::new_unchecked(self.space.clone(), &v * v.adjoint())
    }
}

pub(crate) fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Mixed state: Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian to 1e-10, trace one to 1e-9,
    /// eigenvalues no lower than -1e-9.
    pub fn new(space: HilbertSpace, matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::new_unchecked(space, matrix);
        rho.validate()?;
        Ok(rho)
    }

    pub fn new_unchecked(space: HilbertSpace, matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        Self { space, matrix }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.space.dim();
        if self.matrix.nrows() != dim || self.matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.matrix.nrows(),
            });
        }
        let herm = hermitian_deviation(&self.matrix);
        if herm > 1e-10 {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "density matrix trace {tr} != 1"
            )));
        }
        let min = hermitian_spectrum(&self.matrix)?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -1e-9 {
            return Err(Error::InvalidState(format!(
                "density matrix has eigenvalue {min:.3e} < 0"
            )));
        }
        Ok(())
    }

    /// Convex combination of density matrices on a common space.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let space = first.1.space.clone();
        let mut m = DMatrix::zeros(space.dim(), space.dim());
        for (p, rho) in parts {
            space.check_same(&rho.space)?;
            m += &rho.matrix * Complex64::new(*p, 0.0);
        }
        Self::new(space, m)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let space = self.space.product(&other.space)?;
        Ok(Self::new_unchecked(
            space,
            self.matrix.kronecker(&other.matrix),
        ))
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Anything an expectation value can be taken in.
pub trait QuantumState {
    fn space(&self) -> &HilbertSpace;

    /// `<psi|O|psi>` or `Tr(rho O)` without dimension checks.
    fn expect_unchecked(&self, op: &SparseOperator) -> Complex64;

    fn density(&self) -> DensityMatrix;

    /// Pure-state view, when the state is known to be pure.
    fn as_pure(&self) -> Option<&StateVector> {
        None
    }
}

impl QuantumState for StateVector {
    fn space(&self) -> &HilbertSpace {
        &self.space
    }

    fn expect_unchecked(&self, op: &SparseOperator) -> Complex64 {
        op.sandwich(&self.amps, &self.amps)
    }

    fn density(&self) -> DensityMatrix {
        self.to_density()
    }

    fn as_pure(&self) -> Option<&StateVector> {
        Some(self)
    }
}

impl QuantumState for DensityMatrix {
    fn space(&self) -> &HilbertSpace {
        &self.space
    }

    fn expect_unchecked(&self, op: &SparseOperator) -> Complex64 {
        op.trace_with(&self.matrix)
    }

    fn density(&self) -> DensityMatrix {
        self.clone()
    }
}

/// `<psi|O|psi>` for pure states, `Tr(rho O)` for mixed ones.
pub fn expectation_value<S: QuantumState + ?Sized>(
    op: &SparseOperator,
    state: &S,
) -> Result<Complex64> {
    state.space().check_same(op.space())?;
    Ok(state.expect_unchecked(op))
}

/// Coherent state `|alpha>` on a single factor labelled `field`.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<StateVector> {
    coherent_state_with_tolerance(alpha, cutoff, COHERENT_TRUNCATION_TOL)
}

/// Truncated coherent state; errors when truncation removes more than
/// `tolerance` of the norm before renormalization.
pub fn coherent_state_with_tolerance(
    alpha: Complex64,
    cutoff: usize,
    tolerance: f64,
) -> Result<StateVector> {
    coherent_state_on("field", alpha, cutoff, tolerance)
}

pub fn coherent_state_on(
    label: &str,
    alpha: Complex64,
    cutoff: usize,
    tolerance: f64,
) -> Result<StateVector> {
    if cutoff == 0 {
        return Err(Error::param("cutoff", "must be at least 1"));
    }
    let mut amps = Vec::with_capacity(cutoff);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(c);
    for n in 1..cutoff {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    let deficit = 1.0 - norm_sqr(&amps);
    if deficit > tolerance {
        return Err(Error::TruncationExceeded {
            cutoff,
            deficit,
            tolerance,
        });
    }
    StateVector::normalized(HilbertSpace::single(label, cutoff)?, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::operator::{destroy, number};

    #[test]
    fn vacuum_from_zero_amplitude() {
        let v = coherent_state(Complex64::new(0.0, 0.0), 10).unwrap();
        assert_eq!(v.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(v.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn coherent_vacuum_amplitude() {
        let v = coherent_state(Complex64::new(1.0, 0.0), 20).unwrap();
        assert!((v.amplitudes()[0].re - (-0.5f64).exp()).abs() < 1e-10);
        assert!((v.amplitudes()[0].re - 0.606_530_659_712_633_4).abs() < 1e-10);
    }

    #[test]
    fn coherent_truncation_error() {
        // tail mass beyond n = 4 for |alpha|^2 = 4, summed directly:
        // 1 - e^-4 (1 + 4 + 8 + 32/3 + 32/3) = 0.37116...
        let err = coherent_state(Complex64::new(2.0, 0.0), 5).unwrap_err();
        match err {
            Error::TruncationExceeded { deficit, .. } => {
                assert!((deficit - 0.371_163_064_820_127).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(coherent_state(Complex64::new(1.0, 0.0), 0).is_err());
    }

    #[test]
    fn coherent_moments() {
        let v = coherent_state(Complex64::new(1.0, 0.0), 30).unwrap();
        let n = expectation_value(&number("field", 30).unwrap(), &v).unwrap();
        assert!((n.re - 1.0).abs() < 1e-8 && n.im.abs() < 1e-12);
        let a = expectation_value(&destroy("field", 30).unwrap(), &v).unwrap();
        assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn identity_expectation_is_one() {
        let v = coherent_state(Complex64::new(0.3, -0.7), 25).unwrap();
        let id = SparseOperator::identity(v.space().clone());
        assert!((expectation_value(&id, &v).unwrap() - 1.0).norm() < 1e-12);
        assert!((expectation_value(&id, &v.to_density()).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let v = coherent_state(Complex64::new(0.3, 0.0), 10).unwrap();
        assert!(expectation_value(&number("field", 9).unwrap(), &v).is_err());
    }

    #[test]
    fn density_validation() {
        let s = HilbertSpace::single("q", 2).unwrap();
        let bad = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.5, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-0.5, 0.0),
            ],
        );
        assert!(DensityMatrix::new(s.clone(), bad).is_err());
        let good = DMatrix::from_diagonal_element(2, 2, Complex64::new(0.5, 0.0));
        assert!(DensityMatrix::new(s, good).is_ok());
    }

    #[test]
    fn normalized_flag() {
        let s = HilbertSpace::single("q", 2).unwrap();
        let v = StateVector::new(
            s.clone(),
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        assert!(!v.is_normalized());
        assert!(v.require_normalized().is_err());
        let v = StateVector::normalized(s, v.into_amplitudes()).unwrap();
        assert!(v.is_normalized());
        assert!((v.norm_sqr() - 1.0).abs() < 1e-15);
    }
}
