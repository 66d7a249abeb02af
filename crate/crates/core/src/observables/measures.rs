use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    destroy, hermitian_spectrum, number, partial_trace, partial_transpose, schmidt_values,
    tensor_product_op, QuantumState, StateVector,
};

/// Negativity `(||rho^{T_A}||_1 − 1)/2` across the split (named factor | rest).
///
/// Normalized pure states take the Schmidt route `((Σ σ_i)² − 1)/2`;
/// everything else goes through the partial-transpose spectrum.
pub fn negativity<S: QuantumState + ?Sized>(state: &S, label: &str) -> Result<f64> {
    state.space().position(label)?;
    match state.as_pure() {
        Some(psi) => {
            psi.require_normalized()?;
            pure_negativity(psi, label)
        }
        None => mixed_negativity(&state.density(), label),
    }
}

pub(crate) fn pure_negativity(psi: &StateVector, label: &str) -> Result<f64> {
    let sv = schmidt_values(psi, label)?;
    let norm2: f64 = sv.iter().map(|s| s * s).sum();
    let sum: f64 = sv.iter().sum();
    Ok(((sum * sum / norm2 - 1.0) / 2.0).max(0.0))
}

/// Sum of the magnitudes of the negative eigenvalues of `rho^{T_A}`.
pub fn mixed_negativity(rho: &crate::hilbert::DensityMatrix, label: &str) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!(
            "density matrix trace {tr} != 1"
        )));
    }
    let pt = partial_transpose(rho, label)?;
    let spectrum = hermitian_spectrum(&pt)?;
    // An empty f64 sum is -0.0.
    Ok(spectrum
        .iter()
        .filter(|&&v| v < 0.0)
        .fold(0.0, |acc, v| acc - v))
}

/// Reduced density matrix of one factor, computed from amplitudes for pure states.
pub(crate) fn reduced_matrix<S: QuantumState + ?Sized>(
    state: &S,
    label: &str,
) -> Result<DMatrix<Complex64>> {
    match state.as_pure() {
        Some(psi) => {
            let m = crate::hilbert::bipartite_amplitudes(psi, label)?;
            Ok(&m * m.adjoint())
        }
        None => Ok(partial_trace(&state.density(), &[label])?.into_matrix()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStatistics {
    pub mean_a: Complex64,
    pub photon_number: f64,
}

pub fn field_statistics<S: QuantumState + ?Sized>(
    state: &S,
    field_label: &str,
) -> Result<FieldStatistics> {
    let space = state.space();
    let dim = space.factor_dim(field_label)?;
    let a = tensor_product_op(space, &[(field_label, &destroy(field_label, dim)?)])?;
    let n = tensor_product_op(space, &[(field_label, &number(field_label, dim)?)])?;
    Ok(FieldStatistics {
        mean_a: state.expect_unchecked(&a),
        photon_number: state.expect_unchecked(&n).re,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteStatistics {
    /// `<n_l − n_r>`.
    pub imbalance: f64,
    /// `<n_l n_r>`.
    pub pair_correlation: f64,
}

/// Site occupations of a fixed-N two-site factor (basis index `k` holds
/// `N − k` atoms on the left).
pub fn site_statistics<S: QuantumState + ?Sized>(
    state: &S,
    atomic_label: &str,
    n_atoms: usize,
) -> Result<SiteStatistics> {
    let dim = state.space().factor_dim(atomic_label)?;
    if dim != n_atoms + 1 {
        return Err(Error::DimensionMismatch {
            expected: n_atoms + 1,
            found: dim,
        });
    }
    let reduced = reduced_matrix(state, atomic_label)?;
    let mut imbalance = 0.0;
    let mut pair = 0.0;
    for k in 0..=n_atoms {
        let p = reduced[(k, k)].re;
        let (nl, nr) = ((n_atoms - k) as f64, k as f64);
        imbalance += p * (nl - nr);
        pair += p * nl * nr;
    }
    Ok(SiteStatistics {
        imbalance,
        pair_correlation: pair,
    })
}

/// How positions are represented on a motional factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionBasis {
    /// Fock oscillator with `x = (a + a†)/√2`.
    Oscillator,
    /// Plane waves `e^{inkx}`, `n = −n_max..=n_max`, periodic over one wavelength.
    PlaneWave,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialStatistics {
    /// Plain mean for oscillators; circular mean `arg<e^{ikx}>` in [−π, π)
    /// for plane waves.
    pub mean_x: f64,
    pub var_x: f64,
    /// `<sin kx>`; only defined for the plane-wave basis.
    pub mean_sin_kx: Option<f64>,
}

pub fn spatial_statistics<S: QuantumState + ?Sized>(
    state: &S,
    motion_label: &str,
    basis: MotionBasis,
) -> Result<SpatialStatistics> {
    let dim = state.space().factor_dim(motion_label)?;
    let reduced = reduced_matrix(state, motion_label)?;
    match basis {
        MotionBasis::Oscillator => {
            let a = destroy(motion_label, dim)?;
            let x = a
                .add(&a.adjoint())?
                .scale_real(std::f64::consts::FRAC_1_SQRT_2);
            let x2 = x.matmul(&x)?;
            let mean = x.trace_with(&reduced).re;
            let second = x2.trace_with(&reduced).re;
            Ok(SpatialStatistics {
                mean_x: mean,
                var_x: second - mean * mean,
                mean_sin_kx: None,
            })
        }
        MotionBasis::PlaneWave => {
            if dim % 2 == 0 {
                return Err(Error::InvalidState(format!(
                    "factor `{motion_label}` has even dimension {dim}; not a symmetric plane-wave ladder"
                )));
            }
            Ok(plane_wave_statistics(&reduced))
        }
    }
}

/// Circular mean and spread of a plane-wave density matrix.
fn plane_wave_statistics(rho: &DMatrix<Complex64>) -> SpatialStatistics {
    let dim = rho.nrows();
    // s_d = Σ_{n−m=d} rho_nm, d = −(dim−1)..=(dim−1)
    let offset = dim - 1;
    let mut s = vec![Complex64::new(0.0, 0.0); 2 * dim - 1];
    for n in 0..dim {
        for m in 0..dim {
            s[n + offset - m] += rho[(n, m)];
        }
    }
    // <e^{ikx}> = Σ_n rho_{n, n+1} = s_{−1}; <sin kx> = Im s_{−1}
    let first = if dim > 1 {
        s[offset - 1]
    } else {
        Complex64::new(0.0, 0.0)
    };
    let mean = wrap(first.arg());

    let grid = 8 * dim;
    let h = 2.0 * PI / grid as f64;
    let mut var = 0.0;
    let mut total = 0.0;
    for g in 0..grid {
        let x = -PI + h * g as f64;
        let density: f64 = s
            .iter()
            .enumerate()
            .map(|(i, sd)| (sd * Complex64::from_polar(1.0, (i as f64 - offset as f64) * x)).re)
            .sum::<f64>()
            / (2.0 * PI);
        let dx = wrap(x - mean);
        var += h * density * dx * dx;
        total += h * density;
    }
    SpatialStatistics {
        mean_x: mean,
        var_x: var / total,
        mean_sin_kx: Some(first.im),
    }
}

/// Maps an angle to [−π, π).
pub(crate) fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, DensityMatrix, HilbertSpace};
    use crate::models::fullspace::{flat_state, localized_state, RIGHT_WELL};
    use crate::models::twosite::{atomic_state, AtomicPreparation};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = HilbertSpace::new([("A", 2), ("B", 2)]).unwrap();
        StateVector::new(s, vec![c(h), c(0.0), c(0.0), c(h)]).unwrap()
    }

    #[test]
    fn bell_negativity_both_routes() {
        let psi = bell();
        assert!((negativity(&psi, "A").unwrap() - 0.5).abs() < 1e-12);
        assert!((negativity(&psi.to_density(), "A").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_no_negativity() {
        let atom = StateVector::normalized(
            HilbertSpace::single("atom", 2).unwrap(),
            vec![c(0.6), c(0.8)],
        )
        .unwrap();
        let psi = atom
            .tensor(&coherent_state(Complex64::new(0.5, 0.2), 15).unwrap())
            .unwrap();
        assert!(negativity(&psi, "atom").unwrap() < 1e-10);
        assert!(negativity(&psi.to_density(), "field").unwrap() < 1e-10);
    }

    #[test]
    fn negativity_rejects_unknown_label_and_bad_trace() {
        assert!(negativity(&bell(), "C").is_err());
        let rho = DensityMatrix::new_unchecked(
            bell().space().clone(),
            bell().to_density().into_matrix() * c(2.0),
        );
        assert!(negativity(&rho, "A").is_err());
    }

    #[test]
    fn vacuum_and_coherent_field_statistics() {
        let vac = coherent_state(c(0.0), 10).unwrap();
        let f = field_statistics(&vac, "field").unwrap();
        assert!(f.mean_a.norm() < 1e-15 && f.photon_number.abs() < 1e-15);
        let coh = coherent_state(c(1.0), 30).unwrap();
        let f = field_statistics(&coh, "field").unwrap();
        assert!((f.mean_a - c(1.0)).norm() < 1e-8 && (f.photon_number - 1.0).abs() < 1e-8);
        assert!(field_statistics(&coh, "cavity").is_err());
    }

    #[test]
    fn site_statistics_cases() {
        let mott = atomic_state(2, AtomicPreparation::Mott).unwrap();
        let s = site_statistics(&mott, "atoms", 2).unwrap();
        assert!(s.imbalance.abs() < 1e-15 && (s.pair_correlation - 1.0).abs() < 1e-15);

        let left = atomic_state(3, AtomicPreparation::AllLeft).unwrap();
        let s = site_statistics(&left, "atoms", 3).unwrap();
        assert!((s.imbalance - 3.0).abs() < 1e-15 && s.pair_correlation.abs() < 1e-15);

        // superfluid: |2,0>, |1,1>, |0,2> with weights 1/4, 1/2, 1/4
        let sf = atomic_state(2, AtomicPreparation::Superfluid).unwrap();
        let s = site_statistics(&sf, "atoms", 2).unwrap();
        assert!(s.imbalance.abs() < 1e-15 && (s.pair_correlation - 0.5).abs() < 1e-15);

        assert!(site_statistics(&sf, "atoms", 3).is_err());
    }

    #[test]
    fn oscillator_ground_state_moments() {
        let vac = StateVector::basis(HilbertSpace::single("x", 12).unwrap(), 0).unwrap();
        let s = spatial_statistics(&vac, "x", MotionBasis::Oscillator).unwrap();
        assert!(s.mean_x.abs() < 1e-15 && (s.var_x - 0.5).abs() < 1e-14);
        assert_eq!(s.mean_sin_kx, None);
    }

    #[test]
    fn localized_packet_moments() {
        let psi = localized_state(61, RIGHT_WELL, 0.15).unwrap();
        let s = spatial_statistics(&psi, "motion", MotionBasis::PlaneWave).unwrap();
        assert!((s.mean_x - RIGHT_WELL).abs() < 1e-9);
        assert!((s.mean_sin_kx.unwrap() + 1.0).abs() < 0.02);
        assert!((s.var_x - 0.15 * 0.15).abs() < 1e-4);
    }

    #[test]
    fn flat_state_has_no_sine_moment() {
        let psi = flat_state(21).unwrap();
        let s = spatial_statistics(&psi, "motion", MotionBasis::PlaneWave).unwrap();
        assert_eq!(s.mean_sin_kx, Some(0.0));
        // uniform density over [−π, π): variance π²/3
        assert!((s.var_x - PI * PI / 3.0).abs() < 1e-3);
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(PI), -PI);
        assert!((wrap(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap(-PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
