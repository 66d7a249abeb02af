//! Single atom on one wavelength of the pump lattice, coupled to the cavity.
//!
//! Units: ħ = κ = 1, positions in 1/k. The motional factor is spanned by
//! plane waves `e^{i n kx}`, `n = −n_max..=n_max`, basis index `n + n_max`.
//! Couplings that would leave the retained range are dropped.
//!
//! ```text
//! H = (r/2) n² + V₀ sin²(kx) − (Δ_c − U₀) a†a + √(V₀U₀) sin(kx)(a + a†)
//! c = √(2κ) a,   r = ħk²/(mκ)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use super::CavityModel;
use crate::error::{Error, Result};
use crate::hilbert::{
    create, destroy, number, tensor_product_op, HilbertSpace, SparseOperator, StateVector,
};

pub const MOTION_LABEL: &str = "motion";
pub const FIELD_LABEL: &str = "field";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullSpaceParams {
    pub v0: f64,
    pub u0: f64,
    pub delta_c: f64,
    pub kappa: f64,
    /// `ħk²/(mκ)`.
    pub recoil_ratio: f64,
    /// Number of plane-wave modes; odd, at least 9.
    pub n_momentum: usize,
    pub photon_cutoff: usize,
}

impl FullSpaceParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("v0", self.v0), ("u0", self.u0), ("delta_c", self.delta_c)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if self.v0 * self.u0 < 0.0 {
            return Err(Error::param(
                "v0",
                "v0 and u0 must share a sign so that sqrt(v0*u0) is real",
            ));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::param("kappa", "must be > 0"));
        }
        if !(self.recoil_ratio > 0.0) {
            return Err(Error::param("recoil_ratio", "must be > 0"));
        }
        if self.n_momentum < 9 || self.n_momentum % 2 == 0 {
            return Err(Error::param("n_momentum", "must be odd and >= 9"));
        }
        if self.photon_cutoff < 1 {
            return Err(Error::param("photon_cutoff", "must be >= 1"));
        }
        Ok(())
    }

    pub fn n_max(&self) -> i64 {
        (self.n_momentum / 2) as i64
    }

    /// Scattering amplitude `√(V₀U₀)` (positive root).
    pub fn scattering_coupling(&self) -> f64 {
        (self.v0 * self.u0).sqrt()
    }

    pub fn effective_detuning(&self) -> f64 {
        self.delta_c - self.u0
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new([
            (MOTION_LABEL, self.n_momentum),
            (FIELD_LABEL, self.photon_cutoff),
        ])
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn motion_space(n_momentum: usize) -> Result<HilbertSpace> {
    HilbertSpace::single(MOTION_LABEL, n_momentum)
}

/// `e^{i s kx}`: shifts momentum by `s` units, dropping modes pushed out of range.
pub fn momentum_shift(n_momentum: usize, s: i64) -> Result<SparseOperator> {
    let dim = n_momentum as i64;
    let entries = (0..dim)
        .filter(|j| (0..dim).contains(&(j + s)))
        .map(|j| ((j + s) as usize, j as usize, c(1.0, 0.0)));
    SparseOperator::from_triplets(motion_space(n_momentum)?, entries)
}

/// `sin(kx)` on the plane-wave ladder: `<n+1|sin|n> = −i/2`, `<n−1|sin|n> = +i/2`.
pub fn sin_kx(n_momentum: usize) -> Result<SparseOperator> {
    let up = momentum_shift(n_momentum, 1)?;
    let down = momentum_shift(n_momentum, -1)?;
    up.scale(c(0.0, -0.5)).add(&down.scale(c(0.0, 0.5)))
}

pub fn cos_kx(n_momentum: usize) -> Result<SparseOperator> {
    Ok(momentum_shift(n_momentum, 1)?
        .add(&momentum_shift(n_momentum, -1)?)?
        .scale_real(0.5))
}

/// Momentum `p/(ħk)`, diagonal in the plane-wave basis.
pub fn momentum_op(n_momentum: usize) -> Result<SparseOperator> {
    let n_max = (n_momentum / 2) as i64;
    let diag: Vec<Complex64> = (0..n_momentum as i64)
        .map(|j| c((j - n_max) as f64, 0.0))
        .collect();
    SparseOperator::diagonal(motion_space(n_momentum)?, &diag)
}

/// Atomic part `p²/2m + V₀ sin²(kx)` on the motional factor.
pub fn atomic_hamiltonian(p: &FullSpaceParams) -> Result<SparseOperator> {
    let n_max = p.n_max();
    let diag: Vec<Complex64> = (0..p.n_momentum as i64)
        .map(|j| {
            let n = (j - n_max) as f64;
            c(0.5 * p.recoil_ratio * n * n + 0.5 * p.v0, 0.0)
        })
        .collect();
    let kinetic = SparseOperator::diagonal(motion_space(p.n_momentum)?, &diag)?;
    // sin² = 1/2 − (e^{2ikx} + e^{−2ikx})/4
    let lattice = momentum_shift(p.n_momentum, 2)?
        .add(&momentum_shift(p.n_momentum, -2)?)?
        .scale_real(-0.25 * p.v0);
    kinetic.add(&lattice)
}

pub fn build_fullspace_hamiltonian(p: &FullSpaceParams) -> Result<CavityModel> {
    p.validate()?;
    let space = p.space()?;
    let a = destroy(FIELD_LABEL, p.photon_cutoff)?;
    let quad = a.add(&create(FIELD_LABEL, p.photon_cutoff)?)?;

    let atomic = tensor_product_op(&space, &[(MOTION_LABEL, &atomic_hamiltonian(p)?)])?;
    let cavity = tensor_product_op(
        &space,
        &[(
            FIELD_LABEL,
            &number(FIELD_LABEL, p.photon_cutoff)?.scale_real(-p.effective_detuning()),
        )],
    )?;
    let scatter = tensor_product_op(
        &space,
        &[
            (
                MOTION_LABEL,
                &sin_kx(p.n_momentum)?.scale_real(p.scattering_coupling()),
            ),
            (FIELD_LABEL, &quad),
        ],
    )?;
    let hamiltonian = atomic.add(&cavity)?.add(&scatter)?;
    let jump = tensor_product_op(&space, &[(FIELD_LABEL, &a)])?.scale_real((2.0 * p.kappa).sqrt());
    Ok(CavityModel {
        hamiltonian,
        jumps: vec![jump],
        field_label: FIELD_LABEL,
        atom_label: MOTION_LABEL,
    })
}

/// Flat atomic wavefunction: the zero-momentum mode.
pub fn flat_state(n_momentum: usize) -> Result<StateVector> {
    StateVector::basis(motion_space(n_momentum)?, n_momentum / 2)
}

/// Gaussian wave packet centred at `kx = center` with position standard
/// deviation `width` (in 1/k), expanded on the retained plane waves.
pub fn localized_state(n_momentum: usize, center: f64, width: f64) -> Result<StateVector> {
    if !(width > 0.0) {
        return Err(Error::param("width", "must be > 0"));
    }
    let n_max = (n_momentum / 2) as i64;
    // |psi(x)|² with standard deviation w  <=>  psi_n ∝ exp(−w² n²) e^{−i n x0}
    let amps = (0..n_momentum as i64)
        .map(|j| {
            let n = (j - n_max) as f64;
            Complex64::from_polar((-width * width * n * n).exp(), -n * center)
        })
        .collect();
    StateVector::normalized(motion_space(n_momentum)?, amps)
}

/// Position of the right-hand lattice well, where `sin(kx) = −1`.
pub const RIGHT_WELL: f64 = -PI / 2.0;
pub const LEFT_WELL: f64 = PI / 2.0;

/// Steady-state field amplitude for a given `<sin kx>`:
/// `α = −i √(V₀U₀) <sin kx> / (κ − i(Δ_c − U₀))`.
pub fn steady_field_amplitude(p: &FullSpaceParams, mean_sin: f64) -> Complex64 {
    c(0.0, -p.scattering_coupling() * mean_sin) / c(p.kappa, -p.effective_detuning())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::hermitian_spectrum;

    fn fig5() -> FullSpaceParams {
        FullSpaceParams {
            v0: -6.7,
            u0: -1.7,
            delta_c: -12.0,
            kappa: 1.0,
            recoil_ratio: 1.0 / 20.0,
            n_momentum: 21,
            photon_cutoff: 4,
        }
    }

    #[test]
    fn free_spectrum_is_kinetic_plus_photons() {
        let p = FullSpaceParams {
            v0: 0.0,
            u0: 0.0,
            n_momentum: 9,
            photon_cutoff: 3,
            ..fig5()
        };
        let m = build_fullspace_hamiltonian(&p).unwrap();
        let spec = hermitian_spectrum(&m.hamiltonian.to_dense()).unwrap();
        let mut expected: Vec<f64> = (-4..=4)
            .flat_map(|n: i64| {
                (0..3).map(move |k| 0.5 * p.recoil_ratio * (n * n) as f64 - p.delta_c * k as f64)
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in spec.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sin_matrix_elements() {
        let s = sin_kx(9).unwrap();
        for j in 0..8 {
            assert_eq!(s.get(j + 1, j), c(0.0, -0.5));
            assert_eq!(s.get(j, j + 1), c(0.0, 0.5));
        }
        assert!(s.is_hermitian(0.0));
    }

    #[test]
    fn sin_matches_position_quadrature() {
        // <m|sin|n> = (1/2π) ∫ e^{−imx} sin x e^{inx} dx on a fine grid
        let s = sin_kx(9).unwrap();
        let grid = 512;
        for m in 0..9i64 {
            for n in 0..9i64 {
                let mut acc = Complex64::new(0.0, 0.0);
                for g in 0..grid {
                    let x = -PI + 2.0 * PI * g as f64 / grid as f64;
                    acc += Complex64::from_polar(1.0, ((n - m) as f64) * x) * x.sin();
                }
                acc /= grid as f64;
                assert!((acc - s.get(m as usize, n as usize)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fig5_is_hermitian_with_real_coupling() {
        let p = fig5();
        let m = build_fullspace_hamiltonian(&p).unwrap();
        assert!(m.hamiltonian.is_hermitian(1e-12));
        assert!((p.scattering_coupling() - 11.39f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_complex_coupling_and_even_basis() {
        let p = FullSpaceParams { u0: 1.7, ..fig5() };
        assert!(build_fullspace_hamiltonian(&p).is_err());
        let p = FullSpaceParams {
            n_momentum: 10,
            ..fig5()
        };
        assert!(build_fullspace_hamiltonian(&p).is_err());
        let p = FullSpaceParams {
            n_momentum: 7,
            ..fig5()
        };
        assert!(build_fullspace_hamiltonian(&p).is_err());
    }

    #[test]
    fn localized_packet_sits_in_the_well() {
        let psi = localized_state(41, RIGHT_WELL, 0.2).unwrap();
        let s = sin_kx(41).unwrap();
        let mean = s.sandwich(psi.amplitudes(), psi.amplitudes()).re;
        // <sin> = −exp(−w²/2) for a narrow Gaussian
        assert!((mean + (-0.02f64).exp()).abs() < 1e-6);
    }
}
