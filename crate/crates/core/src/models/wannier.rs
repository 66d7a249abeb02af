//! Tight-binding couplings from harmonic (Gaussian) Wannier orbitals.
//!
//! Each well of `V₀ sin²(kx)` (V₀ < 0) is expanded to second order about
//! its minimum, giving a Gaussian ground orbital. The left orbital sits at
//! `kx = +π/2`, the right one at `kx = −π/2`. The two Gaussians overlap, so
//! they are symmetrically orthogonalized before the matrix elements
//! are taken. All integrals are periodic trapezoid sums over one
//! wavelength, which converge spectrally for smooth periodic integrands.

use std::f64::consts::PI;

use super::fullspace::{LEFT_WELL, RIGHT_WELL};
use crate::error::{Error, Result};

const GRID: usize = 4096;
const IMAGES: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WannierData {
    /// Tunneling `<w_l| p²/2m + V₀ sin²(kx) |w_r>`.
    pub tunneling: f64,
    /// `<w_l| √(U₀V₀) sin(kx) |w_l>`.
    pub jtilde: f64,
    /// `<w_r| √(U₀V₀) sin(kx) |w_r>`, equal to `−jtilde` by symmetry.
    pub jtilde_right: f64,
    /// On-site energy `<w_l| p²/2m + V₀ sin²(kx) |w_l>`.
    pub onsite_energy: f64,
    /// Position standard deviation of the Gaussian orbital, in 1/k.
    pub gaussian_width: f64,
    /// Harmonic frequency of a well, in units of κ.
    pub harmonic_frequency: f64,
}

/// Periodized Gaussian orbital and its derivative on the quadrature grid.
fn orbital(center: f64, width: f64) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * PI / GRID as f64;
    let mut psi = vec![0.0; GRID];
    let mut dpsi = vec![0.0; GRID];
    for g in 0..GRID {
        let x = -PI + h * g as f64;
        for m in -IMAGES..=IMAGES {
            let u = x - center + 2.0 * PI * m as f64;
            let val = (-u * u / (4.0 * width * width)).exp();
            psi[g] += val;
            dpsi[g] += -u / (2.0 * width * width) * val;
        }
    }
    let norm = (h * psi.iter().map(|v| v * v).sum::<f64>()).sqrt();
    psi.iter_mut().for_each(|v| *v /= norm);
    dpsi.iter_mut().for_each(|v| *v /= norm);
    (psi, dpsi)
}

pub fn compute_wannier_couplings(v0: f64, u0: f64, recoil_ratio: f64) -> Result<WannierData> {
    if !(v0 < 0.0) {
        return Err(Error::param(
            "v0",
            "Wannier couplings need a red-detuned lattice (v0 < 0)",
        ));
    }
    if !(u0 < 0.0) {
        return Err(Error::param("u0", "Wannier couplings need u0 < 0"));
    }
    if !(recoil_ratio > 0.0) {
        return Err(Error::param("recoil_ratio", "must be > 0"));
    }
    if v0.abs() < recoil_ratio {
        return Err(Error::param(
            "v0",
            format!("lattice depth {} is below the recoil scale {recoil_ratio}; harmonic orbitals are invalid", v0.abs()),
        ));
    }

    // V ≈ V₀ + |V₀| u² near a minimum: spring 2|V₀|, mass 1/r
    let omega = (2.0 * v0.abs() * recoil_ratio).sqrt();
    let width = (recoil_ratio / (2.0 * omega)).sqrt();

    let (wl, dwl) = orbital(LEFT_WELL, width);
    let (wr, dwr) = orbital(RIGHT_WELL, width);
    let h = 2.0 * PI / GRID as f64;
    let xs: Vec<f64> = (0..GRID).map(|g| -PI + h * g as f64).collect();
    let overlap = h * wl.iter().zip(&wr).map(|(a, b)| a * b).sum::<f64>();

    // symmetric orthogonalization S^{-1/2} for the 2×2 overlap matrix
    let p = 1.0 / (1.0 + overlap).sqrt();
    let q = 1.0 / (1.0 - overlap).sqrt();
    let (ca, cb) = ((p + q) / 2.0, (p - q) / 2.0);
    let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| ca * x + cb * y).collect()
    };
    let (ol, dol) = (mix(&wl, &wr), mix(&dwl, &dwr));
    let (or, dor) = (mix(&wr, &wl), mix(&dwr, &dwl));

    // <f|H|g> with the kinetic term integrated by parts
    let hamiltonian_element = |f: &[f64], df: &[f64], g: &[f64], dg: &[f64]| -> f64 {
        h * (0..GRID)
            .map(|i| 0.5 * recoil_ratio * df[i] * dg[i] + v0 * xs[i].sin().powi(2) * f[i] * g[i])
            .sum::<f64>()
    };
    let sin_element =
        |f: &[f64]| -> f64 { h * (0..GRID).map(|i| xs[i].sin() * f[i] * f[i]).sum::<f64>() };

    let coupling = (v0 * u0).sqrt();
    Ok(WannierData {
        tunneling: hamiltonian_element(&ol, &dol, &or, &dor),
        jtilde: coupling * sin_element(&ol),
        jtilde_right: coupling * sin_element(&or),
        onsite_energy: hamiltonian_element(&ol, &dol, &ol, &dol),
        gaussian_width: width,
        harmonic_frequency: omega,
    })
}
