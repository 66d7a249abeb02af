//! Closed-form and brute-force oracles for the library layer.
//!
//! Frozen reference numbers were computed once with an independent numpy
//! script; the rest are evaluated here from closed forms.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use seesaw::dynamics::{integrate_lindblad, propagate_schrodinger, FinalState, IntegratorConfig};
use seesaw::experiments::cat_state;
use seesaw::hilbert::{
    coherent_state, coherent_state_on, destroy, hermitian_spectrum, number, partial_trace,
    partial_transpose, schmidt_coefficients, tensor_product_op, HilbertSpace, SparseOperator,
    StateVector,
};
use seesaw::models::fullspace::sin_kx;
use seesaw::models::twosite::{atomic_state, ATOMS_LABEL};
use seesaw::models::{
    build_fullspace_hamiltonian, build_seesaw_hamiltonian, build_twosite_hamiltonian,
    compute_wannier_couplings, eliminated_field_operator, AtomicPreparation, FullSpaceParams,
    SeesawParams, TwoSiteParams,
};
use seesaw::observables::{
    field_statistics, negativity, site_statistics, spatial_statistics, MotionBasis, ObservableKind,
    ObservableSet,
};
use seesaw::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn test_matrix() -> DMatrix<Complex64> {
    let n = 8;
    DMatrix::from_fn(n, n, |j, k| {
        let (jf, kf) = (j as f64, k as f64);
        match j.cmp(&k) {
            std::cmp::Ordering::Equal => c(2.0 * (3.0 * jf + 1.0).sin(), 0.0),
            std::cmp::Ordering::Less => c(
                (1.7 * jf + 0.3 * kf + 1.0).sin(),
                (0.5 * jf + 2.1 * kf).cos(),
            ),
            std::cmp::Ordering::Greater => c(
                (1.7 * kf + 0.3 * jf + 1.0).sin(),
                -(0.5 * kf + 2.1 * jf).cos(),
            ),
        }
    })
}

/// Characteristic polynomial coefficients by Faddeev-LeVerrier,
/// `p(x) = Σ coeffs[i] x^i` with leading coefficient 1.
fn char_poly(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut mk = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk + &id * c(coeffs[n + 1 - k], 0.0);
        let am = m * &mk;
        coeffs[n - k] = -am.trace().re / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// Real roots of a polynomial with only real roots inside `[-r, r]`.
fn real_roots(coeffs: &[f64], r: f64) -> Vec<f64> {
    let grid = 200_000;
    let h = 2.0 * r / grid as f64;
    let mut roots = Vec::new();
    let mut x0 = -r;
    let mut f0 = horner(coeffs, x0);
    for i in 1..=grid {
        let x1 = -r + h * i as f64;
        let f1 = horner(coeffs, x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let fm = horner(coeffs, mid);
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

#[test]
fn hermitian_spectrum_matches_characteristic_polynomial_roots() {
    let m = test_matrix();
    let got = hermitian_spectrum(&m).unwrap();
    let gershgorin = (0..8)
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let oracle = real_roots(&char_poly(&m), gershgorin + 1.0);
    assert_eq!(oracle.len(), 8);
    for (a, b) in got.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
    let frozen = [
        -4.369227115972324,
        -3.374985332824083,
        -1.1637518037628343,
        -0.29790078899571665,
        0.5611763965092833,
        1.9814854192915472,
        3.3726407864735295,
        4.232409635007621,
    ];
    for (a, b) in got.iter().zip(frozen) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn ladder_on_second_factor_has_four_nonzeros() {
    let space = HilbertSpace::new([("atom", 2), ("field", 3)]).unwrap();
    let op = tensor_product_op(&space, &[("field", &destroy("field", 3).unwrap())]).unwrap();
    assert_eq!(op.dim(), 6);
    assert_eq!(op.nnz(), 4);
    // Row-major: index = 3·atom + photons.
    for atom in 0..2 {
        for n in 1..3 {
            let v = op.get(3 * atom + n - 1, 3 * atom + n);
            assert!((v - c((n as f64).sqrt(), 0.0)).norm() < 1e-15);
        }
    }
}

#[test]
fn coherent_amplitudes_and_tail() {
    let psi = coherent_state(c(1.0, 0.0), 20).unwrap();
    assert!((psi.amplitudes()[0].re - 0.6065306597126334).abs() < 1e-10);
    // Tail mass beyond n = 4 for α = 2 is 0.3711630648201266 by direct summation.
    let tail = 1.0
        - (-4.0f64).exp()
            * (0..5)
                .map(|k| 4f64.powi(k) / (1..=k).product::<i32>() as f64)
                .sum::<f64>();
    assert!((tail - 0.3711630648201266).abs() < 1e-12);
    assert!(coherent_state(c(2.0, 0.0), 5).is_err());

    let coh = coherent_state_on("field", c(1.0, 0.0), 30, 1e-12).unwrap();
    let stats = field_statistics(&coh, "field").unwrap();
    assert!((stats.photon_number - 1.0).abs() < 1e-8);
    assert!((stats.mean_a - c(1.0, 0.0)).norm() < 1e-8);
}

fn bell() -> StateVector {
    let q = HilbertSpace::new([("a", 2), ("b", 2)]).unwrap();
    let h = c(FRAC_1_SQRT_2, 0.0);
    StateVector::superpose(&[
        (h, &StateVector::basis(q.clone(), 0).unwrap()),
        (h, &StateVector::basis(q, 3).unwrap()),
    ])
    .unwrap()
}

#[test]
fn bell_reduced_state_and_partial_transpose() {
    let rho = bell().to_density();
    let reduced = partial_trace(&rho, &["a"]).unwrap();
    let half = DMatrix::<Complex64>::identity(2, 2) * c(0.5, 0.0);
    assert!((reduced.matrix() - half).norm() < 1e-15);
    let spectrum = hermitian_spectrum(&partial_transpose(&rho, "a").unwrap()).unwrap();
    for (a, b) in spectrum.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((negativity(&rho, "a").unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn cat_state_gram_spectrum() {
    let cat = cat_state(1.0, 40).unwrap();
    let (hi, lo) = (0.5676676416183064, 0.43233235838169365);
    let mut spectrum = hermitian_spectrum(
        partial_trace(&cat.to_density(), &["field"])
            .unwrap()
            .matrix(),
    )
    .unwrap();
    spectrum.reverse();
    assert!((spectrum[0] - hi).abs() < 1e-10 && (spectrum[1] - lo).abs() < 1e-10);
    assert!(spectrum[2..].iter().all(|v| v.abs() < 1e-10));
    let schmidt = schmidt_coefficients(&cat, "atom").unwrap();
    assert!((schmidt[0] - hi).abs() < 1e-10 && (schmidt[1] - lo).abs() < 1e-10);
    assert!((negativity(&cat, "atom").unwrap() - 0.4953999296304113).abs() < 1e-8);
}

#[test]
fn uncoupled_seesaw_spectrum_is_ladder_sum() {
    let p = SeesawParams {
        omega_x: 1.0,
        omega_phi: 3.0,
        coupling: 0.0,
        cutoff_x: 5,
        cutoff_phi: 4,
    };
    let got = hermitian_spectrum(&build_seesaw_hamiltonian(&p).unwrap().to_dense()).unwrap();
    let mut expected: Vec<f64> = (0..5)
        .flat_map(|nx| (0..4).map(move |nf| nx as f64 + 3.0 * nf as f64))
        .collect();
    expected.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-10);
    }
}

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
fn all_left_state_is_an_eigenvector_of_the_eliminated_field() {
    for n in 1..=4 {
        let p = TwoSiteParams {
            n_atoms: n,
            ..fig4()
        };
        let op = eliminated_field_operator(&p).unwrap();
        let left = atomic_state(n, AtomicPreparation::AllLeft).unwrap();
        let v = op.apply(left.amplitudes()).unwrap();
        let nf = n as f64;
        let expected = c(0.0, -p.jtilde * nf) / c(p.kappa, -(p.delta_c - p.u0 * nf));
        assert!((v[0] - expected).norm() < 1e-14);
        assert!(v[1..].iter().all(|z| z.norm() == 0.0));
    }
}

#[test]
fn free_plane_wave_spectrum() {
    let p = FullSpaceParams {
        v0: 0.0,
        u0: 0.0,
        delta_c: -1.3,
        kappa: 1.0,
        recoil_ratio: 0.05,
        n_momentum: 9,
        photon_cutoff: 3,
    };
    let model = build_fullspace_hamiltonian(&p).unwrap();
    let got = hermitian_spectrum(&model.hamiltonian.to_dense()).unwrap();
    let mut expected: Vec<f64> = (-4i32..=4)
        .flat_map(|n| (0..3).map(move |m| 0.025 * (n * n) as f64 + 1.3 * m as f64))
        .collect();
    expected.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn sin_matrix_elements_by_quadrature() {
    let nm = 9;
    let sin = sin_kx(nm).unwrap();
    let grid = 512;
    for i in 0..nm {
        for j in 0..nm {
            let (ni, nj) = (i as f64 - 4.0, j as f64 - 4.0);
            // <i| sin x |j> = (1/2π) ∫ e^{−i n_i x} sin x e^{i n_j x} dx
            let mut acc = c(0.0, 0.0);
            for g in 0..grid {
                let x = 2.0 * PI * g as f64 / grid as f64;
                acc += Complex64::from_polar(x.sin(), (nj - ni) * x);
            }
            acc /= grid as f64;
            assert!((sin.get(i, j) - acc).norm() < 1e-12, "({i},{j})");
        }
    }
    assert!((sin.get(5, 4) - c(0.0, -0.5)).norm() < 1e-15);
    assert!((sin.get(3, 4) - c(0.0, 0.5)).norm() < 1e-15);
}

#[test]
fn deeper_lattice_tunnels_less() {
    let depths = [-4.0, -6.0, -8.0, -12.0];
    let j: Vec<f64> = depths
        .iter()
        .map(|&v| {
            compute_wannier_couplings(v, -0.25, 1.0)
                .unwrap()
                .tunneling
                .abs()
        })
        .collect();
    assert!(j.windows(2).all(|w| w[1] < w[0]), "{j:?}");
    for v in depths {
        assert!(compute_wannier_couplings(v, -0.25, 1.0).unwrap().jtilde > 0.0);
    }
}

#[test]
fn eigenstate_acquires_only_a_phase() {
    let space = HilbertSpace::single("q", 2).unwrap();
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[c(1.0, 0.0), c(0.5, -0.2), c(0.5, 0.2), c(-0.3, 0.0)],
    );
    let h = SparseOperator::from_dense(space.clone(), &m).unwrap();
    // numpy eigh: lowest eigenpair.
    let e = -0.49409715080670646;
    let v = StateVector::normalized(
        space,
        vec![
            c(-0.33907702584603105, 0.0),
            c(0.8734724452078736, 0.34938897808314956),
        ],
    )
    .unwrap();
    let set = ObservableSet::new()
        .with("energy", ObservableKind::Real(h.clone()))
        .unwrap();
    let t = 2.5;
    let rec = propagate_schrodinger(&h, &v, &IntegratorConfig::new(0.001, t, 100).unwrap(), &set)
        .unwrap();
    assert!(rec
        .series("energy")
        .unwrap()
        .iter()
        .all(|x| (x - e).abs() < 1e-10));
    let FinalState::Pure(psi) = rec.final_state else {
        panic!("pure final state")
    };
    let phase = Complex64::from_polar(1.0, -e * t);
    for (a, b) in psi.amplitudes().iter().zip(v.amplitudes()) {
        assert!((a - b * phase).norm() < 1e-9);
    }
}

#[test]
fn site_and_motion_statistics() {
    let sf = atomic_state(2, AtomicPreparation::Superfluid).unwrap();
    let s = site_statistics(&sf, ATOMS_LABEL, 2).unwrap();
    assert!(s.imbalance.abs() < 1e-15 && (s.pair_correlation - 0.5).abs() < 1e-15);

    let ground = StateVector::basis(HilbertSpace::single("x", 12).unwrap(), 0).unwrap();
    let m = spatial_statistics(&ground, "x", MotionBasis::Oscillator).unwrap();
    assert!(m.mean_x.abs() < 1e-15 && (m.var_x - 0.5).abs() < 1e-14);
}

#[test]
fn lindblad_damped_cavity_matches_exponential() {
    let dim = 20;
    let space = HilbertSpace::single("field", dim).unwrap();
    let a = destroy("field", dim).unwrap();
    let h = SparseOperator::zero(space);
    let rho0 = coherent_state_on("field", c(1.5, 0.5), dim, 1e-8)
        .unwrap()
        .to_density();
    let set = ObservableSet::new()
        .with("n", ObservableKind::Real(number("field", dim).unwrap()))
        .unwrap();
    let cfg = IntegratorConfig::new(0.002, 2.0, 50).unwrap();
    let rec = integrate_lindblad(&h, &[a.scale_real(2f64.sqrt())], &rho0, &cfg, &set).unwrap();
    let n0 = rec.rows[0][0];
    for (t, row) in rec.times.iter().zip(&rec.rows) {
        assert!((row[0] - n0 * (-2.0 * t).exp()).abs() < 1e-9);
    }
}

#[test]
fn deep_lattice_full_space_matches_two_site_reduction() {
    // Band gap ≈ 1.4 exceeds the photon spacing 0.5 plus the cavity-induced
    // shift, so the lowest 2·photon_cutoff full-space levels all lie in the
    // lowest band.
    let (v0, u0, delta_c, r) = (-20.0, -0.01, -0.51, 0.05);
    let photon_cutoff = 2;
    let full = build_fullspace_hamiltonian(&FullSpaceParams {
        v0,
        u0,
        delta_c,
        kappa: 1.0,
        recoil_ratio: r,
        n_momentum: 41,
        photon_cutoff,
    })
    .unwrap();
    let full_spec = hermitian_spectrum(&full.hamiltonian.to_dense()).unwrap();

    let w = compute_wannier_couplings(v0, u0, r).unwrap();
    let two = build_twosite_hamiltonian(&TwoSiteParams {
        tunneling: w.tunneling,
        jtilde: w.jtilde,
        u0,
        delta_c,
        kappa: 1.0,
        n_atoms: 1,
        photon_cutoff,
    })
    .unwrap();
    let two_spec = hermitian_spectrum(&two.hamiltonian.to_dense()).unwrap();
    for (a, b) in full_spec.iter().zip(&two_spec).take(2 * photon_cutoff) {
        let b = b + w.onsite_energy;
        assert!((a - b).abs() < 0.1 * a.abs(), "{a} vs {b}");
    }
}
