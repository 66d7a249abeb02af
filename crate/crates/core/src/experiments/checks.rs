//! Fast closed-form checks run by `seesaw check`.

use std::time::Instant;

use num_complex::Complex64;

use super::builtin::builtin_scenario;
use super::runner::execute;
use crate::error::Result;
use crate::hilbert::{coherent_state_on, HilbertSpace, StateVector};
use crate::models::twosite::atomic_state;
use crate::models::{eliminated_field_operator, AtomicPreparation, TwoSiteParams};
use crate::observables::negativity;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// `(|0>|α> + |1>|−α>)/√2` on a qubit ⊗ field space.
pub fn cat_state(alpha: f64, cutoff: usize) -> Result<StateVector> {
    let plus = coherent_state_on("field", Complex64::new(alpha, 0.0), cutoff, 1e-12)?;
    let minus = coherent_state_on("field", Complex64::new(-alpha, 0.0), cutoff, 1e-12)?;
    let q = HilbertSpace::single("atom", 2)?;
    let a = StateVector::basis(q.clone(), 0)?.tensor(&plus)?;
    let b = StateVector::basis(q, 1)?.tensor(&minus)?;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector::superpose(&[(h, &a), (h, &b)])
}

fn negativity_suite() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let q = HilbertSpace::new([("a", 2), ("b", 2)])?;
    for i in 0..4 {
        worst = worst.max(negativity(&StateVector::basis(q.clone(), i)?, "a")?);
    }
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let bell = StateVector::superpose(&[
        (h, &StateVector::basis(q.clone(), 0)?),
        (h, &StateVector::basis(q, 3)?),
    ])?;
    worst = worst.max((negativity(&bell, "a")? - 0.5).abs());
    let mut cat_err: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        let exact = (1.0 - (-4.0 * alpha * alpha as f64).exp()).sqrt() / 2.0;
        cat_err = cat_err.max((negativity(&cat_state(alpha, 40)?, "atom")? - exact).abs());
    }
    Ok((
        worst < 1e-10 && cat_err < 1e-8,
        format!("product/Bell error {worst:.1e}, cat-state error {cat_err:.1e}"),
    ))
}

fn meanfield_stationarity() -> Result<(bool, String)> {
    let mut s = builtin_scenario("fig3").expect("fig3 is built in")?;
    s.initial.asymmetry = 0.0;
    let out = execute(&s)?;
    let n = out.series("photon_number").expect("photon_number column");
    let max = n.iter().fold(0.0f64, |m, v| m.max(v.abs())).sqrt();
    Ok((
        max < 1e-12,
        format!("max |alpha| = {max:.1e} over t <= {}", s.integrator.t_final),
    ))
}

fn mott_null_field() -> Result<(bool, String)> {
    let p = TwoSiteParams {
        tunneling: 0.01,
        jtilde: 1.6,
        u0: -2.0,
        delta_c: -6.0,
        kappa: 1.0,
        n_atoms: 2,
        photon_cutoff: 2,
    };
    let op = eliminated_field_operator(&p)?;
    let mott = atomic_state(2, AtomicPreparation::Mott)?;
    let v = op.apply(mott.amplitudes())?;
    let exact_zero = v.iter().all(|z| z.re == 0.0 && z.im == 0.0);
    Ok((
        exact_zero,
        format!(
            "|A|1,1>| = {:e}",
            v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        ),
    ))
}

fn bell_scenario() -> Result<(bool, String)> {
    let s = builtin_scenario("bell-negativity").expect("built in")?;
    let out = execute(&s)?;
    let neg = out.series("negativity").expect("negativity column");
    let err = out
        .times
        .iter()
        .zip(&neg)
        .map(|(t, v)| (v - (2.0 * t).sin().abs() / 2.0).abs())
        .fold(0.0, f64::max);
    Ok((err < 1e-8, format!("max |N(t) - |sin 2t|/2| = {err:.1e}")))
}

fn damped_cavity() -> Result<(bool, String)> {
    let mut s = builtin_scenario("damped-cavity").expect("built in")?;
    s.n_traj = 200;
    let out = execute(&s)?;
    let n = out.series("photon_number").expect("photon_number column");
    let se = out.std_errors.as_ref().expect("ensemble errors");
    let alpha2 = s.initial.alpha.expect("coherent start").norm_sqr();
    // Coherent states stay coherent under damping, so the ensemble spread
    // can vanish; the absolute allowance covers truncation and step error.
    let allowance = 1e-8 * alpha2;
    let mut passed = true;
    let mut worst: f64 = 0.0;
    for (i, t) in out.times.iter().enumerate() {
        let dev = (n[i] - alpha2 * (-2.0 * t).exp()).abs();
        passed &= dev <= 3.0 * se[i][0] + allowance;
        worst = worst.max(dev);
    }
    Ok((
        passed,
        format!("max deviation {worst:.1e} (3 standard errors + {allowance:.0e})"),
    ))
}

/// Runs every check; failures to run count as failed checks.
pub fn run_checks() -> Vec<CheckResult> {
    let checks: [(&'static str, fn() -> Result<(bool, String)>); 5] = [
        ("negativity-closed-forms", negativity_suite),
        ("meanfield-symmetric-stationary", meanfield_stationarity),
        ("mott-null-field", mott_null_field),
        ("bell-negativity-scenario", bell_scenario),
        ("damped-cavity-decay", damped_cavity),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}
