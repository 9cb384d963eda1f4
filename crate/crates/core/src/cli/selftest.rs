//! Quick oracle-equivalence checks exposed as `ladder-cs selftest`.

use num_complex::Complex64;

use crate::beamsplitter::{linear_entropy, split, two_photon_distribution};
use crate::coherent::{
    coefficients, eigen_residual, overlap, overlap_closed_form, CoherentSpec, DEFAULT_TAIL_TOL,
};
use crate::observables::{energy_expectation, number_moments, Method};
use crate::system::{
    algebra_residual, gram_matrix, lowest_weights, verify_hamiltonian, DeformedOscillator,
    StateLabel,
};
use crate::Result;

pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    match f() {
        Ok((passed, detail)) => Outcome { name, passed, detail },
        Err(e) => Outcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn run_all() -> Vec<Outcome> {
    vec![
        check("ground energies", || {
            let mut worst: f64 = 0.0;
            for m in [2, 4, 6] {
                for mu in lowest_weights(m) {
                    let s = CoherentSpec::nonlinear(m, mu, 0.0)?;
                    let e = energy_expectation(&s, Method::ClosedForm)?;
                    worst = worst.max((e - (2 * mu + 2 * m as i64 + 2) as f64).abs());
                }
            }
            Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
        }),
        check("closed form vs direct sums", || {
            let mut worst: f64 = 0.0;
            for m in [2, 4, 6] {
                for mu in lowest_weights(m) {
                    for z in [1.0, 10.0, 1e3] {
                        let s = CoherentSpec::nonlinear(m, mu, z)?;
                        let e = energy_expectation(&s, Method::ClosedForm)?;
                        let ed = energy_expectation(&s, Method::Direct)?;
                        let a = number_moments(&s, Method::ClosedForm)?;
                        let b = number_moments(&s, Method::Direct)?;
                        let d = overlap(m, mu, z)?;
                        let dc = overlap_closed_form(m, mu, z)?;
                        worst = worst
                            .max(rel(e, ed))
                            .max(rel(a.mean, b.mean))
                            .max(rel(a.factorial2, b.factorial2))
                            .max((d - dc).abs() / d.abs().max(1.0));
                    }
                }
            }
            Ok((worst <= 1e-8, format!("max relative gap {worst:.2e}")))
        }),
        check("orthonormality", || {
            let idx = DeformedOscillator::new(2)?.indices(12);
            let g = gram_matrix(2, &idx, 1e-12)?;
            let mut worst: f64 = 0.0;
            for (i, row) in g.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
            Ok((worst <= 1e-8, format!("max |G - I| {worst:.2e}")))
        }),
        check("hamiltonian residual", || {
            let mut worst: f64 = 0.0;
            for nu in [-3, 0, 1, 2, 5, 10] {
                let label = StateLabel::from_index(2, nu)?;
                worst = worst.max(verify_hamiltonian(&label, 1e-3)?);
            }
            Ok((worst < 1e-6, format!("max residual {worst:.2e}")))
        }),
        check("polynomial algebra", || {
            let worst = (-5..=40)
                .filter(|&nu| nu >= 0 || nu == -5)
                .map(|nu| algebra_residual(4, nu))
                .fold(0.0, f64::max);
            Ok((worst < 1e-8, format!("max relative residual {worst:.2e}")))
        }),
        check("annihilation eigen-equation", || {
            let mut worst: f64 = 0.0;
            for z in [Complex64::new(3.0, 4.0), Complex64::new(1e8, 0.0)] {
                let s = CoherentSpec::new(crate::coherent::Variant::Nonlinear, 6, -7, z)?;
                let r = eigen_residual(&coefficients(&s, DEFAULT_TAIL_TOL)?)?;
                worst = worst.max(r / z.norm().max(1.0));
            }
            Ok((worst < 1e-9, format!("max scaled residual {worst:.2e}")))
        }),
        check("linearized statistics", || {
            let mut worst: f64 = 0.0;
            for z in [0.5, 5.0, 50.0] {
                let s = CoherentSpec::linearized(4, -5, z)?;
                let q = number_moments(&s, Method::Direct)?.mandel_q();
                let e = linear_entropy(&split(&coefficients(&s, DEFAULT_TAIL_TOL)?));
                worst = worst.max(q.abs()).max(e.value.abs());
            }
            Ok((worst < 1e-9, format!("max |Q|, |S| {worst:.2e}")))
        }),
        check("beamsplitter output", || {
            let s = CoherentSpec::nonlinear(4, -5, 1e3)?;
            let out = split(&coefficients(&s, DEFAULT_TAIL_TOL)?);
            let p = two_photon_distribution(&out);
            let asym = p.asymmetry();
            let mass = (p.total_mass - 1.0).abs();
            let s_lin = linear_entropy(&out).value;
            Ok((
                asym < 1e-14 && mass < 1e-10 && s_lin > 0.05,
                format!("asymmetry {asym:.1e}, |1 - mass| {mass:.1e}, S {s_lin:.4}"),
            ))
        }),
    ]
}
