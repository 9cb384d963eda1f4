use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent::{coefficients, CoefficientVector, CoherentSpec, DEFAULT_TAIL_TOL};
use crate::error::{Error, Result};
use crate::specfun::integrate_vec;
use crate::system::{energy_of_index, energy_offset, potential, EigenfunctionEvaluator};

pub const MAX_MOMENT_K: usize = 60;
const MOMENT_TOL: f64 = 1e-11;

/// Position and momentum matrix elements between the states
/// ψ_{μ+(m+1)k}, k = 0..=K, of one ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrices {
    pub m: usize,
    pub mu: i64,
    pub k: usize,
    pub mx: DMatrix<f64>,
    pub mx2: DMatrix<f64>,
    /// -i∫ψ_a ψ_b', purely imaginary and Hermitian.
    pub mp: DMatrix<Complex64>,
    /// -∫ψ_a ψ_b''.
    pub mp2: DMatrix<f64>,
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect()
}

fn panels_for(ev: &EigenfunctionEvaluator, half: f64) -> usize {
    let numax = ev.indices().iter().copied().max().unwrap_or(0).max(0) as f64;
    32 + (2.0 * half * (2.0 * numax + 3.0).sqrt() / std::f64::consts::PI).ceil() as usize
}

fn check_k(k: usize) -> Result<()> {
    if k > MAX_MOMENT_K {
        return Err(Error::invalid(format!("moment truncation K = {k} exceeds {MAX_MOMENT_K}")));
    }
    Ok(())
}

/// Builds the four moment matrices by adaptive quadrature on one shared
/// partition, using analytic first and second derivatives.
pub fn moment_matrices(m: usize, mu: i64, k: usize) -> Result<MomentMatrices> {
    check_k(k)?;
    let ev = EigenfunctionEvaluator::ladder(m, mu, k)?;
    let n = k + 1;
    let pairs = upper_pairs(n);
    let np = pairs.len();
    let half = ev.support_half_width();
    let est = integrate_vec(
        |x, out: &mut [f64]| {
            let v = ev.eval(x, 2);
            for (i, &(a, b)) in pairs.iter().enumerate() {
                let pp = v.psi[a] * v.psi[b];
                out[i] = x * pp;
                out[np + i] = x * x * pp;
                out[2 * np + i] = 0.5 * (v.psi[a] * v.d1[b] - v.d1[a] * v.psi[b]);
                out[3 * np + i] = -0.5 * (v.psi[a] * v.d2[b] + v.d2[a] * v.psi[b]);
            }
        },
        4 * np,
        -half,
        half,
        MOMENT_TOL,
        panels_for(&ev, half),
    )?;
    let mut mx = DMatrix::zeros(n, n);
    let mut mx2 = DMatrix::zeros(n, n);
    let mut mp = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut mp2 = DMatrix::zeros(n, n);
    for (i, &(a, b)) in pairs.iter().enumerate() {
        // parity: x couples only states of opposite parity, and k ↦ ν changes
        // parity with k because the step m+1 is odd
        let odd = (a + b) % 2 == 1;
        let x = if odd { est.values[i] } else { 0.0 };
        let d = if odd { est.values[2 * np + i] } else { 0.0 };
        let x2 = if odd { 0.0 } else { est.values[np + i] };
        let p2 = if odd { 0.0 } else { est.values[3 * np + i] };
        mx[(a, b)] = x;
        mx[(b, a)] = x;
        mx2[(a, b)] = x2;
        mx2[(b, a)] = x2;
        mp2[(a, b)] = p2;
        mp2[(b, a)] = p2;
        mp[(a, b)] = Complex64::new(0.0, -d);
        mp[(b, a)] = Complex64::new(0.0, d);
    }
    Ok(MomentMatrices {
        m,
        mu,
        k,
        mx,
        mx2,
        mp,
        mp2,
    })
}

/// ⟨p²⟩ matrix through the eigen-identity -ψ_b'' = (E_b - V - 2m - 1)ψ_b,
/// without any derivative evaluation.
pub fn p2_matrix_eigen_identity(m: usize, mu: i64, k: usize) -> Result<DMatrix<f64>> {
    check_k(k)?;
    let ev = EigenfunctionEvaluator::ladder(m, mu, k)?;
    let n = k + 1;
    let energies: Vec<f64> = ev.indices().iter().map(|&nu| energy_of_index(m, nu)).collect();
    let offset = energy_offset(m);
    let half = ev.support_half_width();
    let est = integrate_vec(
        |x, out: &mut [f64]| {
            let v = ev.eval(x, 0);
            let w = potential(m, x) + offset;
            for a in 0..n {
                for b in 0..n {
                    out[a * n + b] = v.psi[a] * (energies[b] - w) * v.psi[b];
                }
            }
        },
        n * n,
        -half,
        half,
        MOMENT_TOL,
        panels_for(&ev, half),
    )?;
    Ok(DMatrix::from_row_slice(n, n, &est.values))
}

/// Means and standard deviations of x and p, and σ_xσ_p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub mean_x: f64,
    pub mean_p: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub product: f64,
}

fn quadratic_form_real(a: &[Complex64], mat: &DMatrix<f64>) -> f64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (i, ai) in a.iter().enumerate() {
        for (j, aj) in a.iter().enumerate() {
            s += ai.conj() * mat[(i, j)] * aj;
        }
    }
    s.re
}

fn quadratic_form_complex(a: &[Complex64], mat: &DMatrix<Complex64>) -> f64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (i, ai) in a.iter().enumerate() {
        for (j, aj) in a.iter().enumerate() {
            s += ai.conj() * mat[(i, j)] * aj;
        }
    }
    s.re
}

impl MomentMatrices {
    /// Quadratic forms with a coefficient vector of the same ladder whose
    /// truncation does not exceed `self.k`.
    pub fn uncertainty(&self, coeffs: &CoefficientVector) -> Result<Uncertainty> {
        let spec = &coeffs.spec;
        if spec.m != self.m || spec.mu != self.mu {
            return Err(Error::invalid("coefficients belong to a different ladder"));
        }
        if coeffs.truncation() > self.k {
            return Err(Error::invalid(format!(
                "coefficient truncation {} exceeds moment truncation {}",
                coeffs.truncation(),
                self.k
            )));
        }
        let mut a = coeffs.entries.clone();
        a.resize(self.k + 1, Complex64::new(0.0, 0.0));
        let mean_x = quadratic_form_real(&a, &self.mx);
        let mean_p = quadratic_form_complex(&a, &self.mp);
        let x2 = quadratic_form_real(&a, &self.mx2);
        let p2 = quadratic_form_real(&a, &self.mp2);
        let sigma_x = (x2 - mean_x * mean_x).max(0.0).sqrt();
        let sigma_p = (p2 - mean_p * mean_p).max(0.0).sqrt();
        Ok(Uncertainty {
            mean_x,
            mean_p,
            sigma_x,
            sigma_p,
            product: sigma_x * sigma_p,
        })
    }
}

/// σ_x, σ_p and their product for the state evolved to time t.
pub fn uncertainty(spec: &CoherentSpec, t: f64) -> Result<Uncertainty> {
    let c = coefficients(spec, DEFAULT_TAIL_TOL)?.evolved(t);
    moment_matrices(spec.m, spec.mu, c.truncation())?.uncertainty(&c)
}
