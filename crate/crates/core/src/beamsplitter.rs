//! 50:50 beamsplitter acting on a coherent state in one arm and vacuum in
//! the other.
//!
//! The k-quantum input splits as Σ_r G(k, r) i^r |k-r⟩|r⟩ with
//! G(k, r) = A_k 2^{-k/2} C(k, r)^{1/2}; the phase i^r is kept out of G.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent::CoefficientVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputState {
    /// g[k][r] = G(k, r) for 0 ≤ r ≤ k ≤ K.
    pub g: Vec<Vec<Complex64>>,
    /// Input mass beyond K.
    pub tail_mass: f64,
}

impl OutputState {
    pub fn truncation(&self) -> usize {
        self.g.len() - 1
    }

    pub fn total_mass(&self) -> f64 {
        self.g.iter().flatten().map(|v| v.norm_sqr()).sum()
    }
}

fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for i in 1..=n {
        out.push(out[i - 1] + (i as f64).ln());
    }
    out
}

pub fn split(coeffs: &CoefficientVector) -> OutputState {
    let kmax = coeffs.truncation();
    let lf = log_factorials(kmax);
    let ln2 = std::f64::consts::LN_2;
    let g = coeffs
        .entries
        .iter()
        .enumerate()
        .map(|(k, a)| {
            (0..=k)
                .map(|r| {
                    // ordered so that C(k, r) and C(k, k-r) round identically
                    let (lo, hi) = (r.min(k - r), r.max(k - r));
                    let log_w = 0.5 * (lf[k] - lf[lo] - lf[hi] - k as f64 * ln2);
                    a * log_w.exp()
                })
                .collect()
        })
        .collect();
    OutputState {
        g,
        tail_mass: coeffs.tail_mass,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoModeDistribution {
    /// p[n1][n2] for n1 + n2 ≤ K, zero elsewhere; (K+1)×(K+1).
    pub p: Vec<Vec<f64>>,
    pub total_mass: f64,
}

/// P(n1, n2) = |A_{n1+n2}|² 2^{-(n1+n2)} C(n1+n2, n2).
pub fn two_photon_distribution(out: &OutputState) -> TwoModeDistribution {
    let n = out.g.len();
    let mut p = vec![vec![0.0; n]; n];
    for (k, row) in out.g.iter().enumerate() {
        for (r, v) in row.iter().enumerate() {
            p[k - r][r] = v.norm_sqr();
        }
    }
    let total_mass = p.iter().flatten().sum();
    TwoModeDistribution { p, total_mass }
}

impl TwoModeDistribution {
    /// Σ_{n2} P(n1, n2).
    pub fn marginal_first(&self) -> Vec<f64> {
        self.p.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn marginal_second(&self) -> Vec<f64> {
        let n = self.p.len();
        (0..n).map(|j| self.p.iter().map(|row| row[j]).sum()).collect()
    }

    pub fn asymmetry(&self) -> f64 {
        let n = self.p.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.p[i][j] - self.p[j][i]).abs());
            }
        }
        worst
    }

    /// Max-entry distance from the leading-singular-value rank-1
    /// approximation of P.
    pub fn factorization_residual(&self) -> f64 {
        let n = self.p.len();
        let mat = DMatrix::from_fn(n, n, |i, j| self.p[i][j]);
        let svd = mat.clone().svd(true, true);
        let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let lead = svd
            .singular_values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let rank1 = u.column(lead) * vt.row(lead) * svd.singular_values[lead];
        (mat - rank1).amax()
    }
}

/// Linear entropy 1 - Tr ρ_a² of one output arm, with an error bound for
/// the truncated input tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// ρ_a = B B† with B[n][r] = G(n + r, r); Tr ρ_a² = ‖B†B‖_F².
pub fn reduced_density(out: &OutputState) -> DMatrix<Complex64> {
    let b = arm_matrix(out);
    &b * b.adjoint()
}

fn arm_matrix(out: &OutputState) -> DMatrix<Complex64> {
    let n = out.g.len();
    DMatrix::from_fn(n, n, |i, r| {
        out.g
            .get(i + r)
            .map(|row| row[r])
            .unwrap_or(Complex64::new(0.0, 0.0))
    })
}

pub fn linear_entropy(out: &OutputState) -> EntropyEstimate {
    let b = arm_matrix(out);
    let gram = b.adjoint() * &b;
    let purity: f64 = gram.iter().map(|v| v.norm_sqr()).sum();
    EntropyEstimate {
        value: 1.0 - purity,
        error_bound: 2.0 * out.tail_mass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::{coefficients, CoherentSpec, Variant, DEFAULT_TAIL_TOL};

    fn vector(entries: Vec<Complex64>) -> CoefficientVector {
        CoefficientVector {
            spec: CoherentSpec::nonlinear(4, -5, 0.0).unwrap(),
            entries,
            tail_mass: 0.0,
        }
    }

    #[test]
    fn single_quantum_rows() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let out = split(&vector(vec![one]));
        assert_eq!(out.g, vec![vec![one]]);
        let out = split(&vector(vec![zero, one]));
        let h = 0.5f64.sqrt();
        assert!((out.g[1][0].re - h).abs() < 1e-15 && (out.g[1][1].re - h).abs() < 1e-15);
    }

    #[test]
    fn rows_conserve_probability() {
        let spec = CoherentSpec::nonlinear(4, -5, 1e5).unwrap();
        let c = coefficients(&spec, DEFAULT_TAIL_TOL).unwrap();
        let out = split(&c);
        for (k, row) in out.g.iter().enumerate() {
            let s: f64 = row.iter().map(|v| v.norm_sqr()).sum();
            assert!((s - c.entries[k].norm_sqr()).abs() < 1e-14);
        }
        let d = two_photon_distribution(&out);
        assert_eq!(d.asymmetry(), 0.0);
        assert!((d.total_mass - c.norm_sqr()).abs() < 1e-12);
        let rho = reduced_density(&out);
        for (i, m) in d.marginal_first().iter().enumerate() {
            assert!((rho[(i, i)].re - m).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_has_zero_entropy() {
        let c = coefficients(&CoherentSpec::nonlinear(4, -5, 0.0).unwrap(), DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(linear_entropy(&split(&c)).value, 0.0);
    }

    #[test]
    fn linearized_output_is_product() {
        for abs_z in [0.5, 3.0, 9.0] {
            let spec = CoherentSpec::new(Variant::Linearized, 4, -5, abs_z.into()).unwrap();
            let out = split(&coefficients(&spec, DEFAULT_TAIL_TOL).unwrap());
            assert!(linear_entropy(&out).value.abs() < 1e-9);
            assert!(two_photon_distribution(&out).factorization_residual() < 1e-12);
        }
    }

    #[test]
    fn nonlinear_output_is_entangled() {
        let spec = CoherentSpec::nonlinear(4, -5, Complex64::from_polar(1e3, 0.0)).unwrap();
        let s0 = linear_entropy(&split(&coefficients(&spec, DEFAULT_TAIL_TOL).unwrap())).value;
        assert!(s0 > 0.05, "S = {s0}");
        let rotated = CoherentSpec { z: Complex64::from_polar(1e3, std::f64::consts::FRAC_PI_3), ..spec };
        let s1 = linear_entropy(&split(&coefficients(&rotated, DEFAULT_TAIL_TOL).unwrap())).value;
        assert!((s0 - s1).abs() < 1e-10);
    }
}
