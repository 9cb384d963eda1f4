//! Coherent-state coefficient engines for the ladder operator c(m) and its
//! linearized counterpart, plus time evolution, position densities and cat
//! states.
//!
//! A coherent state on the ladder with lowest weight μ is
//! Σ_k A_k |μ + (m+1)k⟩. For c(m),
//! A_k = z^k / (D_k sqrt(F)) with D_k = Π_{i=1..k} a_{μ+(m+1)i}, and F a
//! ₁F_{m+1} in |z|²/(2m+2)^{m+1}. For the linearized operator the
//! coefficients are oscillator-like, e^{-|z|²/4}(z/√2)^k/√k!.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{hypergeometric, log_sum, HypergeometricSpec, SignedLog};
use crate::system::{
    energy_of_index, is_lowest_weight, MAX_NU, ladder_element, ladder_element_sq, validate_m, BasisValues,
    EigenfunctionEvaluator,
};

pub const DEFAULT_TAIL_TOL: f64 = 1e-14;
/// Relative tolerance used for every hypergeometric normalization.
pub const SERIES_TOL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Nonlinear,
    Linearized,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonlinear" => Ok(Variant::Nonlinear),
            "linearized" => Ok(Variant::Linearized),
            other => Err(Error::invalid(format!("unknown variant '{other}'"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Nonlinear => "nonlinear",
            Variant::Linearized => "linearized",
        })
    }
}

/// A fully specified coherent state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentSpec {
    pub variant: Variant,
    pub m: usize,
    pub mu: i64,
    pub z: Complex64,
}

impl CoherentSpec {
    pub fn new(variant: Variant, m: usize, mu: i64, z: Complex64) -> Result<Self> {
        validate_m(m)?;
        if !is_lowest_weight(m, mu) {
            return Err(Error::invalid(format!("mu = {mu} is not a lowest weight for m = {m}")));
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::invalid("non-finite z"));
        }
        Ok(CoherentSpec { variant, m, mu, z })
    }

    pub fn nonlinear(m: usize, mu: i64, z: impl Into<Complex64>) -> Result<Self> {
        Self::new(Variant::Nonlinear, m, mu, z.into())
    }

    pub fn linearized(m: usize, mu: i64, z: impl Into<Complex64>) -> Result<Self> {
        Self::new(Variant::Linearized, m, mu, z.into())
    }

    /// Angular frequency 2m+2 of the ladder spacing.
    pub fn omega(&self) -> f64 {
        (2 * self.m + 2) as f64
    }

    /// Revival period π/(m+1).
    pub fn period(&self) -> f64 {
        PI / (self.m as f64 + 1.0)
    }

    /// The spec at time t: z → z e^{-i(2m+2)t}.
    pub fn evolve(&self, t: f64) -> Self {
        CoherentSpec {
            z: self.z * Complex64::from_polar(1.0, -self.omega() * t),
            ..*self
        }
    }

    /// Spectral index of the k-th ladder state.
    pub fn index(&self, k: usize) -> i64 {
        self.mu + (self.m as i64 + 1) * k as i64
    }
}

/// Free-function form of [`CoherentSpec::evolve`].
pub fn evolve(spec: &CoherentSpec, t: f64) -> CoherentSpec {
    spec.evolve(t)
}

/// Lower parameters b_i = (μ-i)/(m+1) + 1, i = 1..m, and (μ+m+1)/(m+1) + 1
/// of the normalization series.
pub fn series_lower_params(m: usize, mu: i64) -> Vec<f64> {
    let step = m as f64 + 1.0;
    let muf = mu as f64;
    (1..=m)
        .map(|i| (muf - i as f64) / step + 1.0)
        .chain(std::iter::once((muf + step) / step + 1.0))
        .collect()
}

/// Series argument |z|²/(2m+2)^{m+1}.
pub fn series_argument(m: usize, abs_z: f64) -> f64 {
    let base = (2 * m + 2) as f64;
    (2.0 * abs_z.ln() - (m as f64 + 1.0) * base.ln()).exp()
}

/// F^{(m,μ)}(|z|) = ₁F_{m+1}(1; b; |z|²/(2m+2)^{m+1}).
pub fn normalization_f(m: usize, mu: i64, abs_z: f64) -> Result<SignedLog> {
    validate_m(m)?;
    if !is_lowest_weight(m, mu) {
        return Err(Error::invalid(format!("mu = {mu} is not a lowest weight for m = {m}")));
    }
    if abs_z == 0.0 {
        return Ok(SignedLog::ONE);
    }
    let spec = HypergeometricSpec::new(
        vec![1.0],
        series_lower_params(m, mu),
        series_argument(m, abs_z),
    )?;
    Ok(hypergeometric(&spec, SERIES_TOL)?.value)
}

/// F by the defining sum Σ |z|^{2k}/D_k², built from the ladder elements.
pub fn normalization_f_direct(m: usize, mu: i64, abs_z: f64) -> SignedLog {
    if abs_z == 0.0 {
        return SignedLog::ONE;
    }
    let step = m as i64 + 1;
    let log_z2 = 2.0 * abs_z.ln();
    let mut log_term = 0.0;
    let mut sum = SignedLog::ONE;
    for k in 1.. {
        log_term += log_z2 - ladder_element_sq(m, mu + step * k).log_mag();
        sum = sum.add(SignedLog::from_log(log_term));
        if log_term < sum.log_mag() - 40.0 && log_z2 < ladder_element_sq(m, mu + step * k).log_mag() {
            break;
        }
    }
    sum
}

/// Truncated superposition coefficients with a certified tail bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub spec: CoherentSpec,
    /// A_0 ..= A_K.
    pub entries: Vec<Complex64>,
    /// Upper bound on Σ_{k>K} |A_k|².
    pub tail_mass: f64,
}

impl CoefficientVector {
    pub fn truncation(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Coefficients at time t: A_k e^{-i(2m+2)kt}.
    pub fn evolved(&self, t: f64) -> Self {
        let phase = -self.spec.omega() * t;
        CoefficientVector {
            spec: self.spec.evolve(t),
            entries: self
                .entries
                .iter()
                .enumerate()
                .map(|(k, a)| a * Complex64::from_polar(1.0, phase * k as f64))
                .collect(),
            tail_mass: self.tail_mass,
        }
    }

    /// Spectral indices of the retained basis states.
    pub fn indices(&self) -> Vec<i64> {
        (0..self.entries.len()).map(|k| self.spec.index(k)).collect()
    }

    /// Energy of the highest retained basis state.
    pub fn max_energy(&self) -> f64 {
        energy_of_index(self.spec.m, self.spec.index(self.truncation()))
    }
}

/// log |A_k|² (unnormalized) and the ratio |A_{k+1}/A_k|² for the variant.
struct TermSource {
    spec: CoherentSpec,
    log_z2: f64,
}

impl TermSource {
    /// ln of |A_{k+1}|²/|A_k|².
    fn log_ratio(&self, k: usize) -> f64 {
        match self.spec.variant {
            Variant::Nonlinear => self.log_z2 - ladder_element_sq(self.spec.m, self.spec.index(k + 1)).log_mag(),
            Variant::Linearized => self.log_z2 - (2.0 * (k as f64 + 1.0)).ln(),
        }
    }
}

/// Computes A_0..A_K, choosing K as the smallest index whose geometric
/// majorant bound on Σ_{k>K}|A_k|² is below `tail_tol`.
pub fn coefficients(spec: &CoherentSpec, tail_tol: f64) -> Result<CoefficientVector> {
    coefficients_with_min(spec, tail_tol, 0)
}

/// [`coefficients`] with the truncation index forced to at least `min_k`.
pub fn coefficients_with_min(
    spec: &CoherentSpec,
    tail_tol: f64,
    min_k: usize,
) -> Result<CoefficientVector> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-8) {
        return Err(Error::invalid(format!("tail_tol {tail_tol} outside (0, 1e-8]")));
    }
    let abs_z = spec.z.norm();
    if abs_z == 0.0 {
        return Ok(CoefficientVector {
            spec: *spec,
            entries: std::iter::once(Complex64::new(1.0, 0.0))
                .chain(std::iter::repeat(Complex64::new(0.0, 0.0)).take(min_k))
                .collect(),
            tail_mass: 0.0,
        });
    }
    let src = TermSource {
        spec: *spec,
        log_z2: 2.0 * abs_z.ln(),
    };
    // ln |A_k|² before normalization
    let log_norm = match spec.variant {
        Variant::Nonlinear => -normalization_f(spec.m, spec.mu, abs_z)?.log_mag(),
        Variant::Linearized => -0.5 * abs_z * abs_z,
    };
    let log_tol = tail_tol.ln();
    let mut logs = vec![log_norm];
    let tail_mass;
    loop {
        let k = logs.len() - 1;
        let next = logs[k] + src.log_ratio(k);
        let r = src.log_ratio(k + 1);
        if r < 0.0 && k >= min_k {
            // ratios decrease from here on: tail ≤ |A_{K+1}|² / (1 - r_{K+1})
            let bound = next - (-r.exp()).ln_1p();
            if bound < log_tol {
                tail_mass = bound.exp();
                break;
            }
        }
        logs.push(next);
        if spec.index(logs.len()) > MAX_NU {
            return Err(Error::invalid(format!(
                "|z| = {abs_z:e} needs basis states beyond nu = {MAX_NU}"
            )));
        }
    }
    // ln F near 1e5 carries ~1e-11 absolute rounding; fold the retained mass
    // back in so Σ|A_k|² = 1 to machine precision
    let retained = log_sum(logs.iter().map(|&l| SignedLog::from_log(l))).log_mag();
    if retained.abs() > 1e-6 {
        return Err(Error::numerical(
            "coefficients",
            format!("retained mass e^{retained} disagrees with the normalization series"),
            retained.exp(),
        ));
    }
    logs.iter_mut().for_each(|l| *l -= retained);
    let theta = spec.z.arg()
        + match spec.variant {
            Variant::Nonlinear => PI,
            Variant::Linearized => 0.0,
        };
    let entries = logs
        .iter()
        .enumerate()
        .map(|(k, &l)| Complex64::from_polar((0.5 * l).exp(), theta * k as f64))
        .collect();
    Ok(CoefficientVector {
        spec: *spec,
        entries,
        tail_mass,
    })
}

/// √(Σ_k |a_{μ+(m+1)(k+1)} A_{k+1} - z A_k|²) over the retained pairs
/// k = 0..K-1; the truncation boundary is accounted for by `tail_mass`.
pub fn eigen_residual(coeffs: &CoefficientVector) -> Result<f64> {
    let spec = &coeffs.spec;
    if spec.variant != Variant::Nonlinear {
        return Err(Error::invalid("eigen_residual applies to the nonlinear variant"));
    }
    let sum: f64 = coeffs
        .entries
        .windows(2)
        .enumerate()
        .map(|(k, w)| (w[1] * ladder_element(spec.m, spec.index(k + 1)) - spec.z * w[0]).norm_sqr())
        .sum();
    Ok(sum.sqrt())
}

/// Ψ(x) = Σ_k A_k ψ_{μ+(m+1)k}(x) for a fixed coefficient vector.
#[derive(Debug, Clone)]
pub struct StateEvaluator {
    coeffs: CoefficientVector,
    basis: EigenfunctionEvaluator,
}

impl StateEvaluator {
    pub fn new(coeffs: CoefficientVector) -> Result<Self> {
        let basis = EigenfunctionEvaluator::ladder(coeffs.spec.m, coeffs.spec.mu, coeffs.truncation())?;
        Ok(StateEvaluator { coeffs, basis })
    }

    pub fn coefficients(&self) -> &CoefficientVector {
        &self.coeffs
    }

    pub fn basis(&self) -> &EigenfunctionEvaluator {
        &self.basis
    }

    /// Ψ(x) at time t.
    pub fn amplitude(&self, x: f64, t: f64) -> Complex64 {
        let mut vals = BasisValues::default();
        self.amplitude_with(x, t, &mut vals)
    }

    pub(crate) fn amplitude_with(&self, x: f64, t: f64, vals: &mut BasisValues) -> Complex64 {
        self.basis.eval_into(x, 0, vals);
        let phase = -self.coeffs.spec.omega() * t;
        self.coeffs
            .entries
            .iter()
            .zip(&vals.psi)
            .enumerate()
            .map(|(k, (a, p))| a * Complex64::from_polar(*p, phase * k as f64))
            .sum()
    }

    /// ρ(x, t) = |Ψ(x, t)|².
    pub fn density(&self, x: f64, t: f64) -> f64 {
        self.amplitude(x, t).norm_sqr()
    }

    /// Samples ρ on a uniform grid (row order follows `xs`).
    pub fn density_on(&self, xs: &[f64], t: f64) -> Vec<f64> {
        use rayon::prelude::*;
        xs.par_iter()
            .map_init(BasisValues::default, |vals, &x| self.amplitude_with(x, t, vals).norm_sqr())
            .collect()
    }

    /// Auto x-grid: ±(√(2E_max) + 4) with ≥ 20 points per shortest
    /// de Broglie wavelength 2π/√E_max.
    pub fn auto_grid(&self) -> (f64, f64, usize) {
        density_grid(&self.coeffs)
    }
}

pub fn density_grid(coeffs: &CoefficientVector) -> (f64, f64, usize) {
    let e_max = coeffs.max_energy().max(1.0);
    let half = (2.0 * e_max).sqrt() + 4.0;
    let wavelength = 2.0 * PI / e_max.sqrt();
    // odd count keeps x = 0 on the grid
    let n = (2.0 * half / (wavelength / 20.0)).ceil() as usize + 1;
    (-half, half, n | 1)
}

/// Convenience ρ(x, t) for a spec; rebuilds coefficients on every call.
pub fn density(spec: &CoherentSpec, x: f64, t: f64) -> Result<f64> {
    let eval = StateEvaluator::new(coefficients(spec, DEFAULT_TAIL_TOL)?)?;
    Ok(eval.density(x, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CatParity {
    Even,
    Odd,
}

impl std::str::FromStr for CatParity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(CatParity::Even),
            "odd" => Ok(CatParity::Odd),
            other => Err(Error::invalid(format!("unknown parity '{other}'"))),
        }
    }
}

/// (|+z⟩ ± |-z⟩)/√2 for real z > 0. With `normalize`, rescaled by
/// 1/√(1 ± D) to unit norm, where D = Σ(-1)^k |A_k|².
pub fn cat_coefficients(
    spec: &CoherentSpec,
    parity: CatParity,
    normalize: bool,
    tail_tol: f64,
) -> Result<CoefficientVector> {
    if spec.z.im != 0.0 || spec.z.re < 0.0 {
        return Err(Error::invalid("cat states need real z >= 0"));
    }
    let base = coefficients(spec, tail_tol)?;
    let keep = |k: usize| match parity {
        CatParity::Even => k % 2 == 0,
        CatParity::Odd => k % 2 == 1,
    };
    let sqrt2 = 2f64.sqrt();
    let entries: Vec<Complex64> = base
        .entries
        .iter()
        .enumerate()
        .map(|(k, a)| if keep(k) { a * sqrt2 } else { Complex64::new(0.0, 0.0) })
        .collect();
    // 1 ± D = 2 Σ_{k even/odd} |A_k|² up to the truncated tail
    let norm2: f64 = entries.iter().map(|a| a.norm_sqr()).sum::<f64>() + base.tail_mass;
    if norm2 == 0.0 || entries.iter().all(|a| *a == Complex64::new(0.0, 0.0)) {
        return Err(Error::invalid("cat state vanishes identically (odd cat at z = 0)"));
    }
    let (entries, tail_mass) = if normalize {
        let s = norm2.sqrt().recip();
        (
            entries.into_iter().map(|a| a * s).collect(),
            2.0 * base.tail_mass / norm2,
        )
    } else {
        (entries, 2.0 * base.tail_mass)
    };
    Ok(CoefficientVector {
        spec: *spec,
        entries,
        tail_mass,
    })
}

/// D(|z|, μ) = ⟨+z|-z⟩ = Σ(-1)^k |A_k|² for the nonlinear state.
pub fn overlap(m: usize, mu: i64, abs_z: f64) -> Result<f64> {
    let spec = CoherentSpec::nonlinear(m, mu, abs_z)?;
    let c = coefficients(&spec, DEFAULT_TAIL_TOL)?;
    Ok(c.entries
        .iter()
        .enumerate()
        .map(|(k, a)| if k % 2 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum())
}

/// D as the ratio ₁F_{m+1}(1; b; -x)/₁F_{m+1}(1; b; x).
pub fn overlap_closed_form(m: usize, mu: i64, abs_z: f64) -> Result<f64> {
    if abs_z == 0.0 {
        return Ok(1.0);
    }
    let x = series_argument(m, abs_z);
    let lower = series_lower_params(m, mu);
    let num = hypergeometric(&HypergeometricSpec::new(vec![1.0], lower.clone(), -x)?, SERIES_TOL)?.value;
    let den = hypergeometric(&HypergeometricSpec::new(vec![1.0], lower, x)?, SERIES_TOL)?.value;
    Ok((num / den).to_f64())
}

/// Indices of local maxima of `samples` exceeding `fraction` of the global max.
pub fn local_maxima_above(samples: &[f64], fraction: f64) -> Vec<usize> {
    let peak = samples.iter().copied().fold(0.0, f64::max);
    let floor = fraction * peak;
    (1..samples.len().saturating_sub(1))
        .filter(|&i| samples[i] > floor && samples[i] > samples[i - 1] && samples[i] >= samples[i + 1])
        .collect()
}
