//! The rationally extended oscillator: spectrum, partner potential,
//! exceptional-Hermite eigenfunctions and ladder matrix elements.
//!
//! Energies are in the dimensionless units where the undeformed
//! Hamiltonian is -d²/dx² + x². The index set of the deformed spectrum is
//! {-m-1, 0, 1, 2, ...} with E_ν = 2(ν+m+1).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{hermite_phi_seq, integrate_vec, mod_hermite_seq, SignedLog};

/// Largest deformation order supported by the recurrences.
pub const MAX_M: usize = 12;
/// Largest spectral index supported.
pub const MAX_NU: i64 = 10_000;

pub fn validate_m(m: usize) -> Result<()> {
    if m % 2 != 0 {
        return Err(Error::invalid(format!("m = {m} must be even")));
    }
    if m > MAX_M {
        return Err(Error::invalid(format!("m = {m} exceeds supported maximum {MAX_M}")));
    }
    Ok(())
}

/// The m+1 lowest weights -m-1, 1, 2, ..., m.
pub fn lowest_weights(m: usize) -> Vec<i64> {
    std::iter::once(-(m as i64) - 1).chain(1..=m as i64).collect()
}

pub fn is_lowest_weight(m: usize, mu: i64) -> bool {
    mu == -(m as i64) - 1 || (1..=m as i64).contains(&mu)
}

/// Whether ν belongs to the spectrum {-m-1, 0, 1, ...}.
pub fn is_valid_index(m: usize, nu: i64) -> bool {
    (nu == -(m as i64) - 1 || nu >= 0) && nu <= MAX_NU
}

/// Deformation order of the partner Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformedOscillator {
    m: usize,
}

impl DeformedOscillator {
    pub fn new(m: usize) -> Result<Self> {
        validate_m(m)?;
        Ok(DeformedOscillator { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn energy(&self, nu: i64) -> f64 {
        energy_of_index(self.m, nu)
    }

    /// Spectrum indices in increasing energy, first `count` of them.
    pub fn indices(&self, count: usize) -> Vec<i64> {
        std::iter::once(-(self.m as i64) - 1)
            .chain(0..)
            .take(count)
            .collect()
    }
}

/// Eigenstate ν = μ + (m+1)k on the ladder with lowest weight μ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateLabel {
    pub m: usize,
    pub mu: i64,
    pub k: usize,
}

impl StateLabel {
    pub fn new(m: usize, mu: i64, k: usize) -> Result<Self> {
        validate_m(m)?;
        if !is_lowest_weight(m, mu) {
            return Err(Error::invalid(format!("mu = {mu} is not a lowest weight for m = {m}")));
        }
        let label = StateLabel { m, mu, k };
        if label.nu() > MAX_NU {
            return Err(Error::invalid(format!("index {} beyond supported range", label.nu())));
        }
        Ok(label)
    }

    /// Label of the state with spectral index ν.
    pub fn from_index(m: usize, nu: i64) -> Result<Self> {
        validate_m(m)?;
        if !is_valid_index(m, nu) {
            return Err(Error::invalid(format!("nu = {nu} not in the spectrum for m = {m}")));
        }
        let step = m as i64 + 1;
        if nu == -step {
            return Ok(StateLabel { m, mu: nu, k: 0 });
        }
        // ν ≡ μ (mod m+1), with residue 0 belonging to the μ = -m-1 ladder
        let r = nu.rem_euclid(step);
        let mu = if r == 0 { -step } else { r };
        Ok(StateLabel {
            m,
            mu,
            k: ((nu - mu) / step) as usize,
        })
    }

    pub fn nu(&self) -> i64 {
        self.mu + (self.m as i64 + 1) * self.k as i64
    }

    pub fn energy(&self) -> f64 {
        energy_of_index(self.m, self.nu())
    }
}

/// E_ν = 2(ν+m+1).
pub fn energy_of_index(m: usize, nu: i64) -> f64 {
    2.0 * (nu + m as i64 + 1) as f64
}

/// E = 2μ + (2m+2)(k+1).
pub fn energy(label: &StateLabel) -> f64 {
    label.energy()
}

/// Partner potential V(x) = x² - 2[𝓗_m''/𝓗_m - (𝓗_m'/𝓗_m)² + 1].
pub fn potential(m: usize, x: f64) -> f64 {
    let h = mod_hermite_seq(m, x);
    let v = h[m];
    let d1 = if m >= 1 { 2.0 * m as f64 * h[m - 1] } else { 0.0 };
    let d2 = if m >= 2 { 4.0 * (m * (m - 1)) as f64 * h[m - 2] } else { 0.0 };
    let l = d1 / v;
    x * x - 2.0 * (d2 / v - l * l + 1.0)
}

/// Constant separating [`potential`] from the Hamiltonian whose spectrum is
/// E_ν = 2(ν+m+1): H = -d²/dx² + V(x) + 2m + 1.
pub fn energy_offset(m: usize) -> f64 {
    (2 * m + 1) as f64
}

/// 𝓗_{m-1}, 𝓗_m and their first two derivatives at x.
#[derive(Debug, Clone, Copy)]
struct ModHermitePair {
    u: [f64; 3],
    v: [f64; 3],
}

impl ModHermitePair {
    fn at(m: usize, x: f64) -> Self {
        let h = mod_hermite_seq(m, x);
        let get = |n: isize| if n >= 0 { h[n as usize] } else { 0.0 };
        let mi = m as isize;
        let mf = m as f64;
        let v = [
            h[m],
            2.0 * mf * get(mi - 1),
            4.0 * mf * (mf - 1.0) * get(mi - 2),
        ];
        let u = if m == 0 {
            [0.0; 3]
        } else {
            [
                get(mi - 1),
                2.0 * (mf - 1.0) * get(mi - 2),
                4.0 * (mf - 1.0) * (mf - 2.0) * get(mi - 3),
            ]
        };
        ModHermitePair { u, v }
    }

    /// R = 𝓗_{m-1}/𝓗_m with R', R''.
    fn ratio(&self) -> [f64; 3] {
        let [u, u1, u2] = self.u;
        let [v, v1, v2] = self.v;
        let r = u / v;
        let w = (u1 * v - u * v1) / (v * v);
        let r2 = (u2 * v - u * v2) / (v * v) - 2.0 * v1 * w / v;
        [r, w, r2]
    }
}

fn ground_normalization(m: usize) -> f64 {
    let mut fact = 1.0;
    for j in 1..=m {
        fact *= j as f64;
    }
    (2f64.powi(m as i32) * fact / PI.sqrt()).sqrt()
}

/// Values (and optionally first/second derivatives) of a fixed set of
/// eigenfunctions at a point.
#[derive(Debug, Clone, Default)]
pub struct BasisValues {
    pub psi: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

/// Evaluates ψ_ν for a fixed list of indices of one system.
///
/// For ν ≥ 0 it uses the two-term form
/// ψ_ν = sqrt((ν+1)/(ν+m+1)) φ_{ν+1} + m·sqrt(2/(ν+m+1)) · (𝓗_{m-1}/𝓗_m) φ_ν,
/// i.e. N_ν e^{-x²/2} y_{ν+m+1}/𝓗_m with y = 𝓗_m H_{ν+1} + 2m 𝓗_{m-1} H_ν
/// (the coefficient 2m comes from 𝓗_m' = 2m 𝓗_{m-1}), but it never forms
/// H_ν or its normalization separately.
#[derive(Debug, Clone)]
pub struct EigenfunctionEvaluator {
    m: usize,
    indices: Vec<i64>,
    coef: Vec<(f64, f64)>,
    ground_norm: f64,
    phi_max: usize,
}

impl EigenfunctionEvaluator {
    pub fn new(m: usize, indices: Vec<i64>) -> Result<Self> {
        validate_m(m)?;
        if let Some(bad) = indices.iter().find(|&&nu| !is_valid_index(m, nu)) {
            return Err(Error::invalid(format!("nu = {bad} not in the spectrum for m = {m}")));
        }
        let mf = m as f64;
        let coef = indices
            .iter()
            .map(|&nu| {
                if nu < 0 {
                    (0.0, 0.0)
                } else {
                    let nf = nu as f64;
                    (
                        ((nf + 1.0) / (nf + mf + 1.0)).sqrt(),
                        mf * (2.0 / (nf + mf + 1.0)).sqrt(),
                    )
                }
            })
            .collect();
        let phi_max = indices.iter().copied().max().unwrap_or(0).max(0) as usize + 2;
        Ok(EigenfunctionEvaluator {
            m,
            indices,
            coef,
            ground_norm: ground_normalization(m),
            phi_max,
        })
    }

    /// The basis ψ_{μ+(m+1)k}, k = 0..=kmax, of one ladder.
    pub fn ladder(m: usize, mu: i64, kmax: usize) -> Result<Self> {
        validate_m(m)?;
        if !is_lowest_weight(m, mu) {
            return Err(Error::invalid(format!("mu = {mu} is not a lowest weight for m = {m}")));
        }
        let step = m as i64 + 1;
        Self::new(m, (0..=kmax as i64).map(|k| mu + step * k).collect())
    }

    pub fn for_label(label: &StateLabel) -> Result<Self> {
        Self::new(label.m, vec![label.nu()])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Largest turning point among the basis states plus a margin past which
    /// every function is below ~e^-100.
    pub fn support_half_width(&self) -> f64 {
        let numax = self.indices.iter().copied().max().unwrap_or(0).max(0) as f64;
        (2.0 * numax + 3.0).sqrt() + 7.0
    }

    /// Fills `out` with ψ values; derivatives up to `derivative_order`.
    pub fn eval_into(&self, x: f64, derivative_order: u8, out: &mut BasisValues) {
        let n = self.indices.len();
        out.psi.resize(n, 0.0);
        out.d1.resize(if derivative_order >= 1 { n } else { 0 }, 0.0);
        out.d2.resize(if derivative_order >= 2 { n } else { 0 }, 0.0);

        let pair = ModHermitePair::at(self.m, x);
        let [r, r1, r2] = pair.ratio();
        let phi = hermite_phi_seq(self.phi_max, x);
        let dphi = |j: usize| -> f64 {
            let jf = j as f64;
            let lower = if j > 0 { (jf / 2.0).sqrt() * phi[j - 1] } else { 0.0 };
            lower - ((jf + 1.0) / 2.0).sqrt() * phi[j + 1]
        };
        let d2phi = |j: usize| (x * x - 2.0 * j as f64 - 1.0) * phi[j];

        for (i, (&nu, &(alpha, beta))) in self.indices.iter().zip(&self.coef).enumerate() {
            if nu < 0 {
                let [v, v1, v2] = pair.v;
                let g = self.ground_norm * (-0.5 * x * x).exp() / v;
                out.psi[i] = g;
                if derivative_order >= 1 {
                    let s = -x - v1 / v;
                    out.d1[i] = g * s;
                    if derivative_order >= 2 {
                        let s1 = -1.0 - (v2 / v - (v1 / v) * (v1 / v));
                        out.d2[i] = g * (s * s + s1);
                    }
                }
                continue;
            }
            let j = nu as usize;
            out.psi[i] = alpha * phi[j + 1] + beta * r * phi[j];
            if derivative_order >= 1 {
                let (p0, p0d) = (phi[j], dphi(j));
                out.d1[i] = alpha * dphi(j + 1) + beta * (r1 * p0 + r * p0d);
                if derivative_order >= 2 {
                    out.d2[i] =
                        alpha * d2phi(j + 1) + beta * (r2 * p0 + 2.0 * r1 * p0d + r * d2phi(j));
                }
            }
        }
    }

    pub fn eval(&self, x: f64, derivative_order: u8) -> BasisValues {
        let mut out = BasisValues::default();
        self.eval_into(x, derivative_order, &mut out);
        out
    }
}

/// ψ_ν(x) or its first/second derivative.
pub fn wavefunction(label: &StateLabel, x: f64, derivative_order: u8) -> f64 {
    assert!(derivative_order <= 2, "derivative order {derivative_order} not supported");
    let ev = EigenfunctionEvaluator::for_label(label).expect("validated label");
    let vals = ev.eval(x, derivative_order);
    match derivative_order {
        0 => vals.psi[0],
        1 => vals.d1[0],
        _ => vals.d2[0],
    }
}

/// a_ν² = 2^{m+1}(ν-1)(ν-2)...(ν-m)(ν+m+1) in log space.
pub fn ladder_element_sq(m: usize, nu: i64) -> SignedLog {
    let mut acc = SignedLog::from_f64(2f64.powi(m as i32 + 1));
    for j in 1..=m as i64 {
        acc = acc * SignedLog::from_f64((nu - j) as f64);
    }
    acc * SignedLog::from_f64((nu + m as i64 + 1) as f64)
}

/// a_ν² in plain floating point; exact while the product stays below 2^53.
pub fn ladder_element_sq_f64(m: usize, nu: i64) -> f64 {
    let mut acc = 2f64.powi(m as i32 + 1) * (nu + m as i64 + 1) as f64;
    for j in 1..=m as i64 {
        acc *= (nu - j) as f64;
    }
    acc
}

/// Matrix element a_ν = ⟨ν-m-1|c|ν⟩ = -[2^{m+1}(ν-1)...(ν-m)(ν+m+1)]^{1/2}.
pub fn ladder_element(m: usize, nu: i64) -> f64 {
    ladder_element_log(m, nu).to_f64()
}

/// [`ladder_element`] as a SignedLog, for products that leave f64 range.
pub fn ladder_element_log(m: usize, nu: i64) -> SignedLog {
    assert!(is_valid_index(m, nu), "nu = {nu} not in the spectrum for m = {m}");
    let sq = ladder_element_sq(m, nu);
    assert!(sq.sign() >= 0, "negative radicand for m = {m}, nu = {nu}");
    -sq.sqrt()
}

/// ⟨k-1|c̃|k⟩ = sqrt(2k) in ladder-step indexing.
pub fn linearized_element(k: usize) -> f64 {
    (2.0 * k as f64).sqrt()
}

/// Q_m(E) = E·Π(E-2m-2-2i), or Q_m(E+2m+2) = (E+2m+2)·Π(E-2i) when shifted.
pub fn q_polynomial(m: usize, e: f64, shifted: bool) -> f64 {
    let mf = m as f64;
    let (lead, shift) = if shifted {
        (e + 2.0 * mf + 2.0, 0.0)
    } else {
        (e, 2.0 * mf + 2.0)
    };
    (1..=m).fold(lead, |acc, i| acc * (e - shift - 2.0 * i as f64))
}

/// |a_{ν+m+1}² - a_ν² - (Q_m(E_ν+2m+2) - Q_m(E_ν))|, the commutator
/// [c, c†] evaluated on |ν⟩.
pub fn algebra_residual(m: usize, nu: i64) -> f64 {
    let e = energy_of_index(m, nu);
    let up = ladder_element_sq_f64(m, nu + m as i64 + 1);
    let here = ladder_element_sq_f64(m, nu);
    ((up - here) - (q_polynomial(m, e, true) - q_polynomial(m, e, false))).abs()
}

/// max |(-ψ'' + (V + 2m + 1)ψ - Eψ)| / max|ψ| over a grid of spacing
/// `grid_step` covering the state's support.
pub fn verify_hamiltonian(label: &StateLabel, grid_step: f64) -> Result<f64> {
    if !(1e-4..=1e-2).contains(&grid_step) {
        return Err(Error::invalid(format!("grid_step {grid_step} outside [1e-4, 1e-2]")));
    }
    let ev = EigenfunctionEvaluator::for_label(label)?;
    let half = ev.support_half_width();
    let e = label.energy();
    let offset = energy_offset(label.m);
    let n = (2.0 * half / grid_step).ceil() as usize;
    let mut vals = BasisValues::default();
    let (mut worst, mut peak) = (0.0f64, 0.0f64);
    for i in 0..=n {
        let x = -half + grid_step * i as f64;
        ev.eval_into(x, 2, &mut vals);
        let psi = vals.psi[0];
        let res = -vals.d2[0] + (potential(label.m, x) + offset - e) * psi;
        worst = worst.max(res.abs());
        peak = peak.max(psi.abs());
    }
    Ok(worst / peak)
}

/// Gram matrix ∫ψ_a ψ_b dx for the given indices, by adaptive quadrature.
pub fn gram_matrix(m: usize, indices: &[i64], abs_tol: f64) -> Result<Vec<Vec<f64>>> {
    let ev = EigenfunctionEvaluator::new(m, indices.to_vec())?;
    let n = ev.len();
    let half = ev.support_half_width();
    let est = integrate_vec(
        |x, out: &mut [f64]| {
            let v = ev.eval(x, 0);
            let mut idx = 0;
            for a in 0..n {
                for b in a..n {
                    out[idx] = v.psi[a] * v.psi[b];
                    idx += 1;
                }
            }
        },
        n * (n + 1) / 2,
        -half,
        half,
        abs_tol,
        32,
    )?;
    let mut g = vec![vec![0.0; n]; n];
    let mut idx = 0;
    for a in 0..n {
        for b in a..n {
            g[a][b] = est.values[idx];
            g[b][a] = est.values[idx];
            idx += 1;
        }
    }
    Ok(g)
}
