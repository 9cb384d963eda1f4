use serde::{Deserialize, Serialize};

use crate::coherent::{
    coefficients, normalization_f, series_argument, series_lower_params, CoefficientVector,
    CoherentSpec, Variant, SERIES_TOL,
};
use crate::error::{Error, Result};
use crate::specfun::{hypergeometric, HypergeometricSpec, SignedLog};
use crate::system::energy_of_index;

/// Tail bound for direct moment sums. Weighted moments of small-|z| states
/// are themselves tiny, so the mass cut must sit far below them.
pub(crate) const MOMENT_TAIL_TOL: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Direct,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" | "closed-form" => Ok(Method::ClosedForm),
            "direct" => Ok(Method::Direct),
            other => Err(Error::invalid(format!("unknown method '{other}'"))),
        }
    }
}

/// x^j Π_i 1/(b_i)_j · ₁F_{m+1}(j+1; b+j; x) / ₁F_{m+1}(1; b; x), the ratio
/// behind the factorial moments ⟨N(N-1)...(N-j+1)⟩ = j! times this.
pub(crate) fn shifted_series_ratio(m: usize, mu: i64, abs_z: f64, j: usize) -> Result<SignedLog> {
    let x = series_argument(m, abs_z);
    let lower = series_lower_params(m, mu);
    let mut prefactor = SignedLog::from_f64(x).powi(j as i32);
    for &b in &lower {
        for i in 0..j {
            prefactor = prefactor / SignedLog::from_f64(b + i as f64);
        }
    }
    let shifted = HypergeometricSpec::new(
        vec![j as f64 + 1.0],
        lower.iter().map(|b| b + j as f64).collect(),
        x,
    )?;
    let num = hypergeometric(&shifted, SERIES_TOL)?.value;
    Ok(prefactor * num / normalization_f(m, mu, abs_z)?)
}

/// ⟨N⟩ with N the ladder-step number operator, N|μ+(m+1)k⟩ = k|μ+(m+1)k⟩.
pub fn number_expectation(spec: &CoherentSpec, method: Method) -> Result<f64> {
    let abs_z = spec.z.norm();
    match method {
        Method::ClosedForm => match spec.variant {
            Variant::Linearized => Ok(0.5 * abs_z * abs_z),
            Variant::Nonlinear if abs_z == 0.0 => Ok(0.0),
            Variant::Nonlinear => Ok(shifted_series_ratio(spec.m, spec.mu, abs_z, 1)?.to_f64()),
        },
        Method::Direct => Ok(direct_sum(&coefficients(spec, MOMENT_TAIL_TOL)?, |k| k as f64)),
    }
}

pub(crate) fn direct_sum(c: &CoefficientVector, f: impl Fn(usize) -> f64) -> f64 {
    c.entries.iter().enumerate().map(|(k, a)| f(k) * a.norm_sqr()).sum()
}

/// ⟨H⟩ for a coherent state.
///
/// The closed form is 2μ+2m+2 + (2m+2)⟨N⟩ with ⟨N⟩ a ratio of two
/// ₁F_{m+1} values (nonlinear) or |z|²/2 (linearized).
pub fn energy_expectation(spec: &CoherentSpec, method: Method) -> Result<f64> {
    let m = spec.m as f64;
    let ground = 2.0 * (spec.mu as f64 + m + 1.0);
    match method {
        Method::ClosedForm => Ok(ground + (2.0 * m + 2.0) * number_expectation(spec, method)?),
        Method::Direct => {
            let c = coefficients(spec, MOMENT_TAIL_TOL)?;
            Ok(direct_sum(&c, |k| energy_of_index(spec.m, spec.index(k))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::lowest_weights;

    #[test]
    fn ground_energies() {
        for m in [2usize, 4, 6] {
            for mu in lowest_weights(m) {
                for variant in [Variant::Nonlinear, Variant::Linearized] {
                    let spec = CoherentSpec::new(variant, m, mu, 0.0.into()).unwrap();
                    let expect = 2.0 * (mu + m as i64 + 1) as f64;
                    for method in [Method::ClosedForm, Method::Direct] {
                        assert_eq!(energy_expectation(&spec, method).unwrap(), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn linearized_line() {
        let spec = CoherentSpec::linearized(4, -5, 4.7).unwrap();
        let e = energy_expectation(&spec, Method::ClosedForm).unwrap();
        assert!((e - 110.45).abs() < 1e-12);
        let d = energy_expectation(&spec, Method::Direct).unwrap();
        assert!((d - e).abs() < 1e-9 * e);
    }

    #[test]
    fn closed_form_matches_direct() {
        for m in [2usize, 4, 6] {
            for mu in lowest_weights(m) {
                for abs_z in [1.0, 10.0, 1e3, 1e5] {
                    let spec = CoherentSpec::nonlinear(m, mu, abs_z).unwrap();
                    let a = energy_expectation(&spec, Method::ClosedForm).unwrap();
                    let b = energy_expectation(&spec, Method::Direct).unwrap();
                    let scale = a.abs().max(1.0);
                    assert!((a - b).abs() < 1e-9 * scale, "m={m} mu={mu} z={abs_z}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn number_and_energy_consistent() {
        let spec = CoherentSpec::nonlinear(4, 3, 777.0).unwrap();
        let n = number_expectation(&spec, Method::Direct).unwrap();
        let e = energy_expectation(&spec, Method::Direct).unwrap();
        assert!((n - (e - 2.0 * (3.0 + 4.0 + 1.0)) / 10.0).abs() < 1e-10);
    }
}
