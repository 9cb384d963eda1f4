use serde::{Deserialize, Serialize};

use super::energy::{direct_sum, shifted_series_ratio, Method};
use super::energy::MOMENT_TAIL_TOL;
use crate::coherent::{coefficients, CoherentSpec, Variant};
use crate::error::Result;

/// First two factorial moments of the ladder-step number N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumberMoments {
    pub mean: f64,
    /// ⟨N(N-1)⟩
    pub factorial2: f64,
}

impl NumberMoments {
    /// Q = (ΔN² - ⟨N⟩)/⟨N⟩ = ⟨N(N-1)⟩/⟨N⟩ - ⟨N⟩, with Q := 0 at ⟨N⟩ = 0.
    pub fn mandel_q(&self) -> f64 {
        if self.mean == 0.0 {
            0.0
        } else {
            self.factorial2 / self.mean - self.mean
        }
    }
}

pub fn number_moments(spec: &CoherentSpec, method: Method) -> Result<NumberMoments> {
    let abs_z = spec.z.norm();
    if abs_z == 0.0 {
        return Ok(NumberMoments {
            mean: 0.0,
            factorial2: 0.0,
        });
    }
    match (method, spec.variant) {
        (Method::ClosedForm, Variant::Linearized) => {
            let mean = 0.5 * abs_z * abs_z;
            Ok(NumberMoments {
                mean,
                factorial2: mean * mean,
            })
        }
        (Method::ClosedForm, Variant::Nonlinear) => Ok(NumberMoments {
            mean: shifted_series_ratio(spec.m, spec.mu, abs_z, 1)?.to_f64(),
            factorial2: 2.0 * shifted_series_ratio(spec.m, spec.mu, abs_z, 2)?.to_f64(),
        }),
        (Method::Direct, _) => {
            let c = coefficients(spec, MOMENT_TAIL_TOL)?;
            Ok(NumberMoments {
                mean: direct_sum(&c, |k| k as f64),
                factorial2: direct_sum(&c, |k| (k * k.saturating_sub(1)) as f64),
            })
        }
    }
}

/// Mandel Q of the ladder-step number distribution.
pub fn mandel_q(spec: &CoherentSpec, method: Method) -> Result<f64> {
    if spec.variant == Variant::Linearized && method == Method::ClosedForm {
        return Ok(0.0);
    }
    Ok(number_moments(spec, method)?.mandel_q())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::lowest_weights;

    #[test]
    fn origin_is_zero() {
        let spec = CoherentSpec::nonlinear(4, -5, 0.0).unwrap();
        assert_eq!(mandel_q(&spec, Method::ClosedForm).unwrap(), 0.0);
        assert_eq!(mandel_q(&spec, Method::Direct).unwrap(), 0.0);
    }

    #[test]
    fn linearized_is_poissonian() {
        for abs_z in [0.1, 1.0, 7.0, 40.0] {
            let spec = CoherentSpec::linearized(6, 2, abs_z).unwrap();
            assert_eq!(mandel_q(&spec, Method::ClosedForm).unwrap(), 0.0);
            assert!(mandel_q(&spec, Method::Direct).unwrap().abs() < 1e-12 * abs_z.max(1.0).powi(2));
            let n = number_moments(&spec, Method::Direct).unwrap();
            assert!((n.mean - abs_z * abs_z / 2.0).abs() < 1e-12 * n.mean.max(1.0));
        }
    }

    #[test]
    fn m4_pochhammer_form() {
        // ⟨N⟩ = |z|²/(32 Π(μ+j)) · ₁F₅(2; ...)/₁F₅(1; ...) written out for μ = 2
        let mu = 2.0f64;
        let abs_z = 300.0f64;
        let x = abs_z * abs_z / 1e5;
        let b = [(mu + 4.0) / 5.0, (mu + 3.0) / 5.0, (mu + 2.0) / 5.0, (mu + 1.0) / 5.0, (mu + 10.0) / 5.0];
        let series = |a: f64, shift: f64| {
            let (mut t, mut s) = (1.0, 1.0);
            for k in 0..200 {
                let kf = k as f64;
                t *= (a + kf) * x / ((kf + 1.0) * b.iter().map(|bi| bi + shift + kf).product::<f64>());
                s += t;
            }
            s
        };
        let prod: f64 = [mu + 4.0, mu + 3.0, mu + 2.0, mu + 1.0, mu + 10.0].iter().product();
        let mean = abs_z * abs_z / (32.0 * prod) * series(2.0, 1.0) / series(1.0, 0.0);
        let spec = CoherentSpec::nonlinear(4, 2, abs_z).unwrap();
        let n = number_moments(&spec, Method::ClosedForm).unwrap();
        assert!((n.mean - mean).abs() < 1e-12 * mean);
    }

    #[test]
    fn routes_agree_and_sub_poissonian() {
        for m in [2usize, 4, 6] {
            for mu in lowest_weights(m) {
                for abs_z in [1.0, 10.0, 1e3, 1e5] {
                    let spec = CoherentSpec::nonlinear(m, mu, abs_z).unwrap();
                    let a = number_moments(&spec, Method::ClosedForm).unwrap();
                    let b = number_moments(&spec, Method::Direct).unwrap();
                    assert!((a.mean - b.mean).abs() <= 1e-9 * a.mean);
                    assert!((a.factorial2 - b.factorial2).abs() <= 1e-9 * a.factorial2, "m={m} mu={mu} z={abs_z}: {a:?} {b:?}");
                    let (qa, qb) = (a.mandel_q(), b.mandel_q());
                    assert!((qa - qb).abs() <= 1e-8 * qa.abs().max(1e-3), "m={m} mu={mu} z={abs_z}: {qa} {qb}");
                    if m == 4 {
                        assert!(qb < 0.0);
                    }
                }
            }
        }
    }
}
