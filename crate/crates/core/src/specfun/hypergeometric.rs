//! Pochhammer symbols and generalized hypergeometric series ₚF_q.

use serde::{Deserialize, Serialize};

use super::signed_log::SignedLog;
use crate::error::{Error, Result};

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 1_000_000;

/// (a)_k = a(a+1)...(a+k-1) as a k-fold product in log space.
/// A vanishing factor gives a zero result.
pub fn log_pochhammer(a: f64, k: usize) -> SignedLog {
    let mut acc = SignedLog::ONE;
    for j in 0..k {
        acc = acc * SignedLog::from_f64(a + j as f64);
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Parameters of ₚF_q(a_1..a_p; b_1..b_q; x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergeometricSpec {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    /// Series argument. Negative values are accepted (alternating series).
    pub argument: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: SignedLog,
    pub terms: usize,
}

impl HypergeometricSpec {
    pub fn new(upper: Vec<f64>, lower: Vec<f64>, argument: f64) -> Result<Self> {
        let spec = HypergeometricSpec {
            upper,
            lower,
            argument,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.upper.len() > self.lower.len() {
            return Err(Error::invalid(format!(
                "{}F{} series diverges; need p <= q",
                self.upper.len(),
                self.lower.len()
            )));
        }
        for &b in &self.lower {
            if !b.is_finite() || (b <= 0.0 && b == b.round()) {
                return Err(Error::invalid(format!(
                    "lower parameter {b} is zero or a negative integer"
                )));
            }
        }
        if !self.argument.is_finite() || self.upper.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("non-finite hypergeometric parameter"));
        }
        Ok(())
    }
}

/// Sums ₚF_q by forward term recurrence
/// t_{k+1} = t_k · Π(a_i+k) · x / (Π(b_j+k) · (k+1)).
///
/// Summation stops only once the term ratio has dropped below one, every
/// lower parameter has turned positive, and the geometric majorant of the
/// remaining tail is below `relative_tol` times the running sum.
pub fn hypergeometric(spec: &HypergeometricSpec, relative_tol: f64) -> Result<SeriesValue> {
    spec.validate()?;
    if !(relative_tol > 0.0 && relative_tol <= 1e-6) {
        return Err(Error::invalid(format!(
            "relative_tol {relative_tol} outside (0, 1e-6]"
        )));
    }
    let x = SignedLog::from_f64(spec.argument);
    if x.is_zero() {
        return Ok(SeriesValue {
            value: SignedLog::ONE,
            terms: 1,
        });
    }
    // past this index every (b_j + k) is positive, so the ratio is monotone
    let settle = spec
        .lower
        .iter()
        .map(|&b| if b < 0.0 { (-b).ceil() as usize } else { 0 })
        .max()
        .unwrap_or(0);

    let mut term = SignedLog::ONE;
    let mut sum = SignedLog::ONE;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let mut ratio = x / SignedLog::from_f64(kf + 1.0);
        for &a in &spec.upper {
            ratio = ratio * SignedLog::from_f64(a + kf);
        }
        for &b in &spec.lower {
            ratio = ratio / SignedLog::from_f64(b + kf);
        }
        if ratio.is_zero() {
            // terminating series
            return Ok(SeriesValue {
                value: sum,
                terms: k + 1,
            });
        }
        term = term * ratio;
        sum = sum.add(term);
        let r = ratio.log_mag();
        if k >= settle && r < 0.0 {
            // tail ≤ |t| · r/(1-r) with r the current (largest remaining) ratio
            let tail = term.log_mag() + r - (-r.exp()).ln_1p();
            if tail < relative_tol.ln() + sum.log_mag() {
                return Ok(SeriesValue {
                    value: sum,
                    terms: k + 2,
                });
            }
        }
    }
    Err(Error::numerical(
        "hypergeometric",
        format!("no convergence within {MAX_TERMS} terms"),
        sum.to_f64(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(log_pochhammer(3.7, 0), SignedLog::ONE);
        let p = log_pochhammer(-0.2, 1).to_f64();
        assert!((p + 0.2).abs() < 1e-16);
        let p = log_pochhammer(-0.2, 3).to_f64();
        assert!((p + 36.0 / 125.0).abs() < 1e-15);
        assert!(log_pochhammer(-2.0, 5).is_zero());
    }

    #[test]
    fn argument_zero_is_one() {
        let spec = HypergeometricSpec::new(vec![2.5], vec![-0.3, 7.0], 0.0).unwrap();
        let v = hypergeometric(&spec, 1e-12).unwrap();
        assert_eq!(v.value, SignedLog::ONE);
    }

    #[test]
    fn exponential_series() {
        let spec = HypergeometricSpec::new(vec![1.0], vec![1.0], 2.5).unwrap();
        let v = hypergeometric(&spec, 1e-14).unwrap().value.to_f64();
        assert!((v - 2.5f64.exp()).abs() < 1e-14 * 2.5f64.exp());
        let spec = HypergeometricSpec::new(vec![], vec![], -3.0).unwrap();
        let v = hypergeometric(&spec, 1e-15).unwrap().value.to_f64();
        assert!((v - (-3.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn first_term_of_0f4() {
        // k = 1 term at argument 1 is 1/((-1/5)(-2/5)(-3/5)(-4/5)) = 625/24
        let lower = vec![-0.2, -0.4, -0.6, -0.8];
        let t1 = SignedLog::ONE / lower.iter().fold(SignedLog::ONE, |acc, &b| acc * b.into());
        assert!((t1.to_f64() - 625.0 / 24.0).abs() < 1e-12);
        // the series value is at least 1 + 625/24 since all terms are positive
        let spec = HypergeometricSpec::new(vec![], lower, 1.0).unwrap();
        let v = hypergeometric(&spec, 1e-14).unwrap();
        assert!(v.value.to_f64() > 1.0 + 625.0 / 24.0);
        // oracle: straight f64 sum
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..40 {
            let kf = k as f64;
            term /= (kf - 0.2) * (kf - 0.4) * (kf - 0.6) * (kf - 0.8) * (kf + 1.0);
            sum += term;
        }
        assert!((v.value.to_f64() - sum).abs() < 1e-13 * sum);
    }

    #[test]
    fn huge_argument_stays_in_log_space() {
        // ₀F₆ at |z|²/14⁷ for |z| = 1e8: value overflows f64
        let lower: Vec<f64> = (1..=6).map(|i| -(i as f64) / 7.0).collect();
        let x = 1e16 / 14f64.powi(7);
        let spec = HypergeometricSpec::new(vec![], lower, x).unwrap();
        let v = hypergeometric(&spec, 1e-15).unwrap();
        assert!(v.value.log_mag() > 100.0);
        assert!(v.terms < 200, "terms = {}", v.terms);
    }

    #[test]
    fn tolerance_refinement_is_stable() {
        let spec = HypergeometricSpec::new(vec![1.0], vec![0.6, 0.8, 1.0, 1.2, 2.0], 12345.0).unwrap();
        let mut prev: Option<f64> = None;
        let mut tol = 1e-6;
        while tol > 1e-15 {
            let v = hypergeometric(&spec, tol).unwrap().value.log_mag();
            if let Some(p) = prev {
                assert!((v - p).abs() < 2.0 * tol, "tol {tol}: {v} vs {p}");
            }
            prev = Some(v);
            tol /= 2.0;
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(HypergeometricSpec::new(vec![1.0, 2.0], vec![3.0], 0.1).is_err());
        assert!(HypergeometricSpec::new(vec![1.0], vec![-2.0], 0.1).is_err());
        assert!(HypergeometricSpec::new(vec![1.0], vec![0.0], 0.1).is_err());
        let ok = HypergeometricSpec::new(vec![1.0], vec![1.5], 0.1).unwrap();
        assert!(hypergeometric(&ok, 1e-3).is_err());
        assert!(hypergeometric(&ok, 0.0).is_err());
    }
}
