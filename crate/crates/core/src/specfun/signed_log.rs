//! Sign + log-magnitude representation of real numbers.
//!
//! Coherent-state coefficients at |z| ~ 1e8 involve products such as
//! `(2m+2)^{k(m+1)/2}` that leave the range of `f64` after a handful of
//! terms. Everything upstream of normalization is carried as a
//! [`SignedLog`] and only converted back once magnitudes are O(1).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLog {
    sign: i8,
    log_mag: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };
    pub const ONE: SignedLog = SignedLog {
        sign: 1,
        log_mag: 0.0,
    };

    /// Builds from an explicit sign and natural-log magnitude. A zero sign
    /// discards `log_mag`.
    pub fn new(sign: i8, log_mag: f64) -> Self {
        match sign.signum() {
            0 => Self::ZERO,
            s => SignedLog { sign: s, log_mag },
        }
    }

    pub fn from_log(log_mag: f64) -> Self {
        Self::new(1, log_mag)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                log_mag: x.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_mag.exp(),
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// Natural log of |value|; `-inf` for zero.
    pub fn log_mag(self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.log_mag
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            SignedLog {
                sign: 1,
                log_mag: self.log_mag,
            }
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero SignedLog");
        SignedLog {
            sign: self.sign,
            log_mag: -self.log_mag,
        }
    }

    pub fn sqrt(self) -> Self {
        assert!(self.sign >= 0, "square root of negative SignedLog");
        if self.sign == 0 {
            self
        } else {
            SignedLog {
                sign: 1,
                log_mag: 0.5 * self.log_mag,
            }
        }
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            return self;
        }
        let sign = if self.sign < 0 && n % 2 != 0 { -1 } else { 1 };
        SignedLog {
            sign,
            log_mag: f64::from(n) * self.log_mag,
        }
    }

    /// Sum with log-sum-exp on the magnitudes; opposite signs subtract.
    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_mag >= other.log_mag {
            (self, other)
        } else {
            (other, self)
        };
        let d = small.log_mag - big.log_mag;
        if big.sign == small.sign {
            SignedLog {
                sign: big.sign,
                log_mag: big.log_mag + d.exp().ln_1p(),
            }
        } else if d == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: big.sign,
                log_mag: big.log_mag + (-d.exp()).ln_1p(),
            }
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(-other)
    }

    /// Compares magnitudes only.
    pub fn cmp_abs(self, other: Self) -> Ordering {
        self.log_mag()
            .partial_cmp(&other.log_mag())
            .unwrap_or(Ordering::Equal)
    }
}

impl Default for SignedLog {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Neg for SignedLog {
    type Output = SignedLog;
    fn neg(self) -> Self {
        SignedLog {
            sign: -self.sign,
            log_mag: self.log_mag,
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: Self) -> Self {
        let sign = self.sign * rhs.sign;
        if sign == 0 {
            Self::ZERO
        } else {
            SignedLog {
                sign,
                log_mag: self.log_mag + rhs.log_mag,
            }
        }
    }
}

impl Div for SignedLog {
    type Output = SignedLog;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl From<f64> for SignedLog {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Debug for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "SignedLog(0)"),
            1 => write!(f, "SignedLog(+exp({}))", self.log_mag),
            _ => write!(f, "SignedLog(-exp({}))", self.log_mag),
        }
    }
}

/// Sums a sequence in log space.
pub fn log_sum<I: IntoIterator<Item = SignedLog>>(terms: I) -> SignedLog {
    terms.into_iter().fold(SignedLog::ZERO, SignedLog::add)
}
