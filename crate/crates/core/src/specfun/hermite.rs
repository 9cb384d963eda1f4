//! Hermite-family recurrences.

use std::f64::consts::PI;

/// Physicists' Hermite polynomial H_n(x) by three-term recurrence.
///
/// Overflows to a non-finite value around n ~ 150 for moderate x; callers
/// needing large n go through [`hermite_phi`].
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for j in 1..n {
        let next = 2.0 * x * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Values 𝓗_0(x) ..= 𝓗_nmax(x) of the modified Hermite polynomials
/// 𝓗_n(x) = (-i)^n H_n(ix). The recurrence has only positive coefficients.
pub fn mod_hermite_seq(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(1.0);
    if nmax >= 1 {
        out.push(2.0 * x);
    }
    for j in 1..nmax {
        let next = 2.0 * x * out[j] + 2.0 * j as f64 * out[j - 1];
        out.push(next);
    }
    out
}

/// 𝓗_n(x) or its first/second derivative.
///
/// Differentiating the recurrence gives 𝓗_n' = 2n 𝓗_{n-1}, hence
/// 𝓗_n'' = 4n(n-1) 𝓗_{n-2}.
pub fn mod_hermite(n: usize, x: f64, derivative_order: u8) -> f64 {
    match derivative_order {
        0 => mod_hermite_seq(n, x)[n],
        1 => {
            if n == 0 {
                0.0
            } else {
                2.0 * n as f64 * mod_hermite_seq(n - 1, x)[n - 1]
            }
        }
        2 => {
            if n < 2 {
                0.0
            } else {
                4.0 * (n * (n - 1)) as f64 * mod_hermite_seq(n - 2, x)[n - 2]
            }
        }
        d => panic!("mod_hermite: derivative order {d} not supported"),
    }
}

/// Rescaling threshold for the normalized recurrence.
const SCALE_UP: f64 = 1e150;

/// L²-normalized oscillator functions φ_0(x) ..= φ_nmax(x).
///
/// The Gaussian factor is carried as a separate log-scale so that the
/// recurrence stays finite where e^{-x²/2} alone would underflow, e.g. at
/// |x| = 50 for n near the classical turning point.
pub fn hermite_phi_seq(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let mut log_scale = -0.5 * x * x - 0.25 * PI.ln();
    let mut factor = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = 1.0;
    out.push(cur * factor);
    for n in 0..nmax {
        let nf = n as f64;
        let next = x * (2.0 / (nf + 1.0)).sqrt() * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > SCALE_UP {
            prev /= SCALE_UP;
            cur /= SCALE_UP;
            log_scale += SCALE_UP.ln();
            factor = log_scale.exp();
        }
        out.push(cur * factor);
    }
    out
}

/// φ_n(x) = H_n(x) e^{-x²/2} / sqrt(2^n n! sqrt(pi)).
pub fn hermite_phi(n: usize, x: f64) -> f64 {
    hermite_phi_seq(n, x)[n]
}
