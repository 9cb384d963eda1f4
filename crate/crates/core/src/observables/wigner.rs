use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherent::{coefficients_with_min, CoherentSpec, StateEvaluator, DEFAULT_TAIL_TOL};
use crate::error::{Error, Result};
use crate::specfun::integrate_vec;
use crate::system::{BasisValues, EigenfunctionEvaluator, StateLabel};

/// W counts as negative below -NEGATIVITY_THRESHOLD · max W.
pub const NEGATIVITY_THRESHOLD: f64 = 1e-3;
const MAX_IMAG_RESIDUE: f64 = 1e-6;

/// Window, resolution and accuracy of a Wigner grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerOptions {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
    pub abs_tol: f64,
    /// Lower bound on the number of retained coherent-state terms.
    pub min_k: usize,
}

impl Default for WignerOptions {
    fn default() -> Self {
        WignerOptions {
            x_min: -8.0,
            x_max: 8.0,
            nx: 161,
            p_min: -8.0,
            p_max: 8.0,
            np: 161,
            abs_tol: 1e-9,
            min_k: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// values[i][j] = W(x_i, p_j)
    pub values: Vec<Vec<f64>>,
    /// Truncation index of the coefficient sum.
    pub truncation: usize,
    pub max_imag_residue: f64,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn spacing(v: &[f64]) -> f64 {
    if v.len() > 1 {
        v[1] - v[0]
    } else {
        1.0
    }
}

impl WignerGrid {
    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Σ W dx dp over the grid.
    pub fn normalization(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * spacing(&self.x) * spacing(&self.p)
    }

    /// ∫|min(W, 0)| dx dp over the grid.
    pub fn negative_volume(&self) -> f64 {
        self.values.iter().flatten().map(|w| (-w).max(0.0)).sum::<f64>()
            * spacing(&self.x)
            * spacing(&self.p)
    }

    pub fn has_negativity(&self) -> bool {
        self.min() < -NEGATIVITY_THRESHOLD * self.max()
    }

    /// ∫W dp at each x by the trapezoid rule.
    pub fn marginal(&self) -> Vec<f64> {
        let dp = spacing(&self.p);
        self.values
            .iter()
            .map(|row| {
                let n = row.len();
                let inner: f64 = row.iter().sum();
                dp * (inner - 0.5 * (row[0] + row[n - 1]))
            })
            .collect()
    }
}

/// Symmetric y-window outside which ψ(x-y)ψ(x+y) vanishes, and an initial
/// panel count resolving both the wavefunction oscillation and e^{-2ipy}.
fn y_window(half_width: f64, numax: f64, x: f64, p_abs: f64) -> Option<(f64, f64, usize)> {
    let l = half_width - x.abs();
    if l <= 0.0 {
        return None;
    }
    let wavenumber = 2.0 * (2.0 * numax + 3.0).sqrt() + 2.0 * p_abs;
    let panels = 8 + (2.0 * l * wavenumber / PI).ceil() as usize;
    Some((-l, l, panels))
}

/// w_ab(x, p) = (1/π)∫ψ_a(x-y)ψ_b(x+y)e^{-2ipy} dy for two states of one ladder.
pub fn wigner_cross_term(
    a: &StateLabel,
    b: &StateLabel,
    x: f64,
    p: f64,
    tol: f64,
) -> Result<Complex64> {
    if a.m != b.m || a.mu != b.mu {
        return Err(Error::invalid("Wigner cross terms need two states of one ladder"));
    }
    let ev = EigenfunctionEvaluator::new(a.m, vec![a.nu(), b.nu()])?;
    let numax = a.nu().max(b.nu()).max(0) as f64;
    let Some((lo, hi, panels)) = y_window(ev.support_half_width(), numax, x, p.abs()) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let est = integrate_vec(
        |y, out: &mut [f64]| {
            let minus = ev.eval(x - y, 0);
            let plus = ev.eval(x + y, 0);
            let v = minus.psi[0] * plus.psi[1] / PI;
            let (s, c) = (2.0 * p * y).sin_cos();
            out[0] = v * c;
            out[1] = -v * s;
        },
        2,
        lo,
        hi,
        tol,
        panels,
    )?;
    Ok(Complex64::new(est.values[0], est.values[1]))
}

/// W(x, p) = (1/π)∫Ψ*(x-y)Ψ(x+y)e^{-2ipy} dy for the coherent state at t = 0.
///
/// Integrating the superposition directly equals the double sum
/// Σ A*_{k1} w_{k1k2} A_{k2} term by term.
pub fn wigner_grid(spec: &CoherentSpec, opts: &WignerOptions) -> Result<WignerGrid> {
    if opts.nx == 0 || opts.np == 0 || !(opts.x_min <= opts.x_max) || !(opts.p_min <= opts.p_max) {
        return Err(Error::invalid("empty or inverted Wigner window"));
    }
    let coeffs = coefficients_with_min(spec, DEFAULT_TAIL_TOL, opts.min_k)?;
    let truncation = coeffs.truncation();
    let peak = coeffs.entries.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let k_eff = coeffs
        .entries
        .iter()
        .rposition(|a| a.norm() > 1e-16 * peak)
        .unwrap_or(0);
    let numax = spec.index(k_eff).max(0) as f64;
    let state = StateEvaluator::new(coeffs)?;
    let half_width = state.basis().support_half_width();
    let xs = linspace(opts.x_min, opts.x_max, opts.nx);
    let ps = linspace(opts.p_min, opts.p_max, opts.np);
    let p_abs = opts.p_min.abs().max(opts.p_max.abs());
    let dp = spacing(&ps);
    let np = ps.len();

    let rows: Vec<Result<(Vec<f64>, f64)>> = xs
        .par_iter()
        .map(|&x| {
            let Some((lo, hi, panels)) = y_window(half_width, numax, x, p_abs) else {
                return Ok((vec![0.0; np], 0.0));
            };
            let est = integrate_vec(
                |y, out: &mut [f64]| {
                    let mut vals = BasisValues::default();
                    let prod = state.amplitude_with(x - y, 0.0, &mut vals).conj()
                        * state.amplitude_with(x + y, 0.0, &mut vals)
                        / PI;
                    let mut phase = Complex64::from_polar(1.0, -2.0 * ps[0] * y);
                    let step = Complex64::from_polar(1.0, -2.0 * dp * y);
                    for j in 0..np {
                        let v = prod * phase;
                        out[2 * j] = v.re;
                        out[2 * j + 1] = v.im;
                        phase *= step;
                    }
                },
                2 * np,
                lo,
                hi,
                opts.abs_tol,
                panels,
            )?;
            let row = (0..np).map(|j| est.values[2 * j]).collect();
            let residue = (0..np).map(|j| est.values[2 * j + 1].abs()).fold(0.0, f64::max);
            Ok((row, residue))
        })
        .collect();

    let mut values = Vec::with_capacity(xs.len());
    let mut max_imag_residue: f64 = 0.0;
    for r in rows {
        let (row, residue) = r?;
        max_imag_residue = max_imag_residue.max(residue);
        values.push(row);
    }
    if max_imag_residue > MAX_IMAG_RESIDUE {
        return Err(Error::numerical(
            "wigner_grid",
            format!("imaginary residue {max_imag_residue:e} exceeds {MAX_IMAG_RESIDUE:e}"),
            max_imag_residue,
        ));
    }
    Ok(WignerGrid {
        x: xs,
        p: ps,
        values,
        truncation,
        max_imag_residue,
    })
}
