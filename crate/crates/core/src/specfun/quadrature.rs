//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Each panel is integrated with a 15-point rule on the whole interval and
//! on both halves; the difference is the panel's error estimate. Panels are
//! bisected worst-first until the summed estimate meets the absolute
//! tolerance. The vector form shares one partition across all components,
//! which is what the moment-matrix and Wigner integrals need.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const PANEL_DEGREE: usize = 15;
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
const MAX_PANELS: usize = 50_000;
const MIN_WIDTH_FRACTION: f64 = 1e-13;
const ROUNDING_FLOOR: f64 = 1e-15;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_DEGREE))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecEstimate {
    pub values: Vec<f64>,
    /// Largest per-component error estimate.
    pub error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn apply_rule<F>(f: &F, a: f64, b: f64, dim: usize, scratch: &mut [f64]) -> Vec<f64>
where
    F: Fn(f64, &mut [f64]),
{
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = vec![0.0; dim];
    for (&t, &w) in nodes.iter().zip(weights) {
        f(mid + half * t, scratch);
        for (s, v) in acc.iter_mut().zip(scratch.iter()) {
            *s += w * v;
        }
    }
    acc.iter_mut().for_each(|s| *s *= half);
    acc
}

fn make_panel<F>(f: &F, a: f64, b: f64, whole: Vec<f64>, scratch: &mut [f64]) -> Panel
where
    F: Fn(f64, &mut [f64]),
{
    let dim = whole.len();
    let mid = 0.5 * (a + b);
    let left = apply_rule(f, a, mid, dim, scratch);
    let right = apply_rule(f, mid, b, dim, scratch);
    let error = whole
        .iter()
        .zip(left.iter().zip(&right))
        .map(|(w, (l, r))| {
            // rounding floor keeps the estimate an upper bound on exact panels
            let d = (w - (l + r)).abs().max(ROUNDING_FLOOR * (l.abs() + r.abs()));
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        })
        .fold(0.0, f64::max);
    Panel {
        a,
        b,
        left,
        right,
        error,
    }
}

/// Integrates a vector-valued function `f(x, out)` over [a, b] on a shared
/// adaptive partition seeded with `initial_panels` equal panels.
pub fn integrate_vec<F>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    abs_tol: f64,
    initial_panels: usize,
) -> Result<VecEstimate>
where
    F: Fn(f64, &mut [f64]),
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid(format!("bad integration interval [{a}, {b}]")));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::invalid("abs_tol must be positive"));
    }
    let mut scratch = vec![0.0; dim];
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut heap = BinaryHeap::with_capacity(4 * n0);
    for i in 0..n0 {
        let pa = a + width * i as f64;
        let pb = if i + 1 == n0 { b } else { pa + width };
        let whole = apply_rule(&f, pa, pb, dim, &mut scratch);
        heap.push(make_panel(&f, pa, pb, whole, &mut scratch));
    }
    let min_width = (b - a) * MIN_WIDTH_FRACTION;
    loop {
        let total: f64 = heap.iter().map(|p| p.error).sum();
        if total <= abs_tol {
            return Ok(collect(heap, dim, total));
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let width = worst.b - worst.a;
        if heap.len() + 2 > MAX_PANELS || width < min_width {
            let best = {
                heap.push(worst);
                collect(heap, dim, total)
            };
            return Err(Error::numerical(
                "integrate",
                format!(
                    "refinement exhausted with error estimate {total:e} > {abs_tol:e} after {} panels",
                    best.panels
                ),
                best.values.first().copied().unwrap_or(f64::NAN),
            ));
        }
        let mid = 0.5 * (worst.a + worst.b);
        let Panel {
            a: pa,
            b: pb,
            left,
            right,
            ..
        } = worst;
        heap.push(make_panel(&f, pa, mid, left, &mut scratch));
        heap.push(make_panel(&f, mid, pb, right, &mut scratch));
    }
}

fn collect(heap: BinaryHeap<Panel>, dim: usize, error: f64) -> VecEstimate {
    // sum in x order for a partition-independent reduction order
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut values = vec![0.0; dim];
    for p in &panels {
        for (i, v) in values.iter_mut().enumerate() {
            *v += p.left[i] + p.right[i];
        }
    }
    VecEstimate {
        values,
        error,
        panels: panels.len(),
    }
}

/// Scalar adaptive quadrature with the default initial partition.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let est = integrate_vec(|x, out: &mut [f64]| out[0] = f(x), 1, a, b, abs_tol, 8)?;
    Ok(Estimate {
        value: est.values[0],
        error: est.error,
    })
}
