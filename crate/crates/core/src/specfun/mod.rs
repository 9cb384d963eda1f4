//! Scalar kernels: signed-log arithmetic, Hermite recurrences, Pochhammer
//! and hypergeometric series, adaptive quadrature.

mod hermite;
mod hypergeometric;
mod quadrature;
mod signed_log;

pub use hermite::{hermite, hermite_phi, hermite_phi_seq, mod_hermite, mod_hermite_seq};
pub use hypergeometric::{hypergeometric, log_pochhammer, HypergeometricSpec, SeriesValue, MAX_TERMS};
pub use quadrature::{
    gauss_legendre, integrate, integrate_vec, Estimate, VecEstimate, DEFAULT_ABS_TOL, PANEL_DEGREE,
};
pub use signed_log::{log_sum, SignedLog};
