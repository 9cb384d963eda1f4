//! Expectation values and phase-space diagnostics of coherent states.

mod energy;
mod mandel;
mod moments;
mod wigner;

pub use energy::{energy_expectation, number_expectation, Method};
pub use mandel::{mandel_q, number_moments, NumberMoments};
pub use moments::{moment_matrices, p2_matrix_eigen_identity, uncertainty, MomentMatrices, Uncertainty, MAX_MOMENT_K};
pub use wigner::{
    wigner_cross_term, wigner_grid, WignerGrid, WignerOptions, NEGATIVITY_THRESHOLD,
};
