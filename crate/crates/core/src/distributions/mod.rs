//! Isotropic error densities and their sampler.

mod density;
mod sampler;

pub use density::{
    check_normalization, check_normalization_with, ebar, ebar_with, marginal_moment, marginal_moment_with,
    normal_density, uniform_density, DensityKind, IsotropicDensity, DEFAULT_MOMENT_TOL,
};
pub use sampler::{
    build_sampler, sample_state, Theta0Sampler, DEFAULT_GRID_SIZE, MAX_NORMALIZATION_RESIDUAL, MAX_PANEL_MASS,
    MIN_GRID_SIZE,
};
