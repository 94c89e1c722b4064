//! Isotropic errors on pure quantum states and what block-syndrome error
//! correction does to them.
//!
//! A state of `n` qubits is a point on the real sphere `S^{2d−1}`, `d = 2^n`.
//! An isotropic error is a random state whose density depends only on the
//! angle `θ0` to the reference state `|0⟩`. The crate computes the variance
//! of such errors before and after correction in closed form ([`theory`]) and
//! by simulation ([`experiments`]).
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! `f64`.

pub mod code;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod numerics;
pub mod scalar;
pub mod state;
pub mod theory;

pub use code::CodeParams;
pub use error::{Error, Result};
pub use experiments::{EstimateReport, Estimator, UniformityReport};
pub use scalar::Real;

pub type StateVector = state::StateVector<f64>;
pub type SphericalAngles = state::SphericalAngles<f64>;
pub type IsotropicDensity = distributions::IsotropicDensity<f64>;
pub type Theta0Sampler = distributions::Theta0Sampler<f64>;
pub type CorrectionOutcome = code::CorrectionOutcome<f64>;
pub type TheoryReport = theory::TheoryReport<f64>;
pub type TheoryTolerances = theory::TheoryTolerances<f64>;
