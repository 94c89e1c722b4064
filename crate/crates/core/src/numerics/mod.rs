//! Numeric bedrock: log-scaled arithmetic, double-factorial closed forms,
//! adaptive quadrature and series summation.

pub mod logscaled;
pub mod quadrature;
pub mod series;
pub mod special;

pub use logscaled::{LogScaled, Sign};
pub use quadrature::{integrate_adaptive, integrate_with, QuadOptions, QuadratureResult};
pub use series::{sum_series, sum_series_with, SeriesOptions, SeriesSum};
pub use special::{
    cos_sin_halfpi_integral, double_factorial, double_factorial_exact, double_factorial_ratio, kernel_integral,
    kernel_integrand, sphere_surface, wallis_integral, KernelKind,
};
