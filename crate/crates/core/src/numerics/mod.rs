//! Numerical kernels shared by the analytic layer.

mod kernel;
mod laplace;
mod quadrature;
mod roots;
mod special;

use thiserror::Error;

pub use kernel::{g_kernel, g_kernel_at_zero, g_kernel_by_quadrature, KERNEL_TAIL_SPLIT};
pub use laplace::{
    inverse_laplace, inverse_laplace_cdf, inverse_laplace_cdf_log, inverse_laplace_log,
    InverseLaplaceSpec, InversionMethod,
    MAX_CDF_EXCURSION,
};
pub use quadrature::{integrate, Integral, QuadratureSpec};
pub use roots::find_root_monotone;
pub use special::{erf, erfc};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate}, error {error:e})")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("kernel integral diverges for alpha = {alpha} (need alpha > 2)")]
    Divergent { alpha: f64 },
    #[error("inverse Laplace oscillation at x = {x}: {detail}")]
    Oscillation { x: f64, detail: String },
    #[error("no sign change of f - {target} on [{lo}, {hi}]")]
    Bracket { target: f64, lo: f64, hi: f64 },
    #[error("invalid numerical argument: {0}")]
    InvalidArgument(String),
}
