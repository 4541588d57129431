//! Coverage and efficient-energy-harvesting (EEH) probabilities for
//! simultaneous information and energy transfer in small-cell networks whose
//! base stations form a homogeneous Poisson point process.
//!
//! The crate is split into:
//!
//! * [`model`]: parameter types, validation and the SINR definition.
//! * [`numerics`]: error function, path-loss kernel, quadrature, root finding
//!   and numerical Laplace inversion.
//! * [`analytic`]: the closed-form and quadrature-based probabilities.
//! * [`montecarlo`]: an independent PPP simulator used as an oracle.
//! * [`feasibility`]: the harvesting threshold model, the reduced
//!   optimisation problems and the figure sweeps.

pub mod analytic;
pub mod error;
pub mod feasibility;
pub mod model;
pub mod montecarlo;
pub mod numerics;

pub use error::{Error, Result};
pub use model::{ParamError, SystemParams, Thresholds, UserState};
