//! Analytic evaluation of the network probabilities.
//!
//! Coverage follows from averaging the exponential-fading exceedance over the
//! nearest-BS distance law; harvesting follows from the distribution of the
//! aggregate interference at the origin, recovered from its Laplace transform.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ParamError, SystemParams};
use crate::numerics::{
    erf, erfc, g_kernel, g_kernel_at_zero, integrate, inverse_laplace_cdf_log, InverseLaplaceSpec,
    QuadratureSpec,
};

/// Density of the distance from the origin to the nearest base station,
/// `2πλr·exp(-λπr²)`.
pub fn nearest_distance_pdf(r: f64, lambda: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    2.0 * PI * lambda * r * (-lambda * PI * r * r).exp()
}

/// Interference from base stations farther than `guard_radius` from the
/// origin, with exponential fading of mean `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceTransform {
    pub params: SystemParams,
    pub guard_radius: f64,
}

impl InterferenceTransform {
    pub fn new(params: SystemParams, guard_radius: f64) -> Result<Self> {
        let params = params.validate()?;
        if !(guard_radius >= 0.0) {
            return Err(Error::InvalidInput(format!("guard radius {guard_radius}")));
        }
        Ok(Self {
            params,
            guard_radius,
        })
    }

    pub fn at_origin(params: SystemParams) -> Result<Self> {
        Self::new(params, 0.0)
    }

    /// `E[exp(-s·I(r))]` for real `s > 0`.
    pub fn evaluate(&self, s: f64) -> Result<f64> {
        laplace_interference(self, s)
    }
}

/// Laplace transform of `I(r)`:
/// `exp[-πλ(sP)^(2/α) · G(r² (sP)^(-2/α))]`.
///
/// At `r = 0` the kernel is replaced by its closed value
/// `(2π/α)csc(2π/α)`.
pub fn laplace_interference(t: &InterferenceTransform, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        if s == 0.0 {
            return Ok(1.0);
        }
        return Err(Error::InvalidInput(format!("Laplace argument s = {s}")));
    }
    let p = &t.params;
    let scaled = (s * p.power).powf(2.0 / p.alpha);
    if !scaled.is_finite() {
        return Ok(0.0);
    }
    let g = if t.guard_radius == 0.0 {
        g_kernel_at_zero(p.alpha)?
    } else {
        g_kernel(t.guard_radius * t.guard_radius / scaled, p.alpha)?
    };
    Ok((-PI * p.lambda * scaled * g).exp())
}

/// Complex-argument Laplace transform of `I(0)`,
/// `exp[-(2π²λ/α)(sP)^(2/α) csc(2π/α)]`, on the principal branch.
pub fn origin_interference_transform(params: &SystemParams) -> impl Fn(Complex64) -> Complex64 {
    let log = origin_interference_log_transform(params);
    move |s: Complex64| log(s).exp()
}

/// Logarithm of [`origin_interference_transform`].
pub fn origin_interference_log_transform(params: &SystemParams) -> impl Fn(Complex64) -> Complex64 {
    let alpha = params.alpha;
    let power = params.power;
    let coeff = 2.0 * PI * PI * params.lambda / alpha / (2.0 * PI / alpha).sin();
    move |s: Complex64| -coeff * (s * power).powf(2.0 / alpha)
}

fn coverage_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        max_subdivisions: 2000,
    }
}

/// Average coverage probability `P[SINR > T]` for the nearest-BS user.
///
/// `2πλ ∫ exp(-πλr² - T r^α σ²/(ρP)) · L_{I(r)}(T r^α / P) r dr`, evaluated
/// after the change of variable `u = πλr²`. With `ρ = 0` and `σ² > 0` the
/// decoder sees no signal and coverage is 0.
pub fn coverage_probability(params: &SystemParams, sinr_threshold: f64) -> Result<f64> {
    let params = params.validate()?;
    if !(sinr_threshold > 0.0) {
        return Err(ParamError::SinrThreshold(sinr_threshold).into());
    }
    if sinr_threshold.is_infinite() {
        return Ok(0.0);
    }
    if params.rho == 0.0 && params.noise > 0.0 {
        return Ok(0.0);
    }
    let noise_over_rho = if params.noise == 0.0 {
        0.0
    } else {
        params.noise / params.rho
    };
    let alpha = params.alpha;
    let lambda = params.lambda;
    let integrand = |u: f64| -> Result<f64> {
        if u == 0.0 {
            return Ok(1.0);
        }
        let r = (u / (PI * lambda)).sqrt();
        let r_alpha = r.powf(alpha);
        let noise_term = -sinr_threshold * r_alpha * noise_over_rho / params.power;
        let transform = InterferenceTransform {
            params,
            guard_radius: r,
        };
        let li = laplace_interference(&transform, sinr_threshold * r_alpha / params.power)?;
        Ok((-u + noise_term).exp() * li)
    };
    // the closure API of `integrate` is infallible; carry the first error out
    let failure = std::cell::RefCell::new(None);
    let value = integrate(
        |u| match integrand(u) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        f64::INFINITY,
        &coverage_spec(),
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(value.value.clamp(0.0, 1.0))
}

/// Interference-limited α = 4 coverage,
/// `1 / (1 + √T (π/2 - arctan(1/√T)))`. Independent of λ, P and ρ.
pub fn coverage_probability_closed_alpha4(sinr_threshold: f64) -> Result<f64> {
    if !(sinr_threshold > 0.0) {
        return Err(ParamError::SinrThreshold(sinr_threshold).into());
    }
    if sinr_threshold.is_infinite() {
        return Ok(0.0);
    }
    let root = sinr_threshold.sqrt();
    // π/2 - arctan(1/√T) = arctan(√T)
    Ok(1.0 / (1.0 + root * root.atan()))
}

/// Lévy CDF of `I(0)` at α = 4: `erfc(π²λ√P / (4√x))`.
pub fn interference_cdf_closed_alpha4(params: &SystemParams, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    erfc(PI * PI * params.lambda * params.power.sqrt() / (4.0 * x.sqrt()))
}

/// CDF of the aggregate interference at the origin by numerical inversion
/// of its Laplace transform, for any α > 2.
pub fn interference_cdf_inverted(
    params: &SystemParams,
    x: f64,
    spec: &InverseLaplaceSpec,
) -> Result<f64> {
    let params = params.validate()?;
    let log_transform = origin_interference_log_transform(&params);
    Ok(inverse_laplace_cdf_log(log_transform, x, spec)?)
}

/// CDF of `I(0)`: closed Lévy form at α = 4, numerical inversion otherwise.
pub fn interference_cdf_at_origin(
    params: &SystemParams,
    x: f64,
    spec: &InverseLaplaceSpec,
) -> Result<f64> {
    let params = params.validate()?;
    if x.is_nan() {
        return Err(Error::InvalidInput("interference level NaN".into()));
    }
    if params.alpha == 4.0 {
        return Ok(interference_cdf_closed_alpha4(&params, x));
    }
    interference_cdf_inverted(&params, x, spec)
}

/// Harvesting query: parameters and the threshold `Θ` in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EehQuery {
    pub params: SystemParams,
    pub theta: f64,
}

impl EehQuery {
    pub fn new(params: SystemParams, theta: f64) -> Result<Self> {
        let params = params.validate()?;
        if !(theta > 0.0) {
            return Err(ParamError::EehThreshold(theta).into());
        }
        Ok(Self { params, theta })
    }
}

/// Average EEH probability through the interference CDF:
/// `1 - ε F((Θ-σ²)/(1-ρ)) - (1-ε) F(Θ-σ²)`.
///
/// The CDF is always obtained by Laplace inversion, so at α = 4 this is an
/// independent route to [`eeh_probability_closed_alpha4`].
pub fn eeh_probability(q: &EehQuery, spec: &InverseLaplaceSpec) -> Result<f64> {
    let q = EehQuery::new(q.params, q.theta)?;
    eeh_mixture(&q, |x| interference_cdf_inverted(&q.params, x, spec))
}

/// Same mixture, but with the closed Lévy CDF when α = 4.
pub fn eeh_probability_with_cdf(q: &EehQuery, spec: &InverseLaplaceSpec) -> Result<f64> {
    let q = EehQuery::new(q.params, q.theta)?;
    eeh_mixture(&q, |x| interference_cdf_at_origin(&q.params, x, spec))
}

fn eeh_mixture<F: Fn(f64) -> Result<f64>>(q: &EehQuery, cdf: F) -> Result<f64> {
    let p = &q.params;
    let excess = q.theta - p.noise;
    if excess <= 0.0 {
        return Ok(1.0);
    }
    let idle = 1.0 - cdf(excess)?;
    let active = if p.epsilon == 0.0 {
        0.0
    } else if p.rho >= 1.0 {
        // nothing reaches the harvester while decoding
        0.0
    } else if p.rho == 0.0 {
        idle
    } else {
        1.0 - cdf(excess / (1.0 - p.rho))?
    };
    Ok((p.epsilon * active + (1.0 - p.epsilon) * idle).clamp(0.0, 1.0))
}

/// Interference-limited α = 4 EEH probability,
/// `ε erf((π²λ/4)√(P(1-ρ)/Θ)) + (1-ε) erf((π²λ/4)√(P/Θ))`.
///
/// Noise is ignored; this is the closed form of the σ² = 0 regime.
pub fn eeh_probability_closed_alpha4(q: &EehQuery) -> f64 {
    let p = &q.params;
    let scale = PI * PI * p.lambda / 4.0;
    let active = erf(scale * (p.power * (1.0 - p.rho) / q.theta).sqrt());
    let idle = erf(scale * (p.power / q.theta).sqrt());
    p.epsilon * active + (1.0 - p.epsilon) * idle
}
