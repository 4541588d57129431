//! Network and receiver parameters, and the SINR seen by the typical user.
//!
//! All quantities are SI: watts, meters, base stations per square meter.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("lambda must be positive (got {0})")]
    Lambda(f64),
    #[error("power must be positive (got {0})")]
    Power(f64),
    #[error("alpha must exceed 2 (got {0})")]
    Alpha(f64),
    #[error("noise must be nonnegative (got {0})")]
    Noise(f64),
    #[error("rho out of [0,1] (got {0})")]
    Rho(f64),
    #[error("epsilon out of [0,1] (got {0})")]
    Epsilon(f64),
    #[error("sinr threshold must be positive (got {0})")]
    SinrThreshold(f64),
    #[error("eeh threshold must be positive (got {0})")]
    EehThreshold(f64),
    #[error("sinr undefined: {0}")]
    Domain(&'static str),
}

/// Parameters of the downlink model.
///
/// The exponential fading rate is not stored: fades are exponential with
/// mean `power`, so the rate is always `1 / power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Base-station density, BS/m².
    pub lambda: f64,
    /// Transmit power of every base station, W.
    pub power: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Receiver noise power σ², W.
    pub noise: f64,
    /// Power-splitting factor: fraction routed to the decoder when active.
    pub rho: f64,
    /// Probability that the user is active.
    pub epsilon: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            lambda: 1e-2,
            power: 1.0,
            alpha: 4.0,
            noise: 0.0,
            rho: 0.1,
            epsilon: 0.3,
        }
    }
}

impl SystemParams {
    pub fn new(
        lambda: f64,
        power: f64,
        alpha: f64,
        noise: f64,
        rho: f64,
        epsilon: f64,
    ) -> Result<Self, ParamError> {
        Self {
            lambda,
            power,
            alpha,
            noise,
            rho,
            epsilon,
        }
        .validate()
    }

    /// Returns `self` unchanged if every invariant holds, otherwise the first
    /// violated one.
    pub fn validate(self) -> Result<Self, ParamError> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(ParamError::Lambda(self.lambda));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(ParamError::Power(self.power));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(ParamError::Alpha(self.alpha));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(ParamError::Noise(self.noise));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(ParamError::Rho(self.rho));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(ParamError::Epsilon(self.epsilon));
        }
        Ok(self)
    }

    /// Rate of the exponential fading marks.
    pub fn fading_rate(&self) -> f64 {
        1.0 / self.power
    }

    /// `λ√P`, the only combination of density and power the α=4 harvesting
    /// probability depends on.
    pub fn lambda_sqrt_power(&self) -> f64 {
        self.lambda * self.power.sqrt()
    }

    /// True in the interference-limited α=4 regime where closed forms exist.
    pub fn is_alpha4_interference_limited(&self) -> bool {
        self.alpha == 4.0 && self.noise == 0.0
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// Free-function form of [`SystemParams::validate`].
pub fn validate(params: SystemParams) -> Result<SystemParams, ParamError> {
    params.validate()
}

/// Scheduling state of the typical user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UserState {
    Active,
    Idle,
}

impl UserState {
    /// Draws a state from the stationary law: active with probability `epsilon`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, epsilon: f64) -> Self {
        if rng.random::<f64>() < epsilon {
            UserState::Active
        } else {
            UserState::Idle
        }
    }

    /// Splitting factor actually applied: `rho` when active, 0 when idle.
    pub fn decoder_fraction(self, rho: f64) -> f64 {
        match self {
            UserState::Active => rho,
            UserState::Idle => 0.0,
        }
    }
}

/// SINR threshold `T` (linear) and EEH threshold `Θ` (watts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub sinr_threshold: f64,
    pub eeh_threshold: f64,
}

impl Thresholds {
    pub fn new(sinr_threshold: f64, eeh_threshold: f64) -> Result<Self, ParamError> {
        if !(sinr_threshold > 0.0) {
            return Err(ParamError::SinrThreshold(sinr_threshold));
        }
        if !(eeh_threshold > 0.0) {
            return Err(ParamError::EehThreshold(eeh_threshold));
        }
        Ok(Self {
            sinr_threshold,
            eeh_threshold,
        })
    }
}

/// SINR at the decoder: `ρ·fade·d^-α / (σ² + ρ·interference)`.
///
/// The splitting factor is divided out before evaluation, so with σ² = 0 the
/// result does not depend on ρ at all. A decoder receiving nothing (ρ = 0)
/// sees SINR 0.
pub fn instantaneous_sinr(
    fade: f64,
    distance: f64,
    interference: f64,
    params: &SystemParams,
) -> Result<f64, ParamError> {
    if distance < 0.0 || fade < 0.0 || interference < 0.0 {
        return Err(ParamError::Domain("negative fade, distance or interference"));
    }
    let denom = if params.rho > 0.0 {
        params.noise / params.rho + interference
    } else {
        return Ok(0.0);
    };
    if denom == 0.0 && (distance == 0.0 || fade == 0.0) {
        return Err(ParamError::Domain("zero signal distance over zero denominator"));
    }
    let signal = fade * distance.powf(-params.alpha);
    Ok(signal / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn typical_params() -> SystemParams {
        SystemParams::new(1e-4, 1.0, 4.0, 0.0, 0.1, 0.3).unwrap()
    }

    #[test]
    fn validate_accepts_typical_choices() {
        let p = typical_params();
        assert_eq!(validate(p), Ok(p));
    }

    #[test]
    fn validate_rejects_alpha_two() {
        let err = typical_params().with_alpha(2.0).validate().unwrap_err();
        assert_eq!(err, ParamError::Alpha(2.0));
        assert!(err.to_string().contains("alpha must exceed 2"));
    }

    #[test]
    fn validate_rejects_rho_above_one() {
        let err = typical_params().with_rho(1.5).validate().unwrap_err();
        assert!(err.to_string().contains("rho out of [0,1]"));
    }

    #[test]
    fn validate_reports_first_violation() {
        let bad = SystemParams {
            lambda: -1.0,
            alpha: 1.0,
            ..typical_params()
        };
        assert_eq!(bad.validate(), Err(ParamError::Lambda(-1.0)));
        assert!(typical_params().with_lambda(f64::NAN).validate().is_err());
        assert!(typical_params().with_noise(-1e-9).validate().is_err());
        assert!(typical_params().with_epsilon(1.01).validate().is_err());
        assert!(typical_params().with_rho(1.0).validate().is_ok());
    }

    #[test]
    fn thresholds_must_be_positive() {
        assert!(Thresholds::new(1.0, 1e-3).is_ok());
        assert!(Thresholds::new(0.0, 1e-3).is_err());
        assert!(Thresholds::new(1.0, -1.0).is_err());
    }

    #[test]
    fn sinr_direct_substitution() {
        let p = typical_params().with_noise(1.0).with_rho(0.5);
        assert_eq!(instantaneous_sinr(1.0, 1.0, 0.0, &p).unwrap(), 0.5);

        let p = typical_params().with_noise(0.0);
        assert_eq!(instantaneous_sinr(2.0, 2.0, 1.0, &p).unwrap(), 0.125);
    }

    #[test]
    fn sinr_rho_cancels_without_noise() {
        let a = typical_params().with_rho(0.1);
        let b = typical_params().with_rho(0.9);
        for &(f, d, i) in &[(1.0, 3.0, 0.2), (0.01, 150.0, 1e-9), (5.0, 0.5, 7.0)] {
            assert_eq!(
                instantaneous_sinr(f, d, i, &a).unwrap(),
                instantaneous_sinr(f, d, i, &b).unwrap()
            );
        }
    }

    #[test]
    fn sinr_domain_errors() {
        let p = typical_params();
        assert!(instantaneous_sinr(1.0, 0.0, 0.0, &p).is_err());
        assert!(instantaneous_sinr(1.0, -1.0, 0.0, &p).is_err());
        assert!(instantaneous_sinr(1.0, 0.0, 1.0, &p).unwrap().is_infinite());
    }

    #[test]
    fn sinr_monotone() {
        let p = typical_params().with_noise(1e-3);
        let base = instantaneous_sinr(1.0, 10.0, 1e-4, &p).unwrap();
        assert!(instantaneous_sinr(2.0, 10.0, 1e-4, &p).unwrap() > base);
        assert!(instantaneous_sinr(1.0, 20.0, 1e-4, &p).unwrap() < base);
        assert!(instantaneous_sinr(1.0, 10.0, 2e-4, &p).unwrap() < base);
        assert!(instantaneous_sinr(1.0, 10.0, 1e-4, &p.with_noise(2e-3)).unwrap() < base);
    }

    #[test]
    fn user_state_frequency() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let active = (0..n)
            .filter(|_| UserState::sample(&mut rng, 0.3) == UserState::Active)
            .count() as f64;
        let p = active / n as f64;
        assert!((p - 0.3).abs() < 4.0 * (0.3f64 * 0.7 / n as f64).sqrt());
        assert_eq!(UserState::Idle.decoder_fraction(0.4), 0.0);
        assert_eq!(UserState::Active.decoder_fraction(0.4), 0.4);
    }
}
