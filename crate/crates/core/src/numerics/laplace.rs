//! Numerical inversion of Laplace transforms.
//!
//! Two independent schemes are provided: the fixed-Talbot contour of Abate
//! and Valkó, and the Euler-accelerated Fourier series of Abate and Whitt.
//! Both need the transform on the complex plane.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;

use super::NumericsError;

/// CDF values outside `[0, 1]` by more than this are treated as contour
/// failure rather than rounding noise.
pub const MAX_CDF_EXCURSION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InversionMethod {
    FixedTalbot,
    EulerSummation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseLaplaceSpec {
    pub method: InversionMethod,
    pub node_count: usize,
    /// Maximum allowed disagreement between the `node_count` evaluation
    /// and a coarser one with three quarters of the nodes.
    pub agreement_tol: f64,
}

impl Default for InverseLaplaceSpec {
    fn default() -> Self {
        Self {
            method: InversionMethod::FixedTalbot,
            node_count: 32,
            agreement_tol: 1e-6,
        }
    }
}

impl InverseLaplaceSpec {
    pub fn new(method: InversionMethod, node_count: usize) -> Result<Self, NumericsError> {
        Self {
            method,
            node_count,
            ..Self::default()
        }
        .validate()
    }

    pub fn euler() -> Self {
        Self {
            method: InversionMethod::EulerSummation,
            ..Self::default()
        }
    }

    pub fn validate(self) -> Result<Self, NumericsError> {
        if self.node_count < 8 {
            return Err(NumericsError::InvalidArgument(format!(
                "inverse Laplace node_count {} < 8",
                self.node_count
            )));
        }
        if !(self.agreement_tol > 0.0) {
            return Err(NumericsError::InvalidArgument(format!(
                "inverse Laplace agreement_tol {}",
                self.agreement_tol
            )));
        }
        Ok(self)
    }
}

/// Inverts `transform` at `t > 0` with the given scheme and node count.
pub fn inverse_laplace<F>(transform: F, t: f64, method: InversionMethod, nodes: usize) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    inverse_laplace_log(|s| transform(s).ln(), t, method, nodes)
}

/// As [`inverse_laplace`], but takes `ln F(s)`. Transforms that overflow on
/// the left half-plane stay finite once combined with `e^(st)` in log space.
pub fn inverse_laplace_log<F>(log_transform: F, t: f64, method: InversionMethod, nodes: usize) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    match method {
        InversionMethod::FixedTalbot => fixed_talbot(&log_transform, t, nodes),
        InversionMethod::EulerSummation => euler(&log_transform, t, (nodes / 2).max(1)),
    }
}

fn fixed_talbot<F: Fn(Complex64) -> Complex64 + ?Sized>(log_f: &F, t: f64, m: usize) -> f64 {
    let mf = m as f64;
    let r = 2.0 * mf / (5.0 * t);
    let mut sum = 0.5 * (log_f(Complex64::new(r, 0.0)) + r * t).exp().re;
    for k in 1..m {
        let theta = k as f64 * PI / mf;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t + log_f(s)).exp() * Complex64::new(1.0, sigma);
        sum += term.re;
    }
    r / mf * sum
}

fn euler<F: Fn(Complex64) -> Complex64 + ?Sized>(log_f: &F, t: f64, m: usize) -> f64 {
    let mf = m as f64;
    let n = 2 * m;
    // ξ_0 = 1/2, ξ_k = 1 (1..=M), ξ_2M = 2^-M, ξ_{2M-k} = ξ_{2M-k+1} + 2^-M C(M,k)
    let mut xi = vec![1.0; n + 1];
    xi[0] = 0.5;
    let scale = 2f64.powi(-(m as i32));
    xi[n] = scale;
    let mut binom = 1.0;
    for k in 1..m {
        binom *= (m - k + 1) as f64 / k as f64;
        xi[n - k] = xi[n - k + 1] + scale * binom;
    }
    let shift = mf * LN_10 / 3.0;
    let mut sum = 0.0;
    for (k, &w) in xi.iter().enumerate() {
        let beta = Complex64::new(shift, PI * k as f64);
        let eta = if k % 2 == 0 { w } else { -w };
        sum += eta * log_f(beta / t).exp().re;
    }
    10f64.powf(mf / 3.0) / t * sum
}

/// CDF of a nonnegative random variable from its Laplace transform:
/// `L⁻¹{L(s)/s}(x)`, clamped to `[0, 1]`.
///
/// Fails with [`NumericsError::Oscillation`] when the value leaves `[0, 1]`
/// by more than [`MAX_CDF_EXCURSION`] or a coarser node count disagrees by
/// more than `spec.agreement_tol`. A failed Talbot evaluation is retried once
/// with Euler summation before the error is returned.
pub fn inverse_laplace_cdf<L>(transform: L, x: f64, spec: &InverseLaplaceSpec) -> Result<f64, NumericsError>
where
    L: Fn(Complex64) -> Complex64,
{
    inverse_laplace_cdf_log(|s| transform(s).ln(), x, spec)
}

/// [`inverse_laplace_cdf`] for a transform given as `ln L(s)`.
pub fn inverse_laplace_cdf_log<L>(
    log_transform: L,
    x: f64,
    spec: &InverseLaplaceSpec,
) -> Result<f64, NumericsError>
where
    L: Fn(Complex64) -> Complex64,
{
    let spec = spec.validate()?;
    if x.is_nan() {
        return Err(NumericsError::InvalidArgument("cdf at NaN".into()));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let over_s = |s: Complex64| log_transform(s) - s.ln();
    match checked_cdf(&over_s, x, &spec) {
        // Transforms of stable laws with index above 1/2 grow on the left
        // half-plane, where the Talbot contour lives; the Bromwich line of
        // the Euler scheme stays on Re s > 0.
        Err(NumericsError::Oscillation { .. }) if spec.method == InversionMethod::FixedTalbot => {
            let euler = InverseLaplaceSpec {
                method: InversionMethod::EulerSummation,
                ..spec
            };
            checked_cdf(&over_s, x, &euler)
        }
        other => other,
    }
}

fn checked_cdf<F>(over_s: &F, x: f64, spec: &InverseLaplaceSpec) -> Result<f64, NumericsError>
where
    F: Fn(Complex64) -> Complex64,
{
    let fine = inverse_laplace_log(over_s, x, spec.method, spec.node_count);
    let coarse_nodes = (spec.node_count * 3 / 4).max(6);
    let coarse = inverse_laplace_log(over_s, x, spec.method, coarse_nodes);
    if !fine.is_finite() || !coarse.is_finite() {
        return Err(NumericsError::Oscillation {
            x,
            detail: format!("non-finite inversion {fine}"),
        });
    }
    if fine < -MAX_CDF_EXCURSION || fine > 1.0 + MAX_CDF_EXCURSION {
        return Err(NumericsError::Oscillation {
            x,
            detail: format!("value {fine} outside [0, 1]"),
        });
    }
    if (fine - coarse).abs() > spec.agreement_tol {
        return Err(NumericsError::Oscillation {
            x,
            detail: format!(
                "{} nodes give {fine}, {coarse_nodes} nodes give {coarse}",
                spec.node_count
            ),
        });
    }
    Ok(fine.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::erfc;

    fn both() -> [InverseLaplaceSpec; 2] {
        [InverseLaplaceSpec::default(), InverseLaplaceSpec::euler()]
    }

    #[test]
    fn exponential_median() {
        for spec in both() {
            let v = inverse_laplace_cdf(|s| 1.0 / (1.0 + s), 2f64.ln(), &spec).unwrap();
            assert!((v - 0.5).abs() < 1e-8, "{:?}: {v}", spec.method);
        }
    }

    #[test]
    fn levy_cdf_on_log_grid() {
        for spec in both() {
            for &a in &[0.01, 0.1, 1.0] {
                // x spans the bulk of each distribution: a²/4 is its scale
                let scale = a * a / 4.0;
                for i in -8..=16 {
                    let x = scale * 10f64.powf(i as f64 / 4.0);
                    let v = inverse_laplace_cdf(|s: Complex64| (-a * s.sqrt()).exp(), x, &spec)
                        .unwrap();
                    let exact = erfc(a / (2.0 * x.sqrt()));
                    assert!(
                        (v - exact).abs() < 1e-6,
                        "{:?} a={a} x={x}: {v} vs {exact}",
                        spec.method
                    );
                }
            }
        }
    }

    #[test]
    fn point_mass_cdf() {
        let v = inverse_laplace_cdf(|s: Complex64| (-s).exp(), 2.0, &InverseLaplaceSpec::default())
            .unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn raw_inversion_of_known_pairs() {
        // 1/s² ↔ t, 1/(s+1) ↔ e^-t
        for m in [InversionMethod::FixedTalbot, InversionMethod::EulerSummation] {
            let v = inverse_laplace(|s| 1.0 / (s * s), 3.0, m, 32);
            assert!((v - 3.0).abs() < 1e-7, "{m:?} {v}");
            let v = inverse_laplace(|s| 1.0 / (s + 1.0), 1.5, m, 32);
            assert!((v - (-1.5f64).exp()).abs() < 1e-8, "{m:?} {v}");
        }
    }

    #[test]
    fn monotone_in_x() {
        let spec = InverseLaplaceSpec::default();
        let mut prev = 0.0;
        for i in 1..200 {
            let x = 1e-3 * 1.05f64.powi(i);
            let v = inverse_laplace_cdf(|s: Complex64| (-0.1 * s.sqrt()).exp(), x, &spec).unwrap();
            assert!(v + 1e-8 >= prev);
            prev = v;
        }
    }

    #[test]
    fn talbot_failure_falls_back_to_euler() {
        // positive stable law of index 2/3: grows on the left half-plane
        let log_l = |s: Complex64| -0.05 * s.powf(2.0 / 3.0);
        let x = 1e-5;
        let raw = inverse_laplace_log(|s| log_l(s) - s.ln(), x, InversionMethod::FixedTalbot, 32);
        assert!(!raw.is_finite() || raw.abs() > 1.0);
        let v = inverse_laplace_cdf_log(log_l, x, &InverseLaplaceSpec::default()).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn node_count_floor() {
        assert!(InverseLaplaceSpec::new(InversionMethod::FixedTalbot, 7).is_err());
        assert!(InverseLaplaceSpec::new(InversionMethod::FixedTalbot, 8).is_ok());
    }

    #[test]
    fn broken_transform_is_flagged() {
        // not a transform of a probability law: CDF would tend to 3
        let r = inverse_laplace_cdf(|_s| Complex64::new(3.0, 0.0), 1.0, &InverseLaplaceSpec::default());
        assert!(matches!(r, Err(NumericsError::Oscillation { .. })));
    }
}
