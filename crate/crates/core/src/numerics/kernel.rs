use std::f64::consts::PI;

use super::quadrature::{integrate, QuadratureSpec};
use super::NumericsError;

/// Split point beyond which the kernel is evaluated from its tail series.
pub const KERNEL_TAIL_SPLIT: f64 = 1e3;

fn kernel_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-13,
        abs_tol: 1e-15,
        max_subdivisions: 1000,
    }
}

/// Path-loss kernel `G(y) = ∫_y^∞ dx / (1 + x^(α/2))`.
///
/// Exact `π/2 - arctan y` at α = 4; otherwise quadrature on `[y, 1e3]` plus a
/// convergent series for the tail.
pub fn g_kernel(y: f64, alpha: f64) -> Result<f64, NumericsError> {
    check_args(y, alpha)?;
    if alpha == 4.0 {
        // arctan(1/y) keeps full relative precision for large y
        return Ok(if y == 0.0 { PI / 2.0 } else { (1.0 / y).atan() });
    }
    g_kernel_quadrature_branch(y, alpha)
}

/// Same integral, always through the quadrature-plus-tail path.
pub fn g_kernel_by_quadrature(y: f64, alpha: f64) -> Result<f64, NumericsError> {
    check_args(y, alpha)?;
    g_kernel_quadrature_branch(y, alpha)
}

/// `G(0) = (2π/α)·csc(2π/α)`.
pub fn g_kernel_at_zero(alpha: f64) -> Result<f64, NumericsError> {
    check_args(0.0, alpha)?;
    let a = 2.0 * PI / alpha;
    Ok(a / a.sin())
}

fn check_args(y: f64, alpha: f64) -> Result<(), NumericsError> {
    if !(alpha > 2.0) {
        return Err(NumericsError::Divergent { alpha });
    }
    if !(y >= 0.0) {
        return Err(NumericsError::InvalidArgument(format!("kernel argument y = {y}")));
    }
    Ok(())
}

fn g_kernel_quadrature_branch(y: f64, alpha: f64) -> Result<f64, NumericsError> {
    let beta = alpha / 2.0;
    if y >= KERNEL_TAIL_SPLIT {
        return Ok(tail_series(y, beta));
    }
    let body = integrate(
        |x| 1.0 / (1.0 + x.powf(beta)),
        y,
        KERNEL_TAIL_SPLIT,
        &kernel_spec(),
    )?;
    Ok(body.value + tail_series(KERNEL_TAIL_SPLIT, beta))
}

/// `∫_y^∞ dx/(1+x^β)` for `y ≥ 1` from the alternating expansion
/// `Σ (-1)^k y^(1-β(k+1)) / (β(k+1) - 1)`.
fn tail_series(y: f64, beta: f64) -> f64 {
    let ratio = y.powf(-beta);
    let mut power = y * ratio;
    let mut sum = 0.0;
    for k in 0..200 {
        let m = beta * (k as f64 + 1.0) - 1.0;
        let term = power / m;
        let signed = if k % 2 == 0 { term } else { -term };
        sum += signed;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        power *= ratio;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha4_closed_values() {
        assert_eq!(g_kernel(0.0, 4.0).unwrap(), PI / 2.0);
        assert!((g_kernel(1.0, 4.0).unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn alpha3_at_zero_matches_csc() {
        // (2π/3)·csc(2π/3), checked against an independent mpmath value
        let expected = 2.418_399_152_312_290_4;
        assert!((g_kernel_at_zero(3.0).unwrap() - expected).abs() < 1e-12);
        assert!((g_kernel(0.0, 3.0).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn quadrature_branch_equals_arctan_on_log_grid() {
        let mut y: f64 = 0.0;
        let check = |y: f64| {
            let q = g_kernel_by_quadrature(y, 4.0).unwrap();
            let c = PI / 2.0 - y.atan();
            assert!((q - c).abs() <= 1e-10, "y={y} q={q} c={c}");
        };
        check(y);
        y = 1e-6;
        while y <= 1e4 {
            check(y);
            y *= 10f64.powf(0.25);
        }
    }

    #[test]
    fn zero_limit_matches_csc_for_several_alpha() {
        for &alpha in &[2.2, 2.5, 3.0, 3.5, 5.0, 6.0] {
            let q = g_kernel_by_quadrature(0.0, alpha).unwrap();
            let c = g_kernel_at_zero(alpha).unwrap();
            assert!((q - c).abs() <= 1e-9 * c, "alpha={alpha} q={q} c={c}");
        }
    }

    #[test]
    fn strictly_decreasing_and_positive() {
        for &alpha in &[2.5, 3.0, 4.0, 4.5] {
            let mut prev = f64::INFINITY;
            for i in 0..60 {
                let y = 1e-3 * 1.3f64.powi(i);
                let g = g_kernel(y, alpha).unwrap();
                assert!(g > 0.0 && g < prev);
                prev = g;
            }
        }
    }

    #[test]
    fn divergent_alpha_rejected() {
        assert!(matches!(g_kernel(0.0, 2.0), Err(NumericsError::Divergent { .. })));
        assert!(g_kernel(-1.0, 3.0).is_err());
    }
}
