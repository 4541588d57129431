use super::NumericsError;

/// Bisection for `f(x) = target` with `f` monotone on `[lo, hi]`, either
/// direction. Stops once `|f(x) - target| <= tol` or the bracket collapses.
pub fn find_root_monotone<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    if !(lo <= hi) || !(tol >= 0.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "bracket [{lo}, {hi}] with tolerance {tol}"
        )));
    }
    let f_lo = f(lo) - target;
    let f_hi = f(hi) - target;
    if f_lo.abs() <= tol {
        return Ok(lo);
    }
    if f_hi.abs() <= tol {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(NumericsError::Bracket { target, lo, hi });
    }
    let increasing = f_lo < 0.0;
    let (mut a, mut b) = (lo, hi);
    let mut best = (f64::INFINITY, 0.5 * (lo + hi));
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        let d = f(mid) - target;
        if d.abs() < best.0 {
            best = (d.abs(), mid);
        }
        if d.abs() <= tol || mid <= a || mid >= b {
            break;
        }
        if (d < 0.0) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::erf;

    #[test]
    fn identity() {
        let x = find_root_monotone(|x| x, 0.5, 0.0, 1.0, 1e-14).unwrap();
        assert!((x - 0.5).abs() <= 1e-14);
    }

    #[test]
    fn erf_inverse_at_point_eight() {
        let x = find_root_monotone(erf, 0.8, 0.0, 3.0, 1e-13).unwrap();
        // independent bisection on the series-checked erf gives 0.906193802436823
        assert!((x - 0.906_193_802_436_823_3).abs() < 1e-11);
        assert!((erf(x) - 0.8).abs() <= 1e-13);
    }

    #[test]
    fn decreasing_function() {
        let x = find_root_monotone(|x| (-x).exp(), 0.25, 0.0, 10.0, 1e-14).unwrap();
        assert!((x - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn missing_straddle_is_an_error() {
        let r = find_root_monotone(|x| -x, 5.0, 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(NumericsError::Bracket { .. })));
    }
}
