/// Error function. Backed by the `libm` port of the FreeBSD/Sun `s_erf.c`
/// rational approximations (below one ulp on the whole line).
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function, accurate in the far tail where `1 - erf`
/// would cancel.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series, summed until the terms vanish. Independent of libm.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            n += 1.0;
            term *= -x * x / n;
            sum += term / (2.0 * n + 1.0);
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    /// Lentz evaluation of the erfc continued fraction, x > 2.
    fn erfc_cf(x: f64) -> f64 {
        // erfc(x) = exp(-x²)/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for k in 1..500 {
            let a = k as f64 / 2.0;
            d = x + a * d;
            d = if d.abs() < tiny { tiny } else { d };
            c = x + a / c;
            c = if c.abs() < tiny { tiny } else { c };
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() / f
    }

    #[test]
    fn erf_reference_value() {
        assert_eq!(erf(0.0), 0.0);
        let reference = erf_series(1.0);
        assert!((reference - 0.8427007929497149).abs() < 1e-15);
        assert!(((erf(1.0) - reference) / reference).abs() <= 1e-12);
    }

    #[test]
    fn erf_matches_series_on_grid() {
        for i in 1..=300 {
            let x = i as f64 * 0.01;
            let r = erf_series(x);
            assert!(((erf(x) - r) / r).abs() <= 1e-12, "x = {x}");
            assert_eq!(erf(-x), -erf(x));
        }
    }

    #[test]
    fn erfc_matches_continued_fraction() {
        for i in 0..=80 {
            let x = 2.0 + i as f64 * 0.25;
            let r = erfc_cf(x);
            assert!(((erfc(x) - r) / r).abs() <= 1e-12, "x = {x}");
        }
    }

    #[test]
    fn erf_monotone_and_bounded() {
        let mut prev = -1.0;
        for i in -2000..=2000 {
            let v = erf(i as f64 * 0.005);
            assert!(v >= prev && v.abs() <= 1.0);
            prev = v;
        }
    }
}
