//! Special functions backing the slope significance test.
//!
//! Self-contained Lanczos log-gamma and a continued-fraction regularized
//! incomplete beta, which together give the two-sided Student-t p-value
//! used as the stability measure of a fit.

/// Natural log of the gamma function for `z > 0` (Lanczos approximation).
pub fn ln_gamma(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    const COEF: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut series = 1.000000000190015;
    for (i, c) in COEF.iter().enumerate() {
        series += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * series / z).ln()
}

/// Regularized incomplete beta function I_x(a, b).
///
/// Continued fraction evaluated with the modified Lentz scheme, using the
/// symmetry relation to stay in the fast-converging region.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - reg_inc_beta(1.0 - x, b, a);
    }

    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_gamma(a) - ln_gamma(b) + ln_gamma(a + b);

    const TINY: f64 = 1e-30;
    const EPS: f64 = 1e-15;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut frac = d;

    for m in 1..=300 {
        let m = m as f64;
        // even step
        let num = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        d = 1.0 + num * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        frac *= c * d;
        // odd step
        let num = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 + num * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        frac *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }

    (ln_front.exp() * frac / a).clamp(0.0, 1.0)
}

/// Two-sided p-value of a Student-t statistic with `df` degrees of freedom.
///
/// `t == 0` gives exactly 1; infinite `t` gives exactly 0.
pub fn t_two_sided_p(t: f64, df: usize) -> f64 {
    assert!(df >= 1, "degrees of freedom must be at least 1");
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let df = df as f64;
    reg_inc_beta(df / (df + t * t), 0.5 * df, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_known_values() {
        // Gamma(5) = 24, Gamma(0.5) = sqrt(pi)
        assert_relative_eq!(ln_gamma(5.0), 24.0f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(
            ln_gamma(0.5),
            std::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn inc_beta_boundaries() {
        assert_eq!(reg_inc_beta(0.0, 2.0, 3.0), 0.0);
        assert_eq!(reg_inc_beta(1.0, 2.0, 3.0), 1.0);
        // I_x(1, 1) = x
        assert_relative_eq!(reg_inc_beta(0.3, 1.0, 1.0), 0.3, epsilon = 1e-12);
        // symmetry: I_x(a, b) = 1 - I_{1-x}(b, a)
        let lhs = reg_inc_beta(0.37, 2.5, 4.0);
        let rhs = 1.0 - reg_inc_beta(0.63, 4.0, 2.5);
        assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn p_value_at_zero_is_one() {
        assert_eq!(t_two_sided_p(0.0, 8), 1.0);
    }

    #[test]
    fn p_value_classic_critical_point() {
        // df = 8, |t| = 2.306 is the textbook 5% two-sided critical value.
        let p = t_two_sided_p(2.306, 8);
        assert!((p - 0.05).abs() < 1e-3, "p = {p}");
        // sign does not matter
        assert_eq!(p, t_two_sided_p(-2.306, 8));
    }

    #[test]
    fn p_value_decreasing_in_t() {
        let mut last = t_two_sided_p(0.0, 8);
        for i in 1..=50 {
            let p = t_two_sided_p(0.2 * i as f64, 8);
            assert!(p < last, "p-value must strictly decrease in |t|");
            last = p;
        }
    }
}
