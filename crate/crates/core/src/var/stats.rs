use statrs::distribution::{ContinuousCDF, StudentsT};

/// Two-sided p-value of a t statistic with `dof` degrees of freedom.
pub fn p_value_t(t: f64, dof: f64) -> f64 {
    assert!(dof >= 1.0, "degrees of freedom must be at least 1, got {dof}");
    if t.is_nan() {
        return f64::NAN;
    }
    let dist = StudentsT::new(0.0, 1.0, dof).expect("valid Student-t parameters");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Quantile of the Student-t distribution.
pub fn t_quantile(prob: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof).expect("valid Student-t parameters").inverse_cdf(prob)
}

/// `***` below 0.01, `**` below 0.05, `*` below 0.10.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "*"
    } else {
        ""
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_examples() {
        assert_eq!(p_value_t(0.0, 5.0), 1.0);
        assert!((p_value_t(1.96, 1e6) - 0.05).abs() < 0.003);
        assert!(p_value_t(6.91, 90.0) < 1e-8);
        assert_eq!(p_value_t(-2.0, 7.0), p_value_t(2.0, 7.0));
    }

    #[test]
    fn p_value_cauchy_closed_form() {
        // dof = 1: P(|T| > t) = 1 − (2/π)·atan(t).
        for t in [0.3, 1.0, 4.0, 25.0] {
            let want = 1.0 - 2.0 / std::f64::consts::PI * f64::atan(t);
            assert!((p_value_t(t, 1.0) - want).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn p_value_monotone() {
        let ps: Vec<f64> = (0..50).map(|i| p_value_t(i as f64 * 0.2, 12.0)).collect();
        assert!(ps.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn star_convention() {
        assert_eq!([0.009, 0.04, 0.09, 0.5].map(stars), ["***", "**", "*", ""]);
        assert_eq!(stars(0.01), "**");
        assert_eq!(stars(0.10), "");
    }

    #[test]
    fn quantile_inverts() {
        let q = t_quantile(0.975, 10.0);
        assert!((p_value_t(q, 10.0) - 0.05).abs() < 1e-9);
    }
}
