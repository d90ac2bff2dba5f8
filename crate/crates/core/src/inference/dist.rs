use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Upper tail `P(F >= f)` of the F distribution.
pub fn f_upper_tail(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f)).clamp(0.0, 1.0)
}

pub fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_tail_values() {
        // t with 1 df is Cauchy: P(|T| > 1) = 1/2.
        assert!((student_t_two_sided(1.0, 1.0) - 0.5).abs() < 1e-12);
        // t with 2 df: P(|T| > t) = 1 - t / sqrt(2 + t^2).
        let t: f64 = 1.7;
        assert!((student_t_two_sided(t, 2.0) - (1.0 - t / (2.0 + t * t).sqrt())).abs() < 1e-12);
        // F(2, d2): P(F > f) = (1 + 2f/d2)^(-d2/2).
        let (f, d2): (f64, f64) = (1.3, 7.0);
        assert!((f_upper_tail(f, 2.0, d2) - (1.0 + 2.0 * f / d2).powf(-d2 / 2.0)).abs() < 1e-12);
        let p = normal_two_sided(1.959963984540054);
        assert!((p - 0.05).abs() < 1e-10, "{p:e}");
        assert_eq!(student_t_two_sided(0.0, 5.0), 1.0);
        assert_eq!(f_upper_tail(0.0, 1.0, 4.0), 1.0);
    }
}
