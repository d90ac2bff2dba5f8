use super::{student_t_two_sided, Df, TestMethod, TestResult};
use crate::error::{Error, Result};

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

/// Welch's unequal-variance two-sample t test with Welch-Satterthwaite df.
pub fn welch_t(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::Insufficient("welch needs at least two values per sample".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("welch sample"));
    }
    let (mx, vx) = mean_var(x);
    let (my, vy) = mean_var(y);
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (ax, ay) = (vx / nx, vy / ny);
    let se2 = ax + ay;
    if !(se2 > 0.0) {
        return Err(Error::Degenerate("both samples have zero variance"));
    }
    let t = (mx - my) / se2.sqrt();
    let df = se2 * se2 / (ax * ax / (nx - 1.0) + ay * ay / (ny - 1.0));
    Ok(TestResult {
        method: TestMethod::Welch,
        statistic: t,
        df: Some(Df::One(df)),
        p_value: student_t_two_sided(t, df),
        estimate: None,
        ci: None,
        n_obs: vec![x.len(), y.len()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_samples() {
        let r = welch_t(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn hand_values() {
        let r = welch_t(&[1.0, 3.0], &[2.0, 6.0]).unwrap();
        assert!((r.statistic - (-2.0 / 5f64.sqrt())).abs() < 1e-12);
        assert!((r.statistic + 0.8944).abs() < 1e-4);
        match r.df {
            Some(Df::One(df)) => assert!((df - 25.0 / 17.0).abs() < 1e-12),
            other => panic!("unexpected df {other:?}"),
        }
    }

    #[test]
    fn zero_variances_rejected() {
        assert!(matches!(welch_t(&[0.0, 0.0], &[1.0, 1.0]), Err(Error::Degenerate(_))));
        assert!(welch_t(&[1.0], &[1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn antisymmetric_and_affine_invariant(
            x in prop::collection::vec(-50.0f64..50.0, 2..15),
            y in prop::collection::vec(-50.0f64..50.0, 2..15),
            shift in -100.0f64..100.0,
            scale in 0.1f64..10.0,
        ) {
            prop_assume!(welch_t(&x, &y).is_ok());
            let a = welch_t(&x, &y).unwrap();
            let b = welch_t(&y, &x).unwrap();
            prop_assert_eq!(a.statistic, -b.statistic);
            prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
            let xs: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
            let ys: Vec<f64> = y.iter().map(|v| v * scale + shift).collect();
            let c = welch_t(&xs, &ys).unwrap();
            prop_assert!((a.statistic - c.statistic).abs() <= 1e-6 * a.statistic.abs().max(1.0));
            prop_assert!((a.p_value - c.p_value).abs() < 1e-6);
            let mut xr = x.clone();
            xr.reverse();
            let d = welch_t(&xr, &y).unwrap();
            prop_assert!((a.statistic - d.statistic).abs() <= 1e-9 * a.statistic.abs().max(1.0));
        }
    }
}
