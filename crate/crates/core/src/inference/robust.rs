use super::{TestMethod, TestResult};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub trim: f64,
    pub resamples: usize,
    pub seed: u64,
    pub ci_level: f64,
}

impl BootstrapConfig {
    pub fn new(seed: u64) -> Self {
        BootstrapConfig {
            trim: 0.2,
            resamples: 5000,
            seed,
            ci_level: 0.95,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.trim) {
            return Err(Error::Config(format!("trim {} outside [0, 0.5)", self.trim)));
        }
        if self.resamples < 100 {
            return Err(Error::Config(format!("{} resamples < 100", self.resamples)));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config(format!("ci level {} outside (0, 1)", self.ci_level)));
        }
        Ok(())
    }
}

fn trim_count(n: usize, trim: f64) -> usize {
    (trim * n as f64).floor() as usize
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

fn trimmed_mean_sorted(s: &[f64], g: usize) -> f64 {
    let kept = &s[g..s.len() - g];
    kept.iter().sum::<f64>() / kept.len() as f64
}

fn winsorized_variance_sorted(s: &[f64], g: usize) -> f64 {
    let n = s.len();
    let (lo, hi) = (s[g], s[n - 1 - g]);
    let w = |v: f64| v.clamp(lo, hi);
    let mean = s.iter().map(|&v| w(v)).sum::<f64>() / n as f64;
    s.iter().map(|&v| (w(v) - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

/// Mean after dropping `floor(trim * n)` values from each end.
pub fn trimmed_mean(x: &[f64], trim: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty("trimmed mean sample"));
    }
    if !(0.0..0.5).contains(&trim) {
        return Err(Error::Config(format!("trim {trim} outside [0, 0.5)")));
    }
    let g = trim_count(x.len(), trim);
    if x.len() <= 2 * g {
        return Err(Error::Insufficient("sample over-trimmed".into()));
    }
    Ok(trimmed_mean_sorted(&sorted(x), g))
}

/// Sample variance (n - 1 denominator) after pulling each tail in to the
/// nearest retained value.
pub fn winsorized_variance(x: &[f64], trim: f64) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Insufficient("winsorized variance needs n >= 2".into()));
    }
    if !(0.0..0.5).contains(&trim) {
        return Err(Error::Config(format!("trim {trim} outside [0, 0.5)")));
    }
    Ok(winsorized_variance_sorted(&sorted(x), trim_count(x.len(), trim)))
}

/// One-sample bootstrap-t test of `H0: trimmed mean = mu0`.
///
/// The null distribution is bootstrapped from the sample centred on its
/// trimmed mean. The two-sided p-value is the share of `|T*| >= |T|`; the
/// interval is the equal-tailed bootstrap-t interval `est - q * se` using the
/// `round(alpha/2 * B)`-th order statistics of `T*`.
pub fn bootstrap_t_one_sample(x: &[f64], mu0: f64, cfg: &BootstrapConfig) -> Result<TestResult> {
    cfg.validate()?;
    let n = x.len();
    if n < 5 {
        return Err(Error::Insufficient("bootstrap-t needs at least 5 values".into()));
    }
    if x.iter().any(|v| !v.is_finite()) || !mu0.is_finite() {
        return Err(Error::NonFinite("bootstrap sample"));
    }
    let g = trim_count(n, cfg.trim);
    let s = sorted(x);
    let estimate = trimmed_mean_sorted(&s, g);
    let wvar = winsorized_variance_sorted(&s, g);
    if !(wvar > 0.0) {
        return Err(Error::Degenerate("zero winsorized variance"));
    }
    let scale = (1.0 - 2.0 * cfg.trim) * (n as f64).sqrt();
    let se = wvar.sqrt() / scale;
    let t = (estimate - mu0) / se;

    let centred: Vec<f64> = x.iter().map(|v| v - estimate).collect();
    let mut rng = SeededRng::new(cfg.seed);
    let mut draw = vec![0.0; n];
    let mut t_star = Vec::with_capacity(cfg.resamples);
    for _ in 0..cfg.resamples {
        for slot in draw.iter_mut() {
            *slot = centred[rng.index(n)];
        }
        draw.sort_by(f64::total_cmp);
        let m = trimmed_mean_sorted(&draw, g);
        let se_b = winsorized_variance_sorted(&draw, g).sqrt() / scale;
        let tb = if se_b > 0.0 {
            m / se_b
        } else if m == 0.0 {
            0.0
        } else {
            m.signum() * f64::INFINITY
        };
        t_star.push(tb);
    }

    let exceed = t_star.iter().filter(|tb| tb.abs() >= t.abs()).count();
    let p_value = exceed as f64 / cfg.resamples as f64;

    t_star.sort_by(f64::total_cmp);
    let b = cfg.resamples;
    let alpha = 1.0 - cfg.ci_level;
    let ilow = ((alpha / 2.0) * b as f64).round() as usize;
    let ihigh = b - ilow;
    let q_low = t_star[ilow.min(b - 1)];
    let q_high = t_star[ihigh.saturating_sub(1)];
    let ci = [estimate - q_high * se, estimate - q_low * se];

    Ok(TestResult {
        method: TestMethod::BootstrapT,
        statistic: t,
        df: None,
        p_value,
        estimate: Some(estimate),
        ci: Some(ci),
        n_obs: vec![n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::student_t_two_sided;

    #[test]
    fn trimmed_mean_examples() {
        assert_eq!(trimmed_mean(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.2).unwrap(), 3.0);
        assert_eq!(trimmed_mean(&[5.0, 1.0, 4.0, 2.0, 3.0], 0.2).unwrap(), 3.0);
        let x = [1.0, 7.0, 2.5, 9.0];
        assert_eq!(trimmed_mean(&x, 0.0).unwrap(), 19.5 / 4.0);
        assert_eq!(trimmed_mean(&[4.2; 6], 0.2).unwrap(), 4.2);
        assert!(trimmed_mean(&[], 0.2).is_err());
    }

    #[test]
    fn winsorized_variance_examples() {
        assert_eq!(winsorized_variance(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.2).unwrap(), 1.0);
        assert_eq!(winsorized_variance(&[2.0; 5], 0.2).unwrap(), 0.0);
        // trim 0: ordinary variance of 1..5 is 2.5
        assert_eq!(winsorized_variance(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.0).unwrap(), 2.5);
        assert!(winsorized_variance(&[1.0], 0.2).is_err());
    }

    #[test]
    fn symmetric_sample_has_zero_statistic() {
        let x = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        for seed in [1, 2, 99] {
            let r = bootstrap_t_one_sample(&x, 0.0, &BootstrapConfig::new(seed)).unwrap();
            assert_eq!(r.statistic, 0.0);
            assert!(r.p_value >= 0.9);
            let [lo, hi] = r.ci.unwrap();
            assert!(lo <= 0.0 && 0.0 <= hi);
        }
    }

    #[test]
    fn constant_sample_is_degenerate() {
        let err = bootstrap_t_one_sample(&[1.0; 10], 0.0, &BootstrapConfig::new(1)).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn config_bounds() {
        let mut cfg = BootstrapConfig::new(1);
        cfg.resamples = 99;
        assert!(cfg.validate().is_err());
        cfg.resamples = 100;
        cfg.trim = 0.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn reproducible_and_shift_sensitive() {
        let x = [2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 6.1, 0.7, 3.9];
        let cfg = BootstrapConfig::new(2024);
        let a = bootstrap_t_one_sample(&x, 0.0, &cfg).unwrap();
        let b = bootstrap_t_one_sample(&x, 0.0, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.p_value < 0.01);
        // Bootstrap and Student-t reference p agree in direction.
        assert!(student_t_two_sided(a.statistic, 5.0) < 0.01);
        let [lo, hi] = a.ci.unwrap();
        assert!(lo < a.estimate.unwrap() && a.estimate.unwrap() < hi);
    }
}
