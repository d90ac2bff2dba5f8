use super::{f_upper_tail, Df, TestMethod, TestResult};
use crate::error::{Error, Result};

fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Levene's homogeneity-of-variance test centred on group medians: one-way
/// ANOVA on `|x_ij - median_j|`.
pub fn brown_forsythe(groups: &[Vec<f64>]) -> Result<TestResult> {
    if groups.len() < 2 {
        return Err(Error::Insufficient("brown-forsythe needs at least two groups".into()));
    }
    if groups.iter().any(|g| g.len() < 2) {
        return Err(Error::Insufficient("every group needs at least two values".into()));
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("brown-forsythe sample"));
    }
    let deviations: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let m = median(g);
            g.iter().map(|v| (v - m).abs()).collect()
        })
        .collect();
    let k = groups.len();
    let total_n: usize = groups.iter().map(Vec::len).sum();
    let group_means: Vec<f64> = deviations
        .iter()
        .map(|d| d.iter().sum::<f64>() / d.len() as f64)
        .collect();
    let grand = deviations.iter().flatten().sum::<f64>() / total_n as f64;
    let between: f64 = deviations
        .iter()
        .zip(&group_means)
        .map(|(d, m)| d.len() as f64 * (m - grand).powi(2))
        .sum();
    let within: f64 = deviations
        .iter()
        .zip(&group_means)
        .map(|(d, m)| d.iter().map(|v| (v - m).powi(2)).sum::<f64>())
        .sum();
    let (d1, d2) = ((k - 1) as f64, (total_n - k) as f64);
    if within == 0.0 && between == 0.0 {
        return Err(Error::Degenerate("all absolute deviations identical"));
    }
    let f = if within == 0.0 {
        f64::INFINITY
    } else {
        (between / d1) / (within / d2)
    };
    Ok(TestResult {
        method: TestMethod::BrownForsythe,
        statistic: f,
        df: Some(Df::Two(d1, d2)),
        p_value: f_upper_tail(f, d1, d2),
        estimate: None,
        ci: None,
        n_obs: groups.iter().map(Vec::len).collect(),
    })
}
