use super::{normal_two_sided, TestMethod, TestResult};
use crate::error::{Error, Result};

/// Largest pooled size for which `MwMode::Auto` uses the exact distribution.
pub const EXACT_AUTO_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwMode {
    Exact,
    NormalApprox,
    Auto,
}

/// `U = #{x_i > y_j} + 0.5 * #{x_i == y_j}`.
pub fn u_statistic(x: &[f64], y: &[f64]) -> f64 {
    let mut u = 0.0;
    for a in x {
        for b in y {
            if a > b {
                u += 1.0;
            } else if a == b {
                u += 0.5;
            }
        }
    }
    u
}

/// Doubled mid-ranks of the pooled sample (integers, so ties stay exact),
/// plus the tie-group sizes.
fn doubled_midranks(pooled: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // positions i..=j hold ranks i+1..=j+1; doubled mid-rank is their sum
        let doubled = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = doubled;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Exact two-sided p-value from the permutation distribution of the doubled
/// rank sum of `x`, built by dynamic programming over subset sizes.
fn exact_p(ranks: &[u64], nx: usize) -> f64 {
    let n = ranks.len();
    let max_sum: u64 = ranks.iter().sum();
    let width = max_sum as usize + 1;
    // counts[k * width + s]: subsets of size k with doubled rank sum s
    let mut counts = vec![0.0f64; (nx + 1) * width];
    counts[0] = 1.0;
    for &r in ranks {
        let r = r as usize;
        for k in (1..=nx).rev() {
            let (lower, upper) = counts.split_at_mut(k * width);
            let prev = &lower[(k - 1) * width..];
            let cur = &mut upper[..width];
            for s in (r..width).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let observed: u64 = ranks[..nx].iter().sum();
    let centre = (nx * (n + 1)) as i64;
    let dist_obs = (observed as i64 - centre).abs();
    let row = &counts[nx * width..(nx + 1) * width];
    let total: f64 = row.iter().sum();
    let extreme: f64 = row
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as i64 - centre).abs() >= dist_obs)
        .map(|(_, c)| c)
        .sum();
    (extreme / total).min(1.0)
}

fn normal_p(u: f64, nx: usize, ny: usize, ties: &[usize]) -> f64 {
    let (fx, fy) = (nx as f64, ny as f64);
    let n = fx + fy;
    let mu = fx * fy / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum();
    let var = if n > 1.0 {
        fx * fy / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    if !(var > 0.0) {
        return 1.0;
    }
    let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
    normal_two_sided(z)
}

/// Two-sided Mann-Whitney U test. The reported statistic is `U` for `x`.
pub fn mann_whitney(x: &[f64], y: &[f64], mode: MwMode) -> Result<TestResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("mann-whitney sample"));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::NonFinite("mann-whitney sample"));
    }
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, ties) = doubled_midranks(&pooled);
    let (nx, ny) = (x.len(), y.len());
    let doubled_sum: u64 = ranks[..nx].iter().sum();
    let u = doubled_sum as f64 / 2.0 - (nx * (nx + 1)) as f64 / 2.0;
    let exact = match mode {
        MwMode::Exact => true,
        MwMode::NormalApprox => false,
        MwMode::Auto => nx + ny <= EXACT_AUTO_MAX_N,
    };
    let p_value = if exact {
        exact_p(&ranks, nx)
    } else {
        normal_p(u, nx, ny, &ties)
    };
    Ok(TestResult {
        method: TestMethod::MannWhitney,
        statistic: u,
        df: None,
        p_value,
        estimate: None,
        ci: None,
        n_obs: vec![nx, ny],
    })
}
