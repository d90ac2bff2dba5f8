//! Hypothesis tests: one-sample bootstrap-t on trimmed means, Welch's t,
//! Mann-Whitney U and the median-centred Levene (Brown-Forsythe) test.

mod dist;
mod mann_whitney;
mod robust;
mod variance;
mod welch;

use serde::{Deserialize, Serialize};

pub use dist::{f_upper_tail, normal_two_sided, student_t_two_sided};
pub use mann_whitney::{mann_whitney, u_statistic, MwMode, EXACT_AUTO_MAX_N};
pub use robust::{bootstrap_t_one_sample, trimmed_mean, winsorized_variance, BootstrapConfig};
pub use variance::brown_forsythe;
pub use welch::welch_t;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    BootstrapT,
    Welch,
    MannWhitney,
    BrownForsythe,
}

/// Degrees of freedom: a single value for t statistics, a numerator and
/// denominator pair for F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Df {
    One(f64),
    Two(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: TestMethod,
    pub statistic: f64,
    pub df: Option<Df>,
    #[serde(rename = "p")]
    pub p_value: f64,
    /// Trimmed-mean estimate for the bootstrap test.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    pub ci: Option<[f64; 2]>,
    #[serde(rename = "n")]
    pub n_obs: Vec<usize>,
}

impl TestResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("test result serializes")
    }
}
