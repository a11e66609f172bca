use serde::{Deserialize, Serialize};

/// A probability estimate with its standard error.
///
/// Closed forms carry `standard_error = 0` and `sample_count = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub sample_count: u64,
}

impl MetricEstimate {
    pub fn exact(value: f64) -> Self {
        MetricEstimate {
            value: value.clamp(0.0, 1.0),
            standard_error: 0.0,
            sample_count: 0,
        }
    }

    /// Mean of Bernoulli outcomes with the binomial standard error.
    pub fn from_successes(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return MetricEstimate {
                value: 0.0,
                standard_error: 0.0,
                sample_count: 0,
            };
        }
        let p = successes as f64 / trials as f64;
        MetricEstimate {
            value: p,
            standard_error: (p * (1.0 - p) / trials as f64).sqrt(),
            sample_count: trials,
        }
    }

    /// Sample mean of `values` with the standard error of the mean.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::from_successes(0, 0);
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        MetricEstimate {
            value: mean.clamp(0.0, 1.0),
            standard_error: (var / n as f64).sqrt(),
            sample_count: n as u64,
        }
    }

    /// `|self - other|` in units of the combined standard error; infinite
    /// when both are exact and differ.
    pub fn z_score(&self, other: &MetricEstimate) -> f64 {
        let se = self.standard_error.hypot(other.standard_error);
        let d = (self.value - other.value).abs();
        if se > 0.0 {
            d / se
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}
