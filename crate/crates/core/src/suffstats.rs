use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Sufficient statistics of a batch: count, extremes, sum and sum of logs.
///
/// Every model in the crate updates from these alone. `sum_log` is `None` as
/// soon as one datum is non-positive; the log-scale models reject such data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuffStats {
    pub n: u64,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub sum: f64,
    pub sum_log: Option<f64>,
}

impl Default for SuffStats {
    fn default() -> Self {
        SuffStats {
            n: 0,
            min: None,
            max: None,
            sum: 0.0,
            sum_log: Some(0.0),
        }
    }
}

impl SuffStats {
    pub fn from_data(data: &[f64]) -> Self {
        let mut s = SuffStats::default();
        for &x in data {
            s.push(x);
        }
        s
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.min = Some(self.min.map_or(x, |m| m.min(x)));
        self.max = Some(self.max.map_or(x, |m| m.max(x)));
        self.sum += x;
        self.sum_log = match self.sum_log {
            Some(s) if x > 0.0 => Some(s + x.ln()),
            _ => None,
        };
    }

    /// Combines two batches; associative and commutative.
    pub fn merge(&self, other: &SuffStats) -> SuffStats {
        fn pick(a: Option<f64>, b: Option<f64>, f: fn(f64, f64) -> f64) -> Option<f64> {
            match (a, b) {
                (Some(x), Some(y)) => Some(f(x, y)),
                (x, None) => x,
                (None, y) => y,
            }
        }
        SuffStats {
            n: self.n + other.n,
            min: pick(self.min, other.min, f64::min),
            max: pick(self.max, other.max, f64::max),
            sum: self.sum + other.sum,
            sum_log: match (self.sum_log, other.sum_log) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        }
    }

    pub fn count(&self) -> f64 {
        self.n as f64
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }

    /// Sum of logs, or a domain error naming the model that needed it.
    pub fn require_sum_log(&self, model: &str) -> Result<f64> {
        self.sum_log
            .ok_or_else(|| domain(format!("{model} requires strictly positive data")))
    }

    pub fn require_positive(&self, model: &str) -> Result<()> {
        match self.min {
            Some(m) if !(m > 0.0) => Err(domain(format!(
                "{model} requires strictly positive data, minimum is {m}"
            ))),
            _ => Ok(()),
        }
    }
}
