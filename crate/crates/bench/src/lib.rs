//! Inputs shared by the benchmarks: every model case with a fixed sample.

use gpbayes::oracle::fixtures::model_cases;
use gpbayes::{ModelSpec, SuffStats};

pub struct Workload {
    pub name: &'static str,
    pub spec: ModelSpec,
    pub data: Vec<f64>,
    pub stats: SuffStats,
}

/// One workload per model case, `n` draws from its true distribution.
pub fn workloads(n: usize) -> Vec<Workload> {
    model_cases()
        .into_iter()
        .map(|case| {
            let data = case.data(n, 42);
            Workload {
                name: case.name,
                spec: case.spec,
                stats: SuffStats::from_data(&data),
                data,
            }
        })
        .collect()
}
