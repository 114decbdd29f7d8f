//! Macro-averaging of benchmark statistics and confidence intervals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::MetricError;

/// One benchmark's summary entering the macro average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkStat {
    pub benchmark: String,
    pub category: String,
    /// Mean per-sample score, on whatever scale the caller uses consistently.
    pub mean: f64,
    /// Macro weight within the category (paired evals use 0.5 each).
    pub weight: f64,
}

/// Category means plus the overall mean of category means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroAggregate {
    pub categories: BTreeMap<String, f64>,
    pub overall: f64,
}

/// Category mean = weighted mean of member benchmark means; overall =
/// unweighted mean of the category means. Never pooled over samples.
pub fn macro_aggregate(stats: &[BenchmarkStat]) -> Result<MacroAggregate, MetricError> {
    if stats.is_empty() {
        return Err(MetricError::EmptyInput("benchmark stats"));
    }
    let mut sums: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for stat in stats {
        if stat.weight <= 0.0 {
            return Err(MetricError::NonPositiveWeight(stat.benchmark.clone()));
        }
        let entry = sums.entry(stat.category.clone()).or_insert((0.0, 0.0));
        entry.0 += stat.weight * stat.mean;
        entry.1 += stat.weight;
    }
    let categories: BTreeMap<String, f64> =
        sums.into_iter().map(|(cat, (num, den))| (cat, num / den)).collect();
    let overall = categories.values().sum::<f64>() / categories.len() as f64;
    Ok(MacroAggregate { categories, overall })
}

/// 95% confidence-interval half-width by normal approximation:
/// 1.96 x sample standard error of the mean. `None` for fewer than two
/// samples, where the interval is undefined.
pub fn confidence_interval(samples: &[f64]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some(1.96 * (var / n).sqrt())
}
