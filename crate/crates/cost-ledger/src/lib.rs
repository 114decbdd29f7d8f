//! Normalized dollar costs from usage logs and a frozen price snapshot.
//!
//! Pricing is a pure function of (log, snapshot): repricing the same log is
//! idempotent, and a new snapshot changes dollars but never token counts.

pub mod money;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use model_gateway::UsageRecord;
use serde::{Deserialize, Serialize};

pub use money::{parse_scaled_decimal, Money};

#[derive(Debug, Clone, thiserror::Error)]
pub enum CostError {
    #[error("malformed price snapshot: {0}")]
    Malformed(String),
    #[error("invalid price for model {model}: {reason}")]
    InvalidPrice { model: String, reason: String },
    #[error("no price for model {0} and no size metadata for fallback")]
    UnknownPrice(String),
    #[error("no size bucket covers {parameters_b}B parameters (model {model})")]
    NoBucket { model: String, parameters_b: f64 },
    #[error("io error: {0}")]
    Io(String),
}

/// Per-token prices in picodollars, derived from per-1M-token dollar rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelPrice {
    pub input: i128,
    pub output: i128,
    pub cache_read: i128,
    pub cache_write: i128,
}

/// A parameter-count range mapped to prices, for models missing from the
/// per-model table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBucket {
    pub min_parameters_b: f64,
    /// Exclusive upper bound; `None` means unbounded.
    pub max_parameters_b: Option<f64>,
    pub price: ModelPrice,
}

/// Frozen per-model prices plus the size-based fallback table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSnapshot {
    pub snapshot_id: String,
    pub models: BTreeMap<String, ModelPrice>,
    pub model_sizes: BTreeMap<String, f64>,
    pub size_buckets: Vec<SizeBucket>,
}

// On-disk shape: prices are decimal strings so parsing stays exact.
#[derive(Debug, Serialize, Deserialize)]
struct SnapshotFile {
    snapshot_id: String,
    #[serde(default)]
    models: BTreeMap<String, PriceEntry>,
    #[serde(default)]
    model_sizes: BTreeMap<String, f64>,
    #[serde(default)]
    size_buckets: Vec<BucketEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PriceEntry {
    input: String,
    output: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    cache_read: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cache_write: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BucketEntry {
    #[serde(default)]
    min_parameters_b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_parameters_b: Option<f64>,
    input: String,
    output: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    cache_read: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cache_write: Option<String>,
}

/// A dollar-per-1M-token decimal string becomes picodollars per token:
/// the micro-dollar scaling of the per-1M price is exactly the pico-dollar
/// per-token rate.
fn parse_rate(model: &str, text: &str) -> Result<i128, CostError> {
    parse_scaled_decimal(text, 6)
        .map_err(|reason| CostError::InvalidPrice { model: model.into(), reason })
}

fn rate_to_string(pico_per_token: i128) -> String {
    // Inverse of parse_rate: picodollars/token back to dollars per 1M.
    let whole = pico_per_token / 1_000_000;
    let frac = pico_per_token % 1_000_000;
    let mut s = format!("{whole}.{frac:06}");
    while s.ends_with('0') && !s.ends_with(".0") {
        s.pop();
    }
    if s.ends_with(".0") {
        s.pop();
        s.pop();
    }
    s
}

fn build_price(
    model: &str,
    input: &str,
    output: &str,
    cache_read: Option<&str>,
    cache_write: Option<&str>,
) -> Result<ModelPrice, CostError> {
    let input = parse_rate(model, input)?;
    let output = parse_rate(model, output)?;
    // Missing cache prices default to the input price: no discount.
    let cache_read = match cache_read {
        Some(t) => parse_rate(model, t)?,
        None => input,
    };
    let cache_write = match cache_write {
        Some(t) => parse_rate(model, t)?,
        None => input,
    };
    if cache_read > input {
        return Err(CostError::InvalidPrice {
            model: model.into(),
            reason: "cache_read price exceeds input price".into(),
        });
    }
    Ok(ModelPrice { input, output, cache_read, cache_write })
}

pub fn load_price_snapshot(path: &Path) -> Result<PriceSnapshot, CostError> {
    let text = std::fs::read_to_string(path).map_err(|e| CostError::Io(e.to_string()))?;
    parse_price_snapshot(&text)
}

pub fn parse_price_snapshot(text: &str) -> Result<PriceSnapshot, CostError> {
    let file: SnapshotFile =
        toml::from_str(text).map_err(|e| CostError::Malformed(e.to_string()))?;
    let mut models = BTreeMap::new();
    for (model, entry) in &file.models {
        models.insert(
            model.clone(),
            build_price(
                model,
                &entry.input,
                &entry.output,
                entry.cache_read.as_deref(),
                entry.cache_write.as_deref(),
            )?,
        );
    }
    let mut size_buckets = Vec::new();
    for (i, bucket) in file.size_buckets.iter().enumerate() {
        let label = format!("size_bucket[{i}]");
        size_buckets.push(SizeBucket {
            min_parameters_b: bucket.min_parameters_b,
            max_parameters_b: bucket.max_parameters_b,
            price: build_price(
                &label,
                &bucket.input,
                &bucket.output,
                bucket.cache_read.as_deref(),
                bucket.cache_write.as_deref(),
            )?,
        });
    }
    Ok(PriceSnapshot {
        snapshot_id: file.snapshot_id,
        models,
        model_sizes: file.model_sizes,
        size_buckets,
    })
}

impl PriceSnapshot {
    /// Canonical TOML serialization; `parse_price_snapshot` of the output
    /// reproduces `self` exactly.
    pub fn to_toml_string(&self) -> String {
        let file = SnapshotFile {
            snapshot_id: self.snapshot_id.clone(),
            models: self
                .models
                .iter()
                .map(|(m, p)| {
                    (
                        m.clone(),
                        PriceEntry {
                            input: rate_to_string(p.input),
                            output: rate_to_string(p.output),
                            cache_read: Some(rate_to_string(p.cache_read)),
                            cache_write: Some(rate_to_string(p.cache_write)),
                        },
                    )
                })
                .collect(),
            model_sizes: self.model_sizes.clone(),
            size_buckets: self
                .size_buckets
                .iter()
                .map(|b| BucketEntry {
                    min_parameters_b: b.min_parameters_b,
                    max_parameters_b: b.max_parameters_b,
                    input: rate_to_string(b.price.input),
                    output: rate_to_string(b.price.output),
                    cache_read: Some(rate_to_string(b.price.cache_read)),
                    cache_write: Some(rate_to_string(b.price.cache_write)),
                })
                .collect(),
        };
        toml::to_string(&file).expect("snapshot serializes")
    }

    fn price_for(&self, model: &str) -> Result<(ModelPrice, bool), CostError> {
        if let Some(price) = self.models.get(model) {
            return Ok((*price, false));
        }
        let parameters_b = *self
            .model_sizes
            .get(model)
            .ok_or_else(|| CostError::UnknownPrice(model.to_string()))?;
        let bucket = self
            .size_buckets
            .iter()
            .find(|b| {
                parameters_b >= b.min_parameters_b
                    && b.max_parameters_b.map(|max| parameters_b < max).unwrap_or(true)
            })
            .ok_or(CostError::NoBucket { model: model.to_string(), parameters_b })?;
        Ok((bucket.price, true))
    }
}

/// Cost of one call, with a flag when size-bucket fallback pricing was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CallCost {
    pub dollars: Money,
    pub fallback_priced: bool,
}

/// dollars = (input - cache_read) * p_in + cache_read * p_cache_read
///         + cache_write * p_cache_write + output * p_out
pub fn cost_of(usage: &UsageRecord, snapshot: &PriceSnapshot) -> Result<CallCost, CostError> {
    let (price, fallback_priced) = snapshot.price_for(&usage.model)?;
    let cache_read = usage.cache_read_tokens.min(usage.input_tokens) as i128;
    let fresh_input = usage.input_tokens as i128 - cache_read;
    let pico = fresh_input * price.input
        + cache_read * price.cache_read
        + usage.cache_write_tokens as i128 * price.cache_write
        + usage.output_tokens as i128 * price.output;
    Ok(CallCost { dollars: Money::from_picodollars(pico), fallback_priced })
}

/// Per-call, per-task, and run-total dollars for a usage log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub per_call: Vec<(String, Money)>,
    pub per_task: BTreeMap<String, Money>,
    pub run_total: Money,
    /// Mean cost per distinct task, rounded to the nearest picodollar.
    pub mean_cost_per_task: Money,
    pub fallback_models: BTreeSet<String>,
}

pub fn aggregate_costs(
    records: &[UsageRecord],
    snapshot: &PriceSnapshot,
) -> Result<CostBreakdown, CostError> {
    let mut per_call = Vec::with_capacity(records.len());
    let mut per_task: BTreeMap<String, Money> = BTreeMap::new();
    let mut run_total = Money::ZERO;
    let mut fallback_models = BTreeSet::new();
    for record in records {
        let cost = cost_of(record, snapshot)?;
        per_call.push((record.call_id.clone(), cost.dollars));
        *per_task.entry(record.task_id.clone()).or_default() += cost.dollars;
        run_total += cost.dollars;
        if cost.fallback_priced {
            fallback_models.insert(record.model.clone());
        }
    }
    let mean_cost_per_task = run_total.div_round(per_task.len() as i128);
    Ok(CostBreakdown { per_call, per_task, run_total, mean_cost_per_task, fallback_models })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SNAPSHOT: &str = r#"
snapshot_id = "fixture-1"

[models.test-model]
input = "2"
output = "8"
cache_read = "0.50"
cache_write = "2.50"

[model_sizes]
mystery-70b = 70.0

[[size_buckets]]
min_parameters_b = 0.0
max_parameters_b = 20.0
input = "0.30"
output = "0.60"

[[size_buckets]]
min_parameters_b = 20.0
input = "0.90"
output = "1.80"
"#;

    fn usage(model: &str, input: u64, output: u64, cache_read: u64, cache_write: u64) -> UsageRecord {
        UsageRecord {
            model: model.into(),
            input_tokens: input,
            output_tokens: output,
            cache_read_tokens: cache_read,
            cache_write_tokens: cache_write,
            timestamp: 0,
            task_id: "t".into(),
            call_id: "c".into(),
        }
    }

    #[test]
    fn one_million_input_tokens_at_two_dollars() {
        let snapshot = parse_price_snapshot(SNAPSHOT).unwrap();
        let cost = cost_of(&usage("test-model", 1_000_000, 0, 0, 0), &snapshot).unwrap();
        assert_eq!(cost.dollars.to_string(), "2.000000");
        assert!(!cost.fallback_priced);
    }

    #[test]
    fn fully_cached_input_pays_cache_rate() {
        let snapshot = parse_price_snapshot(SNAPSHOT).unwrap();
        let cost = cost_of(&usage("test-model", 1_000_000, 0, 1_000_000, 0), &snapshot).unwrap();
        assert_eq!(cost.dollars.to_string(), "0.500000");
    }

    #[test]
    fn zero_usage_is_free() {
        let snapshot = parse_price_snapshot(SNAPSHOT).unwrap();
        let cost = cost_of(&usage("test-model", 0, 0, 0, 0), &snapshot).unwrap();
        assert_eq!(cost.dollars, Money::ZERO);
    }

    #[test]
    fn size_bucket_fallback_is_flagged() {
        let snapshot = parse_price_snapshot(SNAPSHOT).unwrap();
        let cost = cost_of(&usage("mystery-70b", 1_000_000, 0, 0, 0), &snapshot).unwrap();
        assert_eq!(cost.dollars.to_string(), "0.900000");
        assert!(cost.fallback_priced);
    }

    #[test]
    fn unknown_model_without_size_metadata_errors() {
        let snapshot = parse_price_snapshot(SNAPSHOT).unwrap();
        let err = cost_of(&usage("who-dis", 1, 0, 0, 0), &snapshot).unwrap_err();
        assert!(matches!(err, CostError::UnknownPrice(_)));
    }

    #[test]
    fn missing_cache_price_defaults_to_input() {
        let text = "snapshot_id = \"s\"\n[models.m]\ninput = \"3\"\noutput = \"6\"\n";
        let snapshot = parse_price_snapshot(text).unwrap();
        let price = snapshot.models["m"];
        assert_eq!(price.cache_read, price.input);
        assert_eq!(price.cache_write, price.input);
    }

    #[test]
    fn negative_price_rejected() {
        let text = "snapshot_id = \"s\"\n[models.m]\ninput = \"-1\"\noutput = \"6\"\n";
        assert!(parse_price_snapshot(text).is_err());
    }

    #[test]
    fn cache_read_above_input_rejected() {
        let text =
            "snapshot_id = \"s\"\n[models.m]\ninput = \"1\"\noutput = \"2\"\ncache_read = \"3\"\n";
        assert!(parse_price_snapshot(text).is_err());
    }

    #[test]
    fn duplicate_model_entry_rejected() {
        let text = "snapshot_id = \"s\"\n[models.m]\ninput = \"1\"\noutput = \"2\"\n[models.m]\ninput = \"3\"\noutput = \"4\"\n";
        assert!(parse_price_snapshot(text).is_err());
    }

    #[test]
    fn snapshot_round_trips() {
        let snapshot = parse_price_snapshot(SNAPSHOT).unwrap();
        let back = parse_price_snapshot(&snapshot.to_toml_string()).unwrap();
        assert_eq!(snapshot, back);
    }

    #[test]
    fn aggregate_sums_per_task() {
        let snapshot = parse_price_snapshot(SNAPSHOT).unwrap();
        let records = vec![
            UsageRecord { task_id: "t1".into(), call_id: "c1".into(), ..usage("test-model", 100, 10, 0, 0) },
            UsageRecord { task_id: "t1".into(), call_id: "c2".into(), ..usage("test-model", 200, 20, 0, 0) },
            UsageRecord { task_id: "t1".into(), call_id: "c3".into(), ..usage("test-model", 300, 30, 0, 0) },
        ];
        let breakdown = aggregate_costs(&records, &snapshot).unwrap();
        let sum: Money = breakdown.per_call.iter().map(|(_, m)| *m).sum();
        assert_eq!(breakdown.per_task["t1"], sum);
        assert_eq!(breakdown.run_total, sum);
    }

    #[test]
    fn empty_log_is_all_zero() {
        let snapshot = parse_price_snapshot(SNAPSHOT).unwrap();
        let breakdown = aggregate_costs(&[], &snapshot).unwrap();
        assert_eq!(breakdown.run_total, Money::ZERO);
        assert!(breakdown.per_task.is_empty());
    }

    #[test]
    fn repricing_changes_dollars_not_tokens() {
        let snapshot = parse_price_snapshot(SNAPSHOT).unwrap();
        let cheap = parse_price_snapshot(
            "snapshot_id = \"s2\"\n[models.test-model]\ninput = \"1\"\noutput = \"4\"\n",
        )
        .unwrap();
        let record = usage("test-model", 1_000_000, 0, 0, 0);
        let a = cost_of(&record, &snapshot).unwrap();
        let b = cost_of(&record, &cheap).unwrap();
        assert_ne!(a.dollars, b.dollars);
        // Idempotence: pricing again gives identical results.
        assert_eq!(cost_of(&record, &snapshot).unwrap(), a);
    }
}
