//! Append-only, totally ordered usage log.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use crate::types::{Usage, UsageRecord};

/// In-memory usage log; one record per model-call attempt, in call order.
/// Cache-read tokens are clamped to never exceed input tokens.
#[derive(Debug, Default)]
pub struct UsageLog {
    records: Mutex<Vec<UsageRecord>>,
}

impl UsageLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append(&self, model: &str, task_id: &str, usage: Usage) -> UsageRecord {
        let mut records = self.records.lock().unwrap();
        let seq = records.len() as u64;
        let record = UsageRecord {
            model: model.to_string(),
            input_tokens: usage.input_tokens,
            output_tokens: usage.output_tokens,
            cache_read_tokens: usage.cache_read_tokens.min(usage.input_tokens),
            cache_write_tokens: usage.cache_write_tokens,
            timestamp: seq,
            task_id: task_id.to_string(),
            call_id: format!("call-{seq}"),
        };
        records.push(record.clone());
        record
    }

    pub fn records(&self) -> Vec<UsageRecord> {
        self.records.lock().unwrap().clone()
    }

    pub fn total_tokens(&self) -> u64 {
        self.records
            .lock()
            .unwrap()
            .iter()
            .map(|r| r.input_tokens + r.output_tokens)
            .sum()
    }

    /// One JSON record per line, append-only field order.
    pub fn write_jsonl(&self, path: &Path) -> std::io::Result<()> {
        let mut out = std::fs::File::create(path)?;
        for record in self.records.lock().unwrap().iter() {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl(path: &Path) -> std::io::Result<Vec<UsageRecord>> {
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut records = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line)?);
        }
        Ok(records)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_assigns_sequence_numbers() {
        let log = UsageLog::new();
        let a = log.append("m", "t1", Usage { input_tokens: 5, ..Default::default() });
        let b = log.append("m", "t2", Usage { output_tokens: 3, ..Default::default() });
        assert_eq!(a.timestamp, 0);
        assert_eq!(b.timestamp, 1);
        assert_eq!(log.total_tokens(), 8);
    }

    #[test]
    fn cache_read_clamped_to_input() {
        let log = UsageLog::new();
        let rec = log.append(
            "m",
            "t",
            Usage { input_tokens: 10, cache_read_tokens: 50, ..Default::default() },
        );
        assert_eq!(rec.cache_read_tokens, 10);
    }

    #[test]
    fn jsonl_round_trip() {
        let log = UsageLog::new();
        log.append("m", "t1", Usage { input_tokens: 7, output_tokens: 2, ..Default::default() });
        log.append("n", "t2", Usage { cache_write_tokens: 4, ..Default::default() });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("usage.jsonl");
        log.write_jsonl(&path).unwrap();
        let back = UsageLog::read_jsonl(&path).unwrap();
        assert_eq!(back, log.records());
    }
}
