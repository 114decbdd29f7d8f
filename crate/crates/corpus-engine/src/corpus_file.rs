//! Line-delimited corpus file: a schema header line followed by one JSON
//! paper record per line, UTF-8.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::record::PaperRecord;

pub const SCHEMA: &str = "paper-corpus/v1";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    schema: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusFileError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing schema header line")]
    MissingHeader,
    #[error("unsupported schema {0} (expected {SCHEMA})")]
    UnsupportedSchema(String),
    #[error("line {line}: {source}")]
    BadRecord { line: usize, source: serde_json::Error },
}

pub fn read_corpus_file(path: &Path) -> Result<Vec<PaperRecord>, CorpusFileError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let header_line = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(CorpusFileError::MissingHeader),
    };
    let header: Header = serde_json::from_str(&header_line)
        .map_err(|source| CorpusFileError::BadRecord { line: 1, source })?;
    if header.schema != SCHEMA {
        return Err(CorpusFileError::UnsupportedSchema(header.schema));
    }
    let mut records = Vec::new();
    for (index, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|source| CorpusFileError::BadRecord { line: index + 1, source })?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_corpus_file(path: &Path, records: &[PaperRecord]) -> Result<(), CorpusFileError> {
    let mut out = std::fs::File::create(path)?;
    serde_json::to_writer(&mut out, &Header { schema: SCHEMA.to_string() })
        .map_err(|source| CorpusFileError::BadRecord { line: 1, source })?;
    out.write_all(b"\n")?;
    for (index, record) in records.iter().enumerate() {
        serde_json::to_writer(&mut out, record)
            .map_err(|source| CorpusFileError::BadRecord { line: index + 2, source })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
