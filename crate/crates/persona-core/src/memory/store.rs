//! The append-only episodic log and its exact-predicate queries.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::sim::{Category, Outcome};

use super::EpisodicRecord;

pub const LOG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum MemoryError {
    #[error("record id must be {expected}, got {got}")]
    Sequencing { expected: u64, got: u64 },
    #[error("log io: {0}")]
    Io(#[from] std::io::Error),
    #[error("log parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("no records for day {0}")]
    EmptyDay(u32),
}

#[derive(Debug, Serialize, Deserialize)]
struct LogHeader {
    schema: String,
    version: u32,
}

/// Query over the log; all present clauses must match.
#[derive(Debug, Clone, Default)]
pub struct Query {
    pub days: Option<RangeInclusive<u32>>,
    pub categories: Option<Vec<Category>>,
    pub outcomes: Option<Vec<Outcome>>,
}

impl Query {
    pub fn all() -> Self {
        Query::default()
    }

    pub fn day(day: u32) -> Self {
        Query {
            days: Some(day..=day),
            ..Query::default()
        }
    }

    pub fn matches(&self, rec: &EpisodicRecord, category: Category) -> bool {
        if let Some(days) = &self.days {
            if !days.contains(&rec.day) {
                return false;
            }
        }
        if let Some(cats) = &self.categories {
            if !cats.contains(&category) {
                return false;
            }
        }
        if let Some(outs) = &self.outcomes {
            if !outs.contains(&rec.outcome) {
                return false;
            }
        }
        true
    }
}

/// In-memory store over the append-only log, optionally mirrored to disk as
/// records arrive.
#[derive(Debug)]
pub struct MemoryStore {
    records: Vec<EpisodicRecord>,
    /// Category of each record, precomputed against the home node at record
    /// time so queries do not need the map.
    categories: Vec<Category>,
    writer: Option<BufWriter<File>>,
    home: crate::sim::NodeId,
}

impl MemoryStore {
    pub fn new(home: crate::sim::NodeId) -> Self {
        MemoryStore {
            records: Vec::new(),
            categories: Vec::new(),
            writer: None,
            home,
        }
    }

    /// Opens a store that appends each record to `path` as it is recorded.
    pub fn create(path: &Path, home: crate::sim::NodeId) -> Result<Self, MemoryError> {
        let file = File::create(path)?;
        let mut writer = BufWriter::new(file);
        let header = LogHeader {
            schema: "episodic-log".into(),
            version: LOG_SCHEMA_VERSION,
        };
        serde_json::to_writer(&mut writer, &header)
            .map_err(|e| MemoryError::Parse { line: 1, reason: e.to_string() })?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        let mut store = MemoryStore::new(home);
        store.writer = Some(writer);
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last_id(&self) -> u64 {
        self.records.last().map(|r| r.id).unwrap_or(0)
    }

    pub fn records(&self) -> &[EpisodicRecord] {
        &self.records
    }

    /// Appends a record. Ids must advance by exactly one.
    pub fn record(&mut self, rec: EpisodicRecord) -> Result<(), MemoryError> {
        let expected = self.last_id() + 1;
        if rec.id != expected {
            return Err(MemoryError::Sequencing {
                expected,
                got: rec.id,
            });
        }
        if let Some(w) = &mut self.writer {
            serde_json::to_writer(&mut *w, &rec).map_err(|e| MemoryError::Parse {
                line: self.records.len() + 2,
                reason: e.to_string(),
            })?;
            w.write_all(b"\n")?;
            w.flush()?;
        }
        self.categories
            .push(crate::sim::action_category(&rec.action, &self.home));
        self.records.push(rec);
        Ok(())
    }

    /// Exactly the records matching all query clauses, in id order.
    pub fn retrieve(&self, query: &Query) -> Vec<&EpisodicRecord> {
        self.records
            .iter()
            .zip(self.categories.iter())
            .filter(|(r, c)| query.matches(r, **c))
            .map(|(r, _)| r)
            .collect()
    }

    pub fn category_of(&self, idx: usize) -> Category {
        self.categories[idx]
    }

    /// Writes the full log (header + one record per line) to `path`.
    pub fn persist(&self, path: &Path) -> Result<(), MemoryError> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        let header = LogHeader {
            schema: "episodic-log".into(),
            version: LOG_SCHEMA_VERSION,
        };
        serde_json::to_writer(&mut w, &header)
            .map_err(|e| MemoryError::Parse { line: 1, reason: e.to_string() })?;
        w.write_all(b"\n")?;
        for (i, rec) in self.records.iter().enumerate() {
            serde_json::to_writer(&mut w, rec).map_err(|e| MemoryError::Parse {
                line: i + 2,
                reason: e.to_string(),
            })?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Loads a previously persisted log. Any malformed line is reported with
    /// its 1-based line number.
    pub fn load(path: &Path, home: crate::sim::NodeId) -> Result<Self, MemoryError> {
        let file = File::open(path)?;
        let reader = BufReader::new(file);
        let mut store = MemoryStore::new(home);
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if line_no == 1 {
                let header: LogHeader =
                    serde_json::from_str(&line).map_err(|e| MemoryError::Parse {
                        line: 1,
                        reason: e.to_string(),
                    })?;
                if header.schema != "episodic-log" || header.version != LOG_SCHEMA_VERSION {
                    return Err(MemoryError::Parse {
                        line: 1,
                        reason: format!(
                            "unsupported log schema {}@{}",
                            header.schema, header.version
                        ),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let rec: EpisodicRecord =
                serde_json::from_str(&line).map_err(|e| MemoryError::Parse {
                    line: line_no,
                    reason: e.to_string(),
                })?;
            store.record(rec)?;
        }
        Ok(store)
    }
}
