//! The line-delimited trace file: a header line, then one JSON record per
//! line in emission order.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use thiserror::Error;

use super::records::{FrameOp, Header, NodeEvent, NodeStats, PropRow, Record, Summary, FORMAT_VERSION};
use crate::search::{ChoiceFrame, NodePath, SearchTree, Solution};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported trace format `{found}` (expected `{FORMAT_VERSION}`)")]
    Version { found: String },
    #[error("trace does not start with a header record")]
    MissingHeader,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceFile {
    pub header: Header,
    /// Every record after the header.
    pub records: Vec<Record>,
}

impl TraceFile {
    /// Splits off the leading header.
    pub fn from_records(mut records: Vec<Record>) -> Result<Self, TraceError> {
        if records.is_empty() {
            return Err(TraceError::MissingHeader);
        }
        match records.remove(0) {
            Record::Header(header) => Ok(TraceFile { header, records }),
            _ => Err(TraceError::MissingHeader),
        }
    }

    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        let header = Record::Header(self.header.clone());
        for r in std::iter::once(&header).chain(&self.records) {
            serde_json::to_writer(&mut *out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), TraceError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn read_from(input: impl BufRead) -> Result<Self, TraceError> {
        let mut records = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let n = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            if records.is_empty() {
                check_header(&line, n)?;
            }
            let r: Record = serde_json::from_str(&line).map_err(|e| TraceError::Parse {
                line: n,
                message: e.to_string(),
            })?;
            if records.is_empty() != matches!(r, Record::Header(_)) {
                return Err(if records.is_empty() {
                    TraceError::MissingHeader
                } else {
                    TraceError::Parse {
                        line: n,
                        message: "unexpected second header".into(),
                    }
                });
            }
            records.push(r);
        }
        Self::from_records(records)
    }

    pub fn parse(text: &str) -> Result<Self, TraceError> {
        Self::read_from(text.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TraceError> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }

    /// Rebuilds the search tree from the node records.
    pub fn tree(&self) -> SearchTree {
        let mut t = SearchTree::new();
        for r in &self.records {
            let Record::Node(n) = r else { continue };
            let id = match n.event {
                NodeEvent::Created => t.add(n.path.clone(), n.label.clone()),
                _ => match t.id_of(&n.path) {
                    Some(id) => id,
                    None => continue,
                },
            };
            t.nodes[id].state = n.state;
            if n.visit_order.is_some() {
                t.nodes[id].visit_order = n.visit_order;
            }
        }
        t
    }

    pub fn stats(&self) -> HashMap<NodePath, NodeStats> {
        self.records
            .iter()
            .filter_map(|r| match r {
                Record::Node(n) => n.stats.clone().map(|s| (n.path.clone(), s)),
                _ => None,
            })
            .collect()
    }

    pub fn prop_rows(&self) -> impl Iterator<Item = &PropRow> {
        self.records.iter().filter_map(|r| match r {
            Record::Prop(p) => Some(p),
            _ => None,
        })
    }

    pub fn solutions(&self) -> impl Iterator<Item = &Solution> {
        self.records.iter().filter_map(|r| match r {
            Record::Solution(s) => Some(s),
            _ => None,
        })
    }

    pub fn summary(&self) -> Option<&Summary> {
        self.records.iter().rev().find_map(|r| match r {
            Record::Summary(s) => Some(s),
            _ => None,
        })
    }

    /// Choice stack after replaying every frame record.
    pub fn final_stack(&self) -> Vec<ChoiceFrame> {
        let mut stack = Vec::new();
        for r in &self.records {
            if let Record::Frame(f) = r {
                match f.op {
                    FrameOp::Push => stack.push(f.frame.clone()),
                    FrameOp::Pop => {
                        stack.pop();
                    }
                }
            }
        }
        stack
    }

    pub fn root_stats(&self) -> Option<NodeStats> {
        self.stats().remove(&NodePath::root())
    }
}

/// Rejects a foreign format before attempting a full parse, so a version
/// bump yields a clear message rather than a missing-field error.
fn check_header(line: &str, n: usize) -> Result<(), TraceError> {
    let v: serde_json::Value = serde_json::from_str(line).map_err(|e| TraceError::Parse {
        line: n,
        message: e.to_string(),
    })?;
    if v.get("record").and_then(|r| r.as_str()) != Some("header") {
        return Err(TraceError::MissingHeader);
    }
    match v.get("format").and_then(|f| f.as_str()) {
        Some(FORMAT_VERSION) => Ok(()),
        other => Err(TraceError::Version {
            found: other.unwrap_or("").to_string(),
        }),
    }
}
