//! Trace records. One record is one line of a trace file and the payload
//! of one wire event.

use serde::{Deserialize, Serialize};

use crate::event::EventKind;
use crate::search::{ChoiceFrame, NodePath, NodeState, RunSummary, Solution};

pub const FORMAT_VERSION: &str = "cpscope-trace/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Header(Header),
    Node(NodeRecord),
    Frame(FrameRecord),
    Prop(PropRow),
    Solution(Solution),
    Summary(Summary),
}

impl Record {
    pub fn kind(&self) -> &'static str {
        match self {
            Record::Header(_) => "header",
            Record::Node(_) => "node",
            Record::Frame(_) => "frame",
            Record::Prop(_) => "prop",
            Record::Solution(_) => "solution",
            Record::Summary(_) => "summary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarMeta {
    pub name: String,
    pub decision: bool,
    /// Declared domain, as text.
    pub domain: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub model: String,
    pub strategy: String,
    /// Filter level per global constraint kind, e.g. `alldifferent=basic`.
    #[serde(default)]
    pub filter_levels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    pub run_id: u64,
    pub variables: Vec<VarMeta>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeEvent {
    Created,
    Visit,
    Done,
    /// A recoloring after the visit.
    State,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeStats {
    pub event_count: u64,
    pub size_before: u64,
    pub size_after: u64,
    pub reduction_pct: f64,
}

impl NodeStats {
    pub fn new(event_count: u64, size_before: u64, size_after: u64) -> Self {
        NodeStats {
            event_count,
            size_before,
            size_after,
            reduction_pct: super::stats::reduction_pct(size_before, size_after),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub event: NodeEvent,
    pub path: NodePath,
    pub state: NodeState,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visit_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<NodeStats>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameOp {
    Push,
    Pop,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub op: FrameOp,
    pub frame: ChoiceFrame,
}

/// One spy row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropRow {
    pub seq: u64,
    pub kind: EventKind,
    /// Names of the affected variables: the reduced variable for
    /// reductions, the constraint scope for post and propagate rows.
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub before: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint_name: Option<String>,
    pub internal: bool,
    pub node: NodePath,
}

impl PropRow {
    /// The first-column text of the spy row.
    pub fn caption(&self) -> String {
        let mut s = self.kind.caption().to_string();
        if let Some(c) = &self.constraint_name {
            s.push_str(": ");
            s.push_str(c);
        }
        if self.kind.is_reduction() {
            if let (Some(v), Some(a)) = (self.vars.first(), &self.after) {
                s.push_str(&format!(" {v} = {a}"));
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(flatten)]
    pub run: RunSummary,
    pub spy_rows: u64,
}
