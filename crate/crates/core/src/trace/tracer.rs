use std::collections::HashMap;

use crate::event::{EventInfo, EventKind, EventListener};
use crate::search::{ChoiceFrame, Monitor, NodeInfo, NodePath, RunSummary, Solution};
use crate::store::Store;

use super::file::TraceFile;
use super::records::{
    FrameOp, FrameRecord, Header, NodeEvent, NodeRecord, NodeStats, PropRow, Record, Summary, VarMeta,
    FORMAT_VERSION,
};

/// Run description copied into the trace header.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunInfo {
    pub model: String,
    pub strategy: String,
    pub filter_levels: Vec<String>,
    pub order: Option<String>,
    pub run_id: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TracerConfig {
    /// Record spy rows from the start.
    pub spy: bool,
    /// Domain sizes over decision variables only, rather than all.
    pub decision_only: bool,
}

impl Default for TracerConfig {
    fn default() -> Self {
        TracerConfig {
            spy: false,
            decision_only: true,
        }
    }
}

struct Current {
    path: NodePath,
    events: u64,
    size_before: u64,
}

/// Search monitor that turns callbacks into trace records and per-node
/// statistics.
pub struct Tracer {
    info: RunInfo,
    cfg: TracerConfig,
    spy: bool,
    var_names: Vec<String>,
    constraint_names: HashMap<u32, String>,
    current: Option<Current>,
    total_events: u64,
    unattributed: u64,
    spy_rows: u64,
    records: Vec<Record>,
    stats: HashMap<NodePath, NodeStats>,
}

impl Tracer {
    pub fn new(info: RunInfo, cfg: TracerConfig) -> Self {
        Tracer {
            info,
            spy: cfg.spy,
            cfg,
            var_names: Vec::new(),
            constraint_names: HashMap::new(),
            current: None,
            total_events: 0,
            unattributed: 0,
            spy_rows: 0,
            records: Vec::new(),
            stats: HashMap::new(),
        }
    }

    pub fn set_spy(&mut self, on: bool) {
        self.spy = on;
    }

    pub fn spy(&self) -> bool {
        self.spy
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn total_events(&self) -> u64 {
        self.total_events
    }

    /// Events seen outside any node visit. Zero for runs driven by the
    /// search engine.
    pub fn unattributed_events(&self) -> u64 {
        self.unattributed
    }

    pub fn stats(&self) -> &HashMap<NodePath, NodeStats> {
        &self.stats
    }

    /// Path of the node being visited, if any.
    pub fn current_node(&self) -> Option<&NodePath> {
        self.current.as_ref().map(|c| &c.path)
    }

    pub fn into_trace(self) -> TraceFile {
        TraceFile::from_records(self.records).expect("tracer output starts with a header")
    }

    pub fn to_trace(&self) -> TraceFile {
        TraceFile::from_records(self.records.clone()).expect("tracer output starts with a header")
    }

    fn size(&self, store: &Store) -> u64 {
        if self.cfg.decision_only {
            store.decision_size()
        } else {
            store.total_size()
        }
    }

    fn node_record(&self, event: NodeEvent, node: &NodeInfo<'_>, stats: Option<NodeStats>) -> Record {
        Record::Node(NodeRecord {
            event,
            path: node.path.clone(),
            state: node.state,
            label: node.label.to_string(),
            visit_order: node.visit_order,
            stats,
        })
    }
}

impl EventListener for Tracer {
    fn on_event(&mut self, ev: &EventInfo<'_>) {
        self.total_events += 1;
        match &mut self.current {
            Some(c) => c.events += 1,
            None => self.unattributed += 1,
        }
        if let (EventKind::PostConstraint, Some(c), Some(name)) = (ev.kind, ev.constraint, ev.constraint_name) {
            self.constraint_names.insert(c.0, name.to_string());
        }
        if !self.spy {
            return;
        }
        let name = |v: crate::store::VarId| self.var_names[v.index()].clone();
        let vars = match ev.var {
            Some(v) => vec![name(v)],
            None => ev.scope.iter().map(|&v| name(v)).collect(),
        };
        let row = PropRow {
            seq: ev.seq,
            kind: ev.kind,
            vars,
            before: ev.before.map(|d| d.to_string()),
            after: ev.after.map(|d| d.to_string()),
            value: ev.value,
            constraint: ev.constraint.map(|c| c.0),
            constraint_name: ev.constraint.and_then(|c| self.constraint_names.get(&c.0).cloned()),
            internal: ev.internal,
            node: self.current.as_ref().map(|c| c.path.clone()).unwrap_or_default(),
        };
        self.spy_rows += 1;
        self.records.push(Record::Prop(row));
    }
}

impl Monitor for Tracer {
    fn run_start(&mut self, store: &Store) {
        self.var_names = store.infos().iter().map(|i| i.name.clone()).collect();
        let variables = store
            .vars()
            .map(|v| VarMeta {
                name: store.name(v).to_string(),
                decision: store.info(v).decision,
                domain: store.domain(v).to_string(),
            })
            .collect();
        self.records.push(Record::Header(Header {
            format: FORMAT_VERSION.to_string(),
            model: self.info.model.clone(),
            strategy: self.info.strategy.clone(),
            filter_levels: self.info.filter_levels.clone(),
            order: self.info.order.clone(),
            run_id: self.info.run_id,
            variables,
        }));
    }

    fn node_created(&mut self, node: &NodeInfo<'_>) {
        let r = self.node_record(NodeEvent::Created, node, None);
        self.records.push(r);
    }

    fn node_visit(&mut self, node: &NodeInfo<'_>, store: &Store) {
        self.current = Some(Current {
            path: node.path.clone(),
            events: 0,
            size_before: self.size(store),
        });
        let r = self.node_record(NodeEvent::Visit, node, None);
        self.records.push(r);
    }

    fn node_done(&mut self, node: &NodeInfo<'_>, store: &Store) {
        let cur = self.current.take().expect("node_done without node_visit");
        debug_assert_eq!(&cur.path, node.path);
        let stats = NodeStats::new(cur.events, cur.size_before, self.size(store));
        self.stats.insert(cur.path, stats.clone());
        let r = self.node_record(NodeEvent::Done, node, Some(stats));
        self.records.push(r);
    }

    fn node_state(&mut self, node: &NodeInfo<'_>) {
        let r = self.node_record(NodeEvent::State, node, None);
        self.records.push(r);
    }

    fn frame_push(&mut self, frame: &ChoiceFrame) {
        self.records.push(Record::Frame(FrameRecord {
            op: FrameOp::Push,
            frame: frame.clone(),
        }));
    }

    fn frame_pop(&mut self, frame: &ChoiceFrame) {
        self.records.push(Record::Frame(FrameRecord {
            op: FrameOp::Pop,
            frame: frame.clone(),
        }));
    }

    fn solution(&mut self, solution: &Solution) {
        self.records.push(Record::Solution(solution.clone()));
    }

    fn run_done(&mut self, summary: &RunSummary) {
        self.records.push(Record::Summary(Summary {
            run: summary.clone(),
            spy_rows: self.spy_rows,
        }));
    }
}
