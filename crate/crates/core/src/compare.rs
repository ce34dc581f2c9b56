//! Side-by-side comparison of two traces.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::search::{NodePath, NodeState};
use crate::trace::TraceFile;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSide {
    pub model: String,
    pub filter_levels: Vec<String>,
    pub order: Option<String>,
    pub strategy: String,
    pub node_count: usize,
    pub by_state: BTreeMap<String, usize>,
    pub total_events: u64,
    /// Right subtrees per depth.
    pub right_subtrees: BTreeMap<usize, usize>,
    pub root_reduction_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeDelta {
    pub path: NodePath,
    pub events_a: u64,
    pub events_b: u64,
    /// `events_b - events_a`.
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Structure {
    pub same_paths: bool,
    pub only_in_a: usize,
    pub only_in_b: usize,
    /// Nodes present in both traces with stats on each side.
    pub matched: Vec<NodeDelta>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub a: TraceSide,
    pub b: TraceSide,
    pub warnings: Vec<String>,
    /// `None` when the traces are of different models.
    pub structure: Option<Structure>,
}

impl CompareReport {
    pub fn root_pct_delta(&self) -> Option<f64> {
        Some(self.b.root_reduction_pct? - self.a.root_reduction_pct?)
    }

    pub fn all_deltas_zero(&self) -> bool {
        self.structure
            .as_ref()
            .is_some_and(|s| s.matched.iter().all(|d| d.delta == 0))
    }
}

fn side(t: &TraceFile) -> TraceSide {
    let tree = t.tree();
    let by_state = [
        NodeState::White,
        NodeState::Blue,
        NodeState::Black,
        NodeState::Green,
        NodeState::Red,
    ]
    .into_iter()
    .map(|s| (s.as_str().to_string(), tree.count(s)))
    .collect();
    let mut right_subtrees = BTreeMap::new();
    for r in tree.right_subtree_report() {
        *right_subtrees.entry(r.depth).or_insert(0) += 1;
    }
    let total_events = match t.summary() {
        Some(s) => s.run.events,
        None => t.stats().values().map(|s| s.event_count).sum(),
    };
    TraceSide {
        model: t.header.model.clone(),
        filter_levels: t.header.filter_levels.clone(),
        order: t.header.order.clone(),
        strategy: t.header.strategy.clone(),
        node_count: tree.node_count(),
        by_state,
        total_events,
        right_subtrees,
        root_reduction_pct: t.root_stats().map(|s| s.reduction_pct),
    }
}

pub fn compare(a: &TraceFile, b: &TraceFile) -> CompareReport {
    let (sa, sb) = (side(a), side(b));
    let mut warnings = Vec::new();
    let structure = if sa.model != sb.model {
        warnings.push(format!(
            "traces are of different models (`{}` vs `{}`); structural comparison skipped",
            sa.model, sb.model
        ));
        None
    } else {
        let (pa, pb) = (a.tree().paths(), b.tree().paths());
        let (stats_a, stats_b) = (a.stats(), b.stats());
        let matched = pa
            .intersection(&pb)
            .filter_map(|p| {
                let (x, y) = (stats_a.get(p)?, stats_b.get(p)?);
                Some(NodeDelta {
                    path: p.clone(),
                    events_a: x.event_count,
                    events_b: y.event_count,
                    delta: y.event_count as i64 - x.event_count as i64,
                })
            })
            .collect();
        Some(Structure {
            same_paths: pa == pb,
            only_in_a: pa.difference(&pb).count(),
            only_in_b: pb.difference(&pa).count(),
            matched,
        })
    };
    CompareReport {
        a: sa,
        b: sb,
        warnings,
        structure,
    }
}

fn describe(s: &TraceSide) -> String {
    let mut d = vec![s.model.clone(), s.strategy.clone()];
    d.extend(s.filter_levels.iter().cloned());
    d.extend(s.order.iter().map(|o| format!("order={o}")));
    d.join(" ")
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        writeln!(f, "{:<22} {:>14} {:>14}", "", "a", "b")?;
        writeln!(f, "{:<22} {}  |  {}", "run", describe(&self.a), describe(&self.b))?;
        let row = |f: &mut fmt::Formatter<'_>, k: &str, x: String, y: String| writeln!(f, "{k:<22} {x:>14} {y:>14}");
        row(f, "nodes", self.a.node_count.to_string(), self.b.node_count.to_string())?;
        for (k, x) in &self.a.by_state {
            row(f, &format!("  {k}"), x.to_string(), self.b.by_state[k].to_string())?;
        }
        row(f, "events", self.a.total_events.to_string(), self.b.total_events.to_string())?;
        let pct = |p: Option<f64>| p.map_or("-".into(), |p| format!("{p:.2}%"));
        row(f, "root reduction", pct(self.a.root_reduction_pct), pct(self.b.root_reduction_pct))?;
        let depths: std::collections::BTreeSet<_> =
            self.a.right_subtrees.keys().chain(self.b.right_subtrees.keys()).collect();
        let ra: usize = self.a.right_subtrees.values().sum();
        let rb: usize = self.b.right_subtrees.values().sum();
        row(f, "right subtrees", ra.to_string(), rb.to_string())?;
        for d in depths {
            let get = |m: &BTreeMap<usize, usize>| m.get(d).copied().unwrap_or(0).to_string();
            row(f, &format!("  depth {d}"), get(&self.a.right_subtrees), get(&self.b.right_subtrees))?;
        }
        if let Some(s) = &self.structure {
            writeln!(
                f,
                "paths: {} ({} only in a, {} only in b)",
                if s.same_paths { "identical" } else { "differ" },
                s.only_in_a,
                s.only_in_b
            )?;
            let changed: Vec<_> = s.matched.iter().filter(|d| d.delta != 0).collect();
            writeln!(f, "matched nodes: {}, with event deltas: {}", s.matched.len(), changed.len())?;
            for d in changed.iter().take(20) {
                writeln!(f, "  {:<24} {:>8} {:>8} {:>+8}", d.path.to_string(), d.events_a, d.events_b, d.delta)?;
            }
            if changed.len() > 20 {
                writeln!(f, "  ... {} more", changed.len() - 20)?;
            }
        }
        Ok(())
    }
}
