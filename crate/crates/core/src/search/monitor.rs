use crate::event::{EventInfo, EventListener};
use crate::store::Store;

use super::engine::{RunSummary, Solution};
use super::goal::ChoiceFrame;
use super::path::NodePath;
use super::tree::NodeState;

/// What a monitor sees of a node.
#[derive(Clone, Copy, Debug)]
pub struct NodeInfo<'a> {
    pub id: usize,
    pub path: &'a NodePath,
    pub state: NodeState,
    pub label: &'a str,
    pub visit_order: Option<u64>,
    pub children: usize,
    pub discrepancy: u32,
}

/// Search callbacks. Propagation events arrive through the
/// [`EventListener`] supertrait, interleaved with these in firing order.
///
/// Every callback runs on the solver thread, so blocking inside one
/// pauses the search with the store untouched.
pub trait Monitor: EventListener {
    fn run_start(&mut self, _store: &Store) {}
    fn node_created(&mut self, _node: &NodeInfo<'_>) {}
    /// A node's visit starts. Events until the matching `node_done`
    /// belong to it.
    fn node_visit(&mut self, _node: &NodeInfo<'_>, _store: &Store) {}
    /// A node's visit ended; `state` is blue for inner nodes.
    fn node_done(&mut self, _node: &NodeInfo<'_>, _store: &Store) {}
    /// A later recoloring: red once every child failed, black when pruned.
    fn node_state(&mut self, _node: &NodeInfo<'_>) {}
    fn frame_push(&mut self, _frame: &ChoiceFrame) {}
    fn frame_pop(&mut self, _frame: &ChoiceFrame) {}
    fn solution(&mut self, _solution: &Solution) {}
    fn run_done(&mut self, _summary: &RunSummary) {}
    /// Polled after every node visit.
    fn should_stop(&mut self) -> bool {
        false
    }
}

/// A monitor that ignores everything.
#[derive(Debug, Default)]
pub struct NullMonitor;

impl EventListener for NullMonitor {
    fn on_event(&mut self, _ev: &EventInfo<'_>) {}
}

impl Monitor for NullMonitor {}

/// Forwards every callback to two monitors, `A` first.
#[derive(Debug, Default)]
pub struct Tee<A, B>(pub A, pub B);

impl<A: Monitor, B: Monitor> EventListener for Tee<A, B> {
    fn on_event(&mut self, ev: &EventInfo<'_>) {
        self.0.on_event(ev);
        self.1.on_event(ev);
    }
}

impl<A: Monitor, B: Monitor> Monitor for Tee<A, B> {
    fn run_start(&mut self, store: &Store) {
        self.0.run_start(store);
        self.1.run_start(store);
    }
    fn node_created(&mut self, node: &NodeInfo<'_>) {
        self.0.node_created(node);
        self.1.node_created(node);
    }
    fn node_visit(&mut self, node: &NodeInfo<'_>, store: &Store) {
        self.0.node_visit(node, store);
        self.1.node_visit(node, store);
    }
    fn node_done(&mut self, node: &NodeInfo<'_>, store: &Store) {
        self.0.node_done(node, store);
        self.1.node_done(node, store);
    }
    fn node_state(&mut self, node: &NodeInfo<'_>) {
        self.0.node_state(node);
        self.1.node_state(node);
    }
    fn frame_push(&mut self, frame: &ChoiceFrame) {
        self.0.frame_push(frame);
        self.1.frame_push(frame);
    }
    fn frame_pop(&mut self, frame: &ChoiceFrame) {
        self.0.frame_pop(frame);
        self.1.frame_pop(frame);
    }
    fn solution(&mut self, solution: &Solution) {
        self.0.solution(solution);
        self.1.solution(solution);
    }
    fn run_done(&mut self, summary: &RunSummary) {
        self.0.run_done(summary);
        self.1.run_done(summary);
    }
    fn should_stop(&mut self) -> bool {
        // Both are polled so neither misses a tick.
        let a = self.0.should_stop();
        let b = self.1.should_stop();
        a || b
    }
}
