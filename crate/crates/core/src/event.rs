//! The typed propagation-event stream emitted by the store.

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::store::{ConstraintId, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    PostConstraint,
    PropagateConstraint,
    SetValue,
    SetMin,
    SetMax,
    RemoveValue,
    ConstraintFail,
}

impl EventKind {
    pub fn is_reduction(self) -> bool {
        matches!(
            self,
            EventKind::SetValue | EventKind::SetMin | EventKind::SetMax | EventKind::RemoveValue
        )
    }

    /// Spy caption, e.g. "Set Min".
    pub fn caption(self) -> &'static str {
        match self {
            EventKind::PostConstraint => "Post Constraint",
            EventKind::PropagateConstraint => "Propagate Constraint",
            EventKind::SetValue => "Set Value",
            EventKind::SetMin => "Set Min",
            EventKind::SetMax => "Set Max",
            EventKind::RemoveValue => "Remove Value",
            EventKind::ConstraintFail => "Constraint Fail",
        }
    }
}

/// A borrowed view of one event, handed to listeners while the store is
/// mid-update. Listeners that keep rows must copy what they need.
#[derive(Debug)]
pub struct EventInfo<'a> {
    pub seq: u64,
    pub kind: EventKind,
    /// Variable whose domain changed (reductions) or emptied (failures).
    pub var: Option<VarId>,
    pub before: Option<&'a Domain>,
    pub after: Option<&'a Domain>,
    /// Removed value for `RemoveValue`, new bound for `SetMin`/`SetMax`,
    /// assigned value for `SetValue`.
    pub value: Option<i64>,
    pub constraint: Option<ConstraintId>,
    /// Set on `PostConstraint` only.
    pub constraint_name: Option<&'a str>,
    pub internal: bool,
    /// Scope of the originating constraint, empty for search decisions.
    pub scope: &'a [VarId],
}

pub trait EventListener {
    fn on_event(&mut self, ev: &EventInfo<'_>);
}

/// Discards every event.
#[derive(Debug, Default)]
pub struct NullListener;

impl EventListener for NullListener {
    fn on_event(&mut self, _ev: &EventInfo<'_>) {}
}

/// An owned copy of an event, mostly for tests and small tools.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OwnedEvent {
    pub seq: u64,
    pub kind: EventKind,
    pub var: Option<VarId>,
    pub before: Option<Domain>,
    pub after: Option<Domain>,
    pub value: Option<i64>,
    pub constraint: Option<ConstraintId>,
    pub internal: bool,
}

/// Collects every event it sees.
#[derive(Debug, Default)]
pub struct EventLog {
    pub events: Vec<OwnedEvent>,
}

impl EventLog {
    pub fn kinds(&self) -> Vec<EventKind> {
        self.events.iter().map(|e| e.kind).collect()
    }
}

impl EventListener for EventLog {
    fn on_event(&mut self, ev: &EventInfo<'_>) {
        self.events.push(OwnedEvent {
            seq: ev.seq,
            kind: ev.kind,
            var: ev.var,
            before: ev.before.cloned(),
            after: ev.after.cloned(),
            value: ev.value,
            constraint: ev.constraint,
            internal: ev.internal,
        });
    }
}
