//! The constraint store: variables, trailed domains, the propagation queue,
//! and event emission.

use std::collections::VecDeque;
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::constraints::resource::{RankState, UnaryResource};
use crate::domain::{Domain, Narrowed, Reduction};
use crate::event::{EventInfo, EventKind, EventListener};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConstraintId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResourceId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ConstraintId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ResourceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// Static description of a variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarInfo {
    pub name: String,
    /// Counted by the per-node reduction statistics.
    pub decision: bool,
    /// Optional display names for values, e.g. warehouse names.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub value_labels: Vec<(i64, String)>,
}

impl VarInfo {
    pub fn label_of(&self, v: i64) -> String {
        self.value_labels
            .iter()
            .find(|(k, _)| *k == v)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| v.to_string())
    }
}

/// Outcome of a single reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Reduced,
    NoOp,
    Failed,
}

/// Outcome of running the queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint,
    /// `None` only for failures caused directly by a search decision.
    Failed(Option<ConstraintId>),
}

impl Propagation {
    pub fn is_failed(self) -> bool {
        matches!(self, Propagation::Failed(_))
    }
}

/// Signal returned by a propagator whose reduction emptied a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Failure {
    pub constraint: Option<ConstraintId>,
    pub var: Option<VarId>,
}

pub type PropResult = Result<(), Failure>;

/// A filtering algorithm. Propagators are stateless: everything they need
/// lives in the store, so backtracking never has to restore them.
pub trait Propagator {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult;
}

struct Slot {
    prop: Rc<dyn Propagator>,
    name: String,
    scope: Vec<VarId>,
    internal: bool,
}

enum TrailEntry {
    Domain(VarId, Domain),
    Constraint,
    Rank(ResourceId, RankState),
}

/// Everything that backtracking must restore, for equality checks in tests.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub domains: Vec<Domain>,
    pub ranks: Vec<RankState>,
    pub constraints: usize,
}

pub struct Store {
    vars: Vec<VarInfo>,
    domains: Vec<Domain>,
    constraints: Vec<Slot>,
    watchers: Vec<Vec<ConstraintId>>,
    queue: VecDeque<ConstraintId>,
    queued: Vec<bool>,
    first_unannounced: usize,
    trail: Vec<TrailEntry>,
    markers: Vec<(usize, Vec<ConstraintId>)>,
    resources: Vec<Rc<UnaryResource>>,
    ranks: Vec<RankState>,
    resource_constraints: Vec<Option<ConstraintId>>,
    objective_bound: Option<i64>,
    seq: u64,
    silent: bool,
}

impl Default for Store {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Store")
            .field("vars", &self.vars.len())
            .field("constraints", &self.constraints.len())
            .field("depth", &self.markers.len())
            .field("seq", &self.seq)
            .finish()
    }
}

impl Store {
    pub fn new() -> Self {
        Store {
            vars: Vec::new(),
            domains: Vec::new(),
            constraints: Vec::new(),
            watchers: Vec::new(),
            queue: VecDeque::new(),
            queued: Vec::new(),
            first_unannounced: 0,
            trail: Vec::new(),
            markers: Vec::new(),
            resources: Vec::new(),
            ranks: Vec::new(),
            resource_constraints: Vec::new(),
            objective_bound: None,
            seq: 0,
            silent: false,
        }
    }

    // ---- variables -------------------------------------------------------

    /// Declares a decision variable.
    ///
    /// Panics if the name is already taken: spy columns are keyed by name.
    pub fn new_var(&mut self, name: impl Into<String>, domain: Domain) -> VarId {
        self.new_var_with(
            VarInfo {
                name: name.into(),
                decision: true,
                value_labels: Vec::new(),
            },
            domain,
        )
    }

    /// Declares an auxiliary variable, excluded from reduction statistics.
    pub fn new_aux_var(&mut self, name: impl Into<String>, domain: Domain) -> VarId {
        self.new_var_with(
            VarInfo {
                name: name.into(),
                decision: false,
                value_labels: Vec::new(),
            },
            domain,
        )
    }

    pub fn new_var_with(&mut self, info: VarInfo, domain: Domain) -> VarId {
        assert!(
            self.var_by_name(&info.name).is_none(),
            "duplicate variable name {}",
            info.name
        );
        let id = VarId(self.vars.len() as u32);
        self.vars.push(info);
        self.domains.push(domain);
        self.watchers.push(Vec::new());
        id
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len() as u32).map(VarId)
    }

    pub fn info(&self, v: VarId) -> &VarInfo {
        &self.vars[v.index()]
    }

    pub fn infos(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.vars[v.index()].name
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars
            .iter()
            .position(|i| i.name == name)
            .map(|i| VarId(i as u32))
    }

    pub fn set_decision(&mut self, v: VarId, decision: bool) {
        self.vars[v.index()].decision = decision;
    }

    pub fn set_value_labels(&mut self, v: VarId, labels: Vec<(i64, String)>) {
        self.vars[v.index()].value_labels = labels;
    }

    pub fn domain(&self, v: VarId) -> &Domain {
        &self.domains[v.index()]
    }

    pub fn min(&self, v: VarId) -> i64 {
        self.domains[v.index()].min()
    }

    pub fn max(&self, v: VarId) -> i64 {
        self.domains[v.index()].max()
    }

    pub fn is_bound(&self, v: VarId) -> bool {
        self.domains[v.index()].is_bound()
    }

    /// Σ|D(x)| over decision variables.
    pub fn decision_size(&self) -> u64 {
        self.vars
            .iter()
            .zip(&self.domains)
            .filter(|(i, _)| i.decision)
            .map(|(_, d)| d.size())
            .sum()
    }

    /// Σ|D(x)| over every variable.
    pub fn total_size(&self) -> u64 {
        self.domains.iter().map(Domain::size).sum()
    }

    // ---- constraints -----------------------------------------------------

    /// Registers a propagator and schedules its first run.
    ///
    /// The matching `PostConstraint` event is emitted at the start of the
    /// next [`Store::propagate`] call, so constraints posted while building
    /// a model are reported as part of the initial propagation.
    pub fn post_propagator(
        &mut self,
        prop: Rc<dyn Propagator>,
        name: impl Into<String>,
        scope: Vec<VarId>,
        internal: bool,
    ) -> ConstraintId {
        let id = ConstraintId(self.constraints.len() as u32);
        for &v in &scope {
            let w = &mut self.watchers[v.index()];
            if w.last() != Some(&id) {
                w.push(id);
            }
        }
        self.constraints.push(Slot {
            prop,
            name: name.into(),
            scope,
            internal,
        });
        self.queued.push(false);
        if !self.markers.is_empty() {
            self.trail.push(TrailEntry::Constraint);
        }
        self.schedule(id);
        id
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraint_name(&self, c: ConstraintId) -> &str {
        &self.constraints[c.index()].name
    }

    pub fn constraint_scope(&self, c: ConstraintId) -> &[VarId] {
        &self.constraints[c.index()].scope
    }

    pub fn is_internal(&self, c: ConstraintId) -> bool {
        self.constraints[c.index()].internal
    }

    pub fn schedule(&mut self, c: ConstraintId) {
        if !self.queued[c.index()] {
            self.queued[c.index()] = true;
            self.queue.push_back(c);
        }
    }

    // ---- resources -------------------------------------------------------

    pub fn add_resource(&mut self, res: UnaryResource) -> ResourceId {
        let id = ResourceId(self.resources.len() as u32);
        self.resources.push(Rc::new(res));
        self.ranks.push(RankState::default());
        self.resource_constraints.push(None);
        id
    }

    pub(crate) fn bind_resource_constraint(&mut self, r: ResourceId, c: ConstraintId) {
        self.resource_constraints[r.index()] = Some(c);
    }

    pub fn resource_constraint(&self, r: ResourceId) -> Option<ConstraintId> {
        self.resource_constraints[r.index()]
    }

    pub fn resource_count(&self) -> usize {
        self.resources.len()
    }

    pub fn resource(&self, r: ResourceId) -> &UnaryResource {
        &self.resources[r.index()]
    }

    pub(crate) fn resource_rc(&self, r: ResourceId) -> Rc<UnaryResource> {
        Rc::clone(&self.resources[r.index()])
    }

    pub fn rank_state(&self, r: ResourceId) -> &RankState {
        &self.ranks[r.index()]
    }

    /// Replaces the ranking state of `r`, trailing the old one.
    pub fn set_rank_state(&mut self, r: ResourceId, state: RankState) {
        let old = std::mem::replace(&mut self.ranks[r.index()], state);
        if !self.markers.is_empty() {
            self.trail.push(TrailEntry::Rank(r, old));
        }
    }

    // ---- objective -------------------------------------------------------

    /// Upper bound imposed on the objective; not trailed.
    pub fn objective_bound(&self) -> Option<i64> {
        self.objective_bound
    }

    pub fn set_objective_bound(&mut self, ub: Option<i64>) {
        self.objective_bound = ub;
    }

    // ---- events ----------------------------------------------------------

    /// Number of events emitted so far.
    pub fn seq(&self) -> u64 {
        self.seq
    }

    /// While silent, the store mutates normally but emits nothing and does
    /// not advance the event counter. Used to recompute a node's state.
    pub fn set_silent(&mut self, silent: bool) {
        self.silent = silent;
    }

    pub fn is_silent(&self) -> bool {
        self.silent
    }

    /// Reports a failure that happened outside a propagator run, for
    /// instance an infeasible ranking request.
    pub fn report_failure(
        &mut self,
        constraint: Option<ConstraintId>,
        var: Option<VarId>,
        listener: &mut dyn EventListener,
    ) {
        self.queue.clear();
        self.queued.iter_mut().for_each(|q| *q = false);
        if self.silent {
            return;
        }
        self.seq += 1;
        let (scope, internal) = match constraint {
            Some(c) => (
                &self.constraints[c.index()].scope[..],
                self.constraints[c.index()].internal,
            ),
            None => (&[][..], false),
        };
        listener.on_event(&EventInfo {
            seq: self.seq,
            kind: EventKind::ConstraintFail,
            var,
            before: var.map(|v| &self.domains[v.index()]),
            after: None,
            value: None,
            constraint,
            constraint_name: None,
            internal,
            scope,
        });
    }

    // ---- reductions ------------------------------------------------------

    /// Applies a search decision. Failures are reported as a
    /// `ConstraintFail` event with no originating constraint.
    pub fn reduce(&mut self, v: VarId, r: Reduction, listener: &mut dyn EventListener) -> Outcome {
        let out = self.apply(v, r, None, listener);
        if out == Outcome::Failed {
            self.report_failure(None, Some(v), listener);
        }
        out
    }

    fn apply(
        &mut self,
        v: VarId,
        r: Reduction,
        cause: Option<ConstraintId>,
        listener: &mut dyn EventListener,
    ) -> Outcome {
        let old = &self.domains[v.index()];
        let new = match old.narrow(r) {
            Narrowed::Unchanged => return Outcome::NoOp,
            Narrowed::Empty => return Outcome::Failed,
            Narrowed::To(d) => d,
        };
        let (kind, value) = if new.is_bound() {
            (EventKind::SetValue, new.min())
        } else if new.min() > old.min() {
            (EventKind::SetMin, new.min())
        } else if new.max() < old.max() {
            (EventKind::SetMax, new.max())
        } else {
            match r {
                Reduction::RemoveValue(x) => (EventKind::RemoveValue, x),
                _ => unreachable!("interior change from a bound reduction"),
            }
        };
        let old = std::mem::replace(&mut self.domains[v.index()], new);
        for i in 0..self.watchers[v.index()].len() {
            let c = self.watchers[v.index()][i];
            if Some(c) != cause {
                self.schedule(c);
            }
        }
        if !self.silent {
            self.seq += 1;
            let (scope, internal) = match cause {
                Some(c) => (
                    &self.constraints[c.index()].scope[..],
                    self.constraints[c.index()].internal,
                ),
                None => (&[][..], false),
            };
            listener.on_event(&EventInfo {
                seq: self.seq,
                kind,
                var: Some(v),
                before: Some(&old),
                after: Some(&self.domains[v.index()]),
                value: Some(value),
                constraint: cause,
                constraint_name: None,
                internal,
                scope,
            });
        }
        if !self.markers.is_empty() {
            self.trail.push(TrailEntry::Domain(v, old));
        }
        Outcome::Reduced
    }

    fn announce(&mut self, listener: &mut dyn EventListener) {
        while self.first_unannounced < self.constraints.len() {
            let c = ConstraintId(self.first_unannounced as u32);
            self.first_unannounced += 1;
            if self.silent {
                continue;
            }
            self.seq += 1;
            let slot = &self.constraints[c.index()];
            listener.on_event(&EventInfo {
                seq: self.seq,
                kind: EventKind::PostConstraint,
                var: None,
                before: None,
                after: None,
                value: None,
                constraint: Some(c),
                constraint_name: Some(&slot.name),
                internal: slot.internal,
                scope: &slot.scope,
            });
        }
    }

    /// Runs scheduled propagators to a fixpoint in FIFO order.
    pub fn propagate(&mut self, listener: &mut dyn EventListener) -> Propagation {
        self.announce(listener);
        while let Some(c) = self.queue.pop_front() {
            self.queued[c.index()] = false;
            let prop = Rc::clone(&self.constraints[c.index()].prop);
            if !self.silent {
                self.seq += 1;
                let slot = &self.constraints[c.index()];
                listener.on_event(&EventInfo {
                    seq: self.seq,
                    kind: EventKind::PropagateConstraint,
                    var: None,
                    before: None,
                    after: None,
                    value: None,
                    constraint: Some(c),
                    constraint_name: None,
                    internal: slot.internal,
                    scope: &slot.scope,
                });
            }
            let mut ctx = PropCtx {
                store: self,
                listener,
                cause: c,
            };
            if let Err(f) = prop.propagate(&mut ctx) {
                self.report_failure(Some(f.constraint.unwrap_or(c)), f.var, listener);
                return Propagation::Failed(Some(f.constraint.unwrap_or(c)));
            }
        }
        Propagation::Fixpoint
    }

    pub fn queue_is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    // ---- trail -----------------------------------------------------------

    pub fn depth(&self) -> usize {
        self.markers.len()
    }

    /// Places a trail marker. Pending propagators are remembered too, so
    /// popping back to a marker placed before the initial propagation
    /// re-arms it.
    pub fn push_choice(&mut self) {
        self.markers.push((self.trail.len(), self.queue.iter().copied().collect()));
    }

    /// Restores every domain, ranking and posted constraint to the state
    /// at the matching [`Store::push_choice`].
    ///
    /// Panics when there is no marker.
    pub fn pop_choice(&mut self) {
        let (mark, pending) = self
            .markers
            .pop()
            .expect("pop_choice called without a matching push_choice");
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                TrailEntry::Domain(v, d) => self.domains[v.index()] = d,
                TrailEntry::Rank(r, s) => self.ranks[r.index()] = s,
                TrailEntry::Constraint => {
                    let slot = self.constraints.pop().unwrap();
                    let id = ConstraintId(self.constraints.len() as u32);
                    for v in slot.scope {
                        let w = &mut self.watchers[v.index()];
                        if w.last() == Some(&id) {
                            w.pop();
                        }
                    }
                    self.queued.pop();
                }
            }
        }
        self.first_unannounced = self.first_unannounced.min(self.constraints.len());
        self.queue.clear();
        self.queued.iter_mut().for_each(|q| *q = false);
        for c in pending {
            self.schedule(c);
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            domains: self.domains.clone(),
            ranks: self.ranks.clone(),
            constraints: self.constraints.len(),
        }
    }
}

/// The view of the store a propagator gets while it runs.
pub struct PropCtx<'a> {
    store: &'a mut Store,
    listener: &'a mut dyn EventListener,
    cause: ConstraintId,
}

impl PropCtx<'_> {
    pub fn store(&self) -> &Store {
        self.store
    }

    pub fn cause(&self) -> ConstraintId {
        self.cause
    }

    pub fn domain(&self, v: VarId) -> &Domain {
        self.store.domain(v)
    }

    pub fn min(&self, v: VarId) -> i64 {
        self.store.min(v)
    }

    pub fn max(&self, v: VarId) -> i64 {
        self.store.max(v)
    }

    pub fn is_bound(&self, v: VarId) -> bool {
        self.store.is_bound(v)
    }

    pub fn fail(&self, var: Option<VarId>) -> Failure {
        Failure {
            constraint: Some(self.cause),
            var,
        }
    }

    /// Applies `r`; `Ok(true)` when the domain shrank.
    pub fn reduce(&mut self, v: VarId, r: Reduction) -> Result<bool, Failure> {
        match self.store.apply(v, r, Some(self.cause), self.listener) {
            Outcome::Reduced => Ok(true),
            Outcome::NoOp => Ok(false),
            Outcome::Failed => Err(self.fail(Some(v))),
        }
    }

    pub fn set_min(&mut self, v: VarId, x: i64) -> Result<bool, Failure> {
        self.reduce(v, Reduction::SetMin(x))
    }

    pub fn set_max(&mut self, v: VarId, x: i64) -> Result<bool, Failure> {
        self.reduce(v, Reduction::SetMax(x))
    }

    pub fn set_value(&mut self, v: VarId, x: i64) -> Result<bool, Failure> {
        self.reduce(v, Reduction::SetValue(x))
    }

    pub fn remove(&mut self, v: VarId, x: i64) -> Result<bool, Failure> {
        self.reduce(v, Reduction::RemoveValue(x))
    }

    pub fn post_propagator(
        &mut self,
        prop: Rc<dyn Propagator>,
        name: impl Into<String>,
        scope: Vec<VarId>,
    ) -> ConstraintId {
        self.store.post_propagator(prop, name, scope, false)
    }
}
