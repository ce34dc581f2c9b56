//! Unary (disjunctive) resources and rank-first branching support.
//!
//! A resource is ranked by repeatedly choosing which of its unranked
//! activities comes first. `rank_first(a)` posts `end(a) ≤ start(b)` for
//! every other unranked `b`; `not_rank_first(a)` records that some other
//! unranked activity precedes `a`. The resource propagator performs
//! pairwise earliest-start / latest-start reasoning between unranked
//! activities and pushes excluded activities after the earliest possible
//! completion of the others.

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::linear::{Cmp, Linear};
use crate::event::EventListener;
use crate::store::{PropCtx, PropResult, Propagator, ResourceId, Store, VarId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activity {
    pub start: VarId,
    pub duration: i64,
    /// Display name, e.g. `task[1,3]`.
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnaryResource {
    pub name: String,
    pub activities: Vec<Activity>,
}

/// Trailed ranking progress of one resource.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RankState {
    /// Activity indices in ranked order.
    pub ranked: Vec<u16>,
    /// Unranked activities known not to come first, as a bitmask.
    pub excluded: u64,
}

impl RankState {
    pub fn is_ranked_act(&self, a: usize) -> bool {
        self.ranked.contains(&(a as u16))
    }

    pub fn is_excluded(&self, a: usize) -> bool {
        self.excluded & (1 << a) != 0
    }
}

pub fn is_ranked(store: &Store, r: ResourceId) -> bool {
    store.rank_state(r).ranked.len() == store.resource(r).activities.len()
}

pub fn unranked(store: &Store, r: ResourceId) -> Vec<usize> {
    let st = store.rank_state(r);
    (0..store.resource(r).activities.len())
        .filter(|&a| !st.is_ranked_act(a))
        .collect()
}

/// `a` could still be scheduled before every other unranked activity
/// without any of them missing its latest start.
pub fn can_be_first(store: &Store, r: ResourceId, a: usize, unranked: &[usize]) -> bool {
    let res = store.resource(r);
    let act = &res.activities[a];
    let end = store.min(act.start) + act.duration;
    unranked
        .iter()
        .filter(|&&b| b != a)
        .all(|&b| end <= store.max(res.activities[b].start))
}

/// Unranked, non-excluded activities that can go first, ascending index.
pub fn possible_firsts(store: &Store, r: ResourceId) -> Vec<usize> {
    let st = store.rank_state(r);
    let open = unranked(store, r);
    open.iter()
        .copied()
        .filter(|&a| !st.is_excluded(a) && can_be_first(store, r, a, &open))
        .collect()
}

pub fn nb_possible_first(store: &Store, r: ResourceId) -> usize {
    possible_firsts(store, r).len()
}

fn fail_on(store: &mut Store, r: ResourceId, a: usize, listener: &mut dyn EventListener) -> bool {
    let var = store.resource(r).activities[a].start;
    let c = store.resource_constraint(r);
    store.report_failure(c, Some(var), listener);
    false
}

/// Ranks `a` first among the unranked activities of `r`.
///
/// Returns `false` (after reporting a `ConstraintFail`) when `a` is not a
/// possible first. The caller propagates afterwards.
pub fn rank_first(store: &mut Store, r: ResourceId, a: usize, listener: &mut dyn EventListener) -> bool {
    let mut st = store.rank_state(r).clone();
    let open = unranked(store, r);
    if st.is_ranked_act(a) || st.is_excluded(a) || !can_be_first(store, r, a, &open) {
        return fail_on(store, r, a, listener);
    }
    let res = store.resource_rc(r);
    let first = &res.activities[a];
    for &b in &open {
        if b == a {
            continue;
        }
        let other = &res.activities[b];
        let prop = Linear {
            terms: vec![(1, first.start), (-1, other.start)],
            cmp: Cmp::Le,
            rhs: -first.duration,
        };
        store.post_propagator(
            Rc::new(prop),
            format!("{}: {} before {}", res.name, first.label, other.label),
            vec![first.start, other.start],
            false,
        );
    }
    st.ranked.push(a as u16);
    st.excluded = 0;
    if open.len() == 2 {
        let last = open.iter().copied().find(|&b| b != a).unwrap();
        st.ranked.push(last as u16);
    }
    store.set_rank_state(r, st);
    if let Some(c) = store.resource_constraint(r) {
        store.schedule(c);
    }
    true
}

/// Records that `a` does not come first among the unranked activities.
///
/// When a single candidate remains it is ranked first immediately.
pub fn not_rank_first(store: &mut Store, r: ResourceId, a: usize, listener: &mut dyn EventListener) -> bool {
    let mut st = store.rank_state(r).clone();
    if st.is_ranked_act(a) {
        return fail_on(store, r, a, listener);
    }
    st.excluded |= 1 << a;
    let open = unranked(store, r);
    let candidates: Vec<usize> = open.iter().copied().filter(|&b| !st.is_excluded(b)).collect();
    store.set_rank_state(r, st);
    match candidates.as_slice() {
        [] => fail_on(store, r, a, listener),
        [only] => rank_first(store, r, *only, listener),
        _ => {
            if let Some(c) = store.resource_constraint(r) {
                store.schedule(c);
            }
            true
        }
    }
}

/// The disjunctive propagator attached to each resource.
#[derive(Debug, Clone)]
pub struct Disjunctive {
    pub resource: ResourceId,
}

impl Propagator for Disjunctive {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        let res = ctx.store().resource_rc(self.resource);
        let st = ctx.store().rank_state(self.resource).clone();
        let open = unranked(ctx.store(), self.resource);
        if open.is_empty() {
            return Ok(());
        }
        let acts = &res.activities;
        if open.iter().all(|&a| st.is_excluded(a)) {
            return Err(ctx.fail(Some(acts[open[0]].start)));
        }
        loop {
            let mut changed = false;
            for &a in &open {
                if !st.is_excluded(a) {
                    continue;
                }
                let earliest = open
                    .iter()
                    .filter(|&&b| b != a)
                    .map(|&b| ctx.min(acts[b].start) + acts[b].duration)
                    .min();
                if let Some(lb) = earliest {
                    changed |= ctx.set_min(acts[a].start, lb)?;
                }
            }
            for (i, &a) in open.iter().enumerate() {
                for &b in &open[i + 1..] {
                    let (x, y) = (&acts[a], &acts[b]);
                    let a_then_b = ctx.min(x.start) + x.duration <= ctx.max(y.start);
                    let b_then_a = ctx.min(y.start) + y.duration <= ctx.max(x.start);
                    match (a_then_b, b_then_a) {
                        (false, false) => return Err(ctx.fail(Some(x.start))),
                        (false, true) => {
                            changed |= ctx.set_min(x.start, ctx.min(y.start) + y.duration)?;
                            changed |= ctx.set_max(y.start, ctx.max(x.start) - y.duration)?;
                        }
                        (true, false) => {
                            changed |= ctx.set_min(y.start, ctx.min(x.start) + x.duration)?;
                            changed |= ctx.set_max(x.start, ctx.max(y.start) - x.duration)?;
                        }
                        (true, true) => {}
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }
}
