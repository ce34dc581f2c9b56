mod common;

use proptest::prelude::*;

use cpscope::constraints::{self, ConstraintSpec, FilterLevel};
use cpscope::event::{EventKind, EventLog, NullListener};
use cpscope::models::{self, ModelConfig};
use cpscope::{Domain, Outcome, Propagation, Reduction, Store};

use common::*;

fn vals(v: &[i64]) -> Domain {
    Domain::from_values(v.iter().copied()).unwrap()
}

#[test]
fn removing_a_bound_reports_set_min() {
    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(7, 11).unwrap());
    let mut log = EventLog::default();
    assert_eq!(st.reduce(x, Reduction::RemoveValue(7), &mut log), Outcome::Reduced);
    assert_eq!(st.domain(x), &Domain::interval(8, 11).unwrap());
    assert_eq!(log.kinds(), vec![EventKind::SetMin]);
    assert_eq!(st.reduce(x, Reduction::RemoveValue(9), &mut log), Outcome::Reduced);
    assert_eq!(st.domain(x), &vals(&[8, 10, 11]));
    assert_eq!(log.kinds()[1], EventKind::RemoveValue);
    assert_eq!(st.reduce(x, Reduction::SetMin(12), &mut log), Outcome::Failed);
    assert_eq!(log.kinds()[2], EventKind::ConstraintFail);
}

#[test]
fn interior_removal_keeps_rank() {
    let mut st = Store::new();
    let x = st.new_var("x", vals(&[7, 8, 9, 10, 11]));
    let mut log = EventLog::default();
    st.reduce(x, Reduction::RemoveValue(9), &mut log);
    assert_eq!(st.domain(x).to_string(), "{7,8,10,11}");
    assert_eq!(log.events[0].value, Some(9));
}

#[test]
fn no_op_reductions_are_silent() {
    let mut st = Store::new();
    let x = st.new_var("x", vals(&[1, 3]));
    let mut log = EventLog::default();
    for r in [Reduction::RemoveValue(2), Reduction::SetMin(0), Reduction::SetMax(3)] {
        assert_eq!(st.reduce(x, r, &mut log), Outcome::NoOp);
    }
    assert!(log.events.is_empty());
}

#[test]
fn post_neq_removes_the_bound_value() {
    let mut st = Store::new();
    let x = st.new_var("x", Domain::singleton(3));
    let y = st.new_var("y", vals(&[1, 3]));
    constraints::post(&mut st, ConstraintSpec::Neq { a: x, b: y, offset: 0 });
    let mut log = EventLog::default();
    assert_eq!(st.propagate(&mut log), Propagation::Fixpoint);
    assert_eq!(st.domain(y).value(), Some(1));
    let kinds: Vec<_> = log.kinds().into_iter().filter(|k| *k != EventKind::PropagateConstraint).collect();
    // Removing 3 from {1,3} leaves a singleton, which reports as a value.
    assert_eq!(kinds, vec![EventKind::PostConstraint, EventKind::SetValue]);
}

#[test]
fn reflexive_less_fails_at_post() {
    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(0, 5).unwrap());
    let c = constraints::post(&mut st, ConstraintSpec::less(x, x));
    let mut log = EventLog::default();
    assert_eq!(st.propagate(&mut log), Propagation::Failed(Some(c)));
    let last = log.events.last().unwrap();
    assert_eq!((last.kind, last.constraint), (EventKind::ConstraintFail, Some(c)));
}

#[test]
fn empty_queue_is_a_silent_fixpoint() {
    let mut st = Store::new();
    st.new_var("x", Domain::interval(0, 5).unwrap());
    let mut log = EventLog::default();
    assert_eq!(st.propagate(&mut log), Propagation::Fixpoint);
    assert!(log.events.is_empty());
}

#[test]
fn sum_propagates_an_assignment() {
    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(0, 10).unwrap());
    let y = st.new_var("y", Domain::interval(0, 10).unwrap());
    constraints::post(&mut st, ConstraintSpec::Linear {
        terms: vec![(1, x), (1, y)],
        cmp: constraints::Cmp::Eq,
        rhs: 10,
    });
    st.propagate(&mut NullListener);
    st.reduce(x, Reduction::SetValue(3), &mut NullListener);
    let mut log = EventLog::default();
    assert_eq!(st.propagate(&mut log), Propagation::Fixpoint);
    assert_eq!(log.kinds(), vec![EventKind::PropagateConstraint, EventKind::SetValue]);
    assert_eq!(log.events[1].var, Some(y));
    assert_eq!(st.domain(y).value(), Some(7));
}

#[test]
fn push_pop_restores_the_exact_domain() {
    let mut st = Store::new();
    let x = st.new_var("x", vals(&[1, 2, 4, 6]));
    let before = st.snapshot();
    st.push_choice();
    st.reduce(x, Reduction::SetValue(4), &mut NullListener);
    st.push_choice();
    st.reduce(x, Reduction::SetMin(5), &mut NullListener);
    st.pop_choice();
    assert_eq!(st.domain(x).value(), Some(4));
    st.pop_choice();
    assert_eq!(st.snapshot(), before);
}

#[test]
#[should_panic(expected = "without a matching push_choice")]
fn pop_without_marker_panics() {
    Store::new().pop_choice();
}

#[test]
fn golomb6_root_propagation_is_deterministic() {
    let run = || {
        let cfg = ModelConfig { filter_level: FilterLevel::Extended, ..Default::default() };
        let mut m = models::builtin("golomb6", &cfg).unwrap();
        let mut log = EventLog::default();
        m.store.propagate(&mut log);
        log.events
    };
    let a = run();
    assert!(a.len() > 50);
    assert_eq!(a, run());
}

#[test]
fn seeded_trail_scripts() {
    for seed in 0..200 {
        trail_script(seed, 100).unwrap();
    }
}

proptest! {
    #[test]
    fn trail_restores_snapshots(seed in any::<u64>()) {
        prop_assert_eq!(trail_script(seed, 100), Ok(()));
    }

    /// Every reduction event narrows strictly, carries one variable, and a
    /// value removal never names a bound.
    #[test]
    fn events_are_normalized(d in instance_doms(), level in 0usize..3) {
        let doms = d;
        let (mut st, vars) = store_with(&doms);
        constraints::post(&mut st, ConstraintSpec::AllDifferent {
            vars: vars.clone(),
            level: FilterLevel::ALL[level],
        });
        let mut log = EventLog::default();
        st.propagate(&mut log);
        let mut last = 0;
        for e in &log.events {
            prop_assert!(e.seq > last);
            last = e.seq;
            if !e.kind.is_reduction() {
                continue;
            }
            let (b, a) = (e.before.as_ref().unwrap(), e.after.as_ref().unwrap());
            prop_assert!(e.var.is_some());
            prop_assert!(a.is_subset_of(b) && a != b);
            match e.kind {
                EventKind::RemoveValue => {
                    let v = e.value.unwrap();
                    prop_assert!(v != b.min() && v != b.max());
                    prop_assert!(!a.is_bound());
                }
                EventKind::SetValue => prop_assert!(a.is_bound()),
                EventKind::SetMin => prop_assert!(a.min() > b.min() && !a.is_bound()),
                EventKind::SetMax => prop_assert!(a.max() < b.max() && !a.is_bound()),
                _ => unreachable!(),
            }
        }
        if let Some(f) = log.events.iter().find(|e| e.kind == EventKind::ConstraintFail) {
            prop_assert!(f.constraint.is_some());
            prop_assert_eq!(f.seq, last, "nothing fires after a failure");
        }
    }
}

fn instance_doms() -> impl Strategy<Value = Doms> {
    prop::collection::vec(prop::collection::btree_set(0i64..=9, 1..=6), 2..=6)
}
