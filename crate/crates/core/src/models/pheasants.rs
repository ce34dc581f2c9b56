//! Pheasants and rabbits: 20 heads, 56 legs.

use crate::constraints::{self, Cmp, ConstraintSpec};
use crate::domain::Domain;
use crate::search::{Branching, Goal};
use crate::store::Store;

use super::Model;

pub const HEADS: i64 = 20;
pub const LEGS: i64 = 56;

pub fn build() -> Model {
    let mut store = Store::new();
    let p = store.new_var("pheasants", Domain::interval(0, HEADS).unwrap());
    let r = store.new_var("rabbits", Domain::interval(0, HEADS).unwrap());
    constraints::post(
        &mut store,
        ConstraintSpec::Linear {
            terms: vec![(1, p), (1, r)],
            cmp: Cmp::Eq,
            rhs: HEADS,
        },
    );
    constraints::post(
        &mut store,
        ConstraintSpec::Linear {
            terms: vec![(2, p), (4, r)],
            cmp: Cmp::Eq,
            rhs: LEGS,
        },
    );
    Model {
        name: "pheasants".into(),
        goal: Goal::label(vec![p, r], Branching::Binary),
        objective: None,
        filter_level: None,
        order: None,
        store,
    }
}
