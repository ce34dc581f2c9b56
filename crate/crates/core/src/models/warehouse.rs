//! Warehouse location: assign each store a supplying warehouse within the
//! warehouses' capacities, minimizing the total supply cost.
//!
//! Opening costs are left out, so the model needs only `element` and
//! `atmost`. Stores are labeled in index order; each store tries its
//! warehouses from cheapest to dearest, as one n-ary choice point.

use std::rc::Rc;

use crate::constraints::{self, Cmp, ConstraintSpec};
use crate::domain::Domain;
use crate::search::{Branch, BranchLabel, DynamicGoal, Goal};
use crate::store::{Store, VarId};

use super::Model;

pub const WAREHOUSES: [&str; 5] = ["Bonn", "Bordeaux", "London", "Paris", "Rome"];
pub const CAPACITY: [usize; 5] = [1, 4, 2, 1, 3];
pub const SUPPLY_COST: [[i64; 5]; 10] = [
    [20, 24, 11, 25, 30],
    [28, 27, 82, 83, 74],
    [74, 97, 71, 96, 70],
    [2, 55, 73, 69, 61],
    [46, 96, 59, 83, 4],
    [42, 22, 29, 67, 59],
    [1, 5, 73, 59, 56],
    [10, 73, 13, 43, 96],
    [93, 35, 63, 85, 46],
    [47, 65, 55, 71, 95],
];

/// Labels each supplier over its remaining warehouses by increasing cost.
#[derive(Debug)]
pub struct CheapestFirst {
    pub suppliers: Vec<VarId>,
}

impl DynamicGoal for CheapestFirst {
    fn expand(&self, store: &Store, this: &Goal) -> Option<Goal> {
        let (s, &x) = self.suppliers.iter().enumerate().find(|(_, &v)| !store.is_bound(v))?;
        let mut values: Vec<i64> = store.domain(x).iter().collect();
        values.sort_by_key(|&w| (SUPPLY_COST[s][w as usize], w));
        let name = store.name(x);
        let branches = values
            .into_iter()
            .map(|w| Branch {
                label: BranchLabel::new(name, "=", store.info(x).label_of(w)),
                goal: Goal::Assign(x, w),
            })
            .collect();
        Some(Goal::Seq(vec![Goal::Try(branches), this.clone()]))
    }
}

pub fn build() -> Model {
    let mut store = Store::new();
    let labels: Vec<(i64, String)> = WAREHOUSES
        .iter()
        .enumerate()
        .map(|(i, n)| (i as i64, n.to_string()))
        .collect();
    let n_w = WAREHOUSES.len() as i64;
    let suppliers: Vec<VarId> = (0..SUPPLY_COST.len())
        .map(|s| {
            let v = store.new_var(format!("Supplier[{s}]"), Domain::interval(0, n_w - 1).unwrap());
            store.set_value_labels(v, labels.clone());
            v
        })
        .collect();
    let costs: Vec<VarId> = SUPPLY_COST
        .iter()
        .enumerate()
        .map(|(s, row)| {
            let d = Domain::from_values(row.iter().copied()).unwrap();
            store.new_aux_var(format!("cost[{s}]"), d)
        })
        .collect();
    let max_total: i64 = SUPPLY_COST.iter().map(|r| r.iter().max().unwrap()).sum();
    let total = store.new_var("totalCost", Domain::interval(0, max_total).unwrap());

    for (s, row) in SUPPLY_COST.iter().enumerate() {
        constraints::post(
            &mut store,
            ConstraintSpec::Element {
                index: suppliers[s],
                table: row.to_vec(),
                value: costs[s],
            },
        );
    }
    for (w, &cap) in CAPACITY.iter().enumerate() {
        constraints::post(
            &mut store,
            ConstraintSpec::AtMost {
                vars: suppliers.clone(),
                value: w as i64,
                limit: cap,
            },
        );
    }
    let mut terms: Vec<(i64, VarId)> = costs.iter().map(|&c| (1, c)).collect();
    terms.push((-1, total));
    constraints::post(&mut store, ConstraintSpec::Linear { terms, cmp: Cmp::Eq, rhs: 0 });

    Model {
        name: "warehouse".into(),
        goal: Goal::Custom(Rc::new(CheapestFirst { suppliers })),
        objective: Some(total),
        filter_level: None,
        order: None,
        store,
    }
}
