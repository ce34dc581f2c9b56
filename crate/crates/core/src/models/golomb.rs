//! Golomb ruler: `n` marks starting at 0 whose pairwise differences are
//! all distinct, minimizing the last mark.
//!
//! Encoding: `mark[0] = 0`, strictly increasing marks below `n²`, one
//! variable `difference[k]` per pair in row-major pair order tied to the
//! marks by a linear equation, the usual lower bound on a difference
//! spanning `j - i` gaps, and `difference[first] < difference[last]` to break
//! the mirror symmetry.

use crate::constraints::{self, Cmp, ConstraintSpec, FilterLevel};
use crate::domain::Domain;
use crate::search::{Branching, Goal};
use crate::store::Store;

use super::{Model, ModelError};

pub const SIZES: std::ops::RangeInclusive<usize> = 3..=8;

pub fn build(n: usize, level: FilterLevel) -> Result<Model, ModelError> {
    if !SIZES.contains(&n) {
        return Err(ModelError::Unsupported(format!(
            "golomb size {n} (supported: {}..{})",
            SIZES.start(),
            SIZES.end()
        )));
    }
    let top = (n * n) as i64;
    let mut store = Store::new();
    let marks: Vec<_> = (0..n)
        .map(|i| {
            let d = if i == 0 { Domain::singleton(0) } else { Domain::interval(0, top).unwrap() };
            store.new_var(format!("mark[{i}]"), d)
        })
        .collect();

    let mut diffs = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let gap = (j - i) as i64;
            let lb = gap * (gap + 1) / 2;
            let k = diffs.len();
            diffs.push(store.new_var(format!("difference[{k}]"), Domain::interval(lb, top).unwrap()));
            pairs.push((i, j));
        }
    }

    for w in marks.windows(2) {
        constraints::post(&mut store, ConstraintSpec::less(w[0], w[1]));
    }
    for (k, &(i, j)) in pairs.iter().enumerate() {
        constraints::post(
            &mut store,
            ConstraintSpec::Linear {
                terms: vec![(1, diffs[k]), (-1, marks[j]), (1, marks[i])],
                cmp: Cmp::Eq,
                rhs: 0,
            },
        );
    }
    constraints::post(
        &mut store,
        ConstraintSpec::AllDifferent {
            vars: diffs.clone(),
            level,
        },
    );
    constraints::post(&mut store, ConstraintSpec::less(diffs[0], *diffs.last().unwrap()));

    Ok(Model {
        name: format!("golomb{n}"),
        goal: Goal::label(marks.clone(), Branching::Binary),
        objective: Some(marks[n - 1]),
        filter_level: Some(level),
        order: None,
        store,
    })
}
