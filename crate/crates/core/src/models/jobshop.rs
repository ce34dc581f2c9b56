//! Job-shop scheduling with unary machines, solved by ranking.
//!
//! Each job is a chain of tasks; each task needs one machine for a fixed
//! duration. The goal ranks every machine with `tryRankFirst` choices and
//! then fixes each start time to its earliest value, minimizing the
//! makespan.

use crate::constraints::{self, Activity, Cmp, ConstraintSpec, UnaryResource};
use crate::domain::Domain;
use crate::search::{Goal, TaskOrder};
use crate::store::{ResourceId, Store, VarId};

use super::{Model, ModelError};

pub const FT06: &str = include_str!("../../data/ft06.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobShop {
    pub machines: usize,
    /// Per job, its tasks in order as (machine, duration).
    pub jobs: Vec<Vec<(usize, i64)>>,
}

impl JobShop {
    /// Parses the usual text layout: a `jobs machines` line, then one line
    /// of `machine duration` pairs per job. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, what: &str| ModelError::Invalid(format!("job-shop line {}: {what}", line + 1));
        let nums = |line: usize, l: &str| -> Result<Vec<i64>, ModelError> {
            l.split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| bad(line, &format!("`{t}` is not an integer"))))
                .collect()
        };
        let (hl, header) = lines.next().ok_or_else(|| ModelError::Invalid("empty job-shop file".into()))?;
        let dims = nums(hl, header)?;
        let [n_jobs, n_machines] = dims[..] else {
            return Err(bad(hl, "expected `jobs machines`"));
        };
        let mut jobs = Vec::new();
        for (ln, l) in lines {
            let v = nums(ln, l)?;
            if v.len() != 2 * n_machines as usize {
                return Err(bad(ln, &format!("expected {} numbers", 2 * n_machines)));
            }
            let tasks: Vec<(usize, i64)> = v.chunks(2).map(|c| (c[0] as usize, c[1])).collect();
            if tasks.iter().any(|&(m, d)| m >= n_machines as usize || d < 0) {
                return Err(bad(ln, "machine out of range or negative duration"));
            }
            jobs.push(tasks);
        }
        if jobs.len() != n_jobs as usize {
            return Err(ModelError::Invalid(format!("expected {n_jobs} jobs, found {}", jobs.len())));
        }
        Ok(JobShop {
            machines: n_machines as usize,
            jobs,
        })
    }

    pub fn ft06() -> Self {
        Self::parse(FT06).expect("bundled ft06 data is well formed")
    }

    pub fn horizon(&self) -> i64 {
        self.jobs.iter().flatten().map(|t| t.1).sum()
    }
}

/// Variables of a posted job-shop model.
#[derive(Clone, Debug)]
pub struct JobShopVars {
    /// `starts[job][task]`
    pub starts: Vec<Vec<VarId>>,
    pub makespan: VarId,
    pub resources: Vec<ResourceId>,
}

pub fn post(store: &mut Store, js: &JobShop) -> JobShopVars {
    let horizon = js.horizon();
    let starts: Vec<Vec<VarId>> = js
        .jobs
        .iter()
        .enumerate()
        .map(|(i, job)| {
            job.iter()
                .enumerate()
                .map(|(j, &(_, d))| store.new_var(format!("task[{i},{j}].start"), Domain::interval(0, horizon - d).unwrap()))
                .collect()
        })
        .collect();
    let makespan = store.new_var("makespan", Domain::interval(0, horizon).unwrap());

    for (i, job) in js.jobs.iter().enumerate() {
        for j in 1..job.len() {
            constraints::post(
                store,
                ConstraintSpec::Linear {
                    terms: vec![(1, starts[i][j - 1]), (-1, starts[i][j])],
                    cmp: Cmp::Le,
                    rhs: -job[j - 1].1,
                },
            );
        }
        let last = job.len() - 1;
        constraints::post(
            store,
            ConstraintSpec::Linear {
                terms: vec![(1, starts[i][last]), (-1, makespan)],
                cmp: Cmp::Le,
                rhs: -job[last].1,
            },
        );
    }

    let resources = (0..js.machines)
        .map(|m| {
            let activities = js
                .jobs
                .iter()
                .enumerate()
                .flat_map(|(i, job)| job.iter().enumerate().map(move |(j, t)| (i, j, *t)))
                .filter(|&(_, _, (machine, _))| machine == m)
                .map(|(i, j, (_, d))| Activity {
                    start: starts[i][j],
                    duration: d,
                    label: format!("task[{i},{j}]"),
                })
                .collect();
            constraints::add_unary_resource(
                store,
                UnaryResource {
                    name: format!("tool[{m}]"),
                    activities,
                },
            )
        })
        .collect();

    JobShopVars {
        starts,
        makespan,
        resources,
    }
}

/// The ranking procedure followed by fixing every start to its minimum.
pub fn goal(vars: &JobShopVars, order: TaskOrder) -> Goal {
    let all: Vec<VarId> = vars.starts.iter().flatten().copied().collect();
    Goal::Seq(vec![
        Goal::rank_all(vars.resources.clone(), order),
        Goal::FixAllMin(all.into()),
    ])
}

pub fn build(name: &str, js: &JobShop, order: TaskOrder) -> Model {
    let mut store = Store::new();
    let vars = post(&mut store, js);
    Model {
        name: name.into(),
        goal: goal(&vars, order),
        objective: Some(vars.makespan),
        filter_level: None,
        order: Some(order),
        store,
    }
}
