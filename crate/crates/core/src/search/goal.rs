//! Goals: the programmed part of the search.
//!
//! `Seq` is an iterated AND and contributes no tree node. `Try` is an
//! iterated OR: one node whose children are its branches, each of which
//! continues with whatever goals were pending when the `Try` was reached.
//! The dynamic goals (`Label`, `RankAll`, `FixAllMin`, `Custom`) inspect
//! the store at their turn and expand into ordinary goals.

use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSpec;
use crate::store::{ResourceId, Store, VarId};

/// One entry of the choice stack.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChoiceFrame {
    /// Variable name, or resource name for ranking choices.
    pub subject: String,
    /// `=`, `!=`, `rankFirst`, `notRankFirst`.
    pub relation: String,
    /// Value, or activity label for ranking choices.
    pub value: String,
    pub depth: u32,
}

impl ChoiceFrame {
    /// The `variable = value` text.
    pub fn label(&self) -> String {
        format!("{} {} {}", self.subject, self.relation, self.value)
    }
}

impl fmt::Display for ChoiceFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.label(), self.depth)
    }
}

/// Choice label of a branch before it is placed at a depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchLabel {
    pub subject: String,
    pub relation: String,
    pub value: String,
}

impl BranchLabel {
    pub fn new(subject: impl Into<String>, relation: impl Into<String>, value: impl Into<String>) -> Self {
        BranchLabel {
            subject: subject.into(),
            relation: relation.into(),
            value: value.into(),
        }
    }

    pub fn at_depth(&self, depth: u32) -> ChoiceFrame {
        ChoiceFrame {
            subject: self.subject.clone(),
            relation: self.relation.clone(),
            value: self.value.clone(),
            depth,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub label: BranchLabel,
    pub goal: Goal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branching {
    /// `x = min(x)` versus `x != min(x)`, repeated.
    Binary,
    /// One child per value in the domain.
    Nary,
}

/// Key order for `select`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Task selection inside the rank-first procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskOrder {
    /// Resource by increasing number of possible firsts, then task by
    /// the given ordering of its earliest start.
    ByEarliestStart(Direction),
    /// Ranks resources one after the other in index order, taking the
    /// first possible-first task each time.
    Sequential,
}

impl TaskOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskOrder::ByEarliestStart(Direction::Increasing) => "increasing",
            TaskOrder::ByEarliestStart(Direction::Decreasing) => "decreasing",
            TaskOrder::Sequential => "sequential",
        }
    }
}

impl std::str::FromStr for TaskOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "increasing" => Ok(TaskOrder::ByEarliestStart(Direction::Increasing)),
            "decreasing" => Ok(TaskOrder::ByEarliestStart(Direction::Decreasing)),
            "sequential" | "default" => Ok(TaskOrder::Sequential),
            _ => Err(format!("unknown order `{s}` (expected increasing, decreasing or sequential)")),
        }
    }
}

/// A goal that decides its expansion from the current store.
pub trait DynamicGoal: fmt::Debug {
    /// The goal to run next, or `None` when this goal is complete. To loop,
    /// return a `Seq` ending with a clone of `this`.
    fn expand(&self, store: &Store, this: &Goal) -> Option<Goal>;
}

#[derive(Clone, Debug)]
pub enum Goal {
    Assign(VarId, i64),
    Remove(VarId, i64),
    /// Fixes a variable to its current minimum.
    FixMin(VarId),
    Post(ConstraintSpec),
    RankFirst(ResourceId, usize),
    NotRankFirst(ResourceId, usize),
    Try(Vec<Branch>),
    Seq(Vec<Goal>),
    /// Labels the first unbound variable, then itself again.
    Label { vars: Rc<[VarId]>, branching: Branching },
    /// Every variable in order set to its minimum (an iterated AND).
    FixAllMin(Rc<[VarId]>),
    /// Ranks every resource with `tryRankFirst` choices.
    RankAll { resources: Rc<[ResourceId]>, order: TaskOrder },
    /// Fails unconditionally.
    Fail,
    Custom(Rc<dyn DynamicGoal>),
}

impl Goal {
    pub fn label(vars: impl Into<Rc<[VarId]>>, branching: Branching) -> Goal {
        Goal::Label {
            vars: vars.into(),
            branching,
        }
    }

    pub fn rank_all(resources: impl Into<Rc<[ResourceId]>>, order: TaskOrder) -> Goal {
        Goal::RankAll {
            resources: resources.into(),
            order,
        }
    }

    /// Binary choice on `x = v`: left assigns, right removes.
    pub fn try_value(store: &Store, x: VarId, v: i64) -> Goal {
        let name = store.name(x).to_string();
        let shown = store.info(x).label_of(v);
        Goal::Try(vec![
            Branch {
                label: BranchLabel::new(name.clone(), "=", shown.clone()),
                goal: Goal::Assign(x, v),
            },
            Branch {
                label: BranchLabel::new(name, "!=", shown),
                goal: Goal::Remove(x, v),
            },
        ])
    }

    /// N-ary choice over `values` of `x`, one branch each.
    pub fn try_all(store: &Store, x: VarId, values: impl IntoIterator<Item = i64>) -> Goal {
        let name = store.name(x).to_string();
        Goal::Try(
            values
                .into_iter()
                .map(|v| Branch {
                    label: BranchLabel::new(name.clone(), "=", store.info(x).label_of(v)),
                    goal: Goal::Assign(x, v),
                })
                .collect(),
        )
    }

    /// `tryRankFirst(resource, activity)`: rank first, or not first.
    pub fn try_rank_first(store: &Store, r: ResourceId, a: usize) -> Goal {
        let res = store.resource(r);
        let act = res.activities[a].label.clone();
        Goal::Try(vec![
            Branch {
                label: BranchLabel::new(res.name.clone(), "rankFirst", act.clone()),
                goal: Goal::RankFirst(r, a),
            },
            Branch {
                label: BranchLabel::new(res.name.clone(), "notRankFirst", act),
                goal: Goal::NotRankFirst(r, a),
            },
        ])
    }
}
