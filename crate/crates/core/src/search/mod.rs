//! Programmed search over goals, the search tree and the choice stack.

pub mod engine;
pub mod goal;
pub mod monitor;
pub mod path;
pub mod select;
pub mod tree;

pub use engine::{solve, RunSummary, SearchResult, SolveOptions, Solution, Strategy};
pub use goal::{Branch, BranchLabel, Branching, ChoiceFrame, Direction, DynamicGoal, Goal, TaskOrder};
pub use monitor::{Monitor, NodeInfo, NullMonitor, Tee};
pub use path::NodePath;
pub use select::select;
pub use tree::{NodeState, RightSubtree, SearchTree};
