//! Tree exploration: depth-first and limited discrepancy search, with
//! branch-and-bound when an objective is given.
//!
//! Children are created when their parent's visit reaches a `Try`, so
//! unexplored alternatives exist as white nodes. Each child owns the goal
//! continuation it will run, which lets LDS come back to a node in a later
//! wave: the path down to it is re-executed silently to rebuild the store.

use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraints::{self, resource, ConstraintSpec};
use crate::domain::Reduction;
use crate::store::{ConstraintId, Outcome, Store, VarId};

use super::goal::{Branching, ChoiceFrame, Goal, TaskOrder};
use super::monitor::{Monitor, NodeInfo};
use super::path::NodePath;
use super::goal::Direction;
use super::select::select;
use super::tree::{NodeState, SearchTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Strategy {
    Dfs,
    /// Waves of increasing discrepancy, 0 to `max_discrepancies`.
    Lds { max_discrepancies: u32 },
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Dfs => f.write_str("dfs"),
            Strategy::Lds { max_discrepancies } => write!(f, "lds({max_discrepancies})"),
        }
    }
}

impl FromStr for Strategy {
    type Err = String;

    /// `dfs`, `lds` (unbounded waves) or `lds(3)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        if s == "dfs" {
            return Ok(Strategy::Dfs);
        }
        if s == "lds" {
            return Ok(Strategy::Lds {
                max_discrepancies: u32::MAX,
            });
        }
        s.strip_prefix("lds(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|n| n.parse().ok())
            .map(|max_discrepancies| Strategy::Lds { max_discrepancies })
            .ok_or_else(|| format!("unknown strategy `{s}` (expected dfs or lds)"))
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub strategy: Strategy,
    /// Variable to minimize.
    pub objective: Option<VarId>,
    /// Keep searching after the first solution of a satisfaction model.
    pub all_solutions: bool,
    /// Stop after this many visits.
    pub node_limit: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            strategy: Strategy::Dfs,
            objective: None,
            all_solutions: false,
            node_limit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    /// 0-based rank among the solutions of the run.
    pub index: usize,
    pub path: NodePath,
    pub objective: Option<i64>,
    /// Decision variables by name, in declaration order.
    pub values: Vec<(String, i64)>,
}

impl Solution {
    pub fn value(&self, name: &str) -> Option<i64> {
        self.values.iter().find(|(n, _)| n == name).map(|p| p.1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub nodes: usize,
    pub visited: u64,
    pub solutions: usize,
    pub best_objective: Option<i64>,
    /// The search space was exhausted, so the last solution is optimal
    /// (or, without solutions, the model is infeasible).
    pub proven: bool,
    /// Stopped early by a monitor or the node limit.
    pub stopped: bool,
    pub events: u64,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub tree: SearchTree,
    pub solutions: Vec<Solution>,
    pub summary: RunSummary,
}

impl SearchResult {
    /// The last solution found, which under minimization is the best.
    pub fn best(&self) -> Option<&Solution> {
        self.solutions.last()
    }
}

struct Node {
    path: NodePath,
    parent: Option<usize>,
    children: Vec<usize>,
    state: NodeState,
    frame: Option<ChoiceFrame>,
    label: String,
    discrepancy: u32,
    visit_order: Option<u64>,
    /// Goals pending when the parent reached its `Try`.
    cont: Rc<Vec<Goal>>,
    /// The branch goal, run first.
    branch: Option<Goal>,
    /// Incumbent bound in force at the visit, reapplied on replay.
    bound: Option<i64>,
    complete: bool,
}

enum Step {
    Fail,
    Solution,
    Branch(Vec<Goal>, Vec<super::goal::Branch>),
}

/// Runs `goal` on `store`, reporting to `monitor`.
///
/// The store should hold the posted model with its initial propagation
/// still pending: it happens during the root visit.
pub fn solve(store: &mut Store, goal: Goal, opts: &SolveOptions, monitor: &mut dyn Monitor) -> SearchResult {
    let mut s = Search {
        store,
        monitor,
        opts,
        nodes: Vec::new(),
        reported: Vec::new(),
        visits: 0,
        solutions: Vec::new(),
        stop: false,
        bound_constraint: None,
        ub: None,
    };
    s.run(goal)
}

struct Search<'a> {
    store: &'a mut Store,
    monitor: &'a mut dyn Monitor,
    opts: &'a SolveOptions,
    nodes: Vec<Node>,
    /// Frames as last reported to the monitor.
    reported: Vec<ChoiceFrame>,
    visits: u64,
    solutions: Vec<Solution>,
    stop: bool,
    bound_constraint: Option<ConstraintId>,
    ub: Option<i64>,
}

impl Search<'_> {
    fn run(&mut self, goal: Goal) -> SearchResult {
        self.store.set_objective_bound(None);
        if let Some(obj) = self.opts.objective {
            let c = constraints::post(self.store, ConstraintSpec::ObjectiveBound { objective: obj });
            self.bound_constraint = Some(c);
        }
        self.monitor.run_start(self.store);
        let root = self.create(None, NodePath::root(), None, 0, Rc::new(vec![goal]), None);

        match self.opts.strategy {
            Strategy::Dfs => self.explore(root, None),
            Strategy::Lds { max_discrepancies } => {
                let mut k = 0;
                loop {
                    self.explore(root, Some(k));
                    if self.stop || self.nodes[root].complete || k >= max_discrepancies {
                        break;
                    }
                    k += 1;
                }
            }
        }

        let unexplored = self.nodes.iter().any(|n| n.state == NodeState::White);
        for id in 0..self.nodes.len() {
            if self.nodes[id].state == NodeState::White {
                self.recolor(id, NodeState::Black);
            }
        }
        self.sync_frames(None);
        let summary = RunSummary {
            nodes: self.nodes.len(),
            visited: self.visits,
            solutions: self.solutions.len(),
            best_objective: self.solutions.last().and_then(|s| s.objective),
            proven: !self.stop && !unexplored,
            stopped: self.stop,
            events: self.store.seq(),
        };
        self.monitor.run_done(&summary);
        SearchResult {
            tree: self.tree(),
            solutions: std::mem::take(&mut self.solutions),
            summary,
        }
    }

    fn create(
        &mut self,
        parent: Option<usize>,
        path: NodePath,
        frame: Option<ChoiceFrame>,
        discrepancy: u32,
        cont: Rc<Vec<Goal>>,
        branch: Option<Goal>,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            path,
            parent,
            children: Vec::new(),
            state: NodeState::White,
            label: frame.as_ref().map(ChoiceFrame::label).unwrap_or_default(),
            frame,
            discrepancy,
            visit_order: None,
            cont,
            branch,
            bound: None,
            complete: false,
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
                self.monitor.node_created(&info(&self.nodes, id));
        id
    }

    fn recolor(&mut self, id: usize, state: NodeState) {
        debug_assert!(self.nodes[id].state.can_become(state));
        self.nodes[id].state = state;
                self.monitor.node_state(&info(&self.nodes, id));
    }

    /// Explores the subtree of `id`. The store is already at the state in
    /// which `id` is entered (its choice marker pushed, or replayed).
    fn explore(&mut self, id: usize, wave: Option<u32>) {
        if self.nodes[id].visit_order.is_none() {
            self.visit(id);
        }
        if self.nodes[id].children.is_empty() {
            self.nodes[id].complete = true;
            return;
        }
        let children = self.nodes[id].children.clone();
        for &c in &children {
            if self.stop {
                break;
            }
            let child = &self.nodes[c];
            if child.complete || wave.is_some_and(|k| child.discrepancy > k) {
                continue;
            }
            if child.visit_order.is_none() && self.bound_prunes() {
                self.nodes[c].complete = true;
                self.recolor(c, NodeState::Black);
                continue;
            }
            self.store.push_choice();
            if self.nodes[c].visit_order.is_some() {
                self.replay(c);
            }
            self.explore(c, wave);
            self.store.pop_choice();
        }
        if children.iter().all(|&c| self.nodes[c].complete) {
            self.nodes[id].complete = true;
            let failed = children
                .iter()
                .all(|&c| self.nodes[c].state == NodeState::Red);
            if failed && self.nodes[id].state == NodeState::Blue {
                self.recolor(id, NodeState::Red);
            }
        }
    }

    /// The incumbent already beats anything reachable from here.
    fn bound_prunes(&self) -> bool {
        match (self.opts.objective, self.ub) {
            (Some(obj), Some(ub)) => self.store.min(obj) > ub,
            _ => false,
        }
    }

    fn visit(&mut self, id: usize) {
        self.sync_frames(Some(id));
        let order = self.visits;
        self.visits += 1;
        {
            let n = &mut self.nodes[id];
            n.visit_order = Some(order);
            n.state = NodeState::Blue;
            n.bound = self.ub;
        }
                self.monitor.node_visit(&info(&self.nodes, id), self.store);

        match self.execute(id) {
            Step::Fail => self.nodes[id].state = NodeState::Red,
            Step::Solution => {
                if self.finish_solution(id) {
                    self.nodes[id].state = NodeState::Green;
                } else {
                    self.nodes[id].state = NodeState::Red;
                }
            }
            Step::Branch(cont, branches) => {
                let cont = Rc::new(cont);
                let depth = self.nodes[id].path.depth() as u32 + 1;
                let base = self.nodes[id].discrepancy;
                for (i, b) in branches.into_iter().enumerate() {
                    let path = self.nodes[id].path.child(i as u32);
                    let frame = b.label.at_depth(depth);
                    self.create(Some(id), path, Some(frame), base + i as u32, Rc::clone(&cont), Some(b.goal));
                }
            }
        }

                self.monitor.node_done(&info(&self.nodes, id), self.store);
        if self.nodes[id].state == NodeState::Green {
            let sol = self.solutions.last().unwrap().clone();
            self.monitor.solution(&sol);
            if self.opts.objective.is_none() && !self.opts.all_solutions {
                self.stop = true;
            }
        }
        if self.opts.node_limit.is_some_and(|l| self.visits >= l) || self.monitor.should_stop() {
            self.stop = true;
        }
    }

    /// Records the solution at the current store. Fixes an unbound
    /// objective to its minimum first; returns false if that fails.
    fn finish_solution(&mut self, id: usize) -> bool {
        if let Some(obj) = self.opts.objective {
            if !self.store.is_bound(obj) {
                let min = self.store.min(obj);
                if self.store.reduce(obj, Reduction::SetValue(min), self.monitor) == Outcome::Failed
                    || self.store.propagate(self.monitor).is_failed()
                {
                    return false;
                }
            }
        }
        let values = self
            .store
            .vars()
            .filter(|&v| self.store.info(v).decision)
            .map(|v| (self.store.name(v).to_string(), self.store.min(v)))
            .collect();
        let objective = self.opts.objective.map(|o| self.store.min(o));
        if let Some(z) = objective {
            self.ub = Some(z - 1);
            self.store.set_objective_bound(self.ub);
        }
        self.solutions.push(Solution {
            index: self.solutions.len(),
            path: self.nodes[id].path.clone(),
            objective,
            values,
        });
        true
    }

    /// Re-executes a visited node silently under the bound it saw.
    fn replay(&mut self, id: usize) {
        let live = self.store.objective_bound();
        self.store.set_objective_bound(self.nodes[id].bound);
        self.store.set_silent(true);
        let step = self.execute(id);
        self.store.set_silent(false);
        self.store.set_objective_bound(live);
        debug_assert!(matches!(step, Step::Branch(..)), "replayed node changed outcome");
    }

    fn execute(&mut self, id: usize) -> Step {
        let node = &self.nodes[id];
        let bound = node.bound;
        let mut stack: Vec<Goal> = (*node.cont).clone();
        if let Some(b) = &node.branch {
            stack.push(b.clone());
        }
        if let (Some(obj), Some(ub), Some(c)) = (self.opts.objective, bound, self.bound_constraint) {
            if self.store.max(obj) > ub {
                self.store.schedule(c);
            }
        }
        if self.store.propagate(self.monitor).is_failed() {
            return Step::Fail;
        }
        self.run_goals(stack)
    }

    fn reduce(&mut self, v: VarId, r: Reduction) -> bool {
        self.store.reduce(v, r, self.monitor) != Outcome::Failed && !self.store.propagate(self.monitor).is_failed()
    }

    fn run_goals(&mut self, mut stack: Vec<Goal>) -> Step {
        while let Some(goal) = stack.pop() {
            let ok = match goal {
                Goal::Assign(x, v) => self.reduce(x, Reduction::SetValue(v)),
                Goal::Remove(x, v) => self.reduce(x, Reduction::RemoveValue(v)),
                Goal::FixMin(x) => {
                    let v = self.store.min(x);
                    self.reduce(x, Reduction::SetValue(v))
                }
                Goal::Post(spec) => {
                    constraints::post(self.store, spec);
                    !self.store.propagate(self.monitor).is_failed()
                }
                Goal::RankFirst(r, a) => {
                    resource::rank_first(self.store, r, a, self.monitor)
                        && !self.store.propagate(self.monitor).is_failed()
                }
                Goal::NotRankFirst(r, a) => {
                    resource::not_rank_first(self.store, r, a, self.monitor)
                        && !self.store.propagate(self.monitor).is_failed()
                }
                Goal::Try(branches) => {
                    if branches.is_empty() {
                        return Step::Fail;
                    }
                    return Step::Branch(stack, branches);
                }
                Goal::Seq(goals) => {
                    stack.extend(goals.into_iter().rev());
                    true
                }
                Goal::Label { ref vars, branching } => {
                    if let Some(&x) = vars.iter().find(|&&v| !self.store.is_bound(v)) {
                        let choice = match branching {
                            Branching::Binary => Goal::try_value(self.store, x, self.store.min(x)),
                            Branching::Nary => {
                                let values: Vec<i64> = self.store.domain(x).iter().collect();
                                Goal::try_all(self.store, x, values)
                            }
                        };
                        stack.push(goal.clone());
                        stack.push(choice);
                    }
                    true
                }
                Goal::FixAllMin(vars) => {
                    stack.extend(
                        vars.iter()
                            .rev()
                            .filter(|&&v| !self.store.is_bound(v))
                            .map(|&v| Goal::FixMin(v)),
                    );
                    true
                }
                Goal::RankAll { ref resources, order } => match self.next_ranking(resources, order) {
                    Ranking::Done => true,
                    Ranking::Stuck => false,
                    Ranking::Choose(r, a) => {
                        let choice = Goal::try_rank_first(self.store, r, a);
                        stack.push(goal.clone());
                        stack.push(choice);
                        true
                    }
                },
                Goal::Fail => false,
                Goal::Custom(ref dynamic) => {
                    if let Some(next) = dynamic.expand(self.store, &goal) {
                        stack.push(next);
                    }
                    true
                }
            };
            if !ok {
                return Step::Fail;
            }
        }
        Step::Solution
    }

    fn next_ranking(&self, resources: &[crate::store::ResourceId], order: TaskOrder) -> Ranking {
        let open: Vec<_> = resources
            .iter()
            .copied()
            .filter(|&r| !resource::is_ranked(self.store, r))
            .collect();
        if open.is_empty() {
            return Ranking::Done;
        }
        let r = match order {
            TaskOrder::Sequential => open[0],
            TaskOrder::ByEarliestStart(_) => {
                let keys = open.iter().map(|&r| resource::nb_possible_first(self.store, r));
                open[select(keys, Direction::Increasing).unwrap()]
            }
        };
        let firsts = resource::possible_firsts(self.store, r);
        if firsts.is_empty() {
            return Ranking::Stuck;
        }
        let a = match order {
            TaskOrder::Sequential => firsts[0],
            TaskOrder::ByEarliestStart(dir) => {
                let acts = &self.store.resource(r).activities;
                let keys = firsts.iter().map(|&a| self.store.min(acts[a].start));
                firsts[select(keys, dir).unwrap()]
            }
        };
        Ranking::Choose(r, a)
    }

    /// Brings the reported choice stack to the frames of `target`.
    fn sync_frames(&mut self, target: Option<usize>) {
        let mut want = Vec::new();
        let mut cur = target;
        while let Some(id) = cur {
            if let Some(f) = &self.nodes[id].frame {
                want.push(f.clone());
            }
            cur = self.nodes[id].parent;
        }
        want.reverse();
        let keep = self
            .reported
            .iter()
            .zip(&want)
            .take_while(|(a, b)| a == b)
            .count();
        while self.reported.len() > keep {
            let f = self.reported.pop().unwrap();
            self.monitor.frame_pop(&f);
        }
        for f in &want[keep..] {
            self.monitor.frame_push(f);
            self.reported.push(f.clone());
        }
    }

    fn tree(&self) -> SearchTree {
        let mut t = SearchTree::new();
        for n in &self.nodes {
            let id = t.add(n.path.clone(), n.label.clone());
            t.nodes[id].state = n.state;
            t.nodes[id].visit_order = n.visit_order;
        }
        t
    }
}

fn info(nodes: &[Node], id: usize) -> NodeInfo<'_> {
    let n = &nodes[id];
    NodeInfo {
        id,
        path: &n.path,
        state: n.state,
        label: &n.label,
        visit_order: n.visit_order,
        children: n.children.len(),
        discrepancy: n.discrepancy,
    }
}

enum Ranking {
    Done,
    /// An unranked resource has no possible first activity.
    Stuck,
    Choose(crate::store::ResourceId, usize),
}
