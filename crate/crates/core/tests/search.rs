use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use cpscope::constraints::{self, Cmp, ConstraintSpec, FilterLevel};
use cpscope::event::{EventInfo, EventListener};
use cpscope::models::{self, ModelConfig};
use cpscope::search::{
    select, solve, Branch, BranchLabel, Branching, ChoiceFrame, Direction, Goal, Monitor, NodeInfo, NodePath,
    NodeState, NullMonitor, SearchTree, SolveOptions, Solution, Strategy, TaskOrder,
};
use cpscope::store::Snapshot;
use cpscope::{Domain, Store, VarId};

/// Records what the search shows a monitor, checking as it goes.
#[derive(Default)]
struct Probe {
    stack: Vec<ChoiceFrame>,
    visits: Vec<(NodePath, u32)>,
    at_visit: BTreeMap<NodePath, Snapshot>,
    at_done: BTreeMap<NodePath, Snapshot>,
    solutions: Vec<Solution>,
    errors: Vec<String>,
    ended_empty: Option<bool>,
}

impl EventListener for Probe {
    fn on_event(&mut self, _ev: &EventInfo<'_>) {}
}

impl Monitor for Probe {
    fn node_visit(&mut self, node: &NodeInfo<'_>, store: &Store) {
        if self.stack.len() != node.path.depth() {
            self.errors.push(format!("{} visited with {} frames", node.path, self.stack.len()));
        }
        for (i, f) in self.stack.iter().enumerate() {
            if f.depth as usize != i + 1 {
                self.errors.push(format!("frame {i} has depth {}", f.depth));
            }
        }
        self.visits.push((node.path.clone(), node.discrepancy));
        self.at_visit.insert(node.path.clone(), store.snapshot());
    }
    fn node_done(&mut self, node: &NodeInfo<'_>, store: &Store) {
        self.at_done.insert(node.path.clone(), store.snapshot());
    }
    fn frame_push(&mut self, f: &ChoiceFrame) {
        self.stack.push(f.clone());
    }
    fn frame_pop(&mut self, f: &ChoiceFrame) {
        match self.stack.pop() {
            Some(top) if &top == f => {}
            other => self.errors.push(format!("popped {f} over {other:?}")),
        }
    }
    fn solution(&mut self, s: &Solution) {
        self.solutions.push(s.clone());
    }
    fn run_done(&mut self, _s: &cpscope::search::RunSummary) {
        self.ended_empty = Some(self.stack.is_empty());
    }
}

/// `n` variables over `0..=k` with a sum constraint: a small static tree.
fn sum_model(n: usize, k: i64, total: i64) -> (Store, Vec<VarId>) {
    let mut st = Store::new();
    let vars: Vec<VarId> = (0..n).map(|i| st.new_var(format!("x[{i}]"), Domain::interval(0, k).unwrap())).collect();
    constraints::post(&mut st, ConstraintSpec::Linear {
        terms: vars.iter().map(|&v| (1, v)).collect(),
        cmp: Cmp::Eq,
        rhs: total,
    });
    (st, vars)
}

fn run(st: &mut Store, goal: Goal, opts: SolveOptions) -> (cpscope::search::SearchResult, Probe) {
    let mut p = Probe::default();
    let r = solve(st, goal, &opts, &mut p);
    assert!(p.errors.is_empty(), "{:?}", p.errors);
    assert_eq!(p.ended_empty, Some(true), "choice stack not empty after the run");
    (r, p)
}

fn leaves(t: &SearchTree) -> BTreeMap<NodePath, NodeState> {
    t.nodes
        .iter()
        .filter(|n| n.children.is_empty())
        .map(|n| (n.path.clone(), n.state))
        .collect()
}

fn check_well_formed(t: &SearchTree) {
    for (id, n) in t.nodes.iter().enumerate() {
        match n.parent {
            None => assert!(n.path.is_root()),
            Some(p) => {
                assert_eq!(t.nodes[p].path, n.path.parent().unwrap());
                assert!(t.nodes[p].children.contains(&id));
            }
        }
        for (i, &c) in n.children.iter().enumerate() {
            assert_eq!(t.nodes[c].path.last(), Some(i as u32), "child indices contiguous");
        }
        if n.children.is_empty() {
            assert!(matches!(n.state, NodeState::Green | NodeState::Red | NodeState::Black), "{} {:?}", n.path, n.state);
        }
        assert_eq!(n.visit_order.is_none(), matches!(n.state, NodeState::Black | NodeState::White));
    }
    let mut orders: Vec<u64> = t.nodes.iter().filter_map(|n| n.visit_order).collect();
    let len = orders.len();
    orders.sort_unstable();
    orders.dedup();
    assert_eq!(orders.len(), len, "visit orders unique");
}

fn all(strategy: Strategy) -> SolveOptions {
    SolveOptions { strategy, all_solutions: true, ..Default::default() }
}

#[test]
fn lds_with_enough_discrepancies_sees_every_leaf() {
    for branching in [Branching::Binary, Branching::Nary] {
        let (mut a, va) = sum_model(3, 2, 3);
        let (dfs, pd) = run(&mut a, Goal::label(va, branching), all(Strategy::Dfs));
        let depth = dfs.tree.max_depth() as u32;
        let (mut b, vb) = sum_model(3, 2, 3);
        let (lds, pl) = run(&mut b, Goal::label(vb, branching), all(Strategy::Lds { max_discrepancies: 2 * depth }));
        check_well_formed(&dfs.tree);
        check_well_formed(&lds.tree);
        assert_eq!(leaves(&dfs.tree), leaves(&lds.tree), "{branching:?}");
        assert_eq!(dfs.solutions.len(), 7, "sums of three values in 0..=2 to 3");
        let order = |p: &Probe| p.visits.iter().map(|v| v.0.clone()).collect::<Vec<_>>();
        assert_ne!(order(&pd), order(&pl), "LDS should reorder visits");
        // Sibling snapshots agree across orders, so each branch starts
        // from the state its parent left.
        assert_eq!(pd.at_visit, pl.at_visit);
        assert_eq!(pd.at_done, pl.at_done);
    }
}

#[test]
fn lds_waves_visit_by_discrepancy() {
    let (mut st, v) = sum_model(3, 2, 3);
    let (_, p) = run(&mut st, Goal::label(v, Branching::Binary), all(Strategy::Lds { max_discrepancies: 10 }));
    let discs: Vec<u32> = p.visits.iter().map(|v| v.1).collect();
    let mut seen = BTreeSet::new();
    let firsts: Vec<u32> = p.visits.iter().filter(|v| seen.insert(v.0.clone())).map(|v| v.1).collect();
    assert!(firsts.windows(2).all(|w| w[0] <= w[1]), "{discs:?}");
}

#[test]
fn lds_zero_follows_the_leftmost_path() {
    let (mut st, v) = sum_model(3, 2, 3);
    let (r, _) = run(&mut st, Goal::label(v, Branching::Binary), all(Strategy::Lds { max_discrepancies: 0 }));
    for n in &r.tree.nodes {
        if n.visit_order.is_some() {
            assert!(n.path.0.iter().all(|&i| i == 0), "{} visited", n.path);
        }
    }
    assert!(r.tree.nodes.iter().any(|n| n.state == NodeState::Black));
}

#[test]
fn sibling_branches_start_from_the_parent_state() {
    let cfg = ModelConfig { filter_level: FilterLevel::Bounds, ..Default::default() };
    let mut m = models::builtin("golomb5", &cfg).unwrap();
    let (r, p) = run(&mut m.store, m.goal.clone(), SolveOptions::default());
    check_well_formed(&r.tree);
    // The left child of each binary node assigns, the right removes the
    // same value; both differ from the parent only in that variable and
    // what propagation derived. Check by replaying the parent's fixpoint.
    for n in &r.tree.nodes {
        if n.children.len() != 2 {
            continue;
        }
        let parent = &p.at_done[&n.path];
        for &c in &n.children {
            let Some(child) = p.at_visit.get(&r.tree.nodes[c].path) else { continue };
            // Domains only ever shrink from the parent's fixpoint.
            for (pd, cd) in parent.domains.iter().zip(&child.domains) {
                assert!(cd.is_subset_of(pd));
            }
        }
    }
}

#[test]
fn branch_and_bound_improves_strictly() {
    for name in ["golomb5", "golomb6", "ft06", "warehouse"] {
        let mut m = models::builtin(name, &ModelConfig::default()).unwrap();
        let opts = SolveOptions { objective: m.objective, ..Default::default() };
        let (r, p) = run(&mut m.store, m.goal.clone(), opts);
        let objs: Vec<i64> = p.solutions.iter().map(|s| s.objective.unwrap()).collect();
        assert!(objs.windows(2).all(|w| w[1] < w[0]), "{name}: {objs:?}");
        assert!(r.summary.proven);
        assert_eq!(r.summary.best_objective, objs.last().copied());
        check_well_formed(&r.tree);
    }
}

#[test]
fn same_run_twice_is_identical() {
    let go = || {
        let mut m = models::builtin("golomb5", &ModelConfig::default()).unwrap();
        let opts = SolveOptions { objective: m.objective, ..Default::default() };
        let (r, p) = run(&mut m.store, m.goal.clone(), opts);
        (r.tree.nodes.iter().map(|n| (n.path.clone(), n.state, n.visit_order)).collect::<Vec<_>>(), p.at_visit)
    };
    assert_eq!(go(), go());
}

#[test]
fn pheasants_is_forced() {
    let mut m = models::builtin("pheasants", &ModelConfig::default()).unwrap();
    let (r, _) = run(&mut m.store, m.goal.clone(), SolveOptions::default());
    assert_eq!(r.tree.node_count(), 1);
    assert_eq!(r.solutions[0].value("pheasants"), Some(12));
}

#[test]
fn root_failure_is_a_single_red_node() {
    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(0, 3).unwrap());
    constraints::post(&mut st, ConstraintSpec::less(x, x));
    let (r, _) = run(&mut st, Goal::label(vec![x], Branching::Binary), SolveOptions::default());
    assert_eq!(r.tree.node_count(), 1);
    assert_eq!(r.tree.nodes[0].state, NodeState::Red);
    assert!(r.solutions.is_empty() && r.summary.proven);
}

#[test]
fn try_makes_one_node_per_choice_point() {
    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(0, 4).unwrap());
    let one = Goal::Try(vec![Branch { label: BranchLabel::new("x", "=", "2"), goal: Goal::Assign(x, 2) }]);
    let (r, p) = run(&mut st, one, SolveOptions::default());
    assert_eq!(r.tree.node_count(), 2);
    assert_eq!(r.tree.nodes[0].children.len(), 1);
    assert_eq!(p.solutions[0].path, NodePath(vec![0]));

    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(0, 4).unwrap());
    let goal = Goal::try_all(&st, x, 0..5);
    let (r, _) = run(&mut st, goal, all(Strategy::Dfs));
    assert_eq!(r.tree.nodes[0].children.len(), 5);
    assert_eq!(r.tree.count(NodeState::Green), 5);
    assert_eq!(r.tree.get(&NodePath(vec![3])).unwrap().label, "x = 3");
}

#[test]
fn sequence_adds_no_nodes() {
    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(0, 4).unwrap());
    let y = st.new_var("y", Domain::interval(0, 4).unwrap());
    let goal = Goal::Seq(vec![Goal::Assign(x, 1), Goal::Seq(vec![Goal::Assign(y, 2)])]);
    let (r, _) = run(&mut st, goal, SolveOptions::default());
    assert_eq!(r.tree.node_count(), 1);
    assert_eq!(r.tree.nodes[0].state, NodeState::Green);
}

#[test]
fn rank_first_nodes_are_binary() {
    let mut m = models::builtin("ft06", &ModelConfig::default()).unwrap();
    let opts = SolveOptions { objective: m.objective, node_limit: Some(40), ..Default::default() };
    let (r, _) = run(&mut m.store, m.goal.clone(), opts);
    let root = &r.tree.nodes[0];
    assert_eq!(root.children.len(), 2);
    let [l, rt] = [0, 1].map(|i| r.tree.nodes[root.children[i]].label.clone());
    assert!(l.contains("rankFirst") && rt.contains("notRankFirst"), "{l} | {rt}");
    assert_eq!(l.replace("rankFirst", "notRankFirst"), rt);
}

#[test]
fn one_machine_two_tasks_gives_two_leaves() {
    let json = r#"{
      "name": "pair",
      "variables": [{"name": "a", "min": 0, "max": 10}, {"name": "b", "min": 0, "max": 10}],
      "constraints": [{"kind": "unary_resource", "name": "m",
                       "activities": [{"start": "a", "duration": 3}, {"start": "b", "duration": 4}]}],
      "goal": [{"kind": "rank_all"}, {"kind": "fix_all_min", "vars": ["a", "b"]}]
    }"#;
    for order in [TaskOrder::ByEarliestStart(Direction::Increasing), TaskOrder::ByEarliestStart(Direction::Decreasing)] {
        let mut m = models::json::parse(json, &ModelConfig { order, ..Default::default() }).unwrap();
        let (r, p) = run(&mut m.store, m.goal.clone(), all(Strategy::Dfs));
        assert_eq!(r.tree.node_count(), 3);
        assert_eq!(r.tree.count(NodeState::Green), 2);
        let starts: BTreeSet<(i64, i64)> =
            p.solutions.iter().map(|s| (s.value("a").unwrap(), s.value("b").unwrap())).collect();
        assert_eq!(starts, BTreeSet::from([(0, 3), (4, 0)]));
    }
}

#[test]
fn node_limit_stops_the_run() {
    let mut m = models::builtin("ft06", &ModelConfig::default()).unwrap();
    let opts = SolveOptions { objective: m.objective, node_limit: Some(25), ..Default::default() };
    let r = solve(&mut m.store, m.goal.clone(), &opts, &mut NullMonitor);
    assert!(r.summary.stopped && !r.summary.proven);
    assert!(r.summary.visited <= 25);
    assert_eq!(r.tree.count(NodeState::White), 0, "leftovers are marked pruned");
}

#[test]
fn right_subtree_report_shapes() {
    // x in 0..=3 with x = 3 forced only on the rightmost branch: the
    // binary labeling expands each right child.
    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(0, 3).unwrap());
    let y = st.new_var("y", Domain::interval(3, 3).unwrap());
    constraints::post(&mut st, ConstraintSpec::Linear { terms: vec![(1, x), (-1, y)], cmp: Cmp::Eq, rhs: 0 });
    let (r, _) = run(&mut st, Goal::label(vec![x], Branching::Binary), SolveOptions::default());
    assert!(r.tree.right_subtree_report().is_empty(), "propagation fixes x: no choice at all");

    // x = 0 or 1 starves y and z, so the refutation branch of x expands.
    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(0, 2).unwrap());
    let y = st.new_var("y", Domain::interval(0, 1).unwrap());
    let z = st.new_var("z", Domain::interval(0, 1).unwrap());
    constraints::post(&mut st, ConstraintSpec::AllDifferent { vars: vec![x, y, z], level: FilterLevel::Basic });
    let (r, _) = run(&mut st, Goal::label(vec![x, y, z], Branching::Binary), SolveOptions::default());
    let rep = r.tree.right_subtree_report();
    let paths: Vec<_> = rep.iter().map(|e| (e.path.to_string(), e.depth, e.contains_solution)).collect();
    assert_eq!(paths, vec![("[1]".to_string(), 1, true), ("[1,1]".to_string(), 2, true)]);
    assert!(rep.windows(2).all(|w| w[0].depth <= w[1].depth));

    let mut st = Store::new();
    let x = st.new_var("x", Domain::interval(0, 2).unwrap());
    let (r, _) = run(&mut st, Goal::label(vec![x], Branching::Binary), SolveOptions::default());
    assert!(r.tree.right_subtree_report().is_empty(), "left-biased tree");
}

#[test]
fn select_picks_by_key_and_direction() {
    assert_eq!(select([3, 1, 2], Direction::Increasing), Some(1));
    assert_eq!(select([3, 1, 1], Direction::Increasing), Some(1));
    assert_eq!(select([3, 1, 3], Direction::Decreasing), Some(0));
    assert_eq!(select(Vec::<i32>::new(), Direction::Increasing), None);
}

proptest! {
    #[test]
    fn select_is_the_first_extreme(keys in prop::collection::vec(-5i32..5, 1..12), dec in any::<bool>()) {
        let dir = if dec { Direction::Decreasing } else { Direction::Increasing };
        let i = select(&keys, dir).unwrap();
        let best = if dec { *keys.iter().max().unwrap() } else { *keys.iter().min().unwrap() };
        prop_assert_eq!(keys[i], best);
        prop_assert!(keys[..i].iter().all(|&k| k != best));
    }

    /// Random sum models: DFS well-formed, LDS with a big enough budget
    /// reaches the same leaves.
    #[test]
    fn lds_matches_dfs(n in 2usize..=4, k in 1i64..=3, total in 0i64..=6, nary in any::<bool>()) {
        let b = if nary { Branching::Nary } else { Branching::Binary };
        let (mut s1, v1) = sum_model(n, k, total);
        let (d, _) = run(&mut s1, Goal::label(v1, b), all(Strategy::Dfs));
        let (mut s2, v2) = sum_model(n, k, total);
        let (l, _) = run(&mut s2, Goal::label(v2, b), all(Strategy::Lds { max_discrepancies: 64 }));
        check_well_formed(&d.tree);
        prop_assert_eq!(leaves(&d.tree), leaves(&l.tree));
    }
}
