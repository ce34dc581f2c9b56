use std::collections::HashMap;

use cpscope::constraints::FilterLevel;
use cpscope::event::{EventInfo, EventListener};
use cpscope::models::{self, ModelConfig};
use cpscope::run::{run_info, run_model, RunOutput, RunSpec};
use cpscope::search::{solve, Strategy, ChoiceFrame, Monitor, NodeInfo, NodePath, NodeState, RunSummary, Solution};
use cpscope::trace::{
    christmas_geometry, reduction_pct, GeometryConfig, NodeEvent, Record, TraceError, TraceFile, Tracer,
    TracerConfig, FORMAT_VERSION,
};
use cpscope::Store;

fn traced(name: &str, level: FilterLevel, spy: bool) -> RunOutput {
    let cfg = ModelConfig { filter_level: level, ..Default::default() };
    let mut spec = RunSpec::new(name);
    spec.spy = spy;
    run_model(models::builtin(name, &cfg).unwrap(), &spec)
}

fn examples() -> Vec<(String, FilterLevel)> {
    let mut out = Vec::new();
    for (name, _) in models::list() {
        if name == "golomb7" || name == "golomb8" {
            continue;
        }
        if name.starts_with("golomb") {
            out.extend(FilterLevel::ALL.map(|l| (name.clone(), l)));
        } else {
            out.push((name, FilterLevel::Basic));
        }
    }
    out
}

#[test]
fn per_node_counts_add_up_to_the_global_count() {
    for (name, level) in examples() {
        for spy in [false, true] {
            let out = traced(&name, level, spy);
            let per_node: u64 = out.trace.stats().values().map(|s| s.event_count).sum();
            let global = out.result.summary.events;
            assert_eq!(per_node, global, "{name} {level:?}");
            assert_eq!(out.traced_events, global);
            assert_eq!(out.unattributed_events, 0);
            let rows = out.trace.prop_rows().count() as u64;
            assert_eq!(rows, if spy { global } else { 0 }, "{name} spy={spy}");
        }
    }
}

#[test]
fn traces_round_trip_and_replay_byte_for_byte() {
    for (name, level) in examples() {
        let a = traced(&name, level, true).trace;
        let text = a.to_text();
        let back = TraceFile::parse(&text).unwrap();
        assert_eq!(back, a, "{name}");
        assert_eq!(back.tree().paths(), a.tree().paths());
        assert_eq!(back.stats(), a.stats());
        assert_eq!(traced(&name, level, true).trace.to_text(), text, "{name} not deterministic");
    }
}

#[test]
fn files_on_disk_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g5.ndjson");
    let t = traced("golomb5", FilterLevel::Basic, false).trace;
    t.write(&p).unwrap();
    let back = TraceFile::load(&p).unwrap();
    assert_eq!(back, t);
    let (ta, tb) = (t.tree(), back.tree());
    for (x, y) in ta.nodes.iter().zip(&tb.nodes) {
        assert_eq!((&x.path, x.state, &x.label, x.visit_order), (&y.path, y.state, &y.label, y.visit_order));
    }
}

#[test]
fn statistics_are_sane() {
    for (name, level) in examples() {
        let out = traced(&name, level, false);
        let m = models::builtin(&name, &ModelConfig { filter_level: level, ..Default::default() }).unwrap();
        let root = out.trace.root_stats().unwrap();
        assert_eq!(root.size_before, m.store.decision_size(), "{name}: root covers declared domains");
        for s in out.trace.stats().values() {
            assert!(s.size_after <= s.size_before);
            assert!((0.0..=100.0).contains(&s.reduction_pct));
            assert_eq!(s.reduction_pct, reduction_pct(s.size_before, s.size_after));
        }
    }
}

#[test]
fn records_never_regress() {
    let out = traced("golomb6", FilterLevel::Basic, false);
    let mut state: HashMap<NodePath, NodeState> = HashMap::new();
    let mut last_visit = None;
    for r in &out.trace.records {
        let Record::Node(n) = r else { continue };
        match n.event {
            NodeEvent::Created => {
                assert_eq!(n.state, NodeState::White);
                assert!(state.insert(n.path.clone(), n.state).is_none());
            }
            _ => {
                let old = state[&n.path];
                assert!(old == n.state || old.can_become(n.state), "{}: {old:?} -> {:?}", n.path, n.state);
                state.insert(n.path.clone(), n.state);
            }
        }
        if n.event == NodeEvent::Visit {
            assert!(n.visit_order > last_visit);
            last_visit = n.visit_order;
        }
    }
    assert!(state.values().all(|s| *s != NodeState::White));
}

#[test]
fn root_counts_the_initial_propagation() {
    // A satisfaction model: the root's events are exactly those of the
    // initial propagation plus the first decision's nothing.
    let mut m = models::builtin("pheasants", &ModelConfig::default()).unwrap();
    let mut log = cpscope::event::EventLog::default();
    m.store.propagate(&mut log);
    let out = traced("pheasants", FilterLevel::Basic, false);
    assert_eq!(out.trace.root_stats().unwrap().event_count, log.events.len() as u64);
}

#[test]
fn root_failure_trace_has_one_node() {
    let json = r#"{"name": "bad", "variables": [{"name": "x", "min": 0, "max": 3}],
                  "constraints": [{"kind": "linear", "terms": [[1, "x"]], "cmp": ">=", "rhs": 9}],
                  "goal": [{"kind": "label", "vars": ["x"]}]}"#;
    let m = models::json::parse(json, &ModelConfig::default()).unwrap();
    let out = run_model(m, &RunSpec::new("bad"));
    let nodes: Vec<_> = out.trace.records.iter().filter(|r| matches!(r, Record::Node(n) if n.event == NodeEvent::Created)).collect();
    assert_eq!(nodes.len(), 1);
    assert_eq!(out.trace.tree().nodes[0].state, NodeState::Red);
}

#[test]
fn bad_files_are_rejected_with_a_reason() {
    let t = traced("golomb4", FilterLevel::Basic, false).trace;
    let text = t.to_text();
    let foreign = text.replacen(FORMAT_VERSION, "cpscope-trace/999", 1);
    assert!(matches!(TraceFile::parse(&foreign), Err(TraceError::Version { found }) if found == "cpscope-trace/999"));
    let mut lines: Vec<&str> = text.lines().collect();
    lines[3] = "{not json";
    match TraceFile::parse(&lines.join("\n")) {
        Err(TraceError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    let headless: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    assert!(matches!(TraceFile::parse(&headless), Err(TraceError::MissingHeader)));
}

#[test]
fn reduction_pct_examples() {
    assert_eq!(reduction_pct(100, 40), 60.0);
    assert_eq!(reduction_pct(100, 100), 0.0);
    assert_eq!(reduction_pct(0, 0), 0.0);
    assert_eq!(reduction_pct(3, 1), 66.67);
}

#[test]
#[should_panic(expected = "grew")]
fn reduction_pct_rejects_growth() {
    reduction_pct(1, 2);
}

#[test]
fn geometry_scales_with_event_counts() {
    let t = traced("golomb5", FilterLevel::Basic, false).trace;
    let (tree, stats) = (t.tree(), t.stats());
    let cfg = GeometryConfig::default();
    let g = christmas_geometry(&tree, &stats, &cfg);
    let max = stats.values().map(|s| s.event_count).max().unwrap();
    for (n, geo) in tree.nodes.iter().zip(&g) {
        let count = stats.get(&n.path).map_or(0, |s| s.event_count);
        let want = cfg.r_min + (cfg.r_max - cfg.r_min) * (count as f64 / max as f64).sqrt();
        assert!((geo.radius - want).abs() < 1e-9);
        assert!(geo.shade < 5);
    }
    let flat: HashMap<_, _> = stats.iter().map(|(p, s)| (p.clone(), cpscope::trace::NodeStats::new(7, s.size_before, s.size_after))).collect();
    let visited: Vec<_> = tree.nodes.iter().filter(|n| flat.contains_key(&n.path)).map(|n| n.path.clone()).collect();
    for geo in christmas_geometry(&tree, &flat, &cfg) {
        if visited.contains(&geo.path) {
            assert_eq!(geo.radius, cfg.r_max);
        }
    }
    let zero: HashMap<_, _> = stats.keys().map(|p| (p.clone(), cpscope::trace::NodeStats::new(0, 5, 5))).collect();
    for geo in christmas_geometry(&tree, &zero, &cfg) {
        assert_eq!((geo.radius, geo.shade), (cfg.r_min, 0));
    }
}

/// Wraps a tracer and turns the spy on for exactly one node visit.
struct SpyOneNode {
    tracer: Tracer,
    target: NodePath,
}

impl EventListener for SpyOneNode {
    fn on_event(&mut self, ev: &EventInfo<'_>) {
        self.tracer.on_event(ev);
    }
}

impl Monitor for SpyOneNode {
    fn run_start(&mut self, s: &Store) {
        self.tracer.run_start(s)
    }
    fn node_created(&mut self, n: &NodeInfo<'_>) {
        self.tracer.node_created(n)
    }
    fn node_visit(&mut self, n: &NodeInfo<'_>, s: &Store) {
        self.tracer.set_spy(n.path == &self.target);
        self.tracer.node_visit(n, s)
    }
    fn node_done(&mut self, n: &NodeInfo<'_>, s: &Store) {
        self.tracer.node_done(n, s);
        self.tracer.set_spy(false);
    }
    fn node_state(&mut self, n: &NodeInfo<'_>) {
        self.tracer.node_state(n)
    }
    fn frame_push(&mut self, f: &ChoiceFrame) {
        self.tracer.frame_push(f)
    }
    fn frame_pop(&mut self, f: &ChoiceFrame) {
        self.tracer.frame_pop(f)
    }
    fn solution(&mut self, s: &Solution) {
        self.tracer.solution(s)
    }
    fn run_done(&mut self, s: &RunSummary) {
        self.tracer.run_done(s)
    }
}

#[test]
fn spy_rows_follow_the_toggle() {
    let mut m = models::builtin("golomb5", &ModelConfig::default()).unwrap();
    let target = NodePath(vec![0, 1]);
    let mut mon = SpyOneNode {
        tracer: Tracer::new(run_info(&m, Strategy::Dfs, 1), TracerConfig::default()),
        target: target.clone(),
    };
    let opts = cpscope::search::SolveOptions { objective: m.objective, ..Default::default() };
    solve(&mut m.store, m.goal.clone(), &opts, &mut mon);
    let t = mon.tracer.into_trace();
    let rows: Vec<_> = t.prop_rows().collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.node == target));
    assert_eq!(rows.len() as u64, t.stats()[&target].event_count);
    assert!(rows.windows(2).all(|w| w[0].seq < w[1].seq));
}

#[test]
fn pheasants_spy_reads_like_a_sheet() {
    let t = traced("pheasants", FilterLevel::Basic, true).trace;
    let captions: Vec<String> = t.prop_rows().map(|r| r.caption()).collect();
    assert!(captions[0].starts_with("Post Constraint: "), "{captions:?}");
    assert!(captions.iter().any(|c| c.starts_with("Propagate Constraint")));
    assert!(captions.iter().any(|c| c == "Set Value pheasants = 12" || c.ends_with("pheasants = 12")), "{captions:?}");
    let frames = t.final_stack();
    assert!(frames.is_empty());
}
