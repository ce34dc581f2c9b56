//! Running models headless, or attached to a GUI.

use std::path::PathBuf;

use crate::debug::{self, Debuggable, Session, SolverLink};
use crate::models::{self, Model, ModelConfig, ModelError};
use crate::search::{self, SearchResult, SolveOptions, Strategy};
use crate::trace::{RunInfo, TraceFile, Tracer, TracerConfig};

#[derive(Clone, Debug)]
pub struct RunSpec {
    /// Built-in model name or path to a JSON model.
    pub model: String,
    pub config: ModelConfig,
    pub strategy: Strategy,
    pub spy: bool,
    pub decision_only: bool,
    pub all_solutions: bool,
    pub node_limit: Option<u64>,
}

impl RunSpec {
    pub fn new(model: impl Into<String>) -> Self {
        RunSpec {
            model: model.into(),
            config: ModelConfig::default(),
            strategy: Strategy::Dfs,
            spy: false,
            decision_only: true,
            all_solutions: false,
            node_limit: None,
        }
    }

    pub fn tracer_config(&self) -> TracerConfig {
        TracerConfig {
            spy: self.spy,
            decision_only: self.decision_only,
        }
    }

    pub fn options(&self, objective: Option<crate::store::VarId>) -> SolveOptions {
        SolveOptions {
            strategy: self.strategy,
            objective,
            all_solutions: self.all_solutions,
            node_limit: self.node_limit,
        }
    }
}

/// Header fields describing a run of `model`.
pub fn run_info(model: &Model, strategy: Strategy, run_id: u64) -> RunInfo {
    RunInfo {
        model: model.name.clone(),
        strategy: strategy.to_string(),
        filter_levels: model
            .filter_level
            .map(|l| format!("alldifferent={}", l.as_str()))
            .into_iter()
            .collect(),
        order: model.order.map(|o| o.as_str().to_string()),
        run_id,
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub result: SearchResult,
    pub trace: TraceFile,
    /// Events the tracer saw, which must equal the store's count.
    pub traced_events: u64,
    pub unattributed_events: u64,
}

/// Solves `model` with a tracer attached.
pub fn run_model(mut model: Model, spec: &RunSpec) -> RunOutput {
    let mut tracer = Tracer::new(run_info(&model, spec.strategy, 1), spec.tracer_config());
    let opts = spec.options(model.objective);
    let result = search::solve(&mut model.store, model.goal.clone(), &opts, &mut tracer);
    RunOutput {
        result,
        traced_events: tracer.total_events(),
        unattributed_events: tracer.unattributed_events(),
        trace: tracer.into_trace(),
    }
}

pub fn run_headless(spec: &RunSpec) -> Result<RunOutput, ModelError> {
    let model = models::load(&spec.model, &spec.config)?;
    Ok(run_model(model, spec))
}

/// A model reference plus run settings, runnable under the debugger.
#[derive(Clone, Debug)]
pub struct Program {
    pub spec: RunSpec,
}

impl Debuggable for Program {
    fn name(&self) -> String {
        self.spec.model.clone()
    }

    fn state_model(&mut self) -> Result<Model, ModelError> {
        models::load(&self.spec.model, &self.spec.config)
    }

    fn options(&self) -> SolveOptions {
        self.spec.options(None)
    }
}

/// Connects to a GUI and serves debugging sessions for `spec`.
pub fn run_attached(
    spec: &RunSpec,
    addr: &str,
    breakpoints: &[search::NodePath],
    trace_out: Option<PathBuf>,
) -> Result<debug::AttachOutcome, Box<dyn std::error::Error>> {
    let probe = models::load(&spec.model, &spec.config)?;
    let info = run_info(&probe, spec.strategy, 1);
    drop(probe);
    let mut link = SolverLink::connect(addr, &info.model)?;
    let mut session = Session::new();
    for bp in breakpoints {
        session
            .handle_command(&debug::Command::SetBreakpoint(bp.clone()))
            .map_err(|e| e.to_string())?;
    }
    if spec.spy {
        session.handle_command(&debug::Command::SetSpy(true)).map_err(|e| e.to_string())?;
    }
    let mut program = Program { spec: spec.clone() };
    let out = debug::serve_program(&mut program, &mut link, &mut session, info, spec.tracer_config(), trace_out)?;
    link.close()?;
    Ok(out)
}
