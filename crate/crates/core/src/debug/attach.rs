//! Running a program under the debugger's control.

use std::path::PathBuf;

use super::fsm::{Effect, Session, SessionState};
use super::link::{Incoming, SolverLink};
use super::wire;
use super::Debuggable;
use crate::event::{EventInfo, EventListener};
use crate::models::ModelError;
use crate::search::{ChoiceFrame, Monitor, NodeInfo, RunSummary, Solution};
use crate::store::Store;
use crate::trace::{RunInfo, TraceFile, Tracer, TracerConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Exit {
    Restart,
    Quit,
}

/// Tracer plus execution control: forwards records to the GUI as they
/// are produced and blocks at pause points until told to go on.
pub struct DebugMonitor<'a> {
    pub tracer: Tracer,
    link: &'a mut SolverLink,
    session: &'a mut Session,
    sent: usize,
    exit: Option<Exit>,
}

impl<'a> DebugMonitor<'a> {
    pub fn new(tracer: Tracer, link: &'a mut SolverLink, session: &'a mut Session) -> Self {
        DebugMonitor {
            tracer,
            link,
            session,
            sent: 0,
            exit: None,
        }
    }

    fn flush(&mut self) {
        for r in &self.tracer.records()[self.sent..] {
            self.link.send_record(r);
        }
        self.sent = self.tracer.records().len();
    }

    fn poll(&mut self) {
        while self.exit.is_none() {
            let Some(inc) = self.link.try_command() else { break };
            self.apply(inc);
        }
    }

    fn apply(&mut self, inc: Incoming) {
        match handle(self.session, self.link, inc) {
            Some(Effect::Restart) => self.exit = Some(Exit::Restart),
            Some(Effect::Quit) => self.exit = Some(Exit::Quit),
            _ => {}
        }
        self.tracer.set_spy(self.session.spy());
    }

    /// Blocks while the session is paused.
    fn wait(&mut self) {
        send_state(self.session, self.link);
        while self.exit.is_none() && self.session.state().is_paused() {
            match self.link.recv_command() {
                Some(inc) => self.apply(inc),
                None => self.exit = Some(Exit::Quit),
            }
        }
    }

    fn live(&self) -> bool {
        self.exit.is_none()
    }
}

/// Applies one incoming command and replies. Returns the effect of an
/// accepted command.
fn handle(session: &mut Session, link: &mut SolverLink, inc: Incoming) -> Option<Effect> {
    match inc {
        Err((name, why)) => {
            link.send_event("error", wire::error(&name, &why, session.state()));
            None
        }
        Ok((cmd, _)) => match session.handle_command(&cmd) {
            Ok(effect) => {
                link.send_event("ack", wire::ack(cmd.name(), session.state()));
                Some(effect)
            }
            Err(why) => {
                link.send_event("error", wire::error(cmd.name(), &why, session.state()));
                None
            }
        },
    }
}

fn send_state(session: &Session, link: &mut SolverLink) {
    link.send_event(
        "session_state",
        serde_json::to_value(session.state()).expect("states serialize"),
    );
}

impl EventListener for DebugMonitor<'_> {
    fn on_event(&mut self, ev: &EventInfo<'_>) {
        if !self.live() {
            return;
        }
        self.tracer.on_event(ev);
        self.flush();
        self.poll();
        let path = self.tracer.current_node().cloned().unwrap_or_default();
        if self.live() && self.session.at_event(&path, ev.seq) {
            self.wait();
        }
    }
}

impl Monitor for DebugMonitor<'_> {
    fn run_start(&mut self, store: &Store) {
        self.tracer.run_start(store);
        self.flush();
    }

    fn node_created(&mut self, node: &NodeInfo<'_>) {
        if self.live() {
            self.tracer.node_created(node);
            self.flush();
        }
    }

    fn node_visit(&mut self, node: &NodeInfo<'_>, store: &Store) {
        if !self.live() {
            return;
        }
        self.tracer.node_visit(node, store);
        self.flush();
        self.poll();
        if self.live() && self.session.at_node(node.path) {
            self.wait();
        }
    }

    fn node_done(&mut self, node: &NodeInfo<'_>, store: &Store) {
        if self.live() {
            self.tracer.node_done(node, store);
            self.flush();
        }
    }

    fn node_state(&mut self, node: &NodeInfo<'_>) {
        if self.live() {
            self.tracer.node_state(node);
            self.flush();
        }
    }

    fn frame_push(&mut self, frame: &ChoiceFrame) {
        if self.live() {
            self.tracer.frame_push(frame);
            self.flush();
        }
    }

    fn frame_pop(&mut self, frame: &ChoiceFrame) {
        if self.live() {
            self.tracer.frame_pop(frame);
            self.flush();
        }
    }

    fn solution(&mut self, solution: &Solution) {
        if self.live() {
            self.tracer.solution(solution);
            self.flush();
        }
    }

    fn run_done(&mut self, summary: &RunSummary) {
        if self.live() {
            self.tracer.run_done(summary);
            self.flush();
        }
    }

    fn should_stop(&mut self) -> bool {
        self.poll();
        !self.live()
    }
}

#[derive(Debug)]
pub struct AttachOutcome {
    /// Trace of the last run that completed, if any.
    pub trace: Option<TraceFile>,
    pub runs: u64,
    pub completed: u64,
}

/// Serves one debugging session over `link` until the GUI quits or
/// disconnects.
///
/// `info` describes the runs (its `run_id` is overwritten); every
/// completed run's trace is written to `trace_out` when given.
pub fn serve_program(
    program: &mut dyn Debuggable,
    link: &mut SolverLink,
    session: &mut Session,
    info: RunInfo,
    cfg: TracerConfig,
    trace_out: Option<PathBuf>,
) -> Result<AttachOutcome, ModelError> {
    let mut out = AttachOutcome {
        trace: None,
        runs: 0,
        completed: 0,
    };
    // Idle until told to run.
    loop {
        match link.recv_command() {
            None => return Ok(out),
            Some(inc) => match handle(session, link, inc) {
                Some(Effect::Start) => break,
                Some(Effect::Quit) => return Ok(out),
                _ => {}
            },
        }
    }
    loop {
        out.runs += 1;
        link.begin_run(out.runs);
        let mut model = program.state_model()?;
        let tracer = Tracer::new(
            RunInfo {
                run_id: out.runs,
                ..info.clone()
            },
            TracerConfig {
                spy: session.spy(),
                ..cfg
            },
        );
        let mut mon = DebugMonitor::new(tracer, link, session);
        program.solve_model(&mut model, &mut mon);
        let exit = mon.exit;
        let tracer = mon.tracer;
        match exit {
            Some(Exit::Quit) => return Ok(out),
            Some(Exit::Restart) => continue,
            None => {}
        }
        out.completed += 1;
        let trace = tracer.into_trace();
        if let Some(p) = &trace_out {
            trace
                .write(p)
                .map_err(|e| ModelError::Invalid(format!("cannot write trace {}: {e}", p.display())))?;
        }
        out.trace = Some(trace);
        session.run_finished();
        send_state(session, link);
        // Finished: wait for a restart or the end of the session.
        loop {
            match link.recv_command() {
                None => return Ok(out),
                Some(inc) => match handle(session, link, inc) {
                    Some(Effect::Restart) => break,
                    Some(Effect::Quit) => return Ok(out),
                    _ => {}
                },
            }
        }
        debug_assert_eq!(session.state(), &SessionState::RunningFree);
    }
}
