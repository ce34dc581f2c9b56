//! The debugging session state machine. Pure: no I/O, no threads. The
//! solver side feeds it commands and its own progress (node visits,
//! propagation events, end of run) and obeys the answers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::wire::Command;
use crate::search::NodePath;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum SessionState {
    Idle,
    /// Running; this also covers the stretch between a step command and
    /// the pause it leads to.
    RunningFree,
    PausedAtNode { path: NodePath },
    PausedAtEvent { path: NodePath, seq: u64 },
    Finished,
}

impl SessionState {
    pub fn name(&self) -> &'static str {
        match self {
            SessionState::Idle => "Idle",
            SessionState::RunningFree => "RunningFree",
            SessionState::PausedAtNode { .. } => "PausedAtNode",
            SessionState::PausedAtEvent { .. } => "PausedAtEvent",
            SessionState::Finished => "Finished",
        }
    }

    pub fn is_paused(&self) -> bool {
        matches!(self, SessionState::PausedAtNode { .. } | SessionState::PausedAtEvent { .. })
    }
}

impl fmt::Display for SessionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionState::PausedAtNode { path } => write!(f, "PausedAtNode({path})"),
            SessionState::PausedAtEvent { path, seq } => write!(f, "PausedAtEvent({path}, {seq})"),
            s => f.write_str(s.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub path: NodePath,
    pub enabled: bool,
    pub hit_count: u64,
}

/// Where the running solver should stop next, breakpoints aside.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Until {
    Free,
    NextEvent,
    NextNode,
    /// Whichever comes first.
    NextBoundary,
}

/// What the solver must do after a command was accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Effect {
    /// Nothing changes for the solver.
    Stay,
    /// Leave the pause.
    Resume,
    /// Begin the first run.
    Start,
    /// Abort the current run, if any, and run again.
    Restart,
    Quit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: SessionState,
    pub input: String,
    pub to: SessionState,
}

#[derive(Clone, Debug)]
pub struct Session {
    state: SessionState,
    until: Until,
    spy: bool,
    breakpoints: BTreeMap<NodePath, Breakpoint>,
    log: Vec<Transition>,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Session {
            state: SessionState::Idle,
            until: Until::Free,
            spy: false,
            breakpoints: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn until(&self) -> Until {
        self.until
    }

    pub fn spy(&self) -> bool {
        self.spy
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Breakpoint> {
        self.breakpoints.values()
    }

    pub fn log(&self) -> &[Transition] {
        &self.log
    }

    fn go(&mut self, input: String, to: SessionState) {
        let from = std::mem::replace(&mut self.state, to.clone());
        self.log.push(Transition { from, input, to });
    }

    fn illegal(&self, cmd: &Command) -> String {
        format!("{} is illegal in {}", cmd.name(), self.state.name())
    }

    /// Applies a command. An `Err` carries the reply text and leaves the
    /// session untouched.
    pub fn handle_command(&mut self, cmd: &Command) -> Result<Effect, String> {
        use SessionState as S;
        let paused = self.state.is_paused();
        let input = cmd.name().to_string();
        match cmd {
            Command::Hello { .. } => Err("hello is only valid as the first message".into()),
            Command::Run => match self.state {
                S::Idle => {
                    self.until = Until::Free;
                    self.go(input, S::RunningFree);
                    Ok(Effect::Start)
                }
                _ => Err(self.illegal(cmd)),
            },
            Command::StepInto if paused => {
                self.spy = true;
                self.until = Until::NextEvent;
                self.go(input, S::RunningFree);
                Ok(Effect::Resume)
            }
            Command::StepOver if paused => {
                self.until = match self.state {
                    S::PausedAtEvent { .. } => Until::NextEvent,
                    _ => Until::NextNode,
                };
                self.go(input, S::RunningFree);
                Ok(Effect::Resume)
            }
            Command::StepOut if paused => {
                self.spy = false;
                self.until = Until::NextNode;
                self.go(input, S::RunningFree);
                Ok(Effect::Resume)
            }
            Command::SkipStep if paused => {
                self.spy = true;
                self.until = Until::NextNode;
                self.go(input, S::RunningFree);
                Ok(Effect::Resume)
            }
            Command::Continue if paused => {
                self.until = Until::Free;
                self.go(input, S::RunningFree);
                Ok(Effect::Resume)
            }
            Command::BreakNow if self.state == S::RunningFree => {
                self.until = Until::NextBoundary;
                Ok(Effect::Stay)
            }
            Command::StepInto
            | Command::StepOver
            | Command::StepOut
            | Command::SkipStep
            | Command::Continue
            | Command::BreakNow => Err(self.illegal(cmd)),
            Command::SetBreakpoint(path) => {
                self.breakpoints
                    .entry(path.clone())
                    .and_modify(|b| b.enabled = true)
                    .or_insert_with(|| Breakpoint {
                        path: path.clone(),
                        enabled: true,
                        hit_count: 0,
                    });
                Ok(Effect::Stay)
            }
            Command::ClearBreakpoint(path) => {
                self.breakpoints.remove(path);
                Ok(Effect::Stay)
            }
            Command::Restart if paused || self.state == S::Finished => {
                self.until = Until::Free;
                self.go(input, S::RunningFree);
                Ok(Effect::Restart)
            }
            Command::Restart => Err(self.illegal(cmd)),
            Command::SetSpy(on) => {
                self.spy = *on;
                Ok(Effect::Stay)
            }
            Command::Quit => {
                self.go(input, S::Finished);
                Ok(Effect::Quit)
            }
        }
    }

    /// A node visit starts. Returns true if the solver must pause.
    pub fn at_node(&mut self, path: &NodePath) -> bool {
        if self.state != SessionState::RunningFree {
            return false;
        }
        let bp = self.breakpoints.get_mut(path).filter(|b| b.enabled);
        let hit = bp.is_some();
        if let Some(b) = bp {
            b.hit_count += 1;
        }
        if hit || matches!(self.until, Until::NextNode | Until::NextBoundary) {
            self.until = Until::Free;
            self.go("node".into(), SessionState::PausedAtNode { path: path.clone() });
            return true;
        }
        false
    }

    /// A propagation event was delivered. Returns true if the solver must
    /// pause.
    pub fn at_event(&mut self, path: &NodePath, seq: u64) -> bool {
        if self.state != SessionState::RunningFree {
            return false;
        }
        if matches!(self.until, Until::NextEvent | Until::NextBoundary) {
            self.until = Until::Free;
            self.go(
                "event".into(),
                SessionState::PausedAtEvent {
                    path: path.clone(),
                    seq,
                },
            );
            return true;
        }
        false
    }

    pub fn run_finished(&mut self) {
        if self.state != SessionState::Finished {
            self.until = Until::Free;
            self.go("run_done".into(), SessionState::Finished);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idle_rejects_stepping() {
        let mut s = Session::new();
        assert_eq!(s.handle_command(&Command::StepOver), Err("step_over is illegal in Idle".into()));
        assert_eq!(s.state(), &SessionState::Idle);
    }

    #[test]
    fn breakpoint_pauses_and_counts() {
        let mut s = Session::new();
        let p = NodePath(vec![0, 1]);
        s.handle_command(&Command::SetBreakpoint(p.clone())).unwrap();
        assert_eq!(s.handle_command(&Command::Run), Ok(Effect::Start));
        assert!(!s.at_node(&NodePath(vec![0])));
        assert!(s.at_node(&p));
        assert_eq!(s.state(), &SessionState::PausedAtNode { path: p.clone() });
        assert_eq!(s.breakpoints().next().unwrap().hit_count, 1);
    }

    #[test]
    fn step_into_pauses_after_one_event() {
        let mut s = Session::new();
        s.handle_command(&Command::Run).unwrap();
        s.handle_command(&Command::BreakNow).unwrap();
        assert!(s.at_node(&NodePath::root()));
        s.handle_command(&Command::StepInto).unwrap();
        assert!(s.spy());
        assert!(s.at_event(&NodePath::root(), 4));
        assert!(matches!(s.state(), SessionState::PausedAtEvent { seq: 4, .. }));
        s.handle_command(&Command::StepOut).unwrap();
        assert!(!s.spy());
        assert!(!s.at_event(&NodePath::root(), 5));
        assert!(s.at_node(&NodePath(vec![0])));
    }

    #[test]
    fn restart_only_when_paused_or_finished() {
        let mut s = Session::new();
        s.handle_command(&Command::Run).unwrap();
        assert!(s.handle_command(&Command::Restart).is_err());
        s.run_finished();
        assert_eq!(s.handle_command(&Command::Restart), Ok(Effect::Restart));
    }
}
