//! The client-server debugger: wire protocol, session state machine,
//! solver-side link and a reference GUI endpoint.

pub mod attach;
pub mod fsm;
pub mod gui;
pub mod link;
pub mod wire;

use crate::models::{Model, ModelError};
use crate::search::{self, Monitor, SearchResult, SolveOptions};

pub use attach::{serve_program, AttachOutcome, DebugMonitor};
pub use fsm::{Breakpoint, Effect, Session, SessionState, Transition, Until};
pub use gui::{GuiServer, GuiSession, Mirror};
pub use link::{LinkError, SolverLink, EVENT_QUEUE};
pub use wire::{Command, MessageType, WireError, WireMessage, PROTOCOL_VERSION};

/// A program the debugger can run, and re-run on restart.
pub trait Debuggable {
    fn name(&self) -> String;

    /// Declares variables, posts constraints and builds the goal. Called
    /// once per run so every run starts from a fresh store.
    fn state_model(&mut self) -> Result<Model, ModelError>;

    /// Searches `model`, reporting to `monitor`.
    fn solve_model(&mut self, model: &mut Model, monitor: &mut dyn Monitor) -> SearchResult {
        let opts = SolveOptions {
            objective: model.objective,
            ..self.options()
        };
        search::solve(&mut model.store, model.goal.clone(), &opts, monitor)
    }

    fn options(&self) -> SolveOptions {
        SolveOptions::default()
    }
}
