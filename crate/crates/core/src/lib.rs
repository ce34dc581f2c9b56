//! An instrumented finite-domain constraint solver with a search-tree and
//! propagation debugger.
//!
//! The crate is organised bottom-up:
//!
//! * [`domain`], [`store`], [`event`]: variables, trailed domains, the
//!   propagation queue and the typed event stream.
//! * [`constraints`]: `alldifferent` at three filter levels, linear
//!   constraints and unary resources with rank-first support.
//! * [`search`]: goals, DFS / LDS exploration, branch-and-bound and the
//!   choice stack.
//! * [`trace`]: search monitor, per-node statistics, the trace file.
//! * [`debug`]: wire protocol, debugger session state machine, the GUI
//!   and solver endpoints.
//! * [`models`]: built-in and JSON-described models.

pub mod compare;
pub mod constraints;
pub mod debug;
pub mod domain;
pub mod event;
pub mod models;
pub mod run;
pub mod search;
pub mod store;
pub mod trace;

pub use domain::{Domain, Reduction};
pub use store::{ConstraintId, Outcome, Propagation, ResourceId, Store, VarId};
