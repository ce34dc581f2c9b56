//! Newline-delimited JSON messages exchanged between the solver and the
//! GUI. Commands flow GUI to solver, events solver to GUI.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::search::NodePath;
use crate::trace::{NodeEvent, Record};

use super::fsm::SessionState;

pub const PROTOCOL_VERSION: &str = "cpscope-wire/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageType {
    Command,
    Event,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireMessage {
    #[serde(rename = "type")]
    pub kind: MessageType,
    pub name: String,
    pub run_id: u64,
    pub seq: u64,
    #[serde(default)]
    pub payload: Value,
}

#[derive(Debug, Error)]
pub enum WireError {
    #[error("malformed message: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown {kind:?} `{name}`")]
    UnknownName { kind: MessageType, name: String },
    #[error("expected a {expected:?}, got a {got:?}")]
    WrongType { expected: MessageType, got: MessageType },
    #[error("bad payload for `{name}`: {message}")]
    Payload { name: String, message: String },
}

impl WireMessage {
    /// One line, without the trailing newline.
    pub fn encode(&self) -> String {
        serde_json::to_string(self).expect("wire messages always serialize")
    }

    pub fn decode(line: &str) -> Result<Self, WireError> {
        Ok(serde_json::from_str(line.trim_end())?)
    }

    pub fn event(name: &str, run_id: u64, seq: u64, payload: Value) -> Self {
        WireMessage {
            kind: MessageType::Event,
            name: name.into(),
            run_id,
            seq,
            payload,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Hello { protocol_version: String, model: String },
    /// Start the first run (legal in `Idle`).
    Run,
    StepInto,
    StepOut,
    StepOver,
    SkipStep,
    BreakNow,
    Continue,
    SetBreakpoint(NodePath),
    ClearBreakpoint(NodePath),
    Restart,
    SetSpy(bool),
    Quit,
}

impl Command {
    pub const NAMES: [&'static str; 13] = [
        "hello",
        "run",
        "step_into",
        "step_out",
        "step_over",
        "skip_step",
        "break_now",
        "continue",
        "set_breakpoint",
        "clear_breakpoint",
        "restart",
        "set_spy",
        "quit",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Hello { .. } => "hello",
            Command::Run => "run",
            Command::StepInto => "step_into",
            Command::StepOut => "step_out",
            Command::StepOver => "step_over",
            Command::SkipStep => "skip_step",
            Command::BreakNow => "break_now",
            Command::Continue => "continue",
            Command::SetBreakpoint(_) => "set_breakpoint",
            Command::ClearBreakpoint(_) => "clear_breakpoint",
            Command::Restart => "restart",
            Command::SetSpy(_) => "set_spy",
            Command::Quit => "quit",
        }
    }

    pub fn payload(&self) -> Value {
        match self {
            Command::Hello { protocol_version, model } => {
                json!({ "protocol_version": protocol_version, "model": model })
            }
            Command::SetBreakpoint(p) | Command::ClearBreakpoint(p) => json!({ "path": p }),
            Command::SetSpy(on) => json!({ "on": on }),
            _ => Value::Null,
        }
    }

    pub fn to_message(&self, run_id: u64, seq: u64) -> WireMessage {
        WireMessage {
            kind: MessageType::Command,
            name: self.name().into(),
            run_id,
            seq,
            payload: self.payload(),
        }
    }

    pub fn from_message(msg: &WireMessage) -> Result<Self, WireError> {
        if msg.kind != MessageType::Command {
            return Err(WireError::WrongType {
                expected: MessageType::Command,
                got: msg.kind,
            });
        }
        let field = |k: &str| -> Result<Value, WireError> {
            msg.payload.get(k).cloned().ok_or_else(|| WireError::Payload {
                name: msg.name.clone(),
                message: format!("missing `{k}`"),
            })
        };
        Ok(match msg.name.as_str() {
            "hello" => Command::Hello {
                protocol_version: typed(&msg.name, field("protocol_version")?)?,
                model: typed(&msg.name, field("model")?)?,
            },
            "run" => Command::Run,
            "step_into" => Command::StepInto,
            "step_out" => Command::StepOut,
            "step_over" => Command::StepOver,
            "skip_step" => Command::SkipStep,
            "break_now" => Command::BreakNow,
            "continue" => Command::Continue,
            "set_breakpoint" => Command::SetBreakpoint(typed(&msg.name, field("path")?)?),
            "clear_breakpoint" => Command::ClearBreakpoint(typed(&msg.name, field("path")?)?),
            "restart" => Command::Restart,
            "set_spy" => Command::SetSpy(typed(&msg.name, field("on")?)?),
            "quit" => Command::Quit,
            _ => {
                return Err(WireError::UnknownName {
                    kind: msg.kind,
                    name: msg.name.clone(),
                })
            }
        })
    }
}

/// Event names, in no particular order.
pub const EVENT_NAMES: [&str; 12] = [
    "run_start",
    "node_created",
    "node_visit",
    "node_done",
    "frame_push",
    "frame_pop",
    "prop_event",
    "solution",
    "run_done",
    "ack",
    "error",
    "session_state",
];

/// The event name that carries a trace record.
pub fn record_event_name(r: &Record) -> &'static str {
    match r {
        Record::Header(_) => "run_start",
        Record::Node(n) => match n.event {
            NodeEvent::Created => "node_created",
            NodeEvent::Visit => "node_visit",
            // Later recolorings reuse node_done; the record says which.
            NodeEvent::Done | NodeEvent::State => "node_done",
        },
        Record::Frame(f) => match f.op {
            crate::trace::FrameOp::Push => "frame_push",
            crate::trace::FrameOp::Pop => "frame_pop",
        },
        Record::Prop(_) => "prop_event",
        Record::Solution(_) => "solution",
        Record::Summary(_) => "run_done",
    }
}

pub fn record_event(r: &Record, run_id: u64, seq: u64) -> WireMessage {
    WireMessage::event(
        record_event_name(r),
        run_id,
        seq,
        serde_json::to_value(r).expect("records always serialize"),
    )
}

/// The record inside a record-carrying event, `None` for control events.
pub fn event_record(msg: &WireMessage) -> Result<Option<Record>, WireError> {
    if msg.kind != MessageType::Event {
        return Err(WireError::WrongType {
            expected: MessageType::Event,
            got: msg.kind,
        });
    }
    match msg.name.as_str() {
        "ack" | "error" | "session_state" => Ok(None),
        n if EVENT_NAMES.contains(&n) => serde_json::from_value(msg.payload.clone())
            .map(Some)
            .map_err(|e| WireError::Payload {
                name: msg.name.clone(),
                message: e.to_string(),
            }),
        _ => Err(WireError::UnknownName {
            kind: msg.kind,
            name: msg.name.clone(),
        }),
    }
}

fn typed<T: serde::de::DeserializeOwned>(name: &str, v: Value) -> Result<T, WireError> {
    serde_json::from_value(v).map_err(|e| WireError::Payload {
        name: name.into(),
        message: e.to_string(),
    })
}

pub fn ack(command: &str, state: &SessionState) -> Value {
    json!({ "command": command, "state": state })
}

pub fn error(command: &str, message: &str, state: &SessionState) -> Value {
    json!({ "command": command, "message": message, "state": state })
}
