//! GUI end of the socket: the listening side. This is a reference
//! endpoint for tests and the `serve` command; it mirrors what a
//! graphical client reconstructs from the event stream.

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, ErrorKind, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use super::fsm::SessionState;
use super::link::LinkError;
use super::wire::{self, event_record, Command, WireMessage, PROTOCOL_VERSION};
use crate::search::{ChoiceFrame, NodePath, NodeState};
use crate::trace::{FrameOp, Record, TraceFile};

pub struct GuiServer {
    listener: TcpListener,
}

impl GuiServer {
    pub fn bind(addr: impl ToSocketAddrs) -> io::Result<Self> {
        Ok(GuiServer {
            listener: TcpListener::bind(addr)?,
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts one solver and checks its hello. On a version mismatch an
    /// error is sent, the socket closed and `Handshake` returned.
    pub fn accept(&self) -> Result<GuiSession, LinkError> {
        let (stream, _) = self.listener.accept()?;
        GuiSession::handshake(stream)
    }
}

pub struct GuiSession {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    pending: String,
    seq: u64,
    pub model: String,
    pub mirror: Mirror,
}

impl GuiSession {
    fn handshake(stream: TcpStream) -> Result<Self, LinkError> {
        stream.set_nodelay(true)?;
        let mut writer = stream.try_clone()?;
        let mut reader = BufReader::new(stream);
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let msg = WireMessage::decode(&line)?;
        let reject = |w: &mut TcpStream, why: String| -> Result<GuiSession, LinkError> {
            let st = SessionState::Idle;
            let m = WireMessage::event("error", 0, 1, wire::error("hello", &why, &st));
            writeln!(w, "{}", m.encode())?;
            w.flush()?;
            let _ = w.shutdown(std::net::Shutdown::Both);
            Err(LinkError::Handshake(why))
        };
        let Ok(Command::Hello { protocol_version, model }) = Command::from_message(&msg) else {
            return reject(&mut writer, format!("expected hello, got `{}`", msg.name));
        };
        if protocol_version != PROTOCOL_VERSION {
            return reject(
                &mut writer,
                format!("protocol version mismatch: solver speaks {protocol_version}, GUI speaks {PROTOCOL_VERSION}"),
            );
        }
        let ok = WireMessage::event("ack", 0, 1, wire::ack("hello", &SessionState::Idle));
        writeln!(writer, "{}", ok.encode())?;
        writer.flush()?;
        Ok(GuiSession {
            reader,
            writer,
            pending: String::new(),
            seq: 0,
            model,
            mirror: Mirror::default(),
        })
    }

    pub fn send(&mut self, cmd: &Command) -> io::Result<u64> {
        self.seq += 1;
        let msg = cmd.to_message(self.mirror.run_id, self.seq);
        writeln!(self.writer, "{}", msg.encode())?;
        self.writer.flush()?;
        Ok(self.seq)
    }

    /// Next event, folded into the mirror. `Ok(None)` on timeout; an
    /// `UnexpectedEof` error once the solver has hung up.
    pub fn recv(&mut self, timeout: Duration) -> io::Result<Option<WireMessage>> {
        self.reader.get_ref().set_read_timeout(Some(timeout.max(Duration::from_millis(1))))?;
        loop {
            match self.reader.read_line(&mut self.pending) {
                Ok(0) => return Err(ErrorKind::UnexpectedEof.into()),
                Ok(_) if self.pending.ends_with('\n') => {
                    let line = std::mem::take(&mut self.pending);
                    let msg = WireMessage::decode(&line).map_err(|e| io::Error::new(ErrorKind::InvalidData, e))?;
                    self.mirror.apply(&msg).map_err(|e| io::Error::new(ErrorKind::InvalidData, e))?;
                    return Ok(Some(msg));
                }
                Ok(_) => continue,
                Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
    }

    /// Reads until an event satisfies `pred`, returning it, or fails with
    /// `TimedOut` after `timeout` in total.
    pub fn recv_until(
        &mut self,
        timeout: Duration,
        mut pred: impl FnMut(&WireMessage) -> bool,
    ) -> io::Result<WireMessage> {
        let deadline = Instant::now() + timeout;
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            if left.is_zero() {
                return Err(ErrorKind::TimedOut.into());
            }
            if let Some(m) = self.recv(left)? {
                if pred(&m) {
                    return Ok(m);
                }
            }
        }
    }

    /// Sends a command and waits for its ack or error reply.
    pub fn call(&mut self, cmd: &Command, timeout: Duration) -> io::Result<WireMessage> {
        self.send(cmd)?;
        let name = cmd.name();
        self.recv_until(timeout, |m| {
            (m.name == "ack" || m.name == "error")
                && m.payload.get("command").and_then(|c| c.as_str()) == Some(name)
        })
    }

    /// Runs until the solver announces the session is paused or finished.
    pub fn wait_for_pause(&mut self, timeout: Duration) -> io::Result<SessionState> {
        let m = self.recv_until(timeout, |m| {
            m.name == "session_state"
                && m.payload
                    .get("state")
                    .and_then(|s| s.as_str())
                    .is_some_and(|s| s != "running_free")
        })?;
        serde_json::from_value(m.payload).map_err(|e| io::Error::new(ErrorKind::InvalidData, e))
    }
}

/// What a client knows, rebuilt purely from events.
#[derive(Clone, Debug, Default)]
pub struct Mirror {
    pub run_id: u64,
    last_seq: u64,
    /// Records of the current run, header first.
    pub records: Vec<Record>,
    /// Node colors; on a new run every known node turns white first.
    pub nodes: BTreeMap<NodePath, NodeState>,
    pub current: Option<NodePath>,
    pub stack: Vec<ChoiceFrame>,
    pub spy_rows: usize,
    pub state: Option<SessionState>,
    pub runs: u64,
}

impl Mirror {
    pub fn apply(&mut self, msg: &WireMessage) -> Result<(), String> {
        if msg.run_id != self.run_id {
            if msg.run_id < self.run_id {
                return Err(format!("event from stale run {}", msg.run_id));
            }
            self.run_id = msg.run_id;
            self.last_seq = 0;
        }
        if msg.seq <= self.last_seq {
            return Err(format!("out-of-order event seq {} after {}", msg.seq, self.last_seq));
        }
        self.last_seq = msg.seq;
        if msg.name == "session_state" || msg.name == "ack" || msg.name == "error" {
            if let Some(st) = msg.payload.get("state") {
                let wrapped = if st.is_object() { st.clone() } else { msg.payload.clone() };
                self.state = serde_json::from_value(wrapped).ok().or(self.state.take());
            }
            return Ok(());
        }
        let Some(rec) = event_record(msg).map_err(|e| e.to_string())? else {
            return Ok(());
        };
        match &rec {
            Record::Header(_) => {
                self.runs += 1;
                self.records.clear();
                self.stack.clear();
                self.spy_rows = 0;
                self.current = None;
                for s in self.nodes.values_mut() {
                    *s = NodeState::White;
                }
            }
            Record::Node(n) => {
                self.nodes.insert(n.path.clone(), n.state);
                if n.event == crate::trace::NodeEvent::Visit {
                    self.current = Some(n.path.clone());
                }
            }
            Record::Frame(f) => match f.op {
                FrameOp::Push => self.stack.push(f.frame.clone()),
                FrameOp::Pop => {
                    if self.stack.pop().is_none() {
                        return Err("frame_pop on an empty choice stack".into());
                    }
                }
            },
            Record::Prop(_) => self.spy_rows += 1,
            Record::Solution(_) | Record::Summary(_) => {}
        }
        self.records.push(rec);
        Ok(())
    }

    /// The current run as a trace file.
    pub fn trace(&self) -> Option<TraceFile> {
        TraceFile::from_records(self.records.clone()).ok()
    }
}
