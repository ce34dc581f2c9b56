//! Solver end of the socket. The GUI listens; the solver connects, says
//! hello, and then exchanges messages through two background threads so
//! the search never blocks on the network except through backpressure.

use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, SyncSender};
use std::thread::JoinHandle;
use std::time::Duration;

use serde_json::Value;
use thiserror::Error;

use super::wire::{record_event, Command, MessageType, WireError, WireMessage, PROTOCOL_VERSION};
use crate::trace::Record;

/// Bound of the outgoing event queue. A full queue blocks the solver.
pub const EVENT_QUEUE: usize = 10_000;

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("connection failed: {0}")]
    Io(#[from] io::Error),
    #[error("handshake rejected: {0}")]
    Handshake(String),
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// A command as received: parsed, or the reason it could not be.
pub type Incoming = Result<(Command, u64), (String, String)>;

pub struct SolverLink {
    commands: Receiver<Incoming>,
    events: Option<SyncSender<WireMessage>>,
    writer: Option<JoinHandle<io::Result<()>>>,
    run_id: u64,
    seq: u64,
}

impl SolverLink {
    pub fn connect(addr: impl ToSocketAddrs, model: &str) -> Result<Self, LinkError> {
        let stream = TcpStream::connect(addr)?;
        Self::handshake(stream, model, PROTOCOL_VERSION)
    }

    /// Sends `hello` on `stream` and waits for the verdict.
    pub fn handshake(stream: TcpStream, model: &str, version: &str) -> Result<Self, LinkError> {
        stream.set_nodelay(true)?;
        let mut out = stream.try_clone()?;
        let hello = Command::Hello {
            protocol_version: version.into(),
            model: model.into(),
        };
        writeln!(out, "{}", hello.to_message(0, 0).encode())?;
        out.flush()?;

        let mut reader = BufReader::new(stream);
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Err(LinkError::Handshake("connection closed during handshake".into()));
        }
        let reply = WireMessage::decode(&line)?;
        match reply.name.as_str() {
            "ack" => {}
            "error" => {
                let msg = reply.payload.get("message").and_then(Value::as_str).unwrap_or("no reason given");
                return Err(LinkError::Handshake(msg.into()));
            }
            other => return Err(LinkError::Handshake(format!("unexpected reply `{other}`"))),
        }

        let (cmd_tx, cmd_rx) = mpsc::channel();
        std::thread::Builder::new()
            .name("cpscope-link-reader".into())
            .spawn(move || {
                for line in reader.lines() {
                    let Ok(line) = line else { break };
                    if line.trim().is_empty() {
                        continue;
                    }
                    let parsed = WireMessage::decode(&line)
                        .map_err(|e| ("unknown".to_string(), e.to_string()))
                        .and_then(|m| {
                            if m.kind != MessageType::Command {
                                return Err((m.name.clone(), "expected a command".into()));
                            }
                            Command::from_message(&m).map(|c| (c, m.seq)).map_err(|e| (m.name.clone(), e.to_string()))
                        });
                    if cmd_tx.send(parsed).is_err() {
                        break;
                    }
                }
            })?;

        let (ev_tx, ev_rx) = mpsc::sync_channel::<WireMessage>(EVENT_QUEUE);
        let writer = std::thread::Builder::new()
            .name("cpscope-link-writer".into())
            .spawn(move || -> io::Result<()> {
                let mut w = BufWriter::new(out);
                while let Ok(msg) = ev_rx.recv() {
                    writeln!(w, "{}", msg.encode())?;
                    while let Ok(more) = ev_rx.try_recv() {
                        writeln!(w, "{}", more.encode())?;
                    }
                    w.flush()?;
                }
                w.flush()
            })?;

        Ok(SolverLink {
            commands: cmd_rx,
            events: Some(ev_tx),
            writer: Some(writer),
            run_id: 0,
            seq: 0,
        })
    }

    /// Starts numbering events for a new run.
    pub fn begin_run(&mut self, run_id: u64) {
        self.run_id = run_id;
        self.seq = 0;
    }

    pub fn run_id(&self) -> u64 {
        self.run_id
    }

    fn push(&mut self, build: impl FnOnce(u64, u64) -> WireMessage) {
        self.seq += 1;
        let msg = build(self.run_id, self.seq);
        if let Some(tx) = &self.events {
            // A vanished GUI shows up as a closed command channel; the
            // event is dropped then, there is nobody to read it.
            let _ = tx.send(msg);
        }
    }

    pub fn send_event(&mut self, name: &str, payload: Value) {
        self.push(|run, seq| WireMessage::event(name, run, seq, payload));
    }

    pub fn send_record(&mut self, r: &Record) {
        self.push(|run, seq| record_event(r, run, seq));
    }

    pub fn try_command(&mut self) -> Option<Incoming> {
        self.commands.try_recv().ok()
    }

    /// Blocks for the next command; `None` once the GUI has gone.
    pub fn recv_command(&mut self) -> Option<Incoming> {
        self.commands.recv().ok()
    }

    pub fn recv_command_timeout(&mut self, t: Duration) -> Result<Incoming, RecvTimeoutError> {
        self.commands.recv_timeout(t)
    }

    /// Flushes pending events and closes the write side.
    pub fn close(mut self) -> io::Result<()> {
        self.shutdown()
    }

    fn shutdown(&mut self) -> io::Result<()> {
        self.events.take();
        match self.writer.take() {
            Some(h) => h.join().unwrap_or_else(|_| Err(io::Error::other("writer thread panicked"))),
            None => Ok(()),
        }
    }
}

impl Drop for SolverLink {
    fn drop(&mut self) {
        let _ = self.shutdown();
    }
}
