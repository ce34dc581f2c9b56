use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Position of a node as the child indices taken from the root.
///
/// Paths are stable across deterministic re-runs, which is what lets
/// breakpoints survive a restart.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodePath(pub Vec<u32>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, i: u32) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        NodePath(v)
    }

    pub fn parent(&self) -> Option<Self> {
        let (_, rest) = self.0.split_last()?;
        Some(NodePath(rest.to_vec()))
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn starts_with(&self, prefix: &NodePath) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for NodePath {
    type Err = String;

    /// Accepts `[0,1]`, `0,1`, `0.1`, `0/1`, and `[]` or empty for the root.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
        if inner.is_empty() {
            return Ok(NodePath::root());
        }
        inner
            .split([',', '.', '/'])
            .map(|p| p.trim().parse::<u32>().map_err(|_| format!("bad node path `{s}`")))
            .collect::<Result<Vec<_>, _>>()
            .map(NodePath)
    }
}
