//! Per-node statistics and the "Christmas tree" rendering geometry.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::records::NodeStats;
use crate::search::{NodePath, SearchTree};

/// `100 · (before − after) / before`, rounded to two decimals; 0 when
/// `before` is 0.
///
/// Panics if `after > before`: propagation never grows domains.
pub fn reduction_pct(size_before: u64, size_after: u64) -> f64 {
    assert!(size_after <= size_before, "domain size grew from {size_before} to {size_after}");
    if size_before == 0 {
        return 0.0;
    }
    let pct = 100.0 * (size_before - size_after) as f64 / size_before as f64;
    (pct * 100.0).round() / 100.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusScale {
    Linear,
    Sqrt,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub scale: RadiusScale,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            r_min: 3.0,
            r_max: 24.0,
            scale: RadiusScale::Sqrt,
        }
    }
}

pub const SHADES: u8 = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeGeometry {
    pub path: NodePath,
    pub radius: f64,
    /// 0 (lightest) to 4 (darkest), from the reduction percentage in
    /// buckets of 20 points.
    pub shade: u8,
}

pub fn shade(reduction_pct: f64) -> u8 {
    ((reduction_pct / 20.0).floor().max(0.0) as u8).min(SHADES - 1)
}

/// Radius and shade per node, in node order. Nodes without statistics
/// (never visited) get the minimum radius and the lightest shade.
pub fn christmas_geometry(
    tree: &SearchTree,
    stats: &HashMap<NodePath, NodeStats>,
    cfg: &GeometryConfig,
) -> Vec<NodeGeometry> {
    let max = stats.values().map(|s| s.event_count).max().unwrap_or(0);
    tree.nodes
        .iter()
        .map(|n| {
            let st = stats.get(&n.path);
            let count = st.map_or(0, |s| s.event_count);
            let radius = if max == 0 {
                cfg.r_min
            } else {
                let ratio = count as f64 / max as f64;
                let f = match cfg.scale {
                    RadiusScale::Linear => ratio,
                    RadiusScale::Sqrt => ratio.sqrt(),
                };
                cfg.r_min + (cfg.r_max - cfg.r_min) * f
            };
            NodeGeometry {
                path: n.path.clone(),
                radius,
                shade: st.map_or(0, |s| shade(s.reduction_pct)),
            }
        })
        .collect()
}
