//! Turns search and propagation callbacks into trace records, per-node
//! statistics and a replayable trace file.

pub mod file;
pub mod records;
pub mod stats;
pub mod tracer;

pub use file::{TraceError, TraceFile};
pub use records::{
    FrameOp, FrameRecord, Header, NodeEvent, NodeRecord, NodeStats, PropRow, Record, Summary, VarMeta,
    FORMAT_VERSION,
};
pub use stats::{christmas_geometry, reduction_pct, GeometryConfig, NodeGeometry, RadiusScale};
pub use tracer::{RunInfo, Tracer, TracerConfig};
