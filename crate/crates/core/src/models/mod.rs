//! Built-in example models and the JSON model loader.

pub mod golomb;
pub mod jobshop;
pub mod json;
pub mod pheasants;
pub mod warehouse;

use std::path::Path;

use thiserror::Error;

use crate::constraints::FilterLevel;
use crate::search::{Direction, Goal, TaskOrder};
use crate::store::{Store, VarId};

/// A posted model ready to be solved.
pub struct Model {
    pub name: String,
    pub store: Store,
    pub goal: Goal,
    pub objective: Option<VarId>,
    /// The alldifferent filter level in use, if the model has one.
    pub filter_level: Option<FilterLevel>,
    /// The ranking order in use, for scheduling models.
    pub order: Option<TaskOrder>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("name", &self.name)
            .field("store", &self.store)
            .field("objective", &self.objective)
            .finish_non_exhaustive()
    }
}

/// Knobs shared by the built-in models. Each model reads the ones it has.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    pub filter_level: FilterLevel,
    pub order: TaskOrder,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            filter_level: FilterLevel::Basic,
            order: TaskOrder::ByEarliestStart(Direction::Increasing),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown model `{0}`; try `cpscope list-models`")]
    Unknown(String),
    #[error("unsupported {0}")]
    Unsupported(String),
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Built-in model names with a one-line description.
pub fn list() -> Vec<(String, &'static str)> {
    let mut out: Vec<(String, &'static str)> = golomb::SIZES
        .map(|n| (format!("golomb{n}"), "Golomb ruler, minimize the last mark"))
        .collect();
    out.push(("ft06".into(), "Fisher-Thompson 6x6 job-shop, minimize the makespan"));
    out.push(("pheasants".into(), "pheasants and rabbits, 20 heads and 56 legs"));
    out.push(("warehouse".into(), "warehouse location with capacities, n-ary search"));
    out
}

pub fn builtin(name: &str, cfg: &ModelConfig) -> Result<Model, ModelError> {
    let key = name.to_ascii_lowercase().replace(['(', ')', '-', '_'], "");
    if let Some(n) = key.strip_prefix("golomb") {
        let n: usize = n.parse().map_err(|_| ModelError::Unknown(name.into()))?;
        return golomb::build(n, cfg.filter_level);
    }
    match key.as_str() {
        "ft06" | "jobshop6" => Ok(jobshop::build("ft06", &jobshop::JobShop::ft06(), cfg.order)),
        "pheasants" | "pheasantsrabbits" | "pheasantsandrabbits" => Ok(pheasants::build()),
        "warehouse" => Ok(warehouse::build()),
        _ => Err(ModelError::Unknown(name.into())),
    }
}

/// A built-in name, or a path to a JSON model file.
pub fn load(reference: &str, cfg: &ModelConfig) -> Result<Model, ModelError> {
    let path = Path::new(reference);
    if reference.ends_with(".json") || path.is_file() {
        return json::load_file(path, cfg);
    }
    builtin(reference, cfg)
}
