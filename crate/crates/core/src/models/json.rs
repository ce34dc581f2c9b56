//! Models described in JSON. See `docs/model-schema.md`.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use crate::constraints::{self, Activity, Cmp, ConstraintSpec, FilterLevel, UnaryResource};
use crate::domain::Domain;
use crate::search::{Branching, Goal, TaskOrder};
use crate::store::{ResourceId, Store, VarInfo, VarId};

use super::{Model, ModelConfig, ModelError};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub variables: Vec<VarSpec>,
    #[serde(default)]
    pub constraints: Vec<ConstraintDef>,
    pub goal: Vec<GoalDef>,
    #[serde(default)]
    pub objective: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarSpec {
    pub name: String,
    #[serde(default)]
    pub min: Option<i64>,
    #[serde(default)]
    pub max: Option<i64>,
    #[serde(default)]
    pub values: Option<Vec<i64>>,
    #[serde(default = "yes")]
    pub decision: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintDef {
    #[serde(alias = "all_different")]
    Alldifferent {
        vars: Vec<String>,
        #[serde(default)]
        level: Option<FilterLevel>,
    },
    Linear {
        terms: Vec<(i64, String)>,
        cmp: Cmp,
        rhs: i64,
    },
    Neq {
        a: String,
        b: String,
        #[serde(default)]
        offset: i64,
    },
    UnaryResource {
        name: String,
        activities: Vec<ActivityDef>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivityDef {
    pub start: String,
    pub duration: i64,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GoalDef {
    Label {
        vars: Vec<String>,
        #[serde(default = "binary")]
        branching: Branching,
    },
    /// Ranks every declared resource.
    RankAll {
        #[serde(default)]
        order: Option<String>,
    },
    FixAllMin {
        vars: Vec<String>,
    },
}

fn binary() -> Branching {
    Branching::Binary
}

pub fn load_file(path: &Path, cfg: &ModelConfig) -> Result<Model, ModelError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: shown.clone(),
        source,
    })?;
    let spec: ModelSpec = serde_json::from_str(&text).map_err(|source| ModelError::Json { path: shown, source })?;
    build(&spec, cfg)
}

pub fn parse(text: &str, cfg: &ModelConfig) -> Result<Model, ModelError> {
    let spec: ModelSpec = serde_json::from_str(text).map_err(|source| ModelError::Json {
        path: "<inline>".into(),
        source,
    })?;
    build(&spec, cfg)
}

/// Posts `spec`. A constraint without an explicit filter level uses
/// `cfg.filter_level`.
pub fn build(spec: &ModelSpec, cfg: &ModelConfig) -> Result<Model, ModelError> {
    let invalid = |m: String| ModelError::Invalid(m);
    let mut store = Store::new();
    let mut by_name: HashMap<&str, VarId> = HashMap::new();
    for v in &spec.variables {
        let domain = match (&v.values, v.min, v.max) {
            (Some(vals), None, None) => Domain::from_values(vals.iter().copied()),
            (None, Some(lo), Some(hi)) => Domain::interval(lo, hi),
            _ => return Err(invalid(format!("variable `{}` needs either min and max, or values", v.name))),
        }
        .ok_or_else(|| invalid(format!("variable `{}` has an empty domain", v.name)))?;
        if by_name.contains_key(v.name.as_str()) {
            return Err(invalid(format!("duplicate variable `{}`", v.name)));
        }
        let info = VarInfo {
            name: v.name.clone(),
            decision: v.decision,
            value_labels: Vec::new(),
        };
        by_name.insert(&v.name, store.new_var_with(info, domain));
    }
    let var = |n: &str| {
        by_name
            .get(n)
            .copied()
            .ok_or_else(|| invalid(format!("unknown variable `{n}`")))
    };
    let vars = |ns: &[String]| ns.iter().map(|n| var(n)).collect::<Result<Vec<_>, _>>();

    let mut level_used = None;
    let mut resources: Vec<ResourceId> = Vec::new();
    for c in &spec.constraints {
        let posted = match c {
            ConstraintDef::Alldifferent { vars: vs, level } => {
                let level = level.unwrap_or(cfg.filter_level);
                level_used = Some(level);
                ConstraintSpec::AllDifferent { vars: vars(vs)?, level }
            }
            ConstraintDef::Linear { terms, cmp, rhs } => ConstraintSpec::Linear {
                terms: terms
                    .iter()
                    .map(|(k, n)| var(n).map(|v| (*k, v)))
                    .collect::<Result<_, _>>()?,
                cmp: *cmp,
                rhs: *rhs,
            },
            ConstraintDef::Neq { a, b, offset } => ConstraintSpec::Neq {
                a: var(a)?,
                b: var(b)?,
                offset: *offset,
            },
            ConstraintDef::UnaryResource { name, activities } => {
                if activities.len() > 64 {
                    return Err(invalid(format!("resource `{name}` has more than 64 activities")));
                }
                let acts = activities
                    .iter()
                    .map(|a| {
                        Ok(Activity {
                            start: var(&a.start)?,
                            duration: a.duration,
                            label: a.label.clone().unwrap_or_else(|| a.start.clone()),
                        })
                    })
                    .collect::<Result<Vec<_>, ModelError>>()?;
                let r = constraints::add_unary_resource(
                    &mut store,
                    UnaryResource {
                        name: name.clone(),
                        activities: acts,
                    },
                );
                resources.push(r);
                continue;
            }
        };
        constraints::post(&mut store, posted);
    }

    let mut order_used = None;
    let mut goals = Vec::new();
    for g in &spec.goal {
        goals.push(match g {
            GoalDef::Label { vars: vs, branching } => Goal::label(vars(vs)?, *branching),
            GoalDef::RankAll { order } => {
                let order = match order {
                    Some(s) => s.parse::<TaskOrder>().map_err(invalid)?,
                    None => cfg.order,
                };
                order_used = Some(order);
                Goal::rank_all(resources.clone(), order)
            }
            GoalDef::FixAllMin { vars: vs } => Goal::FixAllMin(vars(vs)?.into()),
        });
    }
    let objective = spec.objective.as_deref().map(var).transpose()?;

    Ok(Model {
        name: spec.name.clone(),
        store,
        goal: Goal::Seq(goals),
        objective,
        filter_level: level_used,
        order: order_used,
    })
}
