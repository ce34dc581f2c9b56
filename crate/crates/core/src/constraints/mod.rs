//! The propagator library and the constraint constructors exposed to model
//! definitions.

pub mod alldiff;
pub mod linear;
pub mod misc;
pub mod resource;

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::store::{ConstraintId, ResourceId, Store, VarId};

pub use alldiff::FilterLevel;
pub use linear::Cmp;
pub use resource::{Activity, UnaryResource};

/// A constraint to post, by kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ConstraintSpec {
    AllDifferent {
        vars: Vec<VarId>,
        level: FilterLevel,
    },
    Linear {
        terms: Vec<(i64, VarId)>,
        cmp: Cmp,
        rhs: i64,
    },
    /// `a ≠ b + offset`
    Neq {
        a: VarId,
        b: VarId,
        #[serde(default)]
        offset: i64,
    },
    /// `value = table[index]`
    Element {
        index: VarId,
        table: Vec<i64>,
        value: VarId,
    },
    AtMost {
        vars: Vec<VarId>,
        value: i64,
        limit: usize,
    },
    /// Attaches the disjunctive propagator to a registered resource.
    UnaryResource {
        resource: ResourceId,
    },
    /// Caps `objective` at the store's objective bound.
    ObjectiveBound {
        objective: VarId,
    },
}

impl ConstraintSpec {
    /// `x < y`
    pub fn less(x: VarId, y: VarId) -> Self {
        ConstraintSpec::Linear {
            terms: vec![(1, x), (-1, y)],
            cmp: Cmp::Le,
            rhs: -1,
        }
    }

    pub fn default_name(&self, store: &Store) -> String {
        let names = |vs: &[VarId]| {
            let parts: Vec<&str> = vs.iter().map(|&v| store.name(v)).collect();
            if parts.len() <= 4 {
                parts.join(", ")
            } else {
                format!("{}, ..., {}", parts[0], parts[parts.len() - 1])
            }
        };
        match self {
            ConstraintSpec::AllDifferent { vars, level } => {
                format!("alldifferent[{}]({})", level.as_str(), names(vars))
            }
            ConstraintSpec::Linear { terms, cmp, rhs } => {
                linear::describe(terms, *cmp, *rhs, |v| store.name(v).to_string())
            }
            ConstraintSpec::Neq { a, b, offset } => match offset {
                0 => format!("{} != {}", store.name(*a), store.name(*b)),
                o => format!("{} != {} + {o}", store.name(*a), store.name(*b)),
            },
            ConstraintSpec::Element { index, value, .. } => {
                format!("{} = table[{}]", store.name(*value), store.name(*index))
            }
            ConstraintSpec::AtMost { vars, value, limit } => {
                format!("atmost({limit}, [{}], {value})", names(vars))
            }
            ConstraintSpec::UnaryResource { resource } => {
                format!("unary({})", store.resource(*resource).name)
            }
            ConstraintSpec::ObjectiveBound { objective } => {
                format!("{} < incumbent", store.name(*objective))
            }
        }
    }

    fn scope(&self, store: &Store) -> Vec<VarId> {
        match self {
            ConstraintSpec::AllDifferent { vars, .. } | ConstraintSpec::AtMost { vars, .. } => vars.clone(),
            ConstraintSpec::Linear { terms, .. } => terms.iter().map(|t| t.1).collect(),
            ConstraintSpec::Neq { a, b, .. } => vec![*a, *b],
            ConstraintSpec::Element { index, value, .. } => vec![*index, *value],
            ConstraintSpec::UnaryResource { resource } => store
                .resource(*resource)
                .activities
                .iter()
                .map(|a| a.start)
                .collect(),
            ConstraintSpec::ObjectiveBound { objective } => vec![*objective],
        }
    }
}

/// Posts `spec` under its default name.
pub fn post(store: &mut Store, spec: ConstraintSpec) -> ConstraintId {
    let name = spec.default_name(store);
    post_named(store, spec, name)
}

/// Posts `spec`, returning the id of the user-visible constraint.
///
/// The extended `alldifferent` additionally posts a hidden
/// domain-consistency propagator flagged as internal.
pub fn post_named(store: &mut Store, spec: ConstraintSpec, name: String) -> ConstraintId {
    let scope = spec.scope(store);
    match spec {
        ConstraintSpec::AllDifferent { vars, level } => match level {
            FilterLevel::Basic => {
                store.post_propagator(Rc::new(alldiff::Basic { vars }), name, scope, false)
            }
            FilterLevel::Bounds => {
                store.post_propagator(Rc::new(alldiff::Bounds { vars }), name, scope, false)
            }
            FilterLevel::Extended => {
                let id = store.post_propagator(
                    Rc::new(alldiff::Basic { vars: vars.clone() }),
                    name.clone(),
                    scope.clone(),
                    false,
                );
                store.post_propagator(
                    Rc::new(alldiff::Extended { vars }),
                    format!("{name} (internal)"),
                    scope,
                    true,
                );
                id
            }
        },
        ConstraintSpec::Linear { terms, cmp, rhs } => {
            store.post_propagator(Rc::new(linear::Linear { terms, cmp, rhs }), name, scope, false)
        }
        ConstraintSpec::Neq { a, b, offset } => {
            store.post_propagator(Rc::new(misc::NotEqual { a, b, offset }), name, scope, false)
        }
        ConstraintSpec::Element { index, table, value } => {
            store.post_propagator(Rc::new(misc::Element { index, table, value }), name, scope, false)
        }
        ConstraintSpec::AtMost { vars, value, limit } => {
            store.post_propagator(Rc::new(misc::AtMost { vars, value, limit }), name, scope, false)
        }
        ConstraintSpec::UnaryResource { resource } => {
            let id = store.post_propagator(Rc::new(resource::Disjunctive { resource }), name, scope, false);
            store.bind_resource_constraint(resource, id);
            id
        }
        ConstraintSpec::ObjectiveBound { objective } => {
            store.post_propagator(Rc::new(misc::ObjectiveBound { objective }), name, scope, false)
        }
    }
}

/// Registers a resource together with its disjunctive propagator.
pub fn add_unary_resource(store: &mut Store, res: UnaryResource) -> ResourceId {
    let r = store.add_resource(res);
    post(store, ConstraintSpec::UnaryResource { resource: r });
    r
}
