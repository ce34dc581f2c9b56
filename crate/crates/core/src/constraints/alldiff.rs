//! `alldifferent` at three filtering strengths.
//!
//! * [`Basic`]: value consistency. Values of assigned variables are removed
//!   from the other domains.
//! * [`Bounds`]: value consistency plus bounds consistency on the interval
//!   hulls, computed with a Hall-interval sweep over bounds sorted by max.
//! * [`Extended`]: [`Basic`] plus a hidden propagator that enforces domain
//!   consistency with a maximum matching and strongly connected components
//!   of the residual value graph.
//!
//! Every propagator loops to its own fixpoint and emits removals in
//! ascending variable id, then ascending value.

use serde::{Deserialize, Serialize};

use crate::store::{PropCtx, PropResult, Propagator, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterLevel {
    Basic,
    Bounds,
    Extended,
}

impl FilterLevel {
    pub const ALL: [FilterLevel; 3] = [FilterLevel::Basic, FilterLevel::Bounds, FilterLevel::Extended];

    pub fn as_str(self) -> &'static str {
        match self {
            FilterLevel::Basic => "basic",
            FilterLevel::Bounds => "bounds",
            FilterLevel::Extended => "extended",
        }
    }
}

impl std::str::FromStr for FilterLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(FilterLevel::Basic),
            "bounds" | "medium" | "intermediate" => Ok(FilterLevel::Bounds),
            "extended" => Ok(FilterLevel::Extended),
            _ => Err(format!("unknown filter level `{s}` (expected basic, bounds or extended)")),
        }
    }
}

/// One pass of assigned-value deletion. Returns whether anything changed.
fn remove_assigned(vars: &[VarId], ctx: &mut PropCtx<'_>) -> Result<bool, crate::store::Failure> {
    let mut assigned: Vec<(i64, VarId)> = vars
        .iter()
        .filter_map(|&v| ctx.domain(v).value().map(|x| (x, v)))
        .collect();
    if assigned.is_empty() {
        return Ok(false);
    }
    assigned.sort_unstable();
    for w in assigned.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(ctx.fail(Some(w[1].1)));
        }
    }
    let mut order: Vec<VarId> = vars.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut changed = false;
    for v in order {
        for &(x, owner) in &assigned {
            if owner != v && ctx.domain(v).contains(x) {
                ctx.remove(v, x)?;
                changed = true;
            }
        }
    }
    Ok(changed)
}

#[derive(Debug, Clone)]
pub struct Basic {
    pub vars: Vec<VarId>,
}

impl Propagator for Basic {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        while remove_assigned(&self.vars, ctx)? {}
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Bounds {
    pub vars: Vec<VarId>,
}

/// New bounds implied by Hall intervals over the hulls `lo[i]..=hi[i]`.
///
/// Returns `Err(i)` with a variable index when some interval holds more
/// variables than values.
pub fn hall_sweep(lo: &[i64], hi: &[i64]) -> Result<(Vec<i64>, Vec<i64>), usize> {
    let n = lo.len();
    let mut by_max: Vec<usize> = (0..n).collect();
    by_max.sort_by_key(|&i| (hi[i], i));
    let mut starts: Vec<i64> = lo.to_vec();
    starts.sort_unstable();
    starts.dedup();
    let mut new_lo = lo.to_vec();
    let mut new_hi = hi.to_vec();
    for &a in &starts {
        let mut count = 0i64;
        for &i in &by_max {
            if lo[i] < a {
                continue;
            }
            count += 1;
            let b = hi[i];
            let capacity = b - a + 1;
            if count > capacity {
                return Err(i);
            }
            if count == capacity {
                for j in 0..n {
                    if lo[j] >= a && hi[j] <= b {
                        continue;
                    }
                    if lo[j] >= a && lo[j] <= b {
                        new_lo[j] = new_lo[j].max(b + 1);
                    }
                    if hi[j] >= a && hi[j] <= b {
                        new_hi[j] = new_hi[j].min(a - 1);
                    }
                }
            }
        }
    }
    Ok((new_lo, new_hi))
}

impl Propagator for Bounds {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        loop {
            let mut changed = remove_assigned(&self.vars, ctx)?;
            let lo: Vec<i64> = self.vars.iter().map(|&v| ctx.min(v)).collect();
            let hi: Vec<i64> = self.vars.iter().map(|&v| ctx.max(v)).collect();
            let (new_lo, new_hi) =
                hall_sweep(&lo, &hi).map_err(|i| ctx.fail(Some(self.vars[i])))?;
            let mut order: Vec<usize> = (0..self.vars.len()).collect();
            order.sort_by_key(|&i| self.vars[i]);
            for i in order {
                let v = self.vars[i];
                if new_lo[i] > lo[i] {
                    changed |= ctx.set_min(v, new_lo[i])?;
                }
                if new_hi[i] < hi[i] {
                    changed |= ctx.set_max(v, new_hi[i])?;
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }
}

/// The hidden domain-consistency propagator posted by the extended level.
#[derive(Debug, Clone)]
pub struct Extended {
    pub vars: Vec<VarId>,
}

const FREE: usize = usize::MAX;

struct ValueGraph {
    values: Vec<i64>,
    adj: Vec<Vec<usize>>,
    var_match: Vec<usize>,
    val_match: Vec<usize>,
}

impl ValueGraph {
    fn build(ctx: &PropCtx<'_>, vars: &[VarId]) -> Self {
        let mut values: Vec<i64> = vars.iter().flat_map(|&v| ctx.domain(v).iter()).collect();
        values.sort_unstable();
        values.dedup();
        let adj = vars
            .iter()
            .map(|&v| {
                ctx.domain(v)
                    .iter()
                    .map(|x| values.binary_search(&x).unwrap())
                    .collect()
            })
            .collect();
        let m = values.len();
        ValueGraph {
            values,
            adj,
            var_match: vec![FREE; vars.len()],
            val_match: vec![FREE; m],
        }
    }

    fn augment(&mut self, x: usize, seen: &mut [bool]) -> bool {
        for k in 0..self.adj[x].len() {
            let v = self.adj[x][k];
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if self.val_match[v] == FREE || self.augment(self.val_match[v], seen) {
                self.var_match[x] = v;
                self.val_match[v] = x;
                return true;
            }
        }
        false
    }

    /// Maximum matching; returns the first unmatched variable if it does
    /// not cover every variable.
    fn match_all(&mut self) -> Result<(), usize> {
        let n = self.adj.len();
        for x in 0..n {
            if let Some(&v) = self.adj[x].iter().find(|&&v| self.val_match[v] == FREE) {
                self.var_match[x] = v;
                self.val_match[v] = x;
            }
        }
        let mut seen = vec![false; self.values.len()];
        for x in 0..n {
            if self.var_match[x] == FREE {
                seen.iter_mut().for_each(|s| *s = false);
                if !self.augment(x, &mut seen) {
                    return Err(x);
                }
            }
        }
        Ok(())
    }

    /// SCC ids of the oriented residual graph. Nodes: variables, then
    /// values, then a sink. Matched edges point var→value, free edges
    /// value→var; matched values point to the sink, which points to every
    /// unmatched value.
    fn components(&self) -> Vec<usize> {
        let n = self.adj.len();
        let m = self.values.len();
        let sink = n + m;
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n + m + 1];
        for x in 0..n {
            for &v in &self.adj[x] {
                if self.var_match[x] == v {
                    out[x].push(n + v);
                } else {
                    out[n + v].push(x);
                }
            }
        }
        for v in 0..m {
            if self.val_match[v] == FREE {
                out[sink].push(n + v);
            } else {
                out[n + v].push(sink);
            }
        }
        tarjan(&out)
    }
}

fn tarjan(out: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = out.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next = 0;
    let mut ncomp = 0;
    // (node, next edge position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&(u, pos)) = call.last() {
            if pos == 0 && index[u] == UNSEEN {
                index[u] = next;
                low[u] = next;
                next += 1;
                stack.push(u);
                on_stack[u] = true;
            }
            if pos < out[u].len() {
                let w = out[u][pos];
                call.last_mut().unwrap().1 += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[u] = low[u].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    if w == u {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    comp
}

impl Propagator for Extended {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        let mut g = ValueGraph::build(ctx, &self.vars);
        g.match_all().map_err(|x| ctx.fail(Some(self.vars[x])))?;
        let comp = g.components();
        let n = self.vars.len();
        let mut removals: Vec<(VarId, i64)> = Vec::new();
        for x in 0..n {
            for &v in &g.adj[x] {
                if g.var_match[x] != v && comp[x] != comp[n + v] {
                    removals.push((self.vars[x], g.values[v]));
                }
            }
        }
        removals.sort_unstable();
        for (var, value) in removals {
            ctx.remove(var, value)?;
        }
        Ok(())
    }
}
