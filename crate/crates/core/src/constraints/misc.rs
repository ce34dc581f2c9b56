//! Small propagators used by the example models.

use crate::store::{PropCtx, PropResult, Propagator, VarId};

/// `a ≠ b + offset`.
#[derive(Debug, Clone)]
pub struct NotEqual {
    pub a: VarId,
    pub b: VarId,
    pub offset: i64,
}

impl Propagator for NotEqual {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        if self.a == self.b {
            if self.offset == 0 {
                return Err(ctx.fail(Some(self.a)));
            }
            return Ok(());
        }
        if let Some(x) = ctx.domain(self.a).value() {
            ctx.remove(self.b, x - self.offset)?;
        }
        if let Some(y) = ctx.domain(self.b).value() {
            ctx.remove(self.a, y + self.offset)?;
        }
        Ok(())
    }
}

/// `value = table[index]`, domain consistent on both sides.
#[derive(Debug, Clone)]
pub struct Element {
    pub index: VarId,
    pub table: Vec<i64>,
    pub value: VarId,
}

impl Propagator for Element {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        ctx.set_min(self.index, 0)?;
        ctx.set_max(self.index, self.table.len() as i64 - 1)?;
        let dead: Vec<i64> = ctx
            .domain(self.index)
            .iter()
            .filter(|&i| !ctx.domain(self.value).contains(self.table[i as usize]))
            .collect();
        for i in dead {
            ctx.remove(self.index, i)?;
        }
        let mut supported: Vec<i64> = ctx
            .domain(self.index)
            .iter()
            .map(|i| self.table[i as usize])
            .collect();
        supported.sort_unstable();
        supported.dedup();
        ctx.set_min(self.value, supported[0])?;
        ctx.set_max(self.value, *supported.last().unwrap())?;
        let dead: Vec<i64> = ctx
            .domain(self.value)
            .iter()
            .filter(|v| supported.binary_search(v).is_err())
            .collect();
        for v in dead {
            ctx.remove(self.value, v)?;
        }
        Ok(())
    }
}

/// At most `limit` of `vars` take `value`.
#[derive(Debug, Clone)]
pub struct AtMost {
    pub vars: Vec<VarId>,
    pub value: i64,
    pub limit: usize,
}

impl Propagator for AtMost {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        let taken: Vec<VarId> = self
            .vars
            .iter()
            .copied()
            .filter(|&v| ctx.domain(v).value() == Some(self.value))
            .collect();
        if taken.len() > self.limit {
            return Err(ctx.fail(taken.last().copied()));
        }
        if taken.len() == self.limit {
            for &v in &self.vars {
                if !ctx.is_bound(v) {
                    ctx.remove(v, self.value)?;
                }
            }
        }
        Ok(())
    }
}

/// Caps the objective at the store's current bound. Branch-and-bound
/// tightens that bound after every solution.
#[derive(Debug, Clone)]
pub struct ObjectiveBound {
    pub objective: VarId,
}

impl Propagator for ObjectiveBound {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        if let Some(ub) = ctx.store().objective_bound() {
            ctx.set_max(self.objective, ub)?;
        }
        Ok(())
    }
}
