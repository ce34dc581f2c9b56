//! Bounds-consistent linear constraints `Σ cᵢ·xᵢ (=|≤|≥) k`.

use serde::{Deserialize, Serialize};

use crate::store::{Failure, PropCtx, PropResult, Propagator, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Eq => "=",
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
        }
    }
}

pub(crate) fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if a % b != 0 && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if a % b != 0 && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

#[derive(Debug, Clone)]
pub struct Linear {
    pub terms: Vec<(i64, VarId)>,
    pub cmp: Cmp,
    pub rhs: i64,
}

impl Linear {
    /// Least and greatest value of `c·v`.
    fn term_range(ctx: &PropCtx<'_>, c: i64, v: VarId) -> (i64, i64) {
        let (a, b) = (c * ctx.min(v), c * ctx.max(v));
        (a.min(b), a.max(b))
    }

    /// One pass over the terms. Both bounds of a term are derived before
    /// either is applied, so a window closing on one value is a single
    /// assignment rather than two bound moves.
    fn pass(&self, ctx: &mut PropCtx<'_>) -> Result<bool, Failure> {
        let ranges: Vec<(i64, i64)> = self.terms.iter().map(|&(c, v)| Self::term_range(ctx, c, v)).collect();
        let sum_min: i64 = ranges.iter().map(|r| r.0).sum();
        let sum_max: i64 = ranges.iter().map(|r| r.1).sum();
        let upper = matches!(self.cmp, Cmp::Le | Cmp::Eq);
        let lower = matches!(self.cmp, Cmp::Ge | Cmp::Eq);
        if (upper && sum_min > self.rhs) || (lower && sum_max < self.rhs) {
            return Err(ctx.fail(self.terms.first().map(|t| t.1)));
        }
        let mut changed = false;
        for (&(c, v), &(tmin, tmax)) in self.terms.iter().zip(&ranges) {
            if c == 0 {
                continue;
            }
            // Window for c·v given the other terms.
            let hi_cv = if upper { self.rhs - (sum_min - tmin) } else { i64::MAX / 4 };
            let lo_cv = if lower { self.rhs - (sum_max - tmax) } else { i64::MIN / 4 };
            let (lo, hi) = if c > 0 {
                (ceil_div(lo_cv, c), floor_div(hi_cv, c))
            } else {
                (ceil_div(hi_cv, c), floor_div(lo_cv, c))
            };
            let (lo, hi) = (lo.max(ctx.min(v)), hi.min(ctx.max(v)));
            if lo > hi {
                return Err(ctx.fail(Some(v)));
            }
            if lo == hi && !ctx.is_bound(v) {
                changed |= ctx.set_value(v, lo)?;
                continue;
            }
            changed |= ctx.set_min(v, lo)?;
            changed |= ctx.set_max(v, hi)?;
        }
        Ok(changed)
    }
}

impl Propagator for Linear {
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        while self.pass(ctx)? {}
        Ok(())
    }
}

pub fn describe(terms: &[(i64, VarId)], cmp: Cmp, rhs: i64, name: impl Fn(VarId) -> String) -> String {
    let mut s = String::new();
    for (i, &(c, v)) in terms.iter().enumerate() {
        let mag = c.abs();
        if i == 0 {
            if c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0 { " - " } else { " + " });
        }
        if mag != 1 {
            s.push_str(&format!("{mag}*"));
        }
        s.push_str(&name(v));
    }
    if terms.is_empty() {
        s.push('0');
    }
    format!("{s} {} {rhs}", cmp.symbol())
}
