//! Finite integer domains stored as an interval with an explicit set of holes.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A non-empty finite set of integers.
///
/// The set is `min..=max` minus `holes`. Holes are kept sorted and strictly
/// inside the bounds, so `min` and `max` are always members.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    min: i64,
    max: i64,
    holes: Vec<i64>,
}

/// A domain-narrowing request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op", content = "value")]
pub enum Reduction {
    SetValue(i64),
    SetMin(i64),
    SetMax(i64),
    RemoveValue(i64),
}

/// Result of applying a [`Reduction`] to a domain, without mutating it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Narrowed {
    Unchanged,
    Empty,
    To(Domain),
}

impl Domain {
    pub fn interval(min: i64, max: i64) -> Option<Self> {
        (min <= max).then(|| Domain {
            min,
            max,
            holes: Vec::new(),
        })
    }

    pub fn singleton(v: i64) -> Self {
        Domain {
            min: v,
            max: v,
            holes: Vec::new(),
        }
    }

    /// Builds a domain from arbitrary values; `None` when the iterator is empty.
    pub fn from_values<I: IntoIterator<Item = i64>>(values: I) -> Option<Self> {
        let mut vals: Vec<i64> = values.into_iter().collect();
        vals.sort_unstable();
        vals.dedup();
        let (&min, &max) = (vals.first()?, vals.last()?);
        let mut holes = Vec::new();
        let mut next = min;
        for &v in &vals {
            while next < v {
                holes.push(next);
                next += 1;
            }
            next = v + 1;
        }
        Some(Domain { min, max, holes })
    }

    pub fn min(&self) -> i64 {
        self.min
    }

    pub fn max(&self) -> i64 {
        self.max
    }

    pub fn size(&self) -> u64 {
        (self.max - self.min + 1) as u64 - self.holes.len() as u64
    }

    pub fn is_bound(&self) -> bool {
        self.min == self.max
    }

    pub fn value(&self) -> Option<i64> {
        self.is_bound().then_some(self.min)
    }

    pub fn has_holes(&self) -> bool {
        !self.holes.is_empty()
    }

    pub fn contains(&self, v: i64) -> bool {
        v >= self.min && v <= self.max && self.holes.binary_search(&v).is_err()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        let mut holes = self.holes.iter().peekable();
        (self.min..=self.max).filter(move |v| {
            while let Some(&&h) = holes.peek() {
                if h < *v {
                    holes.next();
                } else {
                    break;
                }
            }
            holes.peek().is_none_or(|&&h| h != *v)
        })
    }

    /// Smallest member `>= v`, if any.
    pub fn next_at_or_above(&self, v: i64) -> Option<i64> {
        if v > self.max {
            return None;
        }
        let mut c = v.max(self.min);
        let start = self.holes.partition_point(|&h| h < c);
        for &h in &self.holes[start..] {
            if h == c {
                c += 1;
            } else {
                break;
            }
        }
        Some(c)
    }

    /// Largest member `<= v`, if any.
    pub fn prev_at_or_below(&self, v: i64) -> Option<i64> {
        if v < self.min {
            return None;
        }
        let mut c = v.min(self.max);
        let end = self.holes.partition_point(|&h| h <= c);
        for &h in self.holes[..end].iter().rev() {
            if h == c {
                c -= 1;
            } else {
                break;
            }
        }
        Some(c)
    }

    /// Computes the effect of `r` on this domain.
    pub fn narrow(&self, r: Reduction) -> Narrowed {
        match r {
            Reduction::SetValue(v) => {
                if !self.contains(v) {
                    Narrowed::Empty
                } else if self.is_bound() {
                    Narrowed::Unchanged
                } else {
                    Narrowed::To(Domain::singleton(v))
                }
            }
            Reduction::SetMin(v) => {
                if v <= self.min {
                    return Narrowed::Unchanged;
                }
                match self.next_at_or_above(v) {
                    None => Narrowed::Empty,
                    Some(m) => {
                        let holes = self.holes[self.holes.partition_point(|&h| h <= m)..].to_vec();
                        Narrowed::To(Domain {
                            min: m,
                            max: self.max,
                            holes,
                        })
                    }
                }
            }
            Reduction::SetMax(v) => {
                if v >= self.max {
                    return Narrowed::Unchanged;
                }
                match self.prev_at_or_below(v) {
                    None => Narrowed::Empty,
                    Some(m) => {
                        let holes = self.holes[..self.holes.partition_point(|&h| h < m)].to_vec();
                        Narrowed::To(Domain {
                            min: self.min,
                            max: m,
                            holes,
                        })
                    }
                }
            }
            Reduction::RemoveValue(v) => {
                if !self.contains(v) {
                    Narrowed::Unchanged
                } else if self.is_bound() {
                    Narrowed::Empty
                } else if v == self.min {
                    self.narrow(Reduction::SetMin(v + 1))
                } else if v == self.max {
                    self.narrow(Reduction::SetMax(v - 1))
                } else {
                    let mut holes = self.holes.clone();
                    let at = holes.partition_point(|&h| h < v);
                    holes.insert(at, v);
                    Narrowed::To(Domain {
                        min: self.min,
                        max: self.max,
                        holes,
                    })
                }
            }
        }
    }

    /// `true` when every member of `self` is a member of `other`.
    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.min >= other.min && self.max <= other.max && self.iter().all(|v| other.contains(v))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bound() {
            write!(f, "{}", self.min)
        } else if self.holes.is_empty() {
            write!(f, "{}..{}", self.min, self.max)
        } else if self.size() <= 12 {
            let vals: Vec<String> = self.iter().map(|v| v.to_string()).collect();
            write!(f, "{{{}}}", vals.join(","))
        } else {
            let holes: Vec<String> = self.holes.iter().map(|v| v.to_string()).collect();
            write!(f, "{}..{}\\{{{}}}", self.min, self.max, holes.join(","))
        }
    }
}
