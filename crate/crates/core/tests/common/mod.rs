//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the solver's propagators; each oracle works from first principles
//! on plain sets.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;

use cpscope::constraints::{self, ConstraintSpec, FilterLevel};
use cpscope::event::NullListener;
use cpscope::{Domain, Propagation, Store};

pub type Doms = Vec<BTreeSet<i64>>;

/// Calls `f` on every all-different assignment drawn from `doms`.
fn each_assignment(doms: &[BTreeSet<i64>], f: &mut impl FnMut(&[i64])) {
    fn go(doms: &[BTreeSet<i64>], cur: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
        if cur.len() == doms.len() {
            f(cur);
            return;
        }
        for &v in &doms[cur.len()] {
            if !cur.contains(&v) {
                cur.push(v);
                go(doms, cur, f);
                cur.pop();
            }
        }
    }
    go(doms, &mut Vec::new(), f)
}

/// Values of each variable that take part in some all-different solution.
pub fn supports(doms: &[BTreeSet<i64>]) -> Doms {
    let mut out = vec![BTreeSet::new(); doms.len()];
    each_assignment(doms, &mut |a| {
        for (i, &v) in a.iter().enumerate() {
            out[i].insert(v);
        }
    });
    out
}

fn any_empty(d: &[BTreeSet<i64>]) -> bool {
    d.iter().any(BTreeSet::is_empty)
}

/// Repeatedly deletes assigned values from the other domains. `None` when
/// two variables share a value or a domain empties.
pub fn basic_oracle(doms: &[BTreeSet<i64>]) -> Option<Doms> {
    let mut d = doms.to_vec();
    loop {
        let fixed: Vec<(usize, i64)> = d
            .iter()
            .enumerate()
            .filter(|(_, s)| s.len() == 1)
            .map(|(i, s)| (i, *s.first().unwrap()))
            .collect();
        for (a, &(i, x)) in fixed.iter().enumerate() {
            if fixed[a + 1..].iter().any(|&(j, y)| j != i && y == x) {
                return None;
            }
        }
        let mut changed = false;
        for &(i, x) in &fixed {
            for (j, s) in d.iter_mut().enumerate() {
                if j != i && s.remove(&x) {
                    changed = true;
                }
            }
        }
        if any_empty(&d) {
            return None;
        }
        if !changed {
            return Some(d);
        }
    }
}

/// Domain consistency: the exact supported-value sets.
pub fn extended_oracle(doms: &[BTreeSet<i64>]) -> Option<Doms> {
    let s = supports(doms);
    (!any_empty(&s)).then_some(s)
}

/// Bounds consistency over interval hulls, interleaved with assigned-value
/// deletion: each variable keeps the values of its domain that lie between
/// the least and greatest value it can take when every domain is relaxed to
/// its hull. Iterated to a fixpoint.
pub fn bounds_oracle(doms: &[BTreeSet<i64>]) -> Option<Doms> {
    let mut d = doms.to_vec();
    loop {
        d = basic_oracle(&d)?;
        let hulls: Doms = d
            .iter()
            .map(|s| (*s.first().unwrap()..=*s.last().unwrap()).collect())
            .collect();
        let sup = supports(&hulls);
        let mut changed = false;
        for (i, s) in d.iter_mut().enumerate() {
            let (Some(&lo), Some(&hi)) = (sup[i].first(), sup[i].last()) else {
                return None;
            };
            let before = s.len();
            s.retain(|&v| v >= lo && v <= hi);
            changed |= s.len() != before;
        }
        if any_empty(&d) {
            return None;
        }
        if !changed {
            return Some(d);
        }
    }
}

pub fn oracle(level: FilterLevel, doms: &[BTreeSet<i64>]) -> Option<Doms> {
    match level {
        FilterLevel::Basic => basic_oracle(doms),
        FilterLevel::Bounds => bounds_oracle(doms),
        FilterLevel::Extended => extended_oracle(doms),
    }
}

pub fn store_with(doms: &[BTreeSet<i64>]) -> (Store, Vec<cpscope::VarId>) {
    let mut st = Store::new();
    let vars = doms
        .iter()
        .enumerate()
        .map(|(i, s)| st.new_var(format!("x[{i}]"), Domain::from_values(s.iter().copied()).unwrap()))
        .collect();
    (st, vars)
}

pub fn domain_set(d: &Domain) -> BTreeSet<i64> {
    d.iter().collect()
}

/// Posts one alldifferent at `level` and propagates. `None` on failure.
pub fn solver_fixpoint(level: FilterLevel, doms: &[BTreeSet<i64>]) -> Option<Doms> {
    let (mut st, vars) = store_with(doms);
    constraints::post(
        &mut st,
        ConstraintSpec::AllDifferent {
            vars: vars.clone(),
            level,
        },
    );
    match st.propagate(&mut NullListener) {
        Propagation::Failed(_) => None,
        Propagation::Fixpoint => Some(vars.iter().map(|&v| domain_set(st.domain(v))).collect()),
    }
}

/// A random instance with 2 to 6 variables over values in 0..=9. Domains
/// are windows with random holes, so tight and loose instances both occur.
pub fn random_instance(rng: &mut impl Rng) -> Doms {
    let n = rng.gen_range(2..=6);
    (0..n)
        .map(|_| {
            let lo = rng.gen_range(0..=9);
            let width = rng.gen_range(0..=5);
            let hi = (lo + width).min(9);
            let mut s: BTreeSet<i64> = (lo..=hi).filter(|_| rng.gen_bool(0.75)).collect();
            if s.is_empty() {
                s.insert(lo);
            }
            s
        })
        .collect()
}

/// Shortest Golomb ruler with `n` marks, by plain enumeration of mark sets
/// for increasing lengths.
pub fn golomb_oracle(n: usize) -> i64 {
    fn extend(marks: &mut Vec<i64>, diffs: &mut Vec<bool>, n: usize, len: i64) -> bool {
        if marks.len() == n - 1 {
            // Last mark sits at `len`.
            let new: Vec<i64> = marks.iter().map(|&m| len - m).collect();
            return new.iter().all(|&d| !diffs[d as usize]);
        }
        let start = marks.last().unwrap() + 1;
        for m in start..len {
            let new: Vec<i64> = marks.iter().map(|&p| m - p).collect();
            if new.iter().any(|&d| diffs[d as usize]) {
                continue;
            }
            new.iter().for_each(|&d| diffs[d as usize] = true);
            marks.push(m);
            let ok = extend(marks, diffs, n, len);
            marks.pop();
            new.iter().for_each(|&d| diffs[d as usize] = false);
            if ok {
                return true;
            }
        }
        false
    }
    assert!(n >= 2);
    (1..)
        .find(|&len| {
            let mut diffs = vec![false; len as usize + 1];
            extend(&mut vec![0], &mut diffs, n, len)
        })
        .unwrap()
}

/// Whether `marks` form a Golomb ruler: all pairwise differences distinct.
pub fn is_golomb(marks: &[i64]) -> bool {
    let mut seen = BTreeSet::new();
    for i in 0..marks.len() {
        for j in i + 1..marks.len() {
            if !seen.insert(marks[j] - marks[i]) {
                return false;
            }
        }
    }
    true
}

pub struct Shop {
    /// Per job, the (machine, duration) operations in order.
    pub jobs: Vec<Vec<(usize, i64)>>,
    pub machines: usize,
}

/// Exact job-shop makespan by depth-first branch and bound over active
/// schedules (Giffler-Thompson branching), lower bound from the remaining
/// work on each machine and in each job.
pub fn jobshop_oracle(shop: &Shop) -> i64 {
    struct S<'a> {
        shop: &'a Shop,
        best: i64,
    }
    fn lower_bound(s: &S, next: &[usize], job_ready: &[i64], mach_ready: &[i64]) -> i64 {
        let mut lb = 0;
        let mut mach_left = vec![0i64; s.shop.machines];
        let mut mach_first = mach_ready.to_vec();
        let mut earliest = vec![i64::MAX; s.shop.machines];
        for (j, job) in s.shop.jobs.iter().enumerate() {
            let mut t = job_ready[j];
            for &(m, d) in &job[next[j]..] {
                earliest[m] = earliest[m].min(t);
                t += d;
                mach_left[m] += d;
            }
            lb = lb.max(t);
        }
        for m in 0..s.shop.machines {
            if mach_left[m] > 0 {
                mach_first[m] = mach_first[m].max(earliest[m]);
                lb = lb.max(mach_first[m] + mach_left[m]);
            }
        }
        lb
    }
    fn go(s: &mut S, next: &mut Vec<usize>, job_ready: &mut Vec<i64>, mach_ready: &mut Vec<i64>) {
        let jobs = &s.shop.jobs;
        let pending: Vec<usize> = (0..jobs.len()).filter(|&j| next[j] < jobs[j].len()).collect();
        if pending.is_empty() {
            s.best = s.best.min(*job_ready.iter().max().unwrap());
            return;
        }
        if lower_bound(s, next, job_ready, mach_ready) >= s.best {
            return;
        }
        // Operation with the earliest completion, and its machine.
        let (mut c_star, mut m_star) = (i64::MAX, 0);
        for &j in &pending {
            let (m, d) = jobs[j][next[j]];
            let c = job_ready[j].max(mach_ready[m]) + d;
            if c < c_star {
                c_star = c;
                m_star = m;
            }
        }
        let conflict: Vec<usize> = pending
            .iter()
            .copied()
            .filter(|&j| {
                let (m, _) = jobs[j][next[j]];
                m == m_star && job_ready[j].max(mach_ready[m]) < c_star
            })
            .collect();
        for j in conflict {
            let (m, d) = jobs[j][next[j]];
            let start = job_ready[j].max(mach_ready[m]);
            let saved = (job_ready[j], mach_ready[m]);
            job_ready[j] = start + d;
            mach_ready[m] = start + d;
            next[j] += 1;
            go(s, next, job_ready, mach_ready);
            next[j] -= 1;
            job_ready[j] = saved.0;
            mach_ready[m] = saved.1;
        }
    }
    let mut s = S { shop, best: i64::MAX };
    let n = shop.jobs.len();
    go(&mut s, &mut vec![0; n], &mut vec![0; n], &mut vec![0; shop.machines]);
    s.best
}

/// Reads the fixture in the plain text layout: `#` comments, a
/// `jobs machines` line, then one line of machine/duration pairs per job.
pub fn read_shop(text: &str) -> Shop {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let dims: Vec<usize> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    let jobs = lines
        .take(dims[0])
        .map(|l| {
            let v: Vec<i64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            v.chunks(2).map(|p| (p[0] as usize, p[1])).collect()
        })
        .collect();
    Shop { jobs, machines: dims[1] }
}

pub const FT06: &str = include_str!("../../data/ft06.txt");

/// One randomized trail script: reductions, constraint posts, propagation
/// and nested markers, checked against a plain snapshot stack. Every pop
/// must restore exactly what was there at the matching push; between
/// propagations, domains must match a naive set model.
pub fn trail_script(seed: u64, steps: usize) -> Result<(), String> {
    use cpscope::Reduction;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut st = Store::new();
    let n = rng.gen_range(2..=5);
    let vars: Vec<_> = (0..n)
        .map(|i| {
            let lo = rng.gen_range(-3..=3);
            st.new_var(format!("v{i}"), Domain::interval(lo, lo + rng.gen_range(0..=8)).unwrap())
        })
        .collect();
    let mut model: Doms = vars.iter().map(|&v| domain_set(st.domain(v))).collect();
    let mut saved: Vec<(cpscope::store::Snapshot, Doms)> = Vec::new();
    let mut failed = false;
    for step in 0..steps {
        let roll = rng.gen_range(0..100);
        if failed || roll < 15 {
            if saved.is_empty() {
                if failed {
                    return Ok(());
                }
                st.push_choice();
                saved.push((st.snapshot(), model.clone()));
                continue;
            }
            st.pop_choice();
            let (snap, m) = saved.pop().unwrap();
            if st.snapshot() != snap {
                return Err(format!("seed {seed} step {step}: pop did not restore the snapshot"));
            }
            model = m;
            failed = false;
        } else if roll < 35 {
            st.push_choice();
            saved.push((st.snapshot(), model.clone()));
        } else if roll < 42 && saved.len() < 6 {
            let (a, b) = (vars[rng.gen_range(0..n)], vars[rng.gen_range(0..n)]);
            if a != b {
                constraints::post(&mut st, ConstraintSpec::Neq { a, b, offset: rng.gen_range(-1..=1) });
            }
            failed = st.propagate(&mut cpscope::event::NullListener).is_failed();
            model = vars.iter().map(|&v| domain_set(st.domain(v))).collect();
        } else {
            let i = rng.gen_range(0..n);
            let x = rng.gen_range(-4..=12);
            let r = match rng.gen_range(0..4) {
                0 => Reduction::SetValue(x),
                1 => Reduction::SetMin(x),
                2 => Reduction::SetMax(x),
                _ => Reduction::RemoveValue(x),
            };
            let mut expect = model[i].clone();
            match r {
                Reduction::SetValue(x) => expect.retain(|&v| v == x),
                Reduction::SetMin(x) => expect.retain(|&v| v >= x),
                Reduction::SetMax(x) => expect.retain(|&v| v <= x),
                Reduction::RemoveValue(x) => {
                    expect.remove(&x);
                }
            }
            let out = st.reduce(vars[i], r, &mut cpscope::event::NullListener);
            if expect.is_empty() {
                if out != cpscope::Outcome::Failed {
                    return Err(format!("seed {seed} step {step}: {r:?} should fail"));
                }
                failed = true;
                continue;
            }
            let want = if expect == model[i] { cpscope::Outcome::NoOp } else { cpscope::Outcome::Reduced };
            if out != want || domain_set(st.domain(vars[i])) != expect {
                return Err(format!("seed {seed} step {step}: {r:?} gave {out:?}"));
            }
            model[i] = expect;
            if rng.gen_bool(0.3) {
                failed = st.propagate(&mut cpscope::event::NullListener).is_failed();
                model = vars.iter().map(|&v| domain_set(st.domain(v))).collect();
            }
        }
    }
    while let Some((snap, _)) = saved.pop() {
        st.pop_choice();
        if st.snapshot() != snap {
            return Err(format!("seed {seed}: final unwinding did not restore the snapshot"));
        }
    }
    Ok(())
}
