//! Lasso certificates and their independent replay.

use serde::{Deserialize, Serialize};

use super::{EltlError, EltlFormula, Prop};
use crate::semantics::{apply, eval_prop, guard_holds, Configuration, LassoPath, Schedule};
use crate::ta::{GuardKind, ThresholdAutomaton};

/// The run between two consecutive milestones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LassoSegment {
    pub counts: Vec<u64>,
    pub schedule: Schedule,
    /// Must hold in every configuration of the segment, both ends included.
    pub global: Prop,
}

/// A concrete ultimately periodic run: milestones `η_0 … η_l`, the segments
/// between them, and the loop boundary `c` (the loop runs `η_c → η_l` and
/// returns to the counters of `η_c`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LassoWitness {
    /// Node labels of the cut-graph ordering.
    pub ordering: Vec<String>,
    pub milestones: Vec<Configuration>,
    /// Local proposition required at each milestone.
    pub local: Vec<Prop>,
    pub segments: Vec<LassoSegment>,
    pub loop_start: usize,
    /// Scaling applied to the solver's witness (2 after lifting).
    pub lifted_by: u64,
}

impl LassoWitness {
    pub fn initial(&self) -> &Configuration {
        &self.milestones[0]
    }

    pub fn stem(&self) -> Schedule {
        self.segments[..self.loop_start]
            .iter()
            .flat_map(|s| s.schedule.iter().copied())
            .collect()
    }

    pub fn cycle(&self) -> Schedule {
        self.segments[self.loop_start..]
            .iter()
            .flat_map(|s| s.schedule.iter().copied())
            .collect()
    }
}

fn invalid<T>(m: impl Into<String>) -> Result<T, EltlError> {
    Err(EltlError::CertificateInvalid(m.into()))
}

/// Runs `schedule` from `from`, checking `global` at every configuration.
fn run_checked(
    ta: &ThresholdAutomaton,
    from: &Configuration,
    schedule: &[usize],
    global: &Prop,
    what: &str,
) -> Result<Configuration, EltlError> {
    let mut cur = from.clone();
    if !eval_prop(&cur, global) {
        return invalid(format!("{what}: global proposition fails at the start"));
    }
    for (k, &r) in schedule.iter().enumerate() {
        cur = match apply(ta, &cur, r) {
            Ok(c) => c,
            Err(e) => return invalid(format!("{what}, step {k}: {e}")),
        };
        if !eval_prop(&cur, global) {
            return invalid(format!("{what}, step {k}: global proposition fails"));
        }
    }
    Ok(cur)
}

/// Checks a certificate by direct execution: the stem and two iterations of
/// the loop, all propositions, κ-return and the fall-guard condition.
pub fn replay_lasso(ta: &ThresholdAutomaton, w: &LassoWitness) -> Result<(), EltlError> {
    let l = w.segments.len();
    let c = w.loop_start;
    if w.milestones.len() != l + 1 || w.local.len() != l + 1 || c >= l {
        return invalid("malformed witness");
    }
    let init = &w.milestones[0];
    if !init.is_valid(ta) || !init.is_initial(ta) {
        return invalid("η0 is not an initial configuration");
    }
    for (i, seg) in w.segments.iter().enumerate() {
        if !eval_prop(&w.milestones[i], &w.local[i]) {
            return invalid(format!("local proposition fails at η{i}"));
        }
        let end = run_checked(ta, &w.milestones[i], &seg.schedule, &seg.global, &format!("segment {i}"))?;
        if end != w.milestones[i + 1] {
            return invalid(format!("segment {i} ends at {end:?}, not at η{}", i + 1));
        }
        let mut counts = vec![0u64; ta.rules.len()];
        for &r in &seg.schedule {
            counts[r] += 1;
        }
        if counts != seg.counts {
            return invalid(format!("segment {i}: counts do not match the schedule"));
        }
    }
    if w.milestones[c].kappa != w.milestones[l].kappa {
        return invalid("loop does not return to the counters of η_c");
    }
    let cycle = w.cycle();
    if cycle.is_empty() {
        return invalid("empty loop");
    }
    for v in 0..ta.shared.len() {
        if cycle.iter().any(|&r| ta.rules[r].increments(v) > 0) {
            let bad = cycle.iter().find(|&&r| {
                ta.rule_guards(r)
                    .iter()
                    .any(|g| g.kind == GuardKind::Fall && g.var == v)
            });
            if let Some(&r) = bad {
                return invalid(format!(
                    "loop increments `{}` and fires `{}` with a fall guard on it",
                    ta.shared[v], ta.rules[r].id
                ));
            }
        }
    }
    // Propositions seen inside the loop must not change value when the loop
    // is repeated forever: guards on an incremented variable are settled.
    let mut prop_guards = Vec::new();
    for i in c..l {
        w.local[i].collect_guards(&mut prop_guards);
        w.segments[i].global.collect_guards(&mut prop_guards);
    }
    let eta_c = &w.milestones[c];
    for g in &prop_guards {
        if !cycle.iter().any(|&r| ta.rules[r].increments(g.var) > 0) {
            continue;
        }
        let holds = guard_holds(g, eta_c);
        let settled = match g.kind {
            GuardKind::Rise => holds,
            GuardKind::Fall => !holds,
        };
        if !settled {
            return invalid(format!(
                "loop increments `{}` but a proposition guard on it is not settled at η_c",
                ta.shared[g.var]
            ));
        }
    }
    // Second iteration of the loop from η_l.
    let mut cur = w.milestones[l].clone();
    for i in c..l {
        if !eval_prop(&cur, &w.local[i]) {
            return invalid(format!("second loop iteration: local proposition fails at η{i}"));
        }
        let seg = &w.segments[i];
        cur = run_checked(ta, &cur, &seg.schedule, &seg.global, &format!("second loop iteration, segment {i}"))?;
    }
    if cur.kappa != w.milestones[c].kappa {
        return invalid("second loop iteration does not return to the counters of η_c");
    }
    Ok(())
}

/// Evaluates `f` at position 0 of the lasso `lp`.
pub fn holds_on_lasso(f: &EltlFormula, lp: &LassoPath) -> bool {
    let n = lp.word.len();
    let vals = eval_positions(f, lp);
    debug_assert_eq!(vals.len(), n);
    vals[0]
}

fn eval_positions(f: &EltlFormula, lp: &LassoPath) -> Vec<bool> {
    let n = lp.word.len();
    let ls = lp.loop_start;
    // Positions reachable from i (including i) are min(i, ls)..n.
    let from = |i: usize| if i < ls { i } else { ls };
    match f {
        EltlFormula::Prop(p) => lp.word.iter().map(|c| eval_prop(c, p)).collect(),
        EltlFormula::And(fs) => {
            let subs: Vec<Vec<bool>> = fs.iter().map(|g| eval_positions(g, lp)).collect();
            (0..n).map(|i| subs.iter().all(|s| s[i])).collect()
        }
        EltlFormula::Or(fs) => {
            let subs: Vec<Vec<bool>> = fs.iter().map(|g| eval_positions(g, lp)).collect();
            (0..n).map(|i| subs.iter().any(|s| s[i])).collect()
        }
        EltlFormula::Not(g) => eval_positions(g, lp).into_iter().map(|b| !b).collect(),
        EltlFormula::Implies(a, b) => {
            let (a, b) = (eval_positions(a, lp), eval_positions(b, lp));
            (0..n).map(|i| !a[i] || b[i]).collect()
        }
        EltlFormula::G(g) => {
            let s = eval_positions(g, lp);
            (0..n).map(|i| s[from(i)..].iter().all(|&b| b)).collect()
        }
        EltlFormula::F(g) => {
            let s = eval_positions(g, lp);
            (0..n).map(|i| s[from(i)..].iter().any(|&b| b)).collect()
        }
    }
}
