//! Turning steady-segment firing counts into a concrete schedule.

use std::collections::VecDeque;

use thiserror::Error;

use crate::semantics::{apply_unchecked, guards_hold, Configuration, Schedule};
use crate::ta::{LocId, RuleId, ThresholdAutomaton};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealizeError {
    #[error("extraction stalled with remaining counts {remaining:?} at {at:?}")]
    Stalled {
        remaining: Vec<u64>,
        at: Configuration,
    },
}

/// Builds a schedule from `sigma` firing every rule `r` exactly `counts[r]`
/// times, assuming the counts satisfy the steady-segment constraints at
/// `sigma`.
///
/// Repeatedly: take a rule with remaining count, walk back along rules with
/// remaining counts to one whose source is occupied (the chain head). If that
/// source lies on a cycle of rules with remaining counts, fire the cycle's
/// first rule; otherwise fire the chain head.
pub fn realize_steady(
    ta: &ThresholdAutomaton,
    sigma: &Configuration,
    counts: &[u64],
) -> Result<Schedule, RealizeError> {
    let mut left = counts.to_vec();
    let mut cur = sigma.clone();
    let mut out = Vec::new();
    let stalled = |left: &[u64], cur: &Configuration| RealizeError::Stalled {
        remaining: left.to_vec(),
        at: cur.clone(),
    };
    while let Some(target) = (0..left.len()).find(|&r| left[r] > 0) {
        let head = chain_head(ta, &cur, &left, target).ok_or_else(|| stalled(&left, &cur))?;
        let from = ta.rules[head].from;
        let fire = cycle_at(ta, &left, from).unwrap_or(head);
        if cur.kappa[ta.rules[fire].from] == 0 || !guards_hold(ta, &cur, fire) {
            return Err(stalled(&left, &cur));
        }
        cur = apply_unchecked(ta, &cur, fire);
        left[fire] -= 1;
        out.push(fire);
    }
    Ok(out)
}

/// Breadth-first backwards search from `target` for a rule with remaining
/// count whose source location is occupied.
fn chain_head(
    ta: &ThresholdAutomaton,
    cur: &Configuration,
    left: &[u64],
    target: RuleId,
) -> Option<RuleId> {
    let mut seen = vec![false; ta.rules.len()];
    let mut queue = VecDeque::from([target]);
    seen[target] = true;
    while let Some(r) = queue.pop_front() {
        let from = ta.rules[r].from;
        if cur.kappa[from] > 0 {
            return Some(r);
        }
        for (q, rule) in ta.rules.iter().enumerate() {
            if !seen[q] && left[q] > 0 && rule.to == from {
                seen[q] = true;
                queue.push_back(q);
            }
        }
    }
    None
}

/// First rule of a cycle through `at` made of rules with remaining counts.
fn cycle_at(ta: &ThresholdAutomaton, left: &[u64], at: LocId) -> Option<RuleId> {
    for (r, rule) in ta.rules.iter().enumerate() {
        if left[r] == 0 || rule.from != at {
            continue;
        }
        // Can we get from rule.to back to `at`?
        let mut seen = vec![false; ta.locations.len()];
        let mut queue = VecDeque::from([rule.to]);
        seen[rule.to] = true;
        while let Some(l) = queue.pop_front() {
            if l == at {
                return Some(r);
            }
            for (q, next) in ta.rules.iter().enumerate() {
                if left[q] > 0 && next.from == l && !seen[next.to] {
                    seen[next.to] = true;
                    queue.push_back(next.to);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::run;
    use crate::testutil::strb;

    fn counts(ta: &ThresholdAutomaton, xs: &[(&str, u64)]) -> Vec<u64> {
        let mut c = vec![0; ta.rules.len()];
        for (id, n) in xs {
            c[ta.rule_index(id).unwrap()] = *n;
        }
        c
    }

    #[test]
    fn empty_counts() {
        let ta = strb();
        let s = Configuration::new(vec![0, 3, 0, 0], vec![0], vec![4, 1, 1]);
        assert!(realize_steady(&ta, &s, &[0; 6]).unwrap().is_empty());
    }

    #[test]
    fn two_r1() {
        let ta = strb();
        let s = Configuration::new(vec![1, 2, 0, 0], vec![0], vec![4, 1, 1]);
        let sched = realize_steady(&ta, &s, &counts(&ta, &[("r1", 2)])).unwrap();
        assert_eq!(sched, vec![0, 0]);
    }

    #[test]
    fn self_loop_cycle_is_interleaved() {
        let ta = strb();
        // γ2 true at x = 3 ≥ n - t - f = 2
        let s = Configuration::new(vec![0, 0, 1, 2], vec![3], vec![4, 1, 1]);
        let c = counts(&ta, &[("sl2", 2), ("r3", 1)]);
        let sched = realize_steady(&ta, &s, &c).unwrap();
        let ids: Vec<&str> = sched.iter().map(|&r| ta.rules[r].id.as_str()).collect();
        assert_eq!(ids, ["sl2", "sl2", "r3"]);
        let end = run(&ta, &s, &sched).unwrap();
        assert_eq!(end.kappa, vec![0, 0, 0, 3]);
    }

    #[test]
    fn chain_through_empty_location() {
        let ta = strb();
        // r1 feeds l2, which is empty at the start; r3 fires after it.
        let s = Configuration::new(vec![0, 1, 0, 2], vec![3], vec![4, 1, 1]);
        let c = counts(&ta, &[("r1", 1), ("r3", 1)]);
        let sched = realize_steady(&ta, &s, &c).unwrap();
        let ids: Vec<&str> = sched.iter().map(|&r| ta.rules[r].id.as_str()).collect();
        assert_eq!(ids, ["r1", "r3"]);
    }
}
