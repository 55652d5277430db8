//! Bounded brute-force exploration used as ground truth in tests.

use std::collections::HashMap;

use thiserror::Error;

use super::{apply_unchecked, enables, Configuration, Schedule};
use crate::ta::{RuleId, ThresholdAutomaton};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

/// Inclusive range per parameter.
pub type ParamBounds = Vec<(u64, u64)>;

#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    pub max_states: usize,
    pub max_initial: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_states: 2_000_000,
            max_initial: 100_000,
        }
    }
}

/// All initial configurations whose parameters lie within `bounds` and
/// satisfy the resilience condition, in lexicographic order.
pub fn initial_configs(
    ta: &ThresholdAutomaton,
    bounds: &ParamBounds,
    limits: OracleLimits,
) -> Result<Vec<Configuration>, OracleError> {
    let mut valuations: Vec<Vec<u64>> = vec![vec![]];
    for &(lo, hi) in bounds {
        valuations = valuations
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for p in valuations {
        if !ta.env.admissible(&p) {
            continue;
        }
        let Some(n) = ta.env.size(&p) else { continue };
        let mut parts = Vec::new();
        compositions(n, ta.initial.len(), &mut vec![], &mut parts);
        for part in parts {
            let mut kappa = vec![0; ta.locations.len()];
            for (i, &l) in ta.initial.iter().enumerate() {
                kappa[l] = part[i];
            }
            out.push(Configuration::new(kappa, vec![0; ta.shared.len()], p.clone()));
            if out.len() > limits.max_initial {
                return Err(OracleError::ResourceLimit(format!(
                    "more than {} initial configurations",
                    limits.max_initial
                )));
            }
        }
    }
    Ok(out)
}

fn compositions(n: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if k == 0 {
        return;
    }
    if k == 1 {
        cur.push(n);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for first in (0..=n).rev() {
        cur.push(first);
        compositions(n - first, k - 1, cur, out);
        cur.pop();
    }
}

/// Breadth-first search over all schedules of length ≤ `bound` from `init`.
///
/// Returns a shortest witness; among those, the one found first in
/// (initial configuration, rule index) order. States are memoized by
/// configuration only: BFS reaches each state first with the largest
/// remaining budget, so later visits cannot reach anything new.
pub fn oracle_search(
    ta: &ThresholdAutomaton,
    init: &[Configuration],
    goal: impl Fn(&Configuration) -> bool,
    bound: usize,
    limits: OracleLimits,
) -> Result<Option<(Configuration, Schedule)>, OracleError> {
    let mut states: Vec<Configuration> = Vec::new();
    let mut parent: Vec<Option<(usize, RuleId)>> = Vec::new();
    let mut index: HashMap<Configuration, usize> = HashMap::new();

    let path_to = |states: &Vec<Configuration>, parent: &Vec<Option<(usize, RuleId)>>, mut i: usize| {
        let mut rules = Vec::new();
        while let Some((p, r)) = parent[i] {
            rules.push(r);
            i = p;
        }
        rules.reverse();
        (states[i].clone(), rules)
    };

    let mut frontier = Vec::new();
    for s in init {
        if index.contains_key(s) {
            continue;
        }
        let i = states.len();
        index.insert(s.clone(), i);
        states.push(s.clone());
        parent.push(None);
        if goal(s) {
            return Ok(Some((s.clone(), vec![])));
        }
        frontier.push(i);
    }
    for _ in 0..bound {
        let mut next = Vec::new();
        for &i in &frontier {
            for r in 0..ta.rules.len() {
                if !enables(ta, &states[i], r) {
                    continue;
                }
                let succ = apply_unchecked(ta, &states[i], r);
                if index.contains_key(&succ) {
                    continue;
                }
                let j = states.len();
                if j >= limits.max_states {
                    return Err(OracleError::ResourceLimit(format!(
                        "more than {} states",
                        limits.max_states
                    )));
                }
                index.insert(succ.clone(), j);
                let hit = goal(&succ);
                states.push(succ);
                parent.push(Some((i, r)));
                if hit {
                    return Ok(Some(path_to(&states, &parent, j)));
                }
                next.push(j);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(None)
}

/// Calls `visit` on every maximal schedule of length ≤ `bound` from `sigma`
/// (maximal: length `bound` or no rule enabled), with its configurations.
pub fn explore_paths(
    ta: &ThresholdAutomaton,
    sigma: &Configuration,
    bound: usize,
    max_paths: usize,
    mut visit: impl FnMut(&[Configuration], &[RuleId]),
) -> Result<usize, OracleError> {
    let mut configs = vec![sigma.clone()];
    let mut rules = Vec::new();
    let mut count = 0;
    fn go(
        ta: &ThresholdAutomaton,
        bound: usize,
        max_paths: usize,
        configs: &mut Vec<Configuration>,
        rules: &mut Vec<RuleId>,
        count: &mut usize,
        visit: &mut dyn FnMut(&[Configuration], &[RuleId]),
    ) -> Result<(), OracleError> {
        let cur = configs.last().expect("nonempty").clone();
        let mut extended = false;
        if rules.len() < bound {
            for r in 0..ta.rules.len() {
                if enables(ta, &cur, r) {
                    extended = true;
                    configs.push(apply_unchecked(ta, &cur, r));
                    rules.push(r);
                    go(ta, bound, max_paths, configs, rules, count, visit)?;
                    rules.pop();
                    configs.pop();
                }
            }
        }
        if !extended {
            *count += 1;
            if *count > max_paths {
                return Err(OracleError::ResourceLimit(format!("more than {max_paths} paths")));
            }
            visit(configs, rules);
        }
        Ok(())
    }
    go(ta, bound, max_paths, &mut configs, &mut rules, &mut count, &mut visit)?;
    Ok(count)
}

/// An ultimately periodic run: `word[0..]` are the configurations visited
/// (without stuttering repetitions), and after the last one the run returns to
/// `word[loop_start]` by firing `cycle`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoPath {
    pub word: Vec<Configuration>,
    pub loop_start: usize,
    pub stem: Schedule,
    pub cycle: Schedule,
}

/// Searches lassos with a stem of ≤ `stem_bound` and a loop of ≤ `loop_bound`
/// rules whose loop returns to exactly the same configuration, and returns
/// the first one accepted by `accept`.
///
/// Zero-update self-loops leave the configuration unchanged; since the
/// properties checked are stutter-invariant they are only used to close
/// one-step loops, which keeps the search small.
pub fn oracle_lasso(
    ta: &ThresholdAutomaton,
    init: &[Configuration],
    stem_bound: usize,
    loop_bound: usize,
    max_nodes: usize,
    mut accept: impl FnMut(&LassoPath) -> bool,
) -> Result<Option<LassoPath>, OracleError> {
    let stutter: Vec<bool> = ta
        .rules
        .iter()
        .map(|r| r.is_self_loop() && r.update.is_empty())
        .collect();
    let mut nodes = 0usize;

    struct Search<'a, F> {
        ta: &'a ThresholdAutomaton,
        stutter: &'a [bool],
        stem_bound: usize,
        loop_bound: usize,
        max_nodes: usize,
        nodes: &'a mut usize,
        accept: &'a mut F,
    }

    impl<F: FnMut(&LassoPath) -> bool> Search<'_, F> {
        fn go(
            &mut self,
            configs: &mut Vec<Configuration>,
            rules: &mut Vec<RuleId>,
        ) -> Result<Option<LassoPath>, OracleError> {
            *self.nodes += 1;
            if *self.nodes > self.max_nodes {
                return Err(OracleError::ResourceLimit(format!(
                    "more than {} lasso search nodes",
                    self.max_nodes
                )));
            }
            let n = rules.len();
            let cur = configs[n].clone();
            // Loops closing back to an earlier configuration.
            for j in (0..n).rev() {
                if n - j > self.loop_bound {
                    break;
                }
                if j <= self.stem_bound && configs[j] == cur {
                    let cand = LassoPath {
                        word: configs[..n].to_vec(),
                        loop_start: j,
                        stem: rules[..j].to_vec(),
                        cycle: rules[j..].to_vec(),
                    };
                    if (self.accept)(&cand) {
                        return Ok(Some(cand));
                    }
                }
            }
            // One-step stuttering loops.
            if n <= self.stem_bound && self.loop_bound >= 1 {
                if let Some(r) =
                    (0..self.ta.rules.len()).find(|&r| self.stutter[r] && enables(self.ta, &cur, r))
                {
                    let cand = LassoPath {
                        word: configs.clone(),
                        loop_start: n,
                        stem: rules.clone(),
                        cycle: vec![r],
                    };
                    if (self.accept)(&cand) {
                        return Ok(Some(cand));
                    }
                }
            }
            if n >= self.stem_bound + self.loop_bound {
                return Ok(None);
            }
            for r in 0..self.ta.rules.len() {
                if self.stutter[r] || !enables(self.ta, &cur, r) {
                    continue;
                }
                configs.push(apply_unchecked(self.ta, &cur, r));
                rules.push(r);
                let found = self.go(configs, rules)?;
                rules.pop();
                configs.pop();
                if found.is_some() {
                    return Ok(found);
                }
            }
            Ok(None)
        }
    }

    let mut search = Search {
        ta,
        stutter: &stutter,
        stem_bound,
        loop_bound,
        max_nodes,
        nodes: &mut nodes,
        accept: &mut accept,
    };
    for s in init {
        if let Some(found) = search.go(&mut vec![s.clone()], &mut vec![])? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::strb;

    fn sigma0() -> Configuration {
        Configuration::new(vec![0, 3, 0, 0], vec![0], vec![4, 1, 1])
    }

    #[test]
    fn shortest_cover_of_l3() {
        let ta = strb();
        let l3 = ta.location_index("l3").unwrap();
        let (s0, sched) = oracle_search(&ta, &[sigma0()], |s| s.covers(l3), 4, Default::default())
            .unwrap()
            .unwrap();
        assert_eq!(s0, sigma0());
        let ids: Vec<&str> = sched.iter().map(|&r| ta.rules[r].id.as_str()).collect();
        // n - t - f = 2, so two increments suffice
        assert_eq!(ids, ["r1", "r1", "r3"]);
        assert!(
            oracle_search(&ta, &[sigma0()], |s| s.covers(l3), 1, Default::default())
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn goal_at_depth_zero() {
        let ta = strb();
        let inits = initial_configs(&ta, &vec![(4, 4), (1, 1), (1, 1)], Default::default()).unwrap();
        // n - f = 3 processes over two initial locations
        assert_eq!(inits.len(), 4);
        let (s0, sched) = oracle_search(&ta, &inits, |s| s.is_initial(&ta), 0, Default::default())
            .unwrap()
            .unwrap();
        assert!(sched.is_empty());
        assert!(s0.is_initial(&ta));
    }

    #[test]
    fn state_cap_reports_resource_limit() {
        let ta = strb();
        let limits = OracleLimits {
            max_states: 3,
            max_initial: 10,
        };
        let r = oracle_search(&ta, &[sigma0()], |_| false, 10, limits);
        assert!(matches!(r, Err(OracleError::ResourceLimit(_))));
    }

    #[test]
    fn lasso_on_self_loop() {
        let ta = strb();
        let l3 = ta.location_index("l3").unwrap();
        let found = oracle_lasso(&ta, &[sigma0()], 6, 2, 1_000_000, |lp| {
            lp.word.iter().any(|c| c.covers(l3))
        })
        .unwrap()
        .unwrap();
        let r = &ta.rules[found.cycle[0]];
        assert!(r.is_self_loop() && r.update.is_empty());
        assert_eq!(found.loop_start + 1, found.word.len());
    }
}
