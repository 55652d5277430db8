//! Coverability: saturation for constant rise guards, and the general case
//! through the reachability encoding.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::presburger::SolverConfig;
use crate::reach::{solve_reach, InitSpec, ReachError, ReachOutcome, ReachQuery, ReachWitness};
use crate::semantics::Configuration;
use crate::ta::{check_multiplicative, LocId, Multiplicative, RuleId, ThresholdAutomaton};

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("rule `{0}` has a guard that is not a constant rise guard")]
    NotConstantRise(String),
    #[error("environment is not known to be multiplicative")]
    NotMultiplicative,
    #[error(transparent)]
    Reach(#[from] ReachError),
}

/// Locations and rules reached by the saturation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationState {
    pub locations: BTreeSet<LocId>,
    pub rules: BTreeSet<RuleId>,
}

/// Least fixpoint of: a rule is added once its source is reached and, for each
/// guard `x >= c` (c > 0), some already added rule increments `x`.
pub fn cover_fixpoint(ta: &ThresholdAutomaton) -> Result<SaturationState, CoverError> {
    let mut thresholds = Vec::with_capacity(ta.rules.len());
    for (r, rule) in ta.rules.iter().enumerate() {
        let mut vars = Vec::new();
        for g in ta.rule_guards(r) {
            match g.constant_rise_threshold() {
                Some(0) => {}
                Some(_) => vars.push(g.var),
                None => return Err(CoverError::NotConstantRise(rule.id.clone())),
            }
        }
        thresholds.push(vars);
    }
    let mut st = SaturationState {
        locations: ta.initial.iter().copied().collect(),
        rules: BTreeSet::new(),
    };
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for (r, rule) in ta.rules.iter().enumerate() {
            if st.rules.contains(&r) || !st.locations.contains(&rule.from) {
                continue;
            }
            let unlocked = thresholds[r]
                .iter()
                .all(|&v| st.rules.iter().any(|&q| ta.rules[q].increments(v) > 0));
            if unlocked {
                st.rules.insert(r);
                st.locations.insert(rule.to);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    debug_assert!(rounds <= ta.locations.len() + ta.rules.len() + 1);
    Ok(st)
}

#[derive(Clone, Debug)]
pub enum CoverMode {
    Parameterized,
    From(Configuration),
}

#[derive(Clone, Debug)]
pub enum CoverOutcome {
    /// The witness is absent when the answer came from the saturation.
    Coverable(Option<ReachWitness>),
    NotCoverable,
    Unknown(String),
}

impl CoverOutcome {
    pub fn is_coverable(&self) -> bool {
        matches!(self, CoverOutcome::Coverable(_))
    }
}

/// Whether `l` is coverable. Uses the saturation when the query is
/// parameterized, unbounded, every guard is a constant rise guard and the
/// environment is multiplicative (or `assume_multiplicative`); otherwise asks
/// the solver for a run reaching `κ(l) ≥ 1`.
pub fn cover(
    ta: &ThresholdAutomaton,
    l: LocId,
    mode: &CoverMode,
    bound: Option<u64>,
    assume_multiplicative: bool,
    cfg: &SolverConfig,
) -> Result<CoverOutcome, CoverError> {
    let mult_ok =
        assume_multiplicative || check_multiplicative(ta, &[]) == Multiplicative::Yes;
    if matches!(mode, CoverMode::Parameterized) && bound.is_none() && ta.is_constant_rise() && mult_ok
    {
        let st = cover_fixpoint(ta)?;
        log::info!("saturation reached {} locations", st.locations.len());
        return Ok(if st.locations.contains(&l) {
            CoverOutcome::Coverable(None)
        } else {
            CoverOutcome::NotCoverable
        });
    }
    let init = match mode {
        CoverMode::Parameterized => InitSpec::Parameterized(None),
        CoverMode::From(c) => InitSpec::Concrete(c.clone()),
    };
    let q = ReachQuery {
        init,
        zero: vec![],
        pos: vec![l],
        bound,
        appl: Default::default(),
    };
    Ok(match solve_reach(ta, &q, cfg)? {
        ReachOutcome::Reachable(w) => CoverOutcome::Coverable(Some(w)),
        ReachOutcome::Unreachable => CoverOutcome::NotCoverable,
        ReachOutcome::Unknown(r) => CoverOutcome::Unknown(r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ta::parse_ta;

    fn ta(json: &str) -> ThresholdAutomaton {
        parse_ta(json).unwrap().into_concrete().unwrap()
    }

    const TWO_ROUNDS: &str = r#"{
        "parameters": ["k"], "resilience": [], "system_size": "k",
        "locations": ["a", "b", "c"], "initial": ["a"], "shared": ["x"],
        "rules": [
            {"id": "r1", "from": "a", "to": "b", "update": {"x": 1}},
            {"id": "r2", "from": "b", "to": "c", "guard": ["x >= 1"]}
        ]}"#;

    #[test]
    fn saturation_two_rounds() {
        let st = cover_fixpoint(&ta(TWO_ROUNDS)).unwrap();
        assert_eq!(st.locations, [0, 1, 2].into_iter().collect());
    }

    #[test]
    fn guard_never_unlocked() {
        let t = ta(r#"{
            "parameters": ["k"], "system_size": "k",
            "locations": ["a", "b"], "initial": ["a"], "shared": ["x"],
            "rules": [{"id": "r", "from": "a", "to": "b", "guard": ["x >= 1"]}]}"#);
        let st = cover_fixpoint(&t).unwrap();
        assert_eq!(st.locations, [0].into_iter().collect());
    }

    #[test]
    fn strb_is_not_constant_rise() {
        let t = crate::testutil::strb();
        assert!(matches!(cover_fixpoint(&t), Err(CoverError::NotConstantRise(_))));
    }

    #[test]
    fn x_ge_zero_is_stripped() {
        let t = ta(r#"{
            "parameters": ["k"], "system_size": "k",
            "locations": ["a", "b"], "initial": ["a"], "shared": ["x"],
            "rules": [{"id": "r", "from": "a", "to": "b", "guard": ["x >= 0"]}]}"#);
        let st = cover_fixpoint(&t).unwrap();
        assert!(st.locations.contains(&1));
    }
}
