//! Counter-system semantics of a threshold automaton.

mod oracle;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eltl::Prop;
use crate::ta::{IntegerGuard, LocId, RuleId, ThresholdAutomaton};

pub use oracle::{
    explore_paths, initial_configs, oracle_lasso, oracle_search, LassoPath, OracleError,
    OracleLimits, ParamBounds,
};

/// A configuration `(κ, g, p)`, indexed like the automaton's tables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub kappa: Vec<u64>,
    pub globals: Vec<u64>,
    pub params: Vec<u64>,
}

pub type Schedule = Vec<RuleId>;

/// Indices (into a guard list) of rise guards that hold and fall guards that do not.
pub type Context = BTreeSet<usize>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("rule `{0}` is not enabled")]
    NotEnabled(String),
    #[error("schedule not applicable at index {index} (rule `{rule}`)")]
    NotApplicable { index: usize, rule: String },
}

impl Configuration {
    /// The initial configuration with all `N(p)` processes distributed as `kappa`.
    pub fn new(kappa: Vec<u64>, globals: Vec<u64>, params: Vec<u64>) -> Self {
        Configuration {
            kappa,
            globals,
            params,
        }
    }

    pub fn processes(&self) -> u64 {
        self.kappa.iter().sum()
    }

    /// Σκ = N(p) and p satisfies the resilience condition.
    pub fn is_valid(&self, ta: &ThresholdAutomaton) -> bool {
        self.kappa.len() == ta.locations.len()
            && self.globals.len() == ta.shared.len()
            && ta.env.admissible(&self.params)
            && ta.env.size(&self.params) == Some(self.processes())
    }

    pub fn is_initial(&self, ta: &ThresholdAutomaton) -> bool {
        self.globals.iter().all(|&g| g == 0)
            && self
                .kappa
                .iter()
                .enumerate()
                .all(|(l, &k)| k == 0 || ta.is_initial(l))
    }

    pub fn covers(&self, l: LocId) -> bool {
        self.kappa[l] > 0
    }
}

pub fn guard_holds(g: &IntegerGuard, sigma: &Configuration) -> bool {
    g.holds(sigma.globals[g.var], &sigma.params)
}

pub fn guards_hold(ta: &ThresholdAutomaton, sigma: &Configuration, r: RuleId) -> bool {
    ta.rule_guards(r).iter().all(|g| guard_holds(g, sigma))
}

pub fn enables(ta: &ThresholdAutomaton, sigma: &Configuration, r: RuleId) -> bool {
    sigma.kappa[ta.rules[r].from] > 0 && guards_hold(ta, sigma, r)
}

pub fn apply(
    ta: &ThresholdAutomaton,
    sigma: &Configuration,
    r: RuleId,
) -> Result<Configuration, SemanticsError> {
    if !enables(ta, sigma, r) {
        return Err(SemanticsError::NotEnabled(ta.rules[r].id.clone()));
    }
    Ok(apply_unchecked(ta, sigma, r))
}

/// Applies `r` without checking enabledness (the source must be occupied).
pub(crate) fn apply_unchecked(
    ta: &ThresholdAutomaton,
    sigma: &Configuration,
    r: RuleId,
) -> Configuration {
    let rule = &ta.rules[r];
    let mut next = sigma.clone();
    next.kappa[rule.from] -= 1;
    next.kappa[rule.to] += 1;
    for (&v, &k) in &rule.update {
        next.globals[v] += k;
    }
    next
}

pub fn run(
    ta: &ThresholdAutomaton,
    sigma: &Configuration,
    schedule: &[RuleId],
) -> Result<Configuration, SemanticsError> {
    Ok(run_trace(ta, sigma, schedule)?.pop().expect("nonempty trace"))
}

/// Like [`run`], returning every visited configuration (including `sigma`).
pub fn run_trace(
    ta: &ThresholdAutomaton,
    sigma: &Configuration,
    schedule: &[RuleId],
) -> Result<Vec<Configuration>, SemanticsError> {
    let mut trace = vec![sigma.clone()];
    for (index, &r) in schedule.iter().enumerate() {
        let cur = trace.last().expect("nonempty");
        if !enables(ta, cur, r) {
            return Err(SemanticsError::NotApplicable {
                index,
                rule: ta.rules[r].id.clone(),
            });
        }
        let next = apply_unchecked(ta, cur, r);
        trace.push(next);
    }
    Ok(trace)
}

pub fn context(guards: &[IntegerGuard], sigma: &Configuration) -> Context {
    guards
        .iter()
        .enumerate()
        .filter(|(_, g)| guard_holds(g, sigma) == (g.kind == crate::ta::GuardKind::Rise))
        .map(|(i, _)| i)
        .collect()
}

pub fn lift(sigma: &Configuration, mu: u64) -> Configuration {
    Configuration {
        kappa: sigma.kappa.iter().map(|k| k * mu).collect(),
        globals: sigma.globals.iter().map(|g| g * mu).collect(),
        params: sigma.params.iter().map(|p| p * mu).collect(),
    }
}

pub fn eval_prop(sigma: &Configuration, pf: &Prop) -> bool {
    match pf {
        Prop::True => true,
        Prop::Zero(s) => s.iter().all(|&l| sigma.kappa[l] == 0),
        Prop::NonZero(s) => s.iter().any(|&l| sigma.kappa[l] > 0),
        Prop::Guard(g) => guard_holds(g, sigma),
        Prop::And(ps) => ps.iter().all(|p| eval_prop(sigma, p)),
        Prop::Or(ps) => ps.iter().any(|p| eval_prop(sigma, p)),
        Prop::Not(p) => !eval_prop(sigma, p),
        Prop::Implies(a, b) => !eval_prop(sigma, a) || eval_prop(sigma, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::strb;

    fn sigma0() -> Configuration {
        Configuration::new(vec![0, 3, 0, 0], vec![0], vec![4, 1, 1])
    }

    #[test]
    fn enabledness_at_initial() {
        let ta = strb();
        let s = sigma0();
        assert!(s.is_valid(&ta));
        assert!(enables(&ta, &s, ta.rule_index("r1").unwrap()));
        assert!(!enables(&ta, &s, ta.rule_index("r2").unwrap()));
        assert!(!enables(&ta, &s, ta.rule_index("sl1").unwrap()));
    }

    #[test]
    fn apply_and_run() {
        let ta = strb();
        let r = |id: &str| ta.rule_index(id).unwrap();
        let s1 = apply(&ta, &sigma0(), r("r1")).unwrap();
        assert_eq!(s1.kappa, vec![0, 2, 1, 0]);
        assert_eq!(s1.globals, vec![1]);
        let end = run(&ta, &sigma0(), &[r("r1"), r("r1"), r("r1"), r("r3")]).unwrap();
        assert_eq!(end.kappa, vec![0, 0, 2, 1]);
        assert_eq!(end.globals, vec![3]);
        assert_eq!(run(&ta, &sigma0(), &[]).unwrap(), sigma0());
        assert_eq!(
            run(&ta, &sigma0(), &[r("r3")]),
            Err(SemanticsError::NotApplicable {
                index: 0,
                rule: "r3".into()
            })
        );
        let s = Configuration::new(vec![1, 2, 0, 0], vec![0], vec![4, 1, 1]);
        assert_eq!(apply(&ta, &s, r("sl1")).unwrap(), s);
    }

    #[test]
    fn contexts_grow_with_x() {
        let ta = strb();
        let guards = ta.guard_set();
        let g1 = guards
            .iter()
            .position(|g| g.rhs.constant == 1)
            .expect("x >= t + 1 - f");
        let mut s = sigma0();
        assert!(context(&guards, &s).is_empty());
        s.globals[0] = 1;
        assert_eq!(context(&guards, &s), [g1].into_iter().collect());
        s.globals[0] = 3;
        assert_eq!(context(&guards, &s).len(), 2);
    }

    #[test]
    fn lifting_scales_everything() {
        let ta = strb();
        let l = lift(&sigma0(), 2);
        assert_eq!(l.kappa, vec![0, 6, 0, 0]);
        assert_eq!(l.params, vec![8, 2, 2]);
        assert!(l.is_valid(&ta));
        assert_eq!(lift(&sigma0(), 1), sigma0());
        assert!(lift(&sigma0(), 3).is_initial(&ta));
    }

    #[test]
    fn propositions() {
        let ta = strb();
        let l = |n: &str| ta.location_index(n).unwrap();
        let s = sigma0();
        assert!(eval_prop(&s, &Prop::Zero([l("l0"), l("l2"), l("l3")].into())));
        assert!(eval_prop(&s, &Prop::NonZero([l("l1")].into())));
        // (x >= n - t) => {l2} = 0 at x = 3, κ(l2) = 2
        let g = crate::ta::IntegerGuard {
            var: 0,
            kind: crate::ta::GuardKind::Rise,
            scale: 1,
            rhs: crate::ta::IntExpr {
                constant: 0,
                coeffs: [(0, 1), (1, -1)].into_iter().collect(),
            },
        };
        let s = Configuration::new(vec![0, 0, 2, 1], vec![3], vec![4, 1, 1]);
        let pf = Prop::Implies(
            Box::new(Prop::Guard(g)),
            Box::new(Prop::Zero([l("l2")].into())),
        );
        assert!(!eval_prop(&s, &pf));
    }
}
