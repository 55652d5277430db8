//! Reachability as an existential Presburger formula.
//!
//! A run is split into at most |Φ|+1 steady segments (the context, i.e. the
//! set of unlocked guards, is constant inside a segment) separated by single
//! steps. A steady segment is summarized by per-rule firing counts subject to
//! flow, shared-variable, guard and applicability constraints; applicability
//! ("every fired rule is fed by a chain from an occupied location") uses
//! per-rule ranks instead of enumerating chains.

mod realize;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presburger::{solve, Formula, LinTerm, Model, Problem, SolverConfig, SolverError, Verdict};
use crate::semantics::{run, Configuration, ParamBounds, Schedule};
use crate::ta::{GuardKind, IntegerGuard, LinearExpr, LocId, RuleId, ThresholdAutomaton};

pub use realize::{realize_steady, RealizeError};

/// Solver variables of one configuration.
#[derive(Clone, Debug)]
pub struct SymbolicConfig {
    pub kappa: Vec<String>,
    pub globals: Vec<String>,
    pub params: Vec<String>,
}

/// Per-rule count variables of a segment (`rho` is empty for single steps).
#[derive(Clone, Debug)]
pub struct SteadyCounts {
    pub x: Vec<String>,
    pub rho: Vec<String>,
}

/// How the "fired rules are fed by chains" condition is encoded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ApplEncoding {
    #[default]
    Rank,
    /// Literal disjunction over all simple chains (exponential; for testing).
    Chains,
}

fn term(v: &str) -> LinTerm {
    LinTerm::var(v)
}

fn k(c: i64) -> LinTerm {
    LinTerm::constant(c)
}

/// Builds formulas over a [`Problem`], declaring variables as it goes.
pub struct Encoder<'a> {
    pub ta: &'a ThresholdAutomaton,
    /// The guard set Φ used for context equality.
    pub guards: Vec<IntegerGuard>,
    pub problem: Problem,
    pub appl: ApplEncoding,
    params: Vec<String>,
    fresh: usize,
}

impl<'a> Encoder<'a> {
    pub fn new(ta: &'a ThresholdAutomaton) -> Self {
        Encoder::with_guards(ta, ta.guard_set())
    }

    /// Uses `guards` (which must contain every rule guard) as Φ.
    pub fn with_guards(ta: &'a ThresholdAutomaton, guards: Vec<IntegerGuard>) -> Self {
        let mut problem = Problem::new();
        let params = (0..ta.num_params())
            .map(|i| {
                let name = format!("p{i}");
                problem.nat(name.clone());
                name
            })
            .collect();
        Encoder {
            ta,
            guards,
            problem,
            appl: ApplEncoding::Rank,
            params,
            fresh: 0,
        }
    }

    fn fresh_prefix(&mut self, tag: &str) -> String {
        self.fresh += 1;
        format!("{tag}{}", self.fresh)
    }

    /// A configuration sharing the encoder's parameter variables.
    pub fn config(&mut self, tag: &str) -> SymbolicConfig {
        let pre = self.fresh_prefix(tag);
        self.config_with_params(&pre, self.params.clone())
    }

    /// A configuration with its own parameter variables.
    pub fn config_own_params(&mut self, tag: &str) -> SymbolicConfig {
        let pre = self.fresh_prefix(tag);
        let params = (0..self.ta.num_params())
            .map(|i| {
                let n = format!("{pre}_p{i}");
                self.problem.nat(n.clone());
                n
            })
            .collect();
        self.config_with_params(&pre, params)
    }

    fn config_with_params(&mut self, pre: &str, params: Vec<String>) -> SymbolicConfig {
        let kappa = (0..self.ta.locations.len())
            .map(|l| {
                let n = format!("{pre}_k{l}");
                self.problem.nat(n.clone());
                n
            })
            .collect();
        let globals = (0..self.ta.shared.len())
            .map(|v| {
                let n = format!("{pre}_g{v}");
                self.problem.nat(n.clone());
                n
            })
            .collect();
        SymbolicConfig {
            kappa,
            globals,
            params,
        }
    }

    pub fn counts(&mut self, tag: &str, ranks: bool) -> SteadyCounts {
        let pre = self.fresh_prefix(tag);
        let n = self.ta.rules.len();
        let x = (0..n)
            .map(|r| {
                let v = format!("{pre}_x{r}");
                self.problem.nat(v.clone());
                v
            })
            .collect();
        let rho = if ranks {
            (0..n)
                .map(|r| {
                    let v = format!("{pre}_rho{r}");
                    self.problem.nat(v.clone());
                    v
                })
                .collect()
        } else {
            Vec::new()
        };
        SteadyCounts { x, rho }
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    /// `D·x ⋈ rhs(p)` at `s`.
    pub fn guard_at(&self, g: &IntegerGuard, s: &SymbolicConfig) -> Formula {
        let lhs = term(&s.globals[g.var]) * g.scale;
        let mut rhs = k(g.rhs.constant);
        for (&p, &c) in &g.rhs.coeffs {
            rhs = rhs + term(&s.params[p]) * c;
        }
        match g.kind {
            GuardKind::Rise => Formula::ge(lhs, rhs),
            GuardKind::Fall => Formula::lt(lhs, rhs),
        }
    }

    fn param_expr(e: &LinearExpr, params: &[String]) -> (LinTerm, i64) {
        let d = e.denominator_lcm();
        let ie = e.scaled_to_int(d);
        let mut t = k(ie.constant);
        for (&p, &c) in &ie.coeffs {
            t = t + term(&params[p]) * c;
        }
        (t, d)
    }

    /// RC(p) ∧ Σκ = N(p).
    pub fn admissible(&self, s: &SymbolicConfig) -> Formula {
        let mut fs = Vec::new();
        for c in &self.ta.env.resilience {
            let (t, _) = Self::param_expr(&c.expr, &s.params);
            fs.push(Formula::atom(t, c.rel, k(0)));
        }
        let (n, d) = Self::param_expr(&self.ta.env.size_fn, &s.params);
        let total = LinTerm::sum(s.kappa.iter().map(String::as_str)) * d;
        fs.push(Formula::eq(total, n));
        Formula::and(fs)
    }

    /// κ(ℓ) = 0 outside the initial set and all shared variables zero.
    pub fn initial(&self, s: &SymbolicConfig) -> Formula {
        let mut fs = Vec::new();
        for l in 0..self.ta.locations.len() {
            if !self.ta.is_initial(l) {
                fs.push(Formula::eq(term(&s.kappa[l]), k(0)));
            }
        }
        for g in &s.globals {
            fs.push(Formula::eq(term(g), k(0)));
        }
        Formula::and(fs)
    }

    /// Fixes `s` to the concrete configuration `c`.
    pub fn equals_concrete(&self, s: &SymbolicConfig, c: &Configuration) -> Formula {
        let pairs = s
            .kappa
            .iter()
            .zip(&c.kappa)
            .chain(s.globals.iter().zip(&c.globals))
            .chain(s.params.iter().zip(&c.params));
        Formula::and(pairs.map(|(v, &x)| Formula::eq(term(v), k(x as i64))))
    }

    pub fn same_context(&self, a: &SymbolicConfig, b: &SymbolicConfig) -> Formula {
        Formula::and(
            self.guards
                .iter()
                .map(|g| Formula::iff(self.guard_at(g, a), self.guard_at(g, b))),
        )
    }

    /// Parameter equality, RC, N-equality and (optionally) context equality.
    pub fn phi_base(&self, a: &SymbolicConfig, b: &SymbolicConfig, context: bool) -> Formula {
        let mut fs = Vec::new();
        for (p, q) in a.params.iter().zip(&b.params) {
            if p != q {
                fs.push(Formula::eq(term(p), term(q)));
            }
        }
        fs.push(self.admissible(a));
        fs.push(self.admissible(b));
        if context {
            fs.push(self.same_context(a, b));
        }
        Formula::and(fs)
    }

    /// Incoming minus outgoing firings equal the counter delta, per location.
    pub fn phi_flow(&self, a: &SymbolicConfig, b: &SymbolicConfig, x: &SteadyCounts) -> Formula {
        let mut fs = Vec::new();
        for l in 0..self.ta.locations.len() {
            let mut t = LinTerm::default();
            for (r, rule) in self.ta.rules.iter().enumerate() {
                if rule.to == l {
                    t.add_term(&x.x[r], 1);
                }
                if rule.from == l {
                    t.add_term(&x.x[r], -1);
                }
            }
            fs.push(Formula::eq(t, term(&b.kappa[l]) - term(&a.kappa[l])));
        }
        Formula::and(fs)
    }

    pub fn phi_shared(&self, a: &SymbolicConfig, b: &SymbolicConfig, x: &SteadyCounts) -> Formula {
        let mut fs = Vec::new();
        for v in 0..self.ta.shared.len() {
            let mut t = LinTerm::default();
            for (r, rule) in self.ta.rules.iter().enumerate() {
                t.add_term(&x.x[r], rule.increments(v) as i64);
            }
            fs.push(Formula::eq(t, term(&b.globals[v]) - term(&a.globals[v])));
        }
        Formula::and(fs)
    }

    pub fn phi_enabled(&self, a: &SymbolicConfig, x: &SteadyCounts) -> Formula {
        Formula::and((0..self.ta.rules.len()).map(|r| {
            let gs = self.ta.rule_guards(r);
            Formula::implies(
                Formula::gt(term(&x.x[r]), k(0)),
                Formula::and(gs.iter().map(|g| self.guard_at(g, a))),
            )
        }))
    }

    /// Rank encoding: a fired rule either starts at an occupied location or
    /// is fed by a fired rule of smaller rank.
    pub fn phi_appl(&self, a: &SymbolicConfig, x: &SteadyCounts) -> Formula {
        match self.appl {
            ApplEncoding::Rank => self.phi_appl_rank(a, x),
            ApplEncoding::Chains => self.phi_appl_chains(a, x),
        }
    }

    fn phi_appl_rank(&self, a: &SymbolicConfig, x: &SteadyCounts) -> Formula {
        Formula::and(self.ta.rules.iter().enumerate().map(|(r, rule)| {
            let mut alts = vec![Formula::gt(term(&a.kappa[rule.from]), k(0))];
            for (q, feeder) in self.ta.rules.iter().enumerate() {
                if q != r && feeder.to == rule.from {
                    alts.push(Formula::and([
                        Formula::gt(term(&x.x[q]), k(0)),
                        Formula::lt(term(&x.rho[q]), term(&x.rho[r])),
                    ]));
                }
            }
            Formula::implies(Formula::gt(term(&x.x[r]), k(0)), Formula::or(alts))
        }))
    }

    /// Direct transcription: for every fired rule some simple chain of fired
    /// rules ends in it and starts at an occupied location.
    pub fn phi_appl_chains(&self, a: &SymbolicConfig, x: &SteadyCounts) -> Formula {
        Formula::and((0..self.ta.rules.len()).map(|r| {
            let alts = simple_chains_into(self.ta, r).into_iter().map(|chain| {
                let head = &self.ta.rules[chain[0]];
                let mut fs = vec![Formula::gt(term(&a.kappa[head.from]), k(0))];
                fs.extend(chain.iter().map(|&q| Formula::gt(term(&x.x[q]), k(0))));
                Formula::and(fs)
            });
            Formula::implies(Formula::gt(term(&x.x[r]), k(0)), Formula::or(alts))
        }))
    }

    pub fn phi_steady(&self, a: &SymbolicConfig, b: &SymbolicConfig, x: &SteadyCounts) -> Formula {
        Formula::and([
            self.phi_base(a, b, true),
            self.phi_flow(a, b, x),
            self.phi_shared(a, b, x),
            self.phi_enabled(a, x),
            self.phi_appl(a, x),
        ])
    }

    /// At most one rule fired, no context constraint.
    pub fn phi_step(&self, a: &SymbolicConfig, b: &SymbolicConfig, y: &SteadyCounts) -> Formula {
        let total = LinTerm::sum(y.x.iter().map(String::as_str));
        let occupied = Formula::and(self.ta.rules.iter().enumerate().map(|(r, rule)| {
            Formula::implies(
                Formula::gt(term(&y.x[r]), k(0)),
                Formula::gt(term(&a.kappa[rule.from]), k(0)),
            )
        }));
        Formula::and([
            self.phi_base(a, b, false),
            self.phi_flow(a, b, y),
            self.phi_shared(a, b, y),
            self.phi_enabled(a, y),
            occupied,
            Formula::le(total, k(1)),
        ])
    }

    /// σ →* σ' through |Φ|+1 steady blocks and |Φ| single steps. `block`
    /// adds extra constraints per steady block (used for propositions).
    pub fn phi_reach_with(
        &mut self,
        from: &SymbolicConfig,
        to: &SymbolicConfig,
        block: &dyn Fn(&Encoder, &SymbolicConfig, &SymbolicConfig, &SteadyCounts) -> Formula,
    ) -> (Formula, ReachVars) {
        let kk = self.guards.len();
        let mut starts = vec![from.clone()];
        let mut ends = Vec::new();
        for i in 0..=kk {
            if i > 0 {
                starts.push(self.config("s"));
            }
            ends.push(if i == kk { to.clone() } else { self.config("e") });
        }
        let steady: Vec<SteadyCounts> = (0..=kk).map(|_| self.counts("b", true)).collect();
        let steps: Vec<SteadyCounts> = (0..kk).map(|_| self.counts("t", false)).collect();
        let pre = self.fresh_prefix("sum");
        let sums: Vec<String> = (0..self.ta.rules.len())
            .map(|r| {
                let v = format!("{pre}_{r}");
                self.problem.nat(v.clone());
                v
            })
            .collect();

        let mut fs = Vec::new();
        for i in 0..=kk {
            fs.push(self.phi_steady(&starts[i], &ends[i], &steady[i]));
            fs.push(block(self, &starts[i], &ends[i], &steady[i]));
            if i < kk {
                fs.push(self.phi_step(&ends[i], &starts[i + 1], &steps[i]));
            }
        }
        for (r, s) in sums.iter().enumerate() {
            let mut t = LinTerm::default();
            for c in steady.iter().chain(&steps) {
                t.add_term(&c.x[r], 1);
            }
            fs.push(Formula::eq(term(s), t));
        }
        (
            Formula::and(fs),
            ReachVars {
                starts,
                ends,
                steady,
                steps,
                sums,
            },
        )
    }

    pub fn phi_reach(&mut self, from: &SymbolicConfig, to: &SymbolicConfig) -> (Formula, ReachVars) {
        self.phi_reach_with(from, to, &|_, _, _, _| Formula::True)
    }

    /// Reads a configuration from a model.
    pub fn decode_config(&self, s: &SymbolicConfig, m: &Model) -> Configuration {
        let get = |v: &String| m[v] as u64;
        Configuration {
            kappa: s.kappa.iter().map(get).collect(),
            globals: s.globals.iter().map(get).collect(),
            params: s.params.iter().map(get).collect(),
        }
    }

    pub fn decode_counts(&self, x: &SteadyCounts, m: &Model) -> Vec<u64> {
        x.x.iter().map(|v| m[v] as u64).collect()
    }
}

/// All simple chains of rules `r1 … rs = r` with `r_i.to = r_{i+1}.from`.
pub fn simple_chains_into(ta: &ThresholdAutomaton, r: RuleId) -> Vec<Vec<RuleId>> {
    let mut out = Vec::new();
    let mut chain = vec![r];
    let mut used: BTreeSet<RuleId> = [r].into_iter().collect();
    fn go(
        ta: &ThresholdAutomaton,
        chain: &mut Vec<RuleId>,
        used: &mut BTreeSet<RuleId>,
        out: &mut Vec<Vec<RuleId>>,
    ) {
        let mut c = chain.clone();
        c.reverse();
        out.push(c);
        let head = ta.rules[*chain.last().expect("nonempty")].from;
        for (q, rule) in ta.rules.iter().enumerate() {
            if rule.to == head && !used.contains(&q) {
                used.insert(q);
                chain.push(q);
                go(ta, chain, used, out);
                chain.pop();
                used.remove(&q);
            }
        }
    }
    go(ta, &mut chain, &mut used, &mut out);
    out
}

/// Variables of a [`Encoder::phi_reach`] chain.
#[derive(Clone, Debug)]
pub struct ReachVars {
    pub starts: Vec<SymbolicConfig>,
    pub ends: Vec<SymbolicConfig>,
    pub steady: Vec<SteadyCounts>,
    pub steps: Vec<SteadyCounts>,
    pub sums: Vec<String>,
}

/// One steady segment of a decoded witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: Configuration,
    pub end: Configuration,
    pub counts: Vec<u64>,
    pub schedule: Schedule,
}

/// A decoded and realized reachability witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachWitness {
    pub segments: Vec<Segment>,
    /// `steps[i]` fires between `segments[i].end` and `segments[i+1].start`.
    pub steps: Vec<Option<RuleId>>,
    pub sums: Vec<u64>,
}

impl ReachWitness {
    pub fn initial(&self) -> &Configuration {
        &self.segments[0].start
    }

    pub fn last(&self) -> &Configuration {
        &self.segments.last().expect("at least one segment").end
    }

    /// Concatenation of all segment schedules and single steps.
    pub fn realize_path(&self) -> Schedule {
        let mut out = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            out.extend(&seg.schedule);
            if let Some(Some(r)) = self.steps.get(i) {
                out.push(*r);
            }
        }
        out
    }

    /// Drops empty segments whose endpoints coincide and merges segments
    /// that are not separated by a step. Sums are unaffected.
    pub fn collapsed(&self) -> ReachWitness {
        let mut segments: Vec<Segment> = Vec::new();
        let mut steps = Vec::new();
        let mut cur: Option<Segment> = None;
        let mut at = self.initial().clone();
        let empty_at = |c: &Configuration, n: usize| Segment {
            start: c.clone(),
            end: c.clone(),
            counts: vec![0; n],
            schedule: vec![],
        };
        for (i, seg) in self.segments.iter().enumerate() {
            if !seg.schedule.is_empty() {
                match cur.as_mut() {
                    Some(c) => {
                        c.end = seg.end.clone();
                        for (a, b) in c.counts.iter_mut().zip(&seg.counts) {
                            *a += b;
                        }
                        c.schedule.extend(&seg.schedule);
                    }
                    None => cur = Some(seg.clone()),
                }
            }
            at = seg.end.clone();
            if let Some(Some(r)) = self.steps.get(i) {
                segments.push(cur.take().unwrap_or_else(|| empty_at(&at, self.sums.len())));
                steps.push(Some(*r));
                at = self.segments[i + 1].start.clone();
            }
        }
        segments.push(cur.unwrap_or_else(|| empty_at(&at, self.sums.len())));
        ReachWitness {
            segments,
            steps,
            sums: self.sums.clone(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReachError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

impl From<RealizeError> for ReachError {
    fn from(e: RealizeError) -> Self {
        ReachError::InternalInvariantViolation(e.to_string())
    }
}

/// Decodes the blocks of a reach chain from a model, realizes every steady
/// block and checks the result against the model's configurations.
pub fn decode_reach(enc: &Encoder, vars: &ReachVars, m: &Model) -> Result<ReachWitness, ReachError> {
    let ta = enc.ta;
    if vars.steady.len() > enc.guards.len() + 1 {
        return Err(ReachError::InternalInvariantViolation(
            "more than |Φ|+1 steady segments".into(),
        ));
    }
    let mut segments = Vec::new();
    let mut steps = Vec::new();
    for i in 0..vars.steady.len() {
        let start = enc.decode_config(&vars.starts[i], m);
        let end = enc.decode_config(&vars.ends[i], m);
        let counts = enc.decode_counts(&vars.steady[i], m);
        let schedule = realize_steady(ta, &start, &counts)?;
        let reached = run(ta, &start, &schedule)
            .map_err(|e| ReachError::InternalInvariantViolation(e.to_string()))?;
        if reached != end {
            return Err(ReachError::InternalInvariantViolation(format!(
                "segment {i} realizes to {reached:?}, model says {end:?}"
            )));
        }
        let ctx = crate::semantics::context(&enc.guards, &start);
        if ctx != crate::semantics::context(&enc.guards, &end) {
            return Err(ReachError::InternalInvariantViolation(format!(
                "segment {i} is not steady"
            )));
        }
        if i < vars.steps.len() {
            let ys = enc.decode_counts(&vars.steps[i], m);
            let fired: Vec<RuleId> = ys
                .iter()
                .enumerate()
                .flat_map(|(r, &c)| std::iter::repeat_n(r, c as usize))
                .collect();
            if fired.len() > 1 {
                return Err(ReachError::InternalInvariantViolation("step fires >1 rule".into()));
            }
            let next = enc.decode_config(&vars.starts[i + 1], m);
            let after = run(ta, &end, &fired)
                .map_err(|e| ReachError::InternalInvariantViolation(e.to_string()))?;
            if after != next {
                return Err(ReachError::InternalInvariantViolation(format!(
                    "step {i} does not reach the next segment start"
                )));
            }
            steps.push(fired.first().copied());
        }
        segments.push(Segment {
            start,
            end,
            counts,
            schedule,
        });
    }
    let sums: Vec<u64> = vars.sums.iter().map(|v| m[v] as u64).collect();
    let w = ReachWitness {
        segments,
        steps,
        sums,
    };
    let mut fired = vec![0u64; ta.rules.len()];
    for &r in &w.realize_path() {
        fired[r] += 1;
    }
    if fired != w.sums {
        return Err(ReachError::InternalInvariantViolation("sums do not match schedule".into()));
    }
    Ok(w)
}

/// Where runs start.
#[derive(Clone, Debug)]
pub enum InitSpec {
    /// A fixed configuration (non-parameterized reachability).
    Concrete(Configuration),
    /// Any initial configuration with admissible parameters, optionally
    /// restricted to the given inclusive parameter ranges.
    Parameterized(Option<ParamBounds>),
}

#[derive(Clone, Debug)]
pub struct ReachQuery {
    pub init: InitSpec,
    /// Locations that must be empty in the target.
    pub zero: Vec<LocId>,
    /// Locations that must be occupied in the target.
    pub pos: Vec<LocId>,
    /// Bound on the total number of rule firings.
    pub bound: Option<u64>,
    pub appl: ApplEncoding,
}

impl ReachQuery {
    pub fn parameterized(zero: Vec<LocId>, pos: Vec<LocId>) -> Self {
        ReachQuery {
            init: InitSpec::Parameterized(None),
            zero,
            pos,
            bound: None,
            appl: ApplEncoding::Rank,
        }
    }
}

#[derive(Clone, Debug)]
pub enum ReachOutcome {
    Reachable(ReachWitness),
    Unreachable,
    Unknown(String),
}

impl ReachOutcome {
    pub fn is_reachable(&self) -> bool {
        matches!(self, ReachOutcome::Reachable(_))
    }
}

pub fn solve_reach(
    ta: &ThresholdAutomaton,
    q: &ReachQuery,
    cfg: &SolverConfig,
) -> Result<ReachOutcome, ReachError> {
    let mut enc = Encoder::new(ta);
    enc.appl = q.appl;
    let from = enc.config("init");
    let to = enc.config("goal");
    let mut fs = Vec::new();
    match &q.init {
        InitSpec::Concrete(c) => fs.push(enc.equals_concrete(&from, c)),
        InitSpec::Parameterized(bounds) => {
            fs.push(enc.initial(&from));
            if let Some(b) = bounds {
                for (p, &(lo, hi)) in b.iter().enumerate() {
                    fs.push(Formula::ge(term(&from.params[p]), k(lo as i64)));
                    fs.push(Formula::le(term(&from.params[p]), k(hi as i64)));
                }
            }
        }
    }
    for &l in &q.zero {
        fs.push(Formula::eq(term(&to.kappa[l]), k(0)));
    }
    for &l in &q.pos {
        fs.push(Formula::gt(term(&to.kappa[l]), k(0)));
    }
    let (reach, vars) = enc.phi_reach(&from, &to);
    fs.push(reach);
    if let Some(b) = q.bound {
        fs.push(Formula::le(
            LinTerm::sum(vars.sums.iter().map(String::as_str)),
            k(b as i64),
        ));
    }
    enc.problem.assert(Formula::and(fs));
    match solve(&enc.problem, cfg)? {
        Verdict::Sat(m) => {
            let w = decode_reach(&enc, &vars, &m)?;
            let last = w.last();
            if q.zero.iter().any(|&l| last.kappa[l] != 0) || q.pos.iter().any(|&l| last.kappa[l] == 0)
            {
                return Err(ReachError::InternalInvariantViolation(
                    "witness misses the target".into(),
                ));
            }
            Ok(ReachOutcome::Reachable(w))
        }
        Verdict::Unsat => Ok(ReachOutcome::Unreachable),
        Verdict::Unknown(r) => Ok(ReachOutcome::Unknown(r)),
    }
}
