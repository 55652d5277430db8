//! Per-proposition reachability and the lasso formula φ_live.

use std::collections::BTreeSet;

use super::lasso::{replay_lasso, LassoSegment, LassoWitness};
use super::normal::{cut_graph, to_normal_form, topo_orders, CutGraph, LOOP_END, LOOP_ST};
use super::{EltlError, EltlFormula, Prop};
use crate::presburger::{solve, Formula, LinTerm, SolverConfig, Verdict};
use crate::reach::{decode_reach, Encoder, ReachVars, ReachWitness, SteadyCounts, SymbolicConfig};
use crate::semantics::{lift, Schedule};
use crate::ta::{check_multiplicative, GuardKind, IntegerGuard, LocId, Multiplicative, ThresholdAutomaton};

fn term(v: &str) -> LinTerm {
    LinTerm::var(v)
}

fn k(c: i64) -> LinTerm {
    LinTerm::constant(c)
}

/// `p` evaluated at a symbolic configuration.
pub fn prop_at(enc: &Encoder, p: &Prop, s: &SymbolicConfig) -> Formula {
    match p {
        Prop::True => Formula::True,
        Prop::Zero(set) => Formula::and(set.iter().map(|&l| Formula::eq(term(&s.kappa[l]), k(0)))),
        Prop::NonZero(set) => {
            Formula::or(set.iter().map(|&l| Formula::gt(term(&s.kappa[l]), k(0))))
        }
        Prop::Guard(g) => enc.guard_at(g, s),
        Prop::And(ps) => Formula::and(ps.iter().map(|q| prop_at(enc, q, s))),
        Prop::Or(ps) => Formula::or(ps.iter().map(|q| prop_at(enc, q, s))),
        Prop::Not(q) => prop_at(enc, q, s).not(),
        Prop::Implies(a, b) => Formula::implies(prop_at(enc, a, s), prop_at(enc, b, s)),
    }
}

/// A global proposition split into the supported conjunct shapes.
#[derive(Clone, Debug, Default)]
struct Shape {
    zero: Vec<BTreeSet<LocId>>,
    nonzero: Vec<BTreeSet<LocId>>,
    /// `gf ⇒ cf` with `cf` given as (zero sets, nonzero sets).
    cond: Vec<(Prop, Shape)>,
}

impl Shape {
    fn extend(&mut self, other: Shape) {
        self.zero.extend(other.zero);
        self.nonzero.extend(other.nonzero);
        self.cond.extend(other.cond);
    }
}

fn is_guard_formula(p: &Prop) -> bool {
    match p {
        Prop::True | Prop::Guard(_) => true,
        Prop::And(ps) | Prop::Or(ps) => ps.iter().all(is_guard_formula),
        _ => false,
    }
}

/// Counter formula: conjunction of `S = 0` and `¬(S = 0)`.
fn counter_shape(p: &Prop) -> Option<Shape> {
    let mut s = Shape::default();
    match p {
        Prop::True => {}
        Prop::Zero(set) => s.zero.push(set.clone()),
        Prop::NonZero(set) => s.nonzero.push(set.clone()),
        Prop::Not(q) => match q.as_ref() {
            Prop::Zero(set) => s.nonzero.push(set.clone()),
            _ => return None,
        },
        Prop::And(ps) => {
            for q in ps {
                s.extend(counter_shape(q)?);
            }
        }
        _ => return None,
    }
    Some(s)
}

fn shape(p: &Prop) -> Result<Shape, EltlError> {
    if let Some(s) = counter_shape(p) {
        return Ok(s);
    }
    let unsupported = || EltlError::UnsupportedShape(format!("{p:?}"));
    match p {
        Prop::And(ps) => {
            let mut s = Shape::default();
            for q in ps {
                s.extend(shape(q)?);
            }
            Ok(s)
        }
        Prop::Implies(g, c) if is_guard_formula(g) => {
            let cf = counter_shape(c).ok_or_else(unsupported)?;
            Ok(Shape {
                cond: vec![((**g).clone(), cf)],
                ..Shape::default()
            })
        }
        _ => Err(unsupported()),
    }
}

fn counter_block(
    enc: &Encoder,
    s: &Shape,
    a: &SymbolicConfig,
    b: &SymbolicConfig,
    x: &SteadyCounts,
) -> Formula {
    let mut fs = Vec::new();
    for set in &s.zero {
        for c in [a, b] {
            fs.extend(set.iter().map(|&l| Formula::eq(term(&c.kappa[l]), k(0))));
        }
        for (r, rule) in enc.ta.rules.iter().enumerate() {
            if set.contains(&rule.to) {
                fs.push(Formula::eq(term(&x.x[r]), k(0)));
            }
        }
    }
    for set in &s.nonzero {
        for c in [a, b] {
            fs.push(Formula::or(set.iter().map(|&l| Formula::gt(term(&c.kappa[l]), k(0)))));
        }
    }
    Formula::and(fs)
}

/// Strengthening of one steady block. Guards of `gf` are in Φ, so their
/// truth value is the same at both ends of the block.
fn block(enc: &Encoder, s: &Shape, a: &SymbolicConfig, b: &SymbolicConfig, x: &SteadyCounts) -> Formula {
    let mut fs = vec![counter_block(enc, s, a, b, x)];
    for (g, cf) in &s.cond {
        fs.push(Formula::implies(prop_at(enc, g, a), counter_block(enc, cf, a, b, x)));
    }
    Formula::and(fs)
}

/// A path from `a` to `b` along which `p` holds (up to lifting by 2).
/// The encoder's guard set must contain the guards of `p`.
pub fn phi_prop(
    enc: &mut Encoder,
    p: &Prop,
    a: &SymbolicConfig,
    b: &SymbolicConfig,
) -> Result<(Formula, ReachVars), EltlError> {
    let s = shape(p)?;
    Ok(enc.phi_reach_with(a, b, &|e, x, y, c| block(e, &s, x, y, c)))
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub assume_multiplicative: bool,
    /// Stop after this many cut-graph orderings (the verdict is then Unknown
    /// unless a violation was found).
    pub max_orders: Option<usize>,
    pub solver: SolverConfig,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            assume_multiplicative: false,
            max_orders: None,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum SpecOutcome {
    /// No run satisfies the formula.
    Holds,
    Violated(Box<LassoWitness>),
    Unknown(String),
}

/// Guards of the automaton and of the specification, deduplicated.
fn guard_universe(ta: &ThresholdAutomaton, phi: &EltlFormula) -> Vec<IntegerGuard> {
    let mut guards = ta.guard_set();
    for g in phi.guards() {
        if !g.is_trivially_true() && !guards.contains(&g) {
            guards.push(g);
        }
    }
    guards
}

/// Searches for a lasso satisfying `phi`.
pub fn check_spec(
    ta: &ThresholdAutomaton,
    phi: &EltlFormula,
    opts: &CheckOptions,
) -> Result<SpecOutcome, EltlError> {
    let nf = to_normal_form(phi)?;
    let graph = cut_graph(&nf);
    let shapes: Vec<Shape> = graph
        .nodes
        .iter()
        .map(|n| shape(&n.global))
        .collect::<Result<_, _>>()?;
    if !opts.assume_multiplicative {
        match check_multiplicative(ta, &phi.guards()) {
            Multiplicative::Yes => {}
            Multiplicative::No(r) => return Err(EltlError::NotMultiplicative(r)),
            Multiplicative::Unknown => {
                return Err(EltlError::NotMultiplicative(
                    "the sufficient condition does not apply and no refutation was found".into(),
                ))
            }
        }
    }
    let guards = guard_universe(ta, phi);
    let mut unknown: Vec<String> = Vec::new();
    for (n, order) in topo_orders(&graph).enumerate() {
        if opts.max_orders.is_some_and(|m| n >= m) {
            unknown.push(format!("stopped after {n} orderings"));
            break;
        }
        log::debug!("ordering {n}: {order:?}");
        match check_order(ta, &graph, &shapes, &order, guards.clone(), &opts.solver)? {
            OrderResult::Sat(w) => return Ok(SpecOutcome::Violated(w)),
            OrderResult::Unsat => {}
            OrderResult::Unknown(r) => unknown.push(format!("ordering {n}: {r}")),
        }
    }
    Ok(if unknown.is_empty() {
        SpecOutcome::Holds
    } else {
        SpecOutcome::Unknown(unknown.join("; "))
    })
}

enum OrderResult {
    Sat(Box<LassoWitness>),
    Unsat,
    Unknown(String),
}

fn check_order(
    ta: &ThresholdAutomaton,
    graph: &CutGraph,
    shapes: &[Shape],
    order: &[usize],
    guards: Vec<IntegerGuard>,
    cfg: &SolverConfig,
) -> Result<OrderResult, EltlError> {
    let mut enc = Encoder::with_guards(ta, guards);
    let l = order.len() - 1;
    let c = order.iter().position(|&v| v == LOOP_ST).expect("loop_st present");
    debug_assert_eq!(order[l], LOOP_END);
    let eta: Vec<SymbolicConfig> = (0..=l).map(|_| enc.config("m")).collect();

    let mut fs = vec![enc.initial(&eta[0]), enc.admissible(&eta[0])];
    for (a, b) in eta[c].kappa.iter().zip(&eta[l].kappa) {
        fs.push(Formula::eq(term(a), term(b)));
    }
    let local = |i: usize| -> Prop {
        if i == c || i == l {
            Prop::True
        } else {
            graph.nodes[order[i]].local.clone()
        }
    };
    for (i, s) in eta.iter().enumerate() {
        fs.push(prop_at(&enc, &local(i), s));
    }

    let mut seg_vars = Vec::new();
    let mut seg_global = Vec::new();
    for i in 0..l {
        let upto = if i < c { i + 1 } else { l };
        let mut s = Shape::default();
        for &v in &order[..upto] {
            s.extend(shapes[v].clone());
        }
        let global = Prop::and(order[..upto].iter().map(|&v| graph.nodes[v].global.clone()));
        let (f, vars) = enc.phi_reach_with(&eta[i], &eta[i + 1], &|e, a, b, x| block(e, &s, a, b, x));
        fs.push(f);
        seg_vars.push(vars);
        seg_global.push(global);
    }

    // Firings inside the loop, per rule.
    let loop_sum: Vec<LinTerm> = (0..ta.rules.len())
        .map(|r| {
            let mut t = LinTerm::default();
            for vars in &seg_vars[c..] {
                t.add_term(&vars.sums[r], 1);
            }
            t
        })
        .collect();
    let total = loop_sum.iter().fold(LinTerm::default(), |acc, t| acc + t.clone());
    fs.push(Formula::ge(total, k(1)));
    for v in 0..ta.shared.len() {
        let mut inc = LinTerm::default();
        for (r, rule) in ta.rules.iter().enumerate() {
            let u = rule.increments(v) as i64;
            if u > 0 {
                inc = inc + loop_sum[r].clone() * u;
            }
        }
        let incremented = Formula::gt(inc.clone(), k(0));
        for r in 0..ta.rules.len() {
            if ta.rule_guards(r).iter().any(|g| g.kind == GuardKind::Fall && g.var == v) {
                fs.push(Formula::implies(
                    incremented.clone(),
                    Formula::eq(loop_sum[r].clone(), k(0)),
                ));
            }
        }
        // Guards on an incremented variable are already saturated at η_c.
        for g in enc.guards.iter().filter(|g| g.var == v) {
            let at = enc.guard_at(g, &eta[c]);
            let settled = match g.kind {
                GuardKind::Rise => at,
                GuardKind::Fall => at.not(),
            };
            fs.push(Formula::implies(incremented.clone(), settled));
        }
    }
    enc.problem.assert(Formula::and(fs));

    let m = match solve(&enc.problem, cfg)? {
        Verdict::Sat(m) => m,
        Verdict::Unsat => return Ok(OrderResult::Unsat),
        Verdict::Unknown(r) => return Ok(OrderResult::Unknown(r)),
    };
    let mut reach = Vec::new();
    for vars in &seg_vars {
        reach.push(decode_reach(&enc, vars, &m)?);
    }
    let milestones: Vec<_> = eta.iter().map(|s| enc.decode_config(s, &m)).collect();
    let ordering: Vec<String> = order.iter().map(|&v| graph.nodes[v].label.clone()).collect();
    let locals: Vec<Prop> = (0..=l).map(local).collect();

    let mut failures = Vec::new();
    for factor in [2u64, 1] {
        let w = LassoWitness {
            ordering: ordering.clone(),
            milestones: milestones.iter().map(|s| lift(s, factor)).collect(),
            local: locals.clone(),
            segments: reach
                .iter()
                .zip(&seg_global)
                .map(|(rw, g)| LassoSegment {
                    counts: rw.sums.iter().map(|s| s * factor).collect(),
                    schedule: lifted_schedule(rw, factor),
                    global: g.clone(),
                })
                .collect(),
            loop_start: c,
            lifted_by: factor,
        };
        match replay_lasso(ta, &w) {
            Ok(()) => return Ok(OrderResult::Sat(Box::new(w))),
            Err(e) => failures.push(format!("×{factor}: {e}")),
        }
    }
    Ok(OrderResult::Unknown(format!(
        "solver witness does not replay ({})",
        failures.join("; ")
    )))
}

/// Every steady block τ becomes τ^factor and every single step t becomes
/// t^factor.
fn lifted_schedule(w: &ReachWitness, factor: u64) -> Schedule {
    let mut out = Vec::new();
    for (i, seg) in w.segments.iter().enumerate() {
        for _ in 0..factor {
            out.extend(&seg.schedule);
        }
        if let Some(Some(r)) = w.steps.get(i) {
            out.extend(std::iter::repeat_n(*r, factor as usize));
        }
    }
    out
}
