//! Threshold automata: data model, guards and environments.
//!
//! A concrete automaton is [`ThresholdAutomaton`] (all coefficients are
//! rationals); a sketch is [`SketchTA`], where guard coefficients may be
//! indeterminates. Both share the generic [`Automaton`] representation, and
//! every identifier is an index into the corresponding name table.

mod expr;
mod format;
mod multiplicative;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use expr::{parse_linear, ExprError};
pub use format::{parse_ta, parse_ta_with, print_ta, ParseError, ParseOptions, Parsed};
pub use multiplicative::{check_multiplicative, Multiplicative};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = num_rational::Ratio<i64>;

/// Index into [`Automaton::locations`].
pub type LocId = usize;
/// Index into [`Automaton::shared`].
pub type VarId = usize;
/// Index into [`Environment::params`].
pub type ParamId = usize;
/// Index into [`Automaton::rules`].
pub type RuleId = usize;

/// A guard coefficient in a sketch: either a constant or a named unknown.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coefficient {
    Const(Rational),
    Indeterminate(String),
}

/// Coefficient domains usable inside [`LinearExpr`].
pub trait Coef: Clone + fmt::Debug + PartialEq {
    fn zero_coef() -> Self;
    fn is_zero_coef(&self) -> bool;
}

impl Coef for Rational {
    fn zero_coef() -> Self {
        Zero::zero()
    }
    fn is_zero_coef(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Coef for Coefficient {
    fn zero_coef() -> Self {
        Coefficient::Const(Zero::zero())
    }
    fn is_zero_coef(&self) -> bool {
        matches!(self, Coefficient::Const(c) if Zero::is_zero(c))
    }
}

impl From<Rational> for Coefficient {
    fn from(r: Rational) -> Self {
        Coefficient::Const(r)
    }
}

/// `constant + Σ coeffs[p] · p` over parameters. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearExpr<C: Coef = Rational> {
    pub constant: C,
    pub coeffs: BTreeMap<ParamId, C>,
}

impl<C: Coef> LinearExpr<C> {
    pub fn constant(c: C) -> Self {
        LinearExpr {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn with_coeffs(constant: C, coeffs: impl IntoIterator<Item = (ParamId, C)>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero_coef()).collect();
        LinearExpr { constant, coeffs }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl LinearExpr<Rational> {
    pub fn zero() -> Self {
        LinearExpr::constant(Rational::zero())
    }

    pub fn param(p: ParamId) -> Self {
        LinearExpr::with_coeffs(Rational::zero(), [(p, Rational::one())])
    }

    pub fn eval(&self, params: &[u64]) -> Rational {
        let mut acc = self.constant;
        for (&p, &c) in &self.coeffs {
            acc += c * Rational::from_integer(params[p] as i64);
        }
        acc
    }

    /// Evaluates at rational parameter values.
    pub fn eval_rational(&self, params: &[Rational]) -> Rational {
        let mut acc = self.constant;
        for (&p, &c) in &self.coeffs {
            acc += c * params[p];
        }
        acc
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&p, &c) in &other.coeffs {
            *coeffs.entry(p).or_insert_with(Rational::zero) -= c;
        }
        LinearExpr::with_coeffs(self.constant - other.constant, coeffs)
    }

    /// Least common multiple of all denominators.
    pub fn denominator_lcm(&self) -> i64 {
        self.coeffs
            .values()
            .fold(*self.constant.denom(), |acc, c| acc.lcm(c.denom()))
    }

    /// Multiplies by `d` (which must clear every denominator).
    pub fn scaled_to_int(&self, d: i64) -> IntExpr {
        let conv = |r: &Rational| {
            let s = *r * Rational::from_integer(d);
            debug_assert!(s.is_integer());
            s.to_integer()
        };
        IntExpr {
            constant: conv(&self.constant),
            coeffs: self
                .coeffs
                .iter()
                .map(|(&p, c)| (p, conv(c)))
                .filter(|(_, c)| *c != 0)
                .collect(),
        }
    }
}

/// Integer linear expression over parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntExpr {
    pub constant: i64,
    pub coeffs: BTreeMap<ParamId, i64>,
}

impl IntExpr {
    pub fn eval(&self, params: &[u64]) -> i128 {
        let mut acc = self.constant as i128;
        for (&p, &c) in &self.coeffs {
            acc += c as i128 * params[p] as i128;
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GuardKind {
    /// `x >= rhs`
    Rise,
    /// `x < rhs`
    Fall,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Guard<C: Coef = Rational> {
    pub var: VarId,
    pub kind: GuardKind,
    pub rhs: LinearExpr<C>,
}

/// A guard with denominators cleared: `scale · var ⋈ rhs(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegerGuard {
    pub var: VarId,
    pub kind: GuardKind,
    pub scale: i64,
    pub rhs: IntExpr,
}

impl IntegerGuard {
    pub fn holds(&self, value: u64, params: &[u64]) -> bool {
        let lhs = self.scale as i128 * value as i128;
        let rhs = self.rhs.eval(params);
        match self.kind {
            GuardKind::Rise => lhs >= rhs,
            GuardKind::Fall => lhs < rhs,
        }
    }

    /// `x >= c` with `c <= 0` and no parameters: always true.
    pub fn is_trivially_true(&self) -> bool {
        self.kind == GuardKind::Rise && self.rhs.coeffs.is_empty() && self.rhs.constant <= 0
    }

    /// Constant rise guard `x >= c` (after normalization), returning the
    /// smallest integer value of `x` that satisfies it.
    pub fn constant_rise_threshold(&self) -> Option<u64> {
        if self.kind != GuardKind::Rise || !self.rhs.coeffs.is_empty() {
            return None;
        }
        let c = self.rhs.constant;
        if c <= 0 {
            Some(0)
        } else {
            Some(Integer::div_ceil(&c, &self.scale) as u64)
        }
    }
}

/// Clears denominators: `D = lcm` of all denominators in the right-hand side.
pub fn normalize_guard(g: &Guard<Rational>) -> IntegerGuard {
    let d = g.rhs.denominator_lcm();
    IntegerGuard {
        var: g.var,
        kind: g.kind,
        scale: d,
        rhs: g.rhs.scaled_to_int(d),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn holds<T: PartialOrd>(self, a: T, b: T) -> bool {
        match self {
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Eq => a == b,
            Rel::Ge => a >= b,
            Rel::Gt => a > b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

/// A resilience constraint `expr ⋈ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub expr: LinearExpr<Rational>,
    pub rel: Rel,
}

impl Constraint {
    pub fn holds(&self, params: &[u64]) -> bool {
        self.rel.holds(self.expr.eval(params), Rational::zero())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub params: Vec<String>,
    pub resilience: Vec<Constraint>,
    pub size_fn: LinearExpr<Rational>,
}

impl Environment {
    pub fn admissible(&self, params: &[u64]) -> bool {
        params.len() == self.params.len() && self.resilience.iter().all(|c| c.holds(params))
    }

    /// `N(p)` if it is a nonnegative integer.
    pub fn size(&self, params: &[u64]) -> Option<u64> {
        let n = self.size_fn.eval(params);
        if n.is_integer() && !n.is_negative() {
            Some(n.to_integer() as u64)
        } else {
            None
        }
    }

    pub fn param_index(&self, name: &str) -> Option<ParamId> {
        self.params.iter().position(|p| p == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule<C: Coef = Rational> {
    pub id: String,
    pub from: LocId,
    pub to: LocId,
    pub guards: Vec<Guard<C>>,
    /// Nonzero increments only.
    pub update: BTreeMap<VarId, u64>,
}

impl<C: Coef> Rule<C> {
    pub fn is_self_loop(&self) -> bool {
        self.from == self.to
    }

    pub fn increments(&self, v: VarId) -> u64 {
        self.update.get(&v).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Automaton<C: Coef = Rational> {
    pub env: Environment,
    pub locations: Vec<String>,
    /// Sorted, nonempty.
    pub initial: Vec<LocId>,
    pub shared: Vec<String>,
    pub rules: Vec<Rule<C>>,
    /// Sorted, exactly the indeterminates occurring in guards (empty for concrete TAs).
    pub indeterminates: Vec<String>,
}

pub type ThresholdAutomaton = Automaton<Rational>;
pub type SketchTA = Automaton<Coefficient>;

impl<C: Coef> Automaton<C> {
    pub fn location_index(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn var_index(&self, name: &str) -> Option<VarId> {
        self.shared.iter().position(|v| v == name)
    }

    pub fn rule_index(&self, id: &str) -> Option<RuleId> {
        self.rules.iter().position(|r| r.id == id)
    }

    pub fn is_initial(&self, l: LocId) -> bool {
        self.initial.binary_search(&l).is_ok()
    }

    pub fn num_params(&self) -> usize {
        self.env.params.len()
    }
}

impl ThresholdAutomaton {
    /// Normalized guards of a rule, with trivially true guards stripped.
    pub fn rule_guards(&self, r: RuleId) -> Vec<IntegerGuard> {
        self.rules[r]
            .guards
            .iter()
            .map(normalize_guard)
            .filter(|g| !g.is_trivially_true())
            .collect()
    }

    /// All distinct normalized guards of the automaton (the set Φ), in a
    /// deterministic order.
    pub fn guard_set(&self) -> Vec<IntegerGuard> {
        let set: BTreeSet<IntegerGuard> = (0..self.rules.len())
            .flat_map(|r| self.rule_guards(r))
            .collect();
        set.into_iter().collect()
    }

    /// True if every guard is a constant rise guard (after stripping `x >= 0`).
    pub fn is_constant_rise(&self) -> bool {
        (0..self.rules.len()).all(|r| {
            self.rule_guards(r)
                .iter()
                .all(|g| g.constant_rise_threshold().is_some())
        })
    }

    /// Rules having a fall guard on `v`.
    pub fn fall_rules(&self, v: VarId) -> Vec<RuleId> {
        (0..self.rules.len())
            .filter(|&r| {
                self.rule_guards(r)
                    .iter()
                    .any(|g| g.var == v && g.kind == GuardKind::Fall)
            })
            .collect()
    }

    pub fn max_update(&self) -> u64 {
        self.rules
            .iter()
            .flat_map(|r| r.update.values().copied())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for GuardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GuardKind::Rise => ">=",
            GuardKind::Fall => "<",
        })
    }
}

/// Renders a rational as `p` or `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn normalize_half_n() {
        let g = Guard {
            var: 0,
            kind: GuardKind::Rise,
            rhs: LinearExpr::with_coeffs(r(0, 1), [(0, r(1, 2))]),
        };
        let ig = normalize_guard(&g);
        assert_eq!(ig.scale, 2);
        assert_eq!(ig.rhs.coeffs[&0], 1);
        assert_eq!(ig.rhs.constant, 0);
    }

    #[test]
    fn normalize_lcm_of_three_and_two() {
        // x < 2/3 n + 1/2 t
        let g = Guard {
            var: 0,
            kind: GuardKind::Fall,
            rhs: LinearExpr::with_coeffs(r(0, 1), [(0, r(2, 3)), (1, r(1, 2))]),
        };
        let ig = normalize_guard(&g);
        assert_eq!(ig.scale, 6);
        assert_eq!(ig.rhs.coeffs[&0], 4);
        assert_eq!(ig.rhs.coeffs[&1], 3);
        for n in 0..=20u64 {
            for t in 0..=20u64 {
                for x in 0..=20u64 {
                    let exact = r(x as i64, 1) < g.rhs.eval(&[n, t]);
                    assert_eq!(exact, ig.holds(x, &[n, t]));
                }
            }
        }
    }

    #[test]
    fn constant_rise_threshold_rounds_up() {
        let ig = IntegerGuard {
            var: 0,
            kind: GuardKind::Rise,
            scale: 2,
            rhs: IntExpr {
                constant: 3,
                coeffs: BTreeMap::new(),
            },
        };
        assert_eq!(ig.constant_rise_threshold(), Some(2));
    }
}
