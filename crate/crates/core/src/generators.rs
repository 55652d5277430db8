//! Test automata compiled from 3-SAT and Σ₂-3-SAT instances, with
//! brute-force logical oracles.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::eltl::{EltlFormula, Prop};
use crate::semantics::Configuration;
use crate::ta::{
    normalize_guard, Coef, Coefficient, Constraint, Environment, Guard, GuardKind,
    LinearExpr, Rational, Rel, Rule, SketchTA, ThresholdAutomaton,
};

/// Largest number of variables the brute-force oracles accept.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("{0} variables exceed the brute-force limit of {BRUTE_FORCE_LIMIT}")]
    TooLarge(usize),
}

/// A CNF formula with at most three literals per clause. Literal `i`
/// stands for `x_i`, `-i` for `¬x_i` (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf3 {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, GenError> {
        if num_vars == 0 {
            return Err(GenError::Invalid("at least one variable is required".into()));
        }
        check_clauses(&clauses, num_vars, "clause")?;
        Ok(Cnf3 { num_vars, clauses })
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&lit| literal(lit, assignment)))
    }
}

fn literal(lit: i32, assignment: &[bool]) -> bool {
    let v = assignment[lit.unsigned_abs() as usize - 1];
    if lit > 0 {
        v
    } else {
        !v
    }
}

fn check_clauses(clauses: &[Vec<i32>], num_vars: usize, what: &str) -> Result<(), GenError> {
    for (j, c) in clauses.iter().enumerate() {
        if c.is_empty() || c.len() > 3 {
            return Err(GenError::Invalid(format!(
                "{what} {} has {} literals (expected 1 to 3)",
                j + 1,
                c.len()
            )));
        }
        if let Some(&bad) = c
            .iter()
            .find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars)
        {
            return Err(GenError::Invalid(format!(
                "{what} {}: literal {bad} out of range 1..={num_vars}",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Reads 0-terminated integer lines after skipping comments (`c ...`) and
/// returning the header fields and any quantifier lines.
struct Lines {
    header: Vec<String>,
    quantifiers: Vec<(usize, char, Vec<i32>)>,
    items: Vec<Vec<i32>>,
}

fn read_lines(text: &str, header_kind: &str) -> Result<Lines, GenError> {
    let mut header: Option<Vec<String>> = None;
    let mut quantifiers = Vec::new();
    let mut items = Vec::new();
    let mut pending: Vec<i32> = Vec::new();
    let mut pending_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        let err = |m: String| GenError::Syntax { line, message: m };
        if let Some(rest) = t.strip_prefix('p') {
            if header.is_some() {
                return Err(err("duplicate header".into()));
            }
            let fields: Vec<String> = rest.split_whitespace().map(String::from).collect();
            if fields.first().map(String::as_str) != Some(header_kind) {
                return Err(err(format!("expected `p {header_kind} ...`")));
            }
            header = Some(fields[1..].to_vec());
            continue;
        }
        if header.is_none() {
            return Err(err(format!("missing `p {header_kind}` header")));
        }
        let (quant, body) = match t.chars().next() {
            Some(q @ ('e' | 'a')) => (Some(q), &t[1..]),
            _ => (None, t),
        };
        let mut nums = Vec::new();
        for tok in body.split_whitespace() {
            nums.push(
                tok.parse::<i32>()
                    .map_err(|_| err(format!("expected an integer, found `{tok}`")))?,
            );
        }
        if let Some(q) = quant {
            if !pending.is_empty() {
                return Err(err("quantifier line inside an unterminated clause".into()));
            }
            if nums.last() != Some(&0) {
                return Err(err("quantifier line must end with 0".into()));
            }
            nums.pop();
            quantifiers.push((line, q, nums));
            continue;
        }
        if pending.is_empty() {
            pending_line = line;
        }
        for n in nums {
            if n == 0 {
                items.push(std::mem::take(&mut pending));
            } else {
                pending.push(n);
            }
        }
    }
    if !pending.is_empty() {
        return Err(GenError::Syntax {
            line: pending_line,
            message: "clause is not terminated by 0".into(),
        });
    }
    let header = header.ok_or(GenError::Syntax {
        line: 0,
        message: format!("missing `p {header_kind}` header"),
    })?;
    Ok(Lines {
        header,
        quantifiers,
        items,
    })
}

fn header_numbers(h: &[String], n: usize, kind: &str) -> Result<Vec<usize>, GenError> {
    let err = || GenError::Syntax {
        line: 0,
        message: format!("header of `p {kind}` needs {n} counts"),
    };
    if h.len() != n {
        return Err(err());
    }
    h.iter().map(|s| s.parse().map_err(|_| err())).collect()
}

/// Parses DIMACS-like CNF: `p cnf <vars> <clauses>` followed by clauses of
/// at most three signed literals, each terminated by 0.
pub fn parse_dimacs(text: &str) -> Result<Cnf3, GenError> {
    let lines = read_lines(text, "cnf")?;
    let h = header_numbers(&lines.header, 2, "cnf")?;
    if let Some((line, _, _)) = lines.quantifiers.first() {
        return Err(GenError::Syntax {
            line: *line,
            message: "quantifier lines are not allowed in CNF".into(),
        });
    }
    if lines.items.len() != h[1] {
        return Err(GenError::Invalid(format!(
            "header announces {} clauses, found {}",
            h[1],
            lines.items.len()
        )));
    }
    Cnf3::new(h[0], lines.items)
}

pub fn print_dimacs(f: &Cnf3) -> String {
    let mut s = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for c in &f.clauses {
        for l in c {
            s.push_str(&format!("{l} "));
        }
        s.push_str("0\n");
    }
    s
}

/// Exhaustive satisfiability check.
pub fn brute_sat(f: &Cnf3) -> Result<bool, GenError> {
    if f.num_vars > BRUTE_FORCE_LIMIT {
        return Err(GenError::TooLarge(f.num_vars));
    }
    Ok(assignments(f.num_vars).any(|a| f.eval(&a)))
}

fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

/// Random CNF with 1..=max_vars variables and 0..=max_clauses clauses of 1 to
/// 3 literals over distinct variables.
pub fn random_cnf(rng: &mut impl Rng, max_vars: usize, max_clauses: usize) -> Cnf3 {
    let n = rng.gen_range(1..=max_vars.max(1));
    let m = rng.gen_range(0..=max_clauses);
    let clauses = (0..m).map(|_| random_term(rng, n)).collect();
    Cnf3 {
        num_vars: n,
        clauses,
    }
}

fn random_term(rng: &mut impl Rng, n: usize) -> Vec<i32> {
    let len = rng.gen_range(1..=3.min(n));
    let mut vars: Vec<usize> = (1..=n).collect();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let v = vars.swap_remove(rng.gen_range(0..vars.len()));
        out.push(if rng.gen_bool(0.5) { v as i32 } else { -(v as i32) });
    }
    out
}

fn rise<C: Coef>(var: usize, rhs: LinearExpr<C>) -> Guard<C> {
    Guard {
        var,
        kind: GuardKind::Rise,
        rhs,
    }
}

fn fall<C: Coef>(var: usize, rhs: LinearExpr<C>) -> Guard<C> {
    Guard {
        var,
        kind: GuardKind::Fall,
        rhs,
    }
}

fn konst(c: i64) -> LinearExpr {
    LinearExpr::constant(Rational::from_integer(c))
}

fn rule<C: Coef>(
    id: String,
    from: usize,
    to: usize,
    guards: Vec<Guard<C>>,
    incs: impl IntoIterator<Item = usize>,
) -> Rule<C> {
    Rule {
        id,
        from,
        to,
        guards,
        update: incs.into_iter().map(|v| (v, 1)).collect(),
    }
}

/// Which automaton [`gen_3sat`] builds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SatVariant {
    /// Guarded choice rules; parameterized coverability of `l_F`.
    #[default]
    Param,
    /// Unguarded, update-free choice rules; coverability from one process
    /// per `l_i`.
    NonParam,
}

/// The coverability automaton of a CNF formula.
///
/// Locations `l_i`, `top_i`, `bot_i` per variable, then `l_mid`, `l_F`;
/// shared variables `y_i`, `ny_i` per variable, then `c_j` per clause;
/// one parameter `k` with resilience `true` and `N(k) = k`.
pub fn gen_3sat(f: &Cnf3, variant: SatVariant) -> ThresholdAutomaton {
    let n = f.num_vars;
    let m = f.clauses.len();
    let mut locations = Vec::new();
    for i in 1..=n {
        locations.extend([format!("l_{i}"), format!("top_{i}"), format!("bot_{i}")]);
    }
    locations.extend(["l_mid".to_string(), "l_F".to_string()]);
    let (l, top, bot) = (|i: usize| 3 * i, |i: usize| 3 * i + 1, |i: usize| 3 * i + 2);
    let (mid, fin) = (3 * n, 3 * n + 1);

    let mut shared = Vec::new();
    for i in 1..=n {
        shared.extend([format!("y_{i}"), format!("ny_{i}")]);
    }
    shared.extend((1..=m).map(|j| format!("c_{j}")));
    let (y, ny, c) = (|i: usize| 2 * i, |i: usize| 2 * i + 1, |j: usize| 2 * n + j);

    let occurs = |lit: i32| -> BTreeSet<usize> {
        (0..m).filter(|&j| f.clauses[j].contains(&lit)).map(c).collect()
    };
    let mut rules = Vec::new();
    for i in 0..n {
        let k = i + 1;
        match variant {
            SatVariant::Param => {
                rules.push(rule(format!("set_{k}"), l(i), top(i), vec![fall(ny(i), konst(1))], [y(i)]));
                rules.push(rule(format!("clear_{k}"), l(i), bot(i), vec![fall(y(i), konst(1))], [ny(i)]));
            }
            SatVariant::NonParam => {
                rules.push(rule(format!("set_{k}"), l(i), top(i), vec![], []));
                rules.push(rule(format!("clear_{k}"), l(i), bot(i), vec![], []));
            }
        }
    }
    for i in 0..n {
        let k = i + 1;
        rules.push(rule(format!("pos_{k}"), top(i), mid, vec![], occurs(k as i32)));
        rules.push(rule(format!("neg_{k}"), bot(i), mid, vec![], occurs(-(k as i32))));
    }
    rules.push(rule(
        "final".into(),
        mid,
        fin,
        (0..m).map(|j| rise(c(j), konst(1))).collect(),
        [],
    ));

    ThresholdAutomaton {
        env: Environment {
            params: vec!["k".into()],
            resilience: vec![],
            size_fn: LinearExpr::param(0),
        },
        locations,
        initial: (0..n).map(l).collect(),
        shared,
        rules,
        indeterminates: vec![],
    }
}

/// The initial configuration of the non-parameterized reduction: one
/// process in every `l_i`.
pub fn nonparam_initial(ta: &ThresholdAutomaton) -> Configuration {
    let mut kappa = vec![0; ta.locations.len()];
    for &l in &ta.initial {
        kappa[l] = 1;
    }
    Configuration::new(kappa, vec![0; ta.shared.len()], vec![ta.initial.len() as u64])
}

/// `∃ x_1..x_m ∀ y_1..y_k φ(x, y)` with `φ` in DNF. Literal `i` in
/// `1..=m` is `x_i`, `m + j` is `y_j`; negative literals are negations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sigma2Instance {
    pub exists_vars: usize,
    pub forall_vars: usize,
    pub dnf: Vec<Vec<i32>>,
}

impl Sigma2Instance {
    pub fn new(exists_vars: usize, forall_vars: usize, dnf: Vec<Vec<i32>>) -> Result<Self, GenError> {
        check_clauses(&dnf, exists_vars + forall_vars, "term")?;
        Ok(Sigma2Instance {
            exists_vars,
            forall_vars,
            dnf,
        })
    }

    pub fn eval(&self, x: &[bool], y: &[bool]) -> bool {
        let all: Vec<bool> = x.iter().chain(y).copied().collect();
        self.dnf
            .iter()
            .any(|t| t.iter().all(|&lit| literal(lit, &all)))
    }
}

/// Parses the QDIMACS-like format: `p dnf <vars> <terms>`, then an
/// `e <vars> 0` line and an optional `a <vars> 0` line, then terms of at
/// most three literals terminated by 0. Existential variables become
/// `x_1..`, universal ones `y_1..`, in the order listed.
pub fn parse_qdimacs_lite(text: &str) -> Result<Sigma2Instance, GenError> {
    let lines = read_lines(text, "dnf")?;
    let h = header_numbers(&lines.header, 2, "dnf")?;
    let mut exists = Vec::new();
    let mut forall = Vec::new();
    for (line, q, vars) in &lines.quantifiers {
        let target = if *q == 'e' { &mut exists } else { &mut forall };
        for &v in vars {
            if v <= 0 || v as usize > h[0] {
                return Err(GenError::Syntax {
                    line: *line,
                    message: format!("variable {v} out of range 1..={}", h[0]),
                });
            }
            target.push(v as usize);
        }
    }
    let order: Vec<usize> = exists.iter().chain(&forall).copied().collect();
    let distinct: BTreeSet<usize> = order.iter().copied().collect();
    if distinct.len() != order.len() || order.len() != h[0] {
        return Err(GenError::Invalid(
            "every variable must be quantified exactly once".into(),
        ));
    }
    if lines.items.len() != h[1] {
        return Err(GenError::Invalid(format!(
            "header announces {} terms, found {}",
            h[1],
            lines.items.len()
        )));
    }
    let pos: BTreeMap<usize, i32> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as i32 + 1))
        .collect();
    let dnf = lines
        .items
        .iter()
        .map(|t| {
            t.iter()
                .map(|&l| {
                    let v = pos.get(&(l.unsigned_abs() as usize)).copied().ok_or_else(|| {
                        GenError::Invalid(format!("literal {l} out of range"))
                    })?;
                    Ok(if l > 0 { v } else { -v })
                })
                .collect::<Result<Vec<i32>, GenError>>()
        })
        .collect::<Result<_, _>>()?;
    Sigma2Instance::new(exists.len(), forall.len(), dnf)
}

pub fn print_qdimacs_lite(q: &Sigma2Instance) -> String {
    let total = q.exists_vars + q.forall_vars;
    let mut s = format!("p dnf {total} {}\n", q.dnf.len());
    let list = |r: std::ops::RangeInclusive<usize>| {
        r.map(|v| format!("{v} ")).collect::<String>()
    };
    s.push_str(&format!("e {}0\n", list(1..=q.exists_vars)));
    if q.forall_vars > 0 {
        s.push_str(&format!("a {}0\n", list(q.exists_vars + 1..=total)));
    }
    for t in &q.dnf {
        for l in t {
            s.push_str(&format!("{l} "));
        }
        s.push_str("0\n");
    }
    s
}

/// Exhaustive evaluation of `∃x ∀y φ(x, y)`.
pub fn brute_sigma2(q: &Sigma2Instance) -> Result<bool, GenError> {
    let total = q.exists_vars + q.forall_vars;
    if total > BRUTE_FORCE_LIMIT {
        return Err(GenError::TooLarge(total));
    }
    Ok(assignments(q.exists_vars)
        .any(|x| assignments(q.forall_vars).all(|y| q.eval(&x, &y))))
}

/// Random instance with 1..=max_exists ∃-variables, 0..=max_forall
/// ∀-variables and 1..=max_terms terms.
pub fn random_sigma2(
    rng: &mut impl Rng,
    max_exists: usize,
    max_forall: usize,
    max_terms: usize,
) -> Sigma2Instance {
    let m = rng.gen_range(1..=max_exists.max(1));
    let k = rng.gen_range(0..=max_forall);
    let t = rng.gen_range(1..=max_terms.max(1));
    let dnf = (0..t).map(|_| random_term(rng, m + k)).collect();
    Sigma2Instance {
        exists_vars: m,
        forall_vars: k,
        dnf,
    }
}

/// The synthesis sketch of a Σ₂ instance and the violation formula.
///
/// The x-chain `x0 → … → x_m` has two rules per step: `a < v_i·n ↦ ++b_i`
/// and `a ≥ v_i·n ↦ ++nb_i` (`a` is never incremented, so the first one is
/// enabled iff `v_i > 0`). From `x_m` processes enter `y0`; each ∀-variable
/// is a gadget `y_{j-1} → z_j / zn_j → y_j` in which all `n` processes must
/// agree (`c_j ≥ n` or `nc_j ≥ n`). Each term of the DNF yields a rule
/// `y_k → F`, and `y_k`, `F` carry self-loops. A run satisfying the formula
/// parks a process in `y_k` with no term unlocked, so `TA[μ]` has none iff
/// every choice of the ∀-variables satisfies the DNF under the ∃-values
/// encoded by `μ`.
pub fn gen_sigma2(q: &Sigma2Instance) -> (SketchTA, EltlFormula) {
    let (m, k) = (q.exists_vars, q.forall_vars);
    let mut locations: Vec<String> = (0..=m).map(|i| format!("x{i}")).collect();
    locations.push("y0".into());
    for j in 1..=k {
        locations.extend([format!("z{j}"), format!("zn{j}"), format!("y{j}")]);
    }
    locations.push("F".into());
    let x = |i: usize| i;
    let y = |j: usize| if j == 0 { m + 1 } else { m + 1 + 3 * j };
    let (z, zn) = (|j: usize| m + 3 * j - 1, |j: usize| m + 3 * j);
    let fin = locations.len() - 1;

    let mut shared = vec!["a".to_string()];
    for i in 1..=m {
        shared.extend([format!("b{i}"), format!("nb{i}")]);
    }
    for j in 1..=k {
        shared.extend([format!("c{j}"), format!("nc{j}")]);
    }
    let a = 0;
    let (b, nb) = (|i: usize| 2 * i - 1, |i: usize| 2 * i);
    let (c, nc) = (|j: usize| 2 * m + 2 * j - 1, |j: usize| 2 * m + 2 * j);

    let n_param = 0;
    let cst = |r: i64| Coefficient::Const(Rational::from_integer(r));
    let v_times_n = |i: usize| LinearExpr {
        constant: cst(0),
        coeffs: [(n_param, Coefficient::Indeterminate(format!("v{i}")))].into(),
    };
    let n_expr = || LinearExpr::with_coeffs(cst(0), [(n_param, cst(1))]);
    let one = || LinearExpr::<Coefficient>::constant(cst(1));

    let mut rules: Vec<Rule<Coefficient>> = Vec::new();
    for i in 1..=m {
        rules.push(rule(format!("t{i}"), x(i - 1), x(i), vec![fall(a, v_times_n(i))], [b(i)]));
        rules.push(rule(format!("f{i}"), x(i - 1), x(i), vec![rise(a, v_times_n(i))], [nb(i)]));
    }
    rules.push(rule("enter".into(), x(m), y(0), vec![], []));
    for j in 1..=k {
        rules.push(rule(format!("pick{j}"), y(j - 1), z(j), vec![], [c(j)]));
        rules.push(rule(format!("npick{j}"), y(j - 1), zn(j), vec![], [nc(j)]));
        rules.push(rule(format!("agree{j}"), z(j), y(j), vec![rise(c(j), n_expr())], []));
        rules.push(rule(format!("nagree{j}"), zn(j), y(j), vec![rise(nc(j), n_expr())], []));
    }
    let var_of = |lit: i32| -> usize {
        let v = lit.unsigned_abs() as usize;
        match (v <= m, lit > 0) {
            (true, true) => b(v),
            (true, false) => nb(v),
            (false, true) => c(v - m),
            (false, false) => nc(v - m),
        }
    };
    let term_guards: Vec<Vec<Guard<Coefficient>>> = q
        .dnf
        .iter()
        .map(|t| {
            let vars: BTreeSet<usize> = t.iter().map(|&l| var_of(l)).collect();
            vars.into_iter().map(|v| rise(v, one())).collect()
        })
        .collect();
    for (d, gs) in term_guards.iter().enumerate() {
        rules.push(rule(format!("term{}", d + 1), y(k), fin, gs.clone(), []));
    }
    rules.push(rule("stay".into(), y(k), y(k), vec![], []));
    rules.push(rule("done".into(), fin, fin, vec![], []));

    let sketch = SketchTA {
        env: Environment {
            params: vec!["n".into()],
            resilience: vec![Constraint {
                expr: LinearExpr::with_coeffs(-Rational::one(), [(n_param, Rational::one())]),
                rel: Rel::Ge,
            }],
            size_fn: LinearExpr::param(n_param),
        },
        locations,
        initial: vec![x(0)],
        shared,
        rules,
        indeterminates: {
            let mut v: Vec<String> = (1..=m).map(|i| format!("v{i}")).collect();
            v.sort();
            v
        },
    };

    // The term guards only use constant coefficients.
    let unlocked = Prop::Or(
        term_guards
            .iter()
            .map(|gs| {
                Prop::and(gs.iter().map(|g| {
                    Prop::Guard(normalize_guard(&Guard {
                        var: g.var,
                        kind: g.kind,
                        rhs: konst(1),
                    }))
                }))
            })
            .collect(),
    );
    let parked = Prop::Implies(Box::new(unlocked), Box::new(Prop::Zero([y(k)].into())));
    let phi = EltlFormula::And(vec![
        EltlFormula::F(Box::new(EltlFormula::G(Box::new(EltlFormula::Prop(parked))))),
        EltlFormula::G(Box::new(EltlFormula::Prop(Prop::Zero([fin].into())))),
    ]);
    (sketch, phi)
}

/// Assignment of the sketch's indeterminates encoding `x`: `v_i = 1` iff
/// `x_i` is true.
pub fn sigma2_assignment(x: &[bool]) -> BTreeMap<String, Rational> {
    x.iter()
        .enumerate()
        .map(|(i, &b)| {
            (
                format!("v{}", i + 1),
                if b { Rational::one() } else { Rational::zero() },
            )
        })
        .collect()
}

/// Size caps of the random automaton family.
#[derive(Clone, Copy, Debug)]
pub struct RandomTaCaps {
    pub max_locations: usize,
    pub max_rules: usize,
    pub max_shared: usize,
}

impl Default for RandomTaCaps {
    fn default() -> Self {
        RandomTaCaps {
            max_locations: 5,
            max_rules: 8,
            max_shared: 2,
        }
    }
}

/// Environments of the random family with the guard thresholds that make
/// sense for them.
const ENVIRONMENTS: &[(&[&str], &[&str], &str, &[&str])] = &[
    (&["n"], &["n >= 1"], "n", &["1", "2", "n", "n - 1", "n/2"]),
    (&["n", "t"], &["n > 2*t"], "n", &["1", "t", "t + 1", "n - t", "(n + t)/2", "n - 2*t"]),
    (
        &["n", "t", "f"],
        &["n > 3*t", "t >= f"],
        "n - f",
        &["1", "t + 1 - f", "n - t - f", "t + 1", "2*t + 1 - f"],
    ),
];

fn pick<'a, T>(rng: &mut impl Rng, xs: &'a [T]) -> &'a T {
    &xs[rng.gen_range(0..xs.len())]
}

fn build_random(
    rng: &mut impl Rng,
    caps: RandomTaCaps,
    env: (&[&str], &[&str], &str),
    guard: &mut dyn FnMut(&mut dyn rand::RngCore, &str) -> String,
    back_edges: bool,
) -> ThresholdAutomaton {
    let nl = rng.gen_range(2..=caps.max_locations.max(2));
    let nr = rng.gen_range(1..=caps.max_rules.max(1));
    let ns = rng.gen_range(1..=caps.max_shared.max(1));
    let locations: Vec<String> = (0..nl).map(|i| format!("l{i}")).collect();
    let shared: Vec<String> = (0..ns).map(|i| format!("x{i}")).collect();
    let ninit = rng.gen_range(1..=2.min(nl - 1));
    let mut rules = Vec::new();
    for r in 0..nr {
        let cyclic = back_edges && rng.gen_bool(0.15);
        let (from, to) = if cyclic {
            let from = rng.gen_range(0..nl);
            (from, rng.gen_range(0..=from))
        } else {
            let from = rng.gen_range(0..nl - 1);
            (from, rng.gen_range(from + 1..nl))
        };
        let mut guards = Vec::new();
        for v in &shared {
            if rng.gen_bool(0.35) {
                guards.push(guard(rng, v));
            }
        }
        let mut update = serde_json::Map::new();
        if !cyclic {
            for v in &shared {
                if rng.gen_bool(0.4) {
                    update.insert(v.clone(), 1.into());
                }
            }
        }
        rules.push(serde_json::json!({
            "id": format!("r{r}"), "from": locations[from], "to": locations[to],
            "guard": guards, "update": update,
        }));
    }
    let doc = serde_json::json!({
        "parameters": env.0, "resilience": env.1, "system_size": env.2,
        "locations": locations, "initial": locations[..ninit], "shared": shared,
        "rules": rules,
    });
    crate::ta::parse_ta(&doc.to_string())
        .expect("generated automaton is well-formed")
        .into_concrete()
        .expect("no indeterminates")
}

/// Random automaton: forward rules with 0/1 updates, occasional
/// update-free backward rules or self-loops, rise and fall guards over the
/// thresholds of one of three environments.
pub fn random_ta(rng: &mut impl Rng, caps: RandomTaCaps) -> ThresholdAutomaton {
    let (params, rc, size, thresholds) = *pick(rng, ENVIRONMENTS);
    let mut guard = |rng: &mut dyn rand::RngCore, v: &str| {
        let op = if rng.gen_bool(0.75) { ">=" } else { "<" };
        format!("{v} {op} {}", thresholds[rng.gen_range(0..thresholds.len())])
    };
    build_random(rng, caps, (params, rc, size), &mut guard, true)
}

/// Random forward automaton whose guards are all `x >= c` with
/// `1 <= c <= max_const`, over the multiplicative environment `n > 0`.
pub fn random_constant_rise_ta(
    rng: &mut impl Rng,
    caps: RandomTaCaps,
    max_const: u64,
) -> ThresholdAutomaton {
    let mut guard = |rng: &mut dyn rand::RngCore, v: &str| {
        format!("{v} >= {}", rng.gen_range(1..=max_const.max(1)))
    };
    build_random(rng, caps, (&["n"], &["n > 0"], "n"), &mut guard, false)
}

/// The worked example formula:
/// `(x1 ∨ ¬x2 ∨ x3) ∧ (¬x1 ∨ ¬x2 ∨ ¬x3)`.
pub fn example_cnf() -> Cnf3 {
    Cnf3 {
        num_vars: 3,
        clauses: vec![vec![1, -2, 3], vec![-1, -2, -3]],
    }
}

/// `∃x1,x2 ∀y1 (x1 ∧ y1 ∧ ¬y1) ∨ (¬x1 ∧ ¬x2 ∧ y1)`.
pub fn example_sigma2() -> Sigma2Instance {
    Sigma2Instance {
        exists_vars: 2,
        forall_vars: 1,
        dnf: vec![vec![1, 3, -3], vec![-1, -2, 3]],
    }
}
