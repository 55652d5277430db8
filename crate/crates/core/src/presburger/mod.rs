//! Quantifier-free linear integer arithmetic: formulas, SMT-LIB printing,
//! exact evaluation, and satisfiability through an external solver.

mod solver;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

pub use crate::ta::Rel;
pub use solver::{solve, solver_version, SolverConfig, SolverError, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    /// Integer constrained to be ≥ 0.
    Nat,
    Int,
}

/// Model returned by the solver: value per declared variable.
pub type Model = HashMap<String, i64>;

/// `constant + Σ coeffs[v] · v`; zero coefficients are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinTerm {
    pub coeffs: BTreeMap<String, i64>,
    pub constant: i64,
}

impl LinTerm {
    pub fn var(name: impl Into<String>) -> Self {
        LinTerm {
            coeffs: [(name.into(), 1)].into_iter().collect(),
            constant: 0,
        }
    }

    pub fn constant(c: i64) -> Self {
        LinTerm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn add_term(&mut self, name: &str, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.coeffs.entry(name.to_string()).or_insert(0);
        *e += k;
        if *e == 0 {
            self.coeffs.remove(name);
        }
    }

    pub fn sum<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut t = LinTerm::default();
        for n in names {
            t.add_term(n, 1);
        }
        t
    }

    pub fn eval(&self, m: &Model) -> Result<i128, EvalError> {
        let mut acc = self.constant as i128;
        for (v, &k) in &self.coeffs {
            let x = m.get(v).ok_or_else(|| EvalError::MissingAssignment(v.clone()))?;
            acc += k as i128 * *x as i128;
        }
        Ok(acc)
    }

    fn write_smt(&self, out: &mut String) {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(v, &k)| match k {
                1 => v.clone(),
                k => format!("(* {} {v})", int_literal(k)),
            })
            .collect();
        if self.constant != 0 || parts.is_empty() {
            parts.push(int_literal(self.constant));
        }
        if parts.len() == 1 {
            out.push_str(&parts[0]);
        } else {
            out.push_str("(+");
            for p in parts {
                out.push(' ');
                out.push_str(&p);
            }
            out.push(')');
        }
    }
}

fn int_literal(k: i64) -> String {
    if k < 0 {
        format!("(- {})", (k as i128).abs())
    } else {
        k.to_string()
    }
}

impl Add for LinTerm {
    type Output = LinTerm;
    fn add(mut self, rhs: LinTerm) -> LinTerm {
        for (v, k) in rhs.coeffs {
            self.add_term(&v, k);
        }
        self.constant += rhs.constant;
        self
    }
}

impl Sub for LinTerm {
    type Output = LinTerm;
    fn sub(self, rhs: LinTerm) -> LinTerm {
        self + (-rhs)
    }
}

impl Neg for LinTerm {
    type Output = LinTerm;
    fn neg(self) -> LinTerm {
        self * -1
    }
}

impl Mul<i64> for LinTerm {
    type Output = LinTerm;
    fn mul(self, k: i64) -> LinTerm {
        if k == 0 {
            return LinTerm::default();
        }
        LinTerm {
            coeffs: self.coeffs.into_iter().map(|(v, c)| (v, c * k)).collect(),
            constant: self.constant * k,
        }
    }
}

/// Quantifier-free formula; negation is only ever applied to atoms (see [`Formula::not`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(LinTerm, Rel, LinTerm),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no value for variable `{0}`")]
    MissingAssignment(String),
}

impl Formula {
    pub fn atom(a: LinTerm, rel: Rel, b: LinTerm) -> Formula {
        if a.coeffs == b.coeffs {
            // Both sides differ by a constant: decide now.
            return if rel.holds(a.constant, b.constant) {
                Formula::True
            } else {
                Formula::False
            };
        }
        Formula::Atom(a, rel, b)
    }

    pub fn ge(a: LinTerm, b: LinTerm) -> Formula {
        Formula::atom(a, Rel::Ge, b)
    }
    pub fn gt(a: LinTerm, b: LinTerm) -> Formula {
        Formula::atom(a, Rel::Gt, b)
    }
    pub fn le(a: LinTerm, b: LinTerm) -> Formula {
        Formula::atom(a, Rel::Le, b)
    }
    pub fn lt(a: LinTerm, b: LinTerm) -> Formula {
        Formula::atom(a, Rel::Lt, b)
    }
    pub fn eq(a: LinTerm, b: LinTerm) -> Formula {
        Formula::atom(a, Rel::Eq, b)
    }

    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(gs) => out.extend(gs),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().expect("one element"),
            _ => Formula::And(out),
        }
    }

    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(gs) => out.extend(gs),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().expect("one element"),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (Formula::True, b) => b,
            (a, Formula::False) => a.not(),
            (a, b) => Formula::Implies(Box::new(a), Box::new(b)),
        }
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::or([
            Formula::and([a.clone(), b.clone()]),
            Formula::and([a.not(), b.not()]),
        ])
    }

    /// Negation pushed to the atoms.
    pub fn not(self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(a, rel, b) => match rel {
                Rel::Lt => Formula::Atom(a, Rel::Ge, b),
                Rel::Le => Formula::Atom(a, Rel::Gt, b),
                Rel::Ge => Formula::Atom(a, Rel::Lt, b),
                Rel::Gt => Formula::Atom(a, Rel::Le, b),
                Rel::Eq => Formula::Or(vec![
                    Formula::Atom(a.clone(), Rel::Lt, b.clone()),
                    Formula::Atom(a, Rel::Gt, b),
                ]),
            },
            Formula::And(fs) => Formula::or(fs.into_iter().map(Formula::not)),
            Formula::Or(fs) => Formula::and(fs.into_iter().map(Formula::not)),
            Formula::Implies(a, b) => Formula::and([*a, b.not()]),
        }
    }

    pub fn eval(&self, m: &Model) -> Result<bool, EvalError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a, rel, b) => rel.holds(a.eval(m)?, b.eval(m)?),
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(m)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(m)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !a.eval(m)? || b.eval(m)?,
        })
    }

    pub fn write_smt(&self, out: &mut String) {
        match self {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Atom(a, rel, b) => {
                out.push('(');
                out.push_str(rel.symbol());
                out.push(' ');
                a.write_smt(out);
                out.push(' ');
                b.write_smt(out);
                out.push(')');
            }
            Formula::And(fs) | Formula::Or(fs) => {
                out.push_str(if matches!(self, Formula::And(_)) {
                    "(and"
                } else {
                    "(or"
                });
                for f in fs {
                    out.push(' ');
                    f.write_smt(out);
                }
                out.push(')');
            }
            Formula::Implies(a, b) => {
                out.push_str("(=> ");
                a.write_smt(out);
                out.push(' ');
                b.write_smt(out);
                out.push(')');
            }
        }
    }

    pub fn to_smt(&self) -> String {
        let mut s = String::new();
        self.write_smt(&mut s);
        s
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a, _, b) => {
                out.extend(a.coeffs.keys().map(String::as_str));
                out.extend(b.coeffs.keys().map(String::as_str));
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

/// Declarations plus a conjunction of assertions.
#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub decls: BTreeMap<String, Sort>,
    pub assertions: Vec<Formula>,
}

impl Problem {
    pub fn new() -> Self {
        Problem::default()
    }

    pub fn declare(&mut self, name: impl Into<String>, sort: Sort) -> LinTerm {
        let name = name.into();
        self.decls.insert(name.clone(), sort);
        LinTerm::var(name)
    }

    pub fn nat(&mut self, name: impl Into<String>) -> LinTerm {
        self.declare(name, Sort::Nat)
    }

    pub fn assert(&mut self, f: Formula) {
        self.assertions.push(f);
    }

    /// The conjunction of all assertions plus the `v >= 0` constraints.
    pub fn formula(&self) -> Formula {
        let mut fs: Vec<Formula> = self
            .decls
            .iter()
            .filter(|(_, s)| **s == Sort::Nat)
            .map(|(v, _)| Formula::ge(LinTerm::var(v.clone()), LinTerm::constant(0)))
            .collect();
        fs.extend(self.assertions.iter().cloned());
        Formula::and(fs)
    }

    /// Variables used in assertions but never declared.
    pub fn undeclared(&self) -> Vec<String> {
        let mut vs = Vec::new();
        for a in &self.assertions {
            a.collect_vars(&mut vs);
        }
        let mut out: Vec<String> = vs
            .into_iter()
            .filter(|v| !self.decls.contains_key(*v))
            .map(str::to_string)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The SMT-LIB script sent to the solver.
    pub fn to_script(&self) -> String {
        let mut s = String::from("(set-logic QF_LIA)\n");
        for (v, sort) in &self.decls {
            let _ = writeln!(s, "(declare-fun {v} () Int)");
            if *sort == Sort::Nat {
                let _ = writeln!(s, "(assert (>= {v} 0))");
            }
        }
        for a in &self.assertions {
            s.push_str("(assert ");
            a.write_smt(&mut s);
            s.push_str(")\n");
        }
        s.push_str("(check-sat)\n");
        if !self.decls.is_empty() {
            s.push_str("(get-value (");
            for (i, v) in self.decls.keys().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                s.push_str(v);
            }
            s.push_str("))\n");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> LinTerm {
        LinTerm::var(n)
    }
    fn c(k: i64) -> LinTerm {
        LinTerm::constant(k)
    }

    #[test]
    fn printing_is_bit_exact() {
        let f = Formula::and([
            Formula::ge(v("x") * 2 - v("y"), c(-3)),
            Formula::implies(Formula::gt(v("x"), c(0)), Formula::eq(v("y"), c(1))),
        ]);
        assert_eq!(
            f.to_smt(),
            "(and (>= (+ (* 2 x) (* (- 1) y)) (- 3)) (=> (> x 0) (= y 1)))"
        );
    }

    #[test]
    fn negation_stays_on_atoms() {
        let f = Formula::and([Formula::eq(v("x"), c(1)), Formula::lt(v("y"), c(2))]).not();
        assert_eq!(f.to_smt(), "(or (< x 1) (> x 1) (>= y 2))");
    }

    #[test]
    fn eval_reports_missing_assignment() {
        let f = Formula::ge(v("x"), c(1));
        let m: Model = [("x".to_string(), 1)].into_iter().collect();
        assert_eq!(f.eval(&m), Ok(true));
        assert_eq!(
            f.eval(&Model::new()),
            Err(EvalError::MissingAssignment("x".into()))
        );
    }

    #[test]
    fn script_shape() {
        let mut p = Problem::new();
        let x = p.nat("x");
        p.assert(Formula::ge(x, c(1)));
        let s = p.to_script();
        assert!(s.starts_with("(set-logic QF_LIA)\n"));
        assert!(s.contains("(check-sat)\n(get-value (x))"));
    }
}
