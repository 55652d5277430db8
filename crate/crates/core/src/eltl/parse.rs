//! Reader for `.eltl` specification files.
//!
//! ```text
//! (and (eq0 l0 l2 l3) (G (eq0 l3)))
//! (G (F (imp (ge x (+ t 1)) (eq0 l0))))
//! ```

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use super::{EltlFormula, Prop};
use crate::sexpr::{parse_all, SExpr, SExprError};
use crate::ta::{normalize_guard, Automaton, Coef, Guard, GuardKind, LinearExpr, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("{0}")]
    Syntax(#[from] SExprError),
    #[error("in `{context}`: {message}")]
    Invalid { context: String, message: String },
}

fn invalid(e: &SExpr, message: impl Into<String>) -> SpecError {
    SpecError::Invalid {
        context: e.to_string(),
        message: message.into(),
    }
}

/// Parses a specification whose names refer to `ta`.
pub fn parse_spec<C: Coef>(text: &str, ta: &Automaton<C>) -> Result<EltlFormula, SpecError> {
    let exprs = parse_all(text)?;
    match exprs.as_slice() {
        [e] => formula(e, ta),
        [] => Err(SpecError::Invalid {
            context: String::new(),
            message: "empty specification".into(),
        }),
        [_, second, ..] => Err(invalid(second, "expected a single top-level formula")),
    }
}

fn formula<C: Coef>(e: &SExpr, ta: &Automaton<C>) -> Result<EltlFormula, SpecError> {
    if let Some(a) = e.atom() {
        return match a {
            "true" => Ok(EltlFormula::Prop(Prop::True)),
            _ => Err(invalid(e, "expected a formula")),
        };
    }
    let items = e.list().expect("not an atom");
    let Some(head) = items.first().and_then(SExpr::atom) else {
        return Err(invalid(e, "expected an operator"));
    };
    let args = &items[1..];
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(invalid(e, format!("`{head}` takes {n} argument(s)")))
        }
    };
    let subs = |args: &[SExpr]| -> Result<Vec<EltlFormula>, SpecError> {
        args.iter().map(|a| formula(a, ta)).collect()
    };
    match head {
        "eq0" | "ne0" => {
            if args.is_empty() {
                return Err(invalid(e, "expected at least one location"));
            }
            let mut set = BTreeSet::new();
            for a in args {
                let name = a.atom().ok_or_else(|| invalid(a, "expected a location name"))?;
                let l = ta
                    .location_index(name)
                    .ok_or_else(|| invalid(e, format!("undeclared location `{name}`")))?;
                set.insert(l);
            }
            Ok(EltlFormula::Prop(if head == "eq0" {
                Prop::Zero(set)
            } else {
                Prop::NonZero(set)
            }))
        }
        "ge" | "lt" => {
            arity(2)?;
            let name = args[0]
                .atom()
                .ok_or_else(|| invalid(&args[0], "expected a shared variable"))?;
            let var = ta
                .var_index(name)
                .ok_or_else(|| invalid(e, format!("undeclared shared variable `{name}`")))?;
            let rhs = linear(&args[1], &ta.env.params)?;
            let kind = if head == "ge" {
                GuardKind::Rise
            } else {
                GuardKind::Fall
            };
            Ok(EltlFormula::Prop(Prop::Guard(normalize_guard(&Guard {
                var,
                kind,
                rhs,
            }))))
        }
        "and" => {
            let fs = subs(args)?;
            if fs.iter().all(EltlFormula::is_prop) {
                Ok(EltlFormula::Prop(Prop::and(fs.into_iter().map(into_prop))))
            } else {
                Ok(EltlFormula::And(fs))
            }
        }
        "or" => {
            let fs = subs(args)?;
            if fs.iter().all(EltlFormula::is_prop) {
                Ok(EltlFormula::Prop(Prop::Or(fs.into_iter().map(into_prop).collect())))
            } else {
                Ok(EltlFormula::Or(fs))
            }
        }
        "not" => {
            arity(1)?;
            let f = formula(&args[0], ta)?;
            Ok(match f {
                EltlFormula::Prop(p) => EltlFormula::Prop(Prop::Not(Box::new(p))),
                f => EltlFormula::Not(Box::new(f)),
            })
        }
        "imp" => {
            arity(2)?;
            let a = formula(&args[0], ta)?;
            let b = formula(&args[1], ta)?;
            Ok(match (a, b) {
                (EltlFormula::Prop(a), EltlFormula::Prop(b)) => {
                    EltlFormula::Prop(Prop::Implies(Box::new(a), Box::new(b)))
                }
                (a, b) => EltlFormula::Implies(Box::new(a), Box::new(b)),
            })
        }
        "G" | "F" => {
            arity(1)?;
            let f = Box::new(formula(&args[0], ta)?);
            Ok(if head == "G" {
                EltlFormula::G(f)
            } else {
                EltlFormula::F(f)
            })
        }
        other => Err(invalid(e, format!("unknown operator `{other}`"))),
    }
}

fn into_prop(f: EltlFormula) -> Prop {
    match f {
        EltlFormula::Prop(p) => p,
        _ => unreachable!("checked by caller"),
    }
}

/// Affine parameter expression: numbers (`3`, `1/2`), parameter names,
/// `(+ e ...)`, `(- e)`, `(- e e ...)`, `(* c e)` and `(/ e c)`.
fn linear(e: &SExpr, params: &[String]) -> Result<LinearExpr, SpecError> {
    if let Some(a) = e.atom() {
        if let Some(p) = params.iter().position(|x| x == a) {
            return Ok(LinearExpr::param(p));
        }
        return number(a)
            .map(LinearExpr::constant)
            .ok_or_else(|| invalid(e, format!("expected a number or parameter, found `{a}`")));
    }
    let items = e.list().expect("not an atom");
    let Some(head) = items.first().and_then(SExpr::atom) else {
        return Err(invalid(e, "expected an operator"));
    };
    let args: Vec<LinearExpr> = items[1..]
        .iter()
        .map(|a| linear(a, params))
        .collect::<Result<_, _>>()?;
    let scale = |x: &LinearExpr, k: Rational| {
        LinearExpr::with_coeffs(x.constant * k, x.coeffs.iter().map(|(&p, &c)| (p, c * k)))
    };
    let minus_one = -Rational::from_integer(1);
    match (head, args.as_slice()) {
        ("+", _) => Ok(args
            .iter()
            .fold(LinearExpr::zero(), |acc, x| acc.sub(&scale(x, minus_one)))),
        ("-", [x]) => Ok(scale(x, minus_one)),
        ("-", [x, rest @ ..]) => Ok(rest.iter().fold(x.clone(), |acc, y| acc.sub(y))),
        ("*", [a, b]) if a.is_constant() => Ok(scale(b, a.constant)),
        ("*", [a, b]) if b.is_constant() => Ok(scale(a, b.constant)),
        ("*", _) => Err(invalid(e, "`*` needs exactly two operands, one of them constant")),
        ("/", [a, b]) if b.is_constant() && !b.constant.is_zero() => {
            Ok(scale(a, b.constant.recip()))
        }
        ("/", _) => Err(invalid(e, "`/` needs a nonzero constant divisor")),
        (other, _) => Err(invalid(e, format!("unknown operator `{other}`"))),
    }
}

fn number(a: &str) -> Option<Rational> {
    match a.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.parse().ok()?, d.parse().ok()?);
            (d != 0).then(|| Rational::new(n, d))
        }
        None => a.parse::<i64>().ok().map(Rational::from_integer),
    }
}

/// Prints `f` in the syntax accepted by [`parse_spec`].
pub fn print_spec<C: Coef>(f: &EltlFormula, ta: &Automaton<C>) -> String {
    let list = |op: &str, items: Vec<String>| format!("({op} {})", items.join(" "));
    match f {
        EltlFormula::Prop(p) => print_prop(p, ta),
        EltlFormula::And(fs) => list("and", fs.iter().map(|g| print_spec(g, ta)).collect()),
        EltlFormula::Or(fs) => list("or", fs.iter().map(|g| print_spec(g, ta)).collect()),
        EltlFormula::Not(g) => list("not", vec![print_spec(g, ta)]),
        EltlFormula::Implies(a, b) => list("imp", vec![print_spec(a, ta), print_spec(b, ta)]),
        EltlFormula::G(g) => list("G", vec![print_spec(g, ta)]),
        EltlFormula::F(g) => list("F", vec![print_spec(g, ta)]),
    }
}

fn print_prop<C: Coef>(p: &Prop, ta: &Automaton<C>) -> String {
    let list = |op: &str, items: Vec<String>| format!("({op} {})", items.join(" "));
    match p {
        Prop::True => "true".into(),
        Prop::Zero(ls) | Prop::NonZero(ls) => list(
            if matches!(p, Prop::Zero(_)) { "eq0" } else { "ne0" },
            ls.iter().map(|&l| ta.locations[l].clone()).collect(),
        ),
        Prop::Guard(g) => {
            let mut terms: Vec<String> = Vec::new();
            if g.rhs.constant != 0 || g.rhs.coeffs.is_empty() {
                terms.push(g.rhs.constant.to_string());
            }
            for (&q, &c) in &g.rhs.coeffs {
                let name = &ta.env.params[q];
                terms.push(if c == 1 { name.clone() } else { format!("(* {c} {name})") });
            }
            let mut rhs = if terms.len() == 1 {
                terms.pop().expect("one term")
            } else {
                list("+", terms)
            };
            if g.scale != 1 {
                rhs = format!("(/ {rhs} {})", g.scale);
            }
            let op = match g.kind {
                GuardKind::Rise => "ge",
                GuardKind::Fall => "lt",
            };
            format!("({op} {} {rhs})", ta.shared[g.var])
        }
        Prop::And(ps) => list("and", ps.iter().map(|q| print_prop(q, ta)).collect()),
        Prop::Or(ps) => list("or", ps.iter().map(|q| print_prop(q, ta)).collect()),
        Prop::Not(q) => list("not", vec![print_prop(q, ta)]),
        Prop::Implies(a, b) => list("imp", vec![print_prop(a, ta), print_prop(b, ta)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::strb;

    #[test]
    fn unforgeability_spec() {
        let ta = strb();
        let f = parse_spec("(and (eq0 l0 l2 l3) (G (eq0 l3)))", &ta).unwrap();
        let EltlFormula::And(parts) = f else { panic!("{f:?}") };
        assert_eq!(parts[0], EltlFormula::Prop(Prop::Zero([0, 2, 3].into())));
        assert!(matches!(&parts[1], EltlFormula::G(_)));
    }

    #[test]
    fn guard_expressions() {
        let ta = strb();
        let f = parse_spec("(ge x (+ t 1))", &ta).unwrap();
        let EltlFormula::Prop(Prop::Guard(g)) = f else { panic!() };
        assert_eq!(g.rhs.constant, 1);
        assert_eq!(g.rhs.coeffs, [(1, 1)].into_iter().collect());
        let f = parse_spec("(lt x (/ (- n t) 2))", &ta).unwrap();
        let EltlFormula::Prop(Prop::Guard(g)) = f else { panic!() };
        assert_eq!((g.scale, g.kind), (2, GuardKind::Fall));
        assert_eq!(g.rhs.coeffs, [(0, 1), (1, -1)].into_iter().collect());
    }

    #[test]
    fn propositional_ops_fold() {
        let ta = strb();
        let f = parse_spec("(imp (or (ge x 1) (ge x n)) (not (eq0 l1)))", &ta).unwrap();
        assert!(f.is_prop());
        let f = parse_spec("(or (F (eq0 l1)) (eq0 l2))", &ta).unwrap();
        assert!(matches!(f, EltlFormula::Or(_)));
    }

    #[test]
    fn errors_name_the_offender() {
        let ta = strb();
        let e = parse_spec("(G (eq0 l9))", &ta).unwrap_err();
        assert!(e.to_string().contains("l9"), "{e}");
        let e = parse_spec("(ge y 1)", &ta).unwrap_err();
        assert!(e.to_string().contains("`y`"), "{e}");
        assert!(parse_spec("(ge x (* n t))", &ta).is_err());
        assert!(parse_spec("(U a b)", &ta).is_err());
        assert!(parse_spec("(G (eq0 l1)", &ta).is_err());
        assert!(parse_spec("", &ta).is_err());
    }

    #[test]
    fn printing_round_trips() {
        let ta = strb();
        for text in [
            "(and (eq0 l0 l2 l3) (G (eq0 l3)))",
            "(G (F (and (imp (or (ge x (+ t 1)) (ge x (- n t))) (eq0 l0)) (eq0 l1))))",
            "(or (F (ne0 l1)) (not (lt x (/ (- n (* 3 t)) 2))))",
            "true",
        ] {
            let f = parse_spec(text, &ta).unwrap();
            assert_eq!(parse_spec(&print_spec(&f, &ta), &ta).unwrap(), f, "{text}");
        }
    }
}
