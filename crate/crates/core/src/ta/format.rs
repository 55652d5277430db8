//! The `.ta.json` document format.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::{parse_linear, print_linear, CoefText};
use super::{
    Automaton, Coef, Coefficient, Constraint, Environment, Guard, GuardKind, LinearExpr,
    Rational, Rel, Rule, SketchTA, ThresholdAutomaton,
};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("in {context}: column {column}: {message}")]
    Expression {
        context: String,
        column: usize,
        message: String,
    },
    #[error("semantic error: {0}")]
    Semantic(String),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Reject updates other than 0/1.
    pub strict: bool,
}

/// Result of parsing: a sketch iff some indeterminate occurs in a guard.
#[derive(Clone, Debug, PartialEq)]
pub enum Parsed {
    Concrete(ThresholdAutomaton),
    Sketch(SketchTA),
}

impl Parsed {
    pub fn into_concrete(self) -> Result<ThresholdAutomaton, ParseError> {
        match self {
            Parsed::Concrete(ta) => Ok(ta),
            Parsed::Sketch(s) => Err(ParseError::Semantic(format!(
                "expected a concrete automaton, found indeterminates {:?}",
                s.indeterminates
            ))),
        }
    }

    pub fn into_sketch(self) -> SketchTA {
        match self {
            Parsed::Concrete(ta) => ta.to_sketch(),
            Parsed::Sketch(s) => s,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    parameters: Vec<String>,
    #[serde(default)]
    resilience: Vec<String>,
    system_size: String,
    locations: Vec<String>,
    initial: Vec<String>,
    #[serde(default)]
    shared: Vec<String>,
    rules: Vec<RuleDocument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    indeterminates: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDocument {
    id: String,
    from: String,
    to: String,
    #[serde(default)]
    guard: Vec<String>,
    #[serde(default)]
    update: BTreeMap<String, u64>,
}

pub fn parse_ta(text: &str) -> Result<Parsed, ParseError> {
    parse_ta_with(text, ParseOptions::default())
}

pub fn parse_ta_with(text: &str, opts: ParseOptions) -> Result<Parsed, ParseError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    build(doc, opts)
}

fn check_unique(kind: &str, names: &[String]) -> Result<(), ParseError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(ParseError::Semantic(format!("duplicate {kind} `{n}`")));
        }
    }
    Ok(())
}

fn expr_err(context: String) -> impl Fn(super::ExprError) -> ParseError {
    move |e| ParseError::Expression {
        context: context.clone(),
        column: e.column,
        message: e.message,
    }
}

fn to_rational(e: LinearExpr<Coefficient>, context: &str) -> Result<LinearExpr, ParseError> {
    let conv = |c: Coefficient| match c {
        Coefficient::Const(r) => Ok(r),
        Coefficient::Indeterminate(v) => Err(ParseError::Semantic(format!(
            "indeterminate `{v}` is only allowed in guards ({context})"
        ))),
    };
    let constant = conv(e.constant)?;
    let mut coeffs = BTreeMap::new();
    for (p, c) in e.coeffs {
        coeffs.insert(p, conv(c)?);
    }
    Ok(LinearExpr::with_coeffs(constant, coeffs))
}

fn parse_constraint(text: &str, params: &[String]) -> Result<Constraint, ParseError> {
    const OPS: [(&str, Rel); 6] = [
        (">=", Rel::Ge),
        ("<=", Rel::Le),
        ("==", Rel::Eq),
        (">", Rel::Gt),
        ("<", Rel::Lt),
        ("=", Rel::Eq),
    ];
    let (pos, op, rel) = OPS
        .iter()
        .filter_map(|(op, rel)| text.find(op).map(|p| (p, *op, *rel)))
        .min_by_key(|(p, op, _)| (*p, usize::MAX - op.len()))
        .ok_or_else(|| ParseError::Expression {
            context: format!("resilience `{text}`"),
            column: 1,
            message: "expected a relation (<, <=, =, >=, >)".into(),
        })?;
    let ctx = format!("resilience `{text}`");
    let lhs = parse_linear(&text[..pos], params, &[]).map_err(expr_err(ctx.clone()))?;
    let rhs_text = &text[pos + op.len()..];
    let rhs = parse_linear(rhs_text, params, &[]).map_err(|e| ParseError::Expression {
        context: ctx.clone(),
        column: e.column + pos + op.len(),
        message: e.message,
    })?;
    let lhs = to_rational(lhs, &ctx)?;
    let rhs = to_rational(rhs, &ctx)?;
    Ok(Constraint {
        expr: lhs.sub(&rhs),
        rel,
    })
}

fn parse_guard(
    text: &str,
    shared: &[String],
    params: &[String],
    indets: &[String],
    ctx: &str,
) -> Result<Guard<Coefficient>, ParseError> {
    let (pos, kind, len) = match (text.find(">="), text.find('<')) {
        (Some(p), None) => (p, GuardKind::Rise, 2),
        (None, Some(p)) if !text[p..].starts_with("<=") => (p, GuardKind::Fall, 1),
        _ => {
            return Err(ParseError::Expression {
                context: ctx.to_string(),
                column: 1,
                message: "expected `<var> >= <expr>` or `<var> < <expr>`".into(),
            })
        }
    };
    let var_name = text[..pos].trim();
    let var = shared
        .iter()
        .position(|v| v == var_name)
        .ok_or_else(|| ParseError::Semantic(format!("{ctx}: undeclared shared variable `{var_name}`")))?;
    let rhs = parse_linear(&text[pos + len..], params, indets).map_err(|e| {
        ParseError::Expression {
            context: ctx.to_string(),
            column: e.column + pos + len,
            message: e.message,
        }
    })?;
    Ok(Guard { var, kind, rhs })
}

fn build(doc: Document, opts: ParseOptions) -> Result<Parsed, ParseError> {
    check_unique("parameter", &doc.parameters)?;
    check_unique("location", &doc.locations)?;
    check_unique("shared variable", &doc.shared)?;
    check_unique("indeterminate", &doc.indeterminates)?;
    for ind in &doc.indeterminates {
        if doc.parameters.contains(ind) {
            return Err(ParseError::Semantic(format!(
                "`{ind}` is declared both as parameter and indeterminate"
            )));
        }
    }
    if doc.locations.is_empty() {
        return Err(ParseError::Semantic("no locations declared".into()));
    }
    if doc.initial.is_empty() {
        return Err(ParseError::Semantic("empty initial set".into()));
    }
    let loc = |name: &str, ctx: &str| {
        doc.locations
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| ParseError::Semantic(format!("{ctx}: undeclared location `{name}`")))
    };
    let mut initial = Vec::new();
    for l in &doc.initial {
        initial.push(loc(l, "initial")?);
    }
    initial.sort_unstable();
    initial.dedup();

    let params = &doc.parameters;
    let mut resilience = Vec::new();
    for c in &doc.resilience {
        resilience.push(parse_constraint(c, params)?);
    }
    let size_ctx = "system_size".to_string();
    let size_fn = to_rational(
        parse_linear(&doc.system_size, params, &[]).map_err(expr_err(size_ctx.clone()))?,
        &size_ctx,
    )?;
    let env = Environment {
        params: params.clone(),
        resilience,
        size_fn,
    };

    let mut rule_ids = BTreeSet::new();
    let mut rules = Vec::new();
    let mut used_indets = BTreeSet::new();
    for rd in &doc.rules {
        if !rule_ids.insert(rd.id.clone()) {
            return Err(ParseError::Semantic(format!("duplicate rule id `{}`", rd.id)));
        }
        let ctx = format!("rule `{}`", rd.id);
        let from = loc(&rd.from, &ctx)?;
        let to = loc(&rd.to, &ctx)?;
        let mut guards = Vec::new();
        for (i, g) in rd.guard.iter().enumerate() {
            let gctx = format!("rule `{}` guard {i} `{g}`", rd.id);
            let guard = parse_guard(g, &doc.shared, params, &doc.indeterminates, &gctx)?;
            for c in std::iter::once(&guard.rhs.constant).chain(guard.rhs.coeffs.values()) {
                if let Coefficient::Indeterminate(v) = c {
                    used_indets.insert(v.clone());
                }
            }
            guards.push(guard);
        }
        let mut update = BTreeMap::new();
        for (v, &k) in &rd.update {
            let var = doc.shared.iter().position(|s| s == v).ok_or_else(|| {
                ParseError::Semantic(format!("{ctx}: undeclared shared variable `{v}`"))
            })?;
            if k > 1 {
                if opts.strict {
                    return Err(ParseError::Semantic(format!(
                        "{ctx}: update {v} += {k} outside {{0,1}} (strict mode)"
                    )));
                }
                log::warn!("{ctx}: update {v} += {k} outside {{0,1}}");
            }
            if k > 0 {
                update.insert(var, k);
            }
        }
        rules.push(Rule {
            id: rd.id.clone(),
            from,
            to,
            guards,
            update,
        });
    }
    for ind in &doc.indeterminates {
        if !used_indets.contains(ind) {
            return Err(ParseError::Semantic(format!(
                "indeterminate `{ind}` does not occur in any guard"
            )));
        }
    }
    let sketch = SketchTA {
        env,
        locations: doc.locations,
        initial,
        shared: doc.shared,
        rules,
        indeterminates: used_indets.into_iter().collect(),
    };
    if sketch.indeterminates.is_empty() {
        Ok(Parsed::Concrete(sketch.to_concrete().expect("no indeterminates")))
    } else {
        Ok(Parsed::Sketch(sketch))
    }
}

fn rational_text(r: &Rational) -> CoefText {
    CoefText::Num(*r)
}

fn coefficient_text(c: &Coefficient) -> CoefText {
    match c {
        Coefficient::Const(r) => CoefText::Num(*r),
        Coefficient::Indeterminate(v) => CoefText::Sym(v.clone()),
    }
}

/// Serializes an automaton (concrete or sketch) into the JSON document format.
pub fn print_ta<C: Coef + PrintCoef>(ta: &Automaton<C>) -> String {
    let params = &ta.env.params;
    let resilience = ta
        .env
        .resilience
        .iter()
        .map(|c| {
            format!(
                "{} {} 0",
                print_linear(&c.expr, params, rational_text),
                c.rel.symbol()
            )
        })
        .collect();
    let rules = ta
        .rules
        .iter()
        .map(|r| RuleDocument {
            id: r.id.clone(),
            from: ta.locations[r.from].clone(),
            to: ta.locations[r.to].clone(),
            guard: r
                .guards
                .iter()
                .map(|g| {
                    format!(
                        "{} {} {}",
                        ta.shared[g.var],
                        g.kind,
                        print_linear(&g.rhs, params, C::text)
                    )
                })
                .collect(),
            update: r
                .update
                .iter()
                .map(|(&v, &k)| (ta.shared[v].clone(), k))
                .collect(),
        })
        .collect();
    let doc = Document {
        parameters: params.clone(),
        resilience,
        system_size: print_linear(&ta.env.size_fn, params, rational_text),
        locations: ta.locations.clone(),
        initial: ta.initial.iter().map(|&l| ta.locations[l].clone()).collect(),
        shared: ta.shared.clone(),
        rules,
        indeterminates: ta.indeterminates.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub trait PrintCoef {
    #[doc(hidden)]
    fn text(&self) -> CoefText;
}

impl PrintCoef for Rational {
    fn text(&self) -> CoefText {
        rational_text(self)
    }
}

impl PrintCoef for Coefficient {
    fn text(&self) -> CoefText {
        coefficient_text(self)
    }
}

impl SketchTA {
    /// Converts to a concrete automaton if no indeterminate occurs.
    pub fn to_concrete(&self) -> Option<ThresholdAutomaton> {
        self.map_coefficients(|c| match c {
            Coefficient::Const(r) => Some(*r),
            Coefficient::Indeterminate(_) => None,
        })
    }

    /// Rebuilds the automaton with every coefficient passed through `f`.
    pub fn map_coefficients(
        &self,
        f: impl Fn(&Coefficient) -> Option<Rational>,
    ) -> Option<ThresholdAutomaton> {
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let mut guards = Vec::with_capacity(r.guards.len());
            for g in &r.guards {
                let constant = f(&g.rhs.constant)?;
                let mut coeffs = BTreeMap::new();
                for (&p, c) in &g.rhs.coeffs {
                    let v = f(c)?;
                    if !v.is_zero() {
                        coeffs.insert(p, v);
                    }
                }
                guards.push(Guard {
                    var: g.var,
                    kind: g.kind,
                    rhs: LinearExpr { constant, coeffs },
                });
            }
            rules.push(Rule {
                id: r.id.clone(),
                from: r.from,
                to: r.to,
                guards,
                update: r.update.clone(),
            });
        }
        Some(ThresholdAutomaton {
            env: self.env.clone(),
            locations: self.locations.clone(),
            initial: self.initial.clone(),
            shared: self.shared.clone(),
            rules,
            indeterminates: Vec::new(),
        })
    }
}

impl ThresholdAutomaton {
    pub fn to_sketch(&self) -> SketchTA {
        let conv = |e: &LinearExpr| LinearExpr {
            constant: Coefficient::Const(e.constant),
            coeffs: e
                .coeffs
                .iter()
                .map(|(&p, &c)| (p, Coefficient::Const(c)))
                .collect(),
        };
        SketchTA {
            env: self.env.clone(),
            locations: self.locations.clone(),
            initial: self.initial.clone(),
            shared: self.shared.clone(),
            rules: self
                .rules
                .iter()
                .map(|r| Rule {
                    id: r.id.clone(),
                    from: r.from,
                    to: r.to,
                    guards: r
                        .guards
                        .iter()
                        .map(|g| Guard {
                            var: g.var,
                            kind: g.kind,
                            rhs: conv(&g.rhs),
                        })
                        .collect(),
                    update: r.update.clone(),
                })
                .collect(),
            indeterminates: Vec::new(),
        }
    }
}
