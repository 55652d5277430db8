//! Parser for affine expressions over parameters, e.g. `t + 1 - f`,
//! `(n - t)/2`, `1/2*n` or, in sketches, `v1*n`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{Coefficient, LinearExpr, ParamId, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    /// 1-based column inside the expression text.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |i: usize, m: String| ExprError {
        column: i + 1,
        message: m,
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    return Err(err(i, "decimal literals are not allowed; write p/q".into()));
                }
                let s: String = chars[start..i].iter().collect();
                let n = s
                    .parse::<i64>()
                    .map_err(|_| err(start, format!("integer literal `{s}` out of range")))?;
                out.push((start, Tok::Num(n)));
                continue;
            }
            '.' => return Err(err(i, "decimal literals are not allowed; write p/q".into())),
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            other => return Err(err(i, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

/// Degree-≤1 polynomial in parameters and indeterminates, where every
/// monomial is (optional parameter) × (optional indeterminate).
type Poly = BTreeMap<(Option<ParamId>, Option<usize>), Rational>;

fn poly_const(c: Rational) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert((None, None), c);
    }
    p
}

fn poly_add(mut a: Poly, b: Poly, sign: i64) -> Poly {
    for (k, v) in b {
        let e = a.entry(k).or_insert_with(Rational::zero);
        *e += v * Rational::from_integer(sign);
        if e.is_zero() {
            a.remove(&k);
        }
    }
    a
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
    params: &'a [String],
    indets: &'a [String],
}

impl<'a> Parser<'a> {
    fn err(&self, m: impl Into<String>) -> ExprError {
        let column = self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.len) + 1;
        ExprError {
            column,
            message: m.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn expr(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            let sign = match t {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = poly_add(acc, rhs, sign);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.mul(acc, rhs)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    let d = match (rhs.len(), rhs.get(&(None, None))) {
                        (0, _) => return Err(self.err("division by zero")),
                        (1, Some(d)) => *d,
                        _ => return Err(self.err("divisor must be a constant")),
                    };
                    acc = acc.into_iter().map(|(k, v)| (k, v / d)).collect();
                }
                _ => return Ok(acc),
            }
        }
    }

    fn mul(&self, a: Poly, b: Poly) -> Result<Poly, ExprError> {
        let mut out = Poly::new();
        for (&(pa, ia), &va) in &a {
            for (&(pb, ib), &vb) in &b {
                if pa.is_some() && pb.is_some() {
                    return Err(self.err("product of two parameters is not linear"));
                }
                if ia.is_some() && ib.is_some() {
                    return Err(self.err("product of two indeterminates is not allowed"));
                }
                let key = (pa.or(pb), ia.or(ib));
                out = poly_add(out, [(key, va * vb)].into_iter().collect(), 1);
            }
        }
        Ok(out)
    }

    fn unary(&mut self) -> Result<Poly, ExprError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                let p = self.unary()?;
                Ok(poly_add(Poly::new(), p, -1))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Poly, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(poly_const(Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                let key = if let Some(p) = self.params.iter().position(|x| *x == name) {
                    (Some(p), None)
                } else if let Some(i) = self.indets.iter().position(|x| *x == name) {
                    (None, Some(i))
                } else {
                    return Err(self.err(format!("undeclared parameter `{name}`")));
                };
                self.pos += 1;
                Ok([(key, Rational::one())].into_iter().collect())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => Err(self.err("expected a number, parameter or `(`")),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

/// Parses an affine expression over `params`; names in `indets` become
/// [`Coefficient::Indeterminate`] (each may only appear as a bare coefficient).
pub fn parse_linear(
    text: &str,
    params: &[String],
    indets: &[String],
) -> Result<LinearExpr<Coefficient>, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.chars().count(),
        params,
        indets,
    };
    let poly = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    let mut slots: BTreeMap<Option<ParamId>, Vec<(Option<usize>, Rational)>> = BTreeMap::new();
    for ((param, ind), v) in poly {
        slots.entry(param).or_default().push((ind, v));
    }
    let mut constant = Coefficient::Const(Rational::zero());
    let mut coeffs = BTreeMap::new();
    for (slot, terms) in slots {
        let c = match terms.as_slice() {
            [(None, v)] => Coefficient::Const(*v),
            [(Some(i), v)] if v.is_one() => Coefficient::Indeterminate(indets[*i].clone()),
            _ => {
                return Err(ExprError {
                    column: 1,
                    message: "an indeterminate coefficient must appear alone, without scaling or \
                              additional constants"
                        .into(),
                })
            }
        };
        match slot {
            None => constant = c,
            Some(p) => {
                coeffs.insert(p, c);
            }
        }
    }
    Ok(LinearExpr { constant, coeffs })
}

/// Renders an expression in the syntax accepted by [`parse_linear`].
pub(crate) fn print_linear<C: super::Coef>(
    e: &LinearExpr<C>,
    params: &[String],
    coef: impl Fn(&C) -> CoefText,
) -> String {
    let mut out = String::new();
    let mut push = |sign_neg: bool, body: String| {
        if out.is_empty() {
            if sign_neg {
                out.push('-');
            }
        } else {
            out.push_str(if sign_neg { " - " } else { " + " });
        }
        out.push_str(&body);
    };
    for (&p, c) in &e.coeffs {
        match coef(c) {
            CoefText::Num(r) => {
                let a = if r < Rational::zero() { -r } else { r };
                let body = if a.is_one() {
                    params[p].clone()
                } else {
                    format!("{}*{}", super::fmt_rational(&a), params[p])
                };
                push(r < Rational::zero(), body);
            }
            CoefText::Sym(s) => push(false, format!("{s}*{}", params[p])),
        }
    }
    if !e.constant.is_zero_coef() || e.coeffs.is_empty() {
        match coef(&e.constant) {
            CoefText::Num(r) => {
                let a = if r < Rational::zero() { -r } else { r };
                push(r < Rational::zero(), super::fmt_rational(&a));
            }
            CoefText::Sym(s) => push(false, s),
        }
    }
    out
}

pub enum CoefText {
    Num(Rational),
    Sym(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn c(n: i64, d: i64) -> Coefficient {
        Coefficient::Const(Rational::new(n, d))
    }

    #[test]
    fn parses_strb_threshold() {
        let e = parse_linear("t + 1 - f", &names(&["n", "t", "f"]), &[]).unwrap();
        assert_eq!(e.constant, c(1, 1));
        assert_eq!(e.coeffs[&1], c(1, 1));
        assert_eq!(e.coeffs[&2], c(-1, 1));
        assert!(!e.coeffs.contains_key(&0));
    }

    #[test]
    fn parses_rationals_and_parentheses() {
        let e = parse_linear("(n - t)/2 + 1/3*t", &names(&["n", "t"]), &[]).unwrap();
        assert_eq!(e.coeffs[&0], c(1, 2));
        assert_eq!(e.coeffs[&1], c(-1, 6));
    }

    #[test]
    fn rejects_decimals_and_nonlinear() {
        let ps = names(&["n", "t"]);
        let err = parse_linear("0.5*n", &ps, &[]).unwrap_err();
        assert!(err.message.contains("decimal"));
        assert!(parse_linear("n*t", &ps, &[]).is_err());
        assert!(parse_linear("n +", &ps, &[]).is_err());
        let err = parse_linear("n + q", &ps, &[]).unwrap_err();
        assert!(err.message.contains("`q`"));
        assert_eq!(err.column, 5);
    }

    #[test]
    fn indeterminate_coefficients() {
        let e = parse_linear("v1*n", &names(&["n"]), &names(&["v1"])).unwrap();
        assert_eq!(e.coeffs[&0], Coefficient::Indeterminate("v1".into()));
        assert!(parse_linear("2*v1*n", &names(&["n"]), &names(&["v1"])).is_err());
    }
}
