//! Minimal s-expression reader (SMT-LIB solver output and ELTL spec files).

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SExprError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::error::Error for SExprError {}

impl fmt::Display for SExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl SExpr {
    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a) => Some(a),
            SExpr::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(xs) => Some(xs),
            SExpr::Atom(_) => None,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a) => f.write_str(a),
            SExpr::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses every top-level s-expression in `text`. `;` starts a line comment.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, SExprError> {
    let mut stack: Vec<(Vec<SExpr>, usize, usize)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut col = 0;
    let mut chars = text.chars().peekable();
    let mut atom = String::new();
    let mut atom_pos = (0, 0);

    fn flush(atom: &mut String, stack: &mut [(Vec<SExpr>, usize, usize)], top: &mut Vec<SExpr>) {
        if atom.is_empty() {
            return;
        }
        let a = SExpr::Atom(std::mem::take(atom));
        match stack.last_mut() {
            Some((v, _, _)) => v.push(a),
            None => top.push(a),
        }
    }

    while let Some(c) = chars.next() {
        col += 1;
        match c {
            ';' => {
                flush(&mut atom, &mut stack, &mut top);
                for d in chars.by_ref() {
                    if d == '\n' {
                        line += 1;
                        col = 0;
                        break;
                    }
                }
            }
            '(' => {
                flush(&mut atom, &mut stack, &mut top);
                stack.push((Vec::new(), line, col));
            }
            ')' => {
                flush(&mut atom, &mut stack, &mut top);
                let (v, _, _) = stack.pop().ok_or_else(|| SExprError {
                    line,
                    column: col,
                    message: "unbalanced `)`".into(),
                })?;
                let l = SExpr::List(v);
                match stack.last_mut() {
                    Some((p, _, _)) => p.push(l),
                    None => top.push(l),
                }
            }
            '\n' => {
                flush(&mut atom, &mut stack, &mut top);
                line += 1;
                col = 0;
            }
            c if c.is_whitespace() => flush(&mut atom, &mut stack, &mut top),
            '"' => {
                flush(&mut atom, &mut stack, &mut top);
                atom.push('"');
                for d in chars.by_ref() {
                    col += 1;
                    atom.push(d);
                    if d == '"' {
                        break;
                    }
                    if d == '\n' {
                        line += 1;
                        col = 0;
                    }
                }
                flush(&mut atom, &mut stack, &mut top);
            }
            c => {
                if atom.is_empty() {
                    atom_pos = (line, col);
                }
                atom.push(c);
            }
        }
    }
    flush(&mut atom, &mut stack, &mut top);
    let _ = atom_pos;
    if let Some((_, l, c)) = stack.last() {
        return Err(SExprError {
            line: *l,
            column: *c,
            message: "unclosed `(`".into(),
        });
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_comments() {
        let v = parse_all("; c\n(a (b c) d) e").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].to_string(), "(a (b c) d)");
        assert_eq!(v[1], SExpr::Atom("e".into()));
    }

    #[test]
    fn unbalanced_is_reported() {
        let e = parse_all("(a\n (b)").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        assert!(parse_all("a)").is_err());
    }
}
