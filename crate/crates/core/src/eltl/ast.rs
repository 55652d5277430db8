use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ta::{IntegerGuard, LocId};

/// Propositional part of a specification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prop {
    True,
    /// Every location in the set is empty.
    Zero(BTreeSet<LocId>),
    /// Some location in the set is occupied.
    NonZero(BTreeSet<LocId>),
    Guard(IntegerGuard),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Not(Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn and(ps: impl IntoIterator<Item = Prop>) -> Prop {
        let mut out = Vec::new();
        for p in ps {
            match p {
                Prop::True => {}
                Prop::And(qs) => out.extend(qs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Prop::True,
            1 => out.pop().expect("one element"),
            _ => Prop::And(out),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Prop::True)
    }

    pub fn collect_guards(&self, out: &mut Vec<IntegerGuard>) {
        match self {
            Prop::True | Prop::Zero(_) | Prop::NonZero(_) => {}
            Prop::Guard(g) => out.push(g.clone()),
            Prop::And(ps) | Prop::Or(ps) => ps.iter().for_each(|p| p.collect_guards(out)),
            Prop::Not(p) => p.collect_guards(out),
            Prop::Implies(a, b) => {
                a.collect_guards(out);
                b.collect_guards(out);
            }
        }
    }
}

/// An ELTL_FT formula. `Or`, `Not` and `Implies` only appear here when
/// an operand is temporal; purely propositional combinations are folded
/// into [`Prop`] by the parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EltlFormula {
    Prop(Prop),
    And(Vec<EltlFormula>),
    G(Box<EltlFormula>),
    F(Box<EltlFormula>),
    Or(Vec<EltlFormula>),
    Not(Box<EltlFormula>),
    Implies(Box<EltlFormula>, Box<EltlFormula>),
}

impl EltlFormula {
    pub fn guards(&self) -> Vec<IntegerGuard> {
        let mut out = Vec::new();
        self.collect_guards(&mut out);
        out
    }

    fn collect_guards(&self, out: &mut Vec<IntegerGuard>) {
        match self {
            EltlFormula::Prop(p) => p.collect_guards(out),
            EltlFormula::And(fs) | EltlFormula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_guards(out))
            }
            EltlFormula::G(f) | EltlFormula::F(f) | EltlFormula::Not(f) => f.collect_guards(out),
            EltlFormula::Implies(a, b) => {
                a.collect_guards(out);
                b.collect_guards(out);
            }
        }
    }

    pub fn is_prop(&self) -> bool {
        matches!(self, EltlFormula::Prop(_))
    }
}
