//! Multiplicativity of an environment: RC, N and all guard solution sets are
//! closed under scaling by positive integers.

use num_traits::Zero;

use super::{normalize_guard, GuardKind, IntegerGuard, Rational, ThresholdAutomaton};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Multiplicative {
    Yes,
    No(String),
    Unknown,
}

/// Sound syntactic check plus sampling-based refutation. `extra` lists
/// further guards (e.g. those of a specification) that must also scale.
pub fn check_multiplicative(ta: &ThresholdAutomaton, extra: &[IntegerGuard]) -> Multiplicative {
    let mut guards: Vec<IntegerGuard> = ta
        .rules
        .iter()
        .flat_map(|r| r.guards.iter().map(normalize_guard))
        .collect();
    guards.extend(extra.iter().cloned());

    let env = &ta.env;
    let homogeneous_rc = env.resilience.iter().all(|c| c.expr.constant.is_zero());
    let homogeneous_n = env.size_fn.constant.is_zero();
    let guards_ok = guards.iter().all(|g| match g.kind {
        GuardKind::Rise => g.rhs.constant >= 0,
        GuardKind::Fall => g.rhs.constant <= 0,
    });
    if homogeneous_rc && homogeneous_n && guards_ok {
        return Multiplicative::Yes;
    }

    let k = env.params.len();
    let samples = param_grid(k);
    for p in &samples {
        if !env.admissible(p) || env.size(p).is_none() {
            continue;
        }
        for mu in 2..=4u64 {
            let q: Vec<u64> = p.iter().map(|v| v * mu).collect();
            if !env.admissible(&q) {
                return Multiplicative::No(format!(
                    "resilience condition holds at {p:?} but not at {mu}·{p:?}"
                ));
            }
            if env.size_fn.eval(&q) != env.size_fn.eval(p) * Rational::from_integer(mu as i64) {
                return Multiplicative::No(format!("N({mu}·{p:?}) != {mu}·N({p:?})"));
            }
        }
    }

    for g in &guards {
        if let Some(reason) = refute_guard(g, &samples) {
            return Multiplicative::No(reason);
        }
    }
    Multiplicative::Unknown
}

fn param_grid(k: usize) -> Vec<Vec<u64>> {
    let mut r = 6u64;
    while r > 1 && (r + 1).pow(k as u32) > 4096 {
        r -= 1;
    }
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Searches small nonnegative rational points `(y, q)` satisfying `g` whose
/// scaling by some μ ∈ {2,3,4} falsifies it.
fn refute_guard(g: &IntegerGuard, samples: &[Vec<u64>]) -> Option<String> {
    let eval = |y: Rational, q: &[Rational]| {
        let lhs = y * Rational::from_integer(g.scale);
        let mut rhs = Rational::from_integer(g.rhs.constant);
        for (&p, &c) in &g.rhs.coeffs {
            rhs += Rational::from_integer(c) * q[p];
        }
        match g.kind {
            GuardKind::Rise => lhs >= rhs,
            GuardKind::Fall => lhs < rhs,
        }
    };
    for den in 1..=3i64 {
        for p in samples.iter().take(512) {
            let q: Vec<Rational> = p
                .iter()
                .map(|&v| Rational::new(v as i64, den))
                .collect();
            for num in 0..=(6 * den) {
                let y = Rational::new(num, den);
                if !eval(y, &q) {
                    continue;
                }
                for mu in 2..=4i64 {
                    let m = Rational::from_integer(mu);
                    let qs: Vec<Rational> = q.iter().map(|v| *v * m).collect();
                    if !eval(y * m, &qs) {
                        return Some(format!(
                            "guard solution (x={y}, params={}) is not closed under scaling by {mu}",
                            q.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
                        ));
                    }
                }
            }
        }
    }
    None
}
