//! Bounded synthesis of guard coefficients: enumerate a finite space of
//! sane assignments, verify each with the liveness checker, and use every
//! counterexample to discard further candidates without a solver call.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eltl::{check_spec, replay_lasso, CheckOptions, EltlError, EltlFormula, SpecOutcome};
use crate::presburger::{solve, Formula, LinTerm, Problem, SolverConfig, SolverError, Verdict};
use crate::ta::{
    check_multiplicative, fmt_rational, Coefficient, Environment, LinearExpr, Multiplicative,
    ParamId, Rational, Rel, SketchTA, ThresholdAutomaton,
};

/// Values for the indeterminates of a sketch.
pub type Assignment = BTreeMap<String, Rational>;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("no value for indeterminate `{0}`")]
    MissingIndeterminate(String),
    #[error("candidate space cannot be bounded: {0}")]
    UnboundedSpace(String),
    #[error("denominator bound must be positive")]
    BadDenominator,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Eltl(#[from] EltlError),
}

/// Substitutes `mu` into the sketch.
pub fn instantiate(sketch: &SketchTA, mu: &Assignment) -> Result<ThresholdAutomaton, SynthError> {
    if let Some(v) = sketch.indeterminates.iter().find(|v| !mu.contains_key(*v)) {
        return Err(SynthError::MissingIndeterminate(v.clone()));
    }
    Ok(sketch
        .map_coefficients(|c| match c {
            Coefficient::Const(r) => Some(*r),
            Coefficient::Indeterminate(v) => mu.get(v).copied(),
        })
        .expect("all indeterminates bound"))
}

pub fn format_assignment(mu: &Assignment) -> BTreeMap<String, String> {
    mu.iter().map(|(k, v)| (k.clone(), fmt_rational(v))).collect()
}

/// Finite candidate space: for each indeterminate (in sketch order) the
/// admissible numerators over the common denominator `denom`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSpace {
    pub indeterminates: Vec<String>,
    pub numerators: Vec<Vec<i64>>,
    pub denom: i64,
}

impl CandidateSpace {
    /// Number of distinct assignments.
    pub fn size(&self) -> usize {
        self.candidates().len()
    }

    /// Distinct assignments ordered by the lcm of their reduced denominators,
    /// then by the value vector.
    pub fn candidates(&self) -> Vec<Assignment> {
        let mut vectors: Vec<Vec<Rational>> = vec![vec![]];
        for nums in &self.numerators {
            let mut values: Vec<Rational> = nums.iter().map(|&k| Rational::new(k, self.denom)).collect();
            values.sort();
            values.dedup();
            vectors = vectors
                .into_iter()
                .flat_map(|v| {
                    values.iter().map(move |x| {
                        let mut w = v.clone();
                        w.push(*x);
                        w
                    })
                })
                .collect();
        }
        let key = |v: &Vec<Rational>| v.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
        vectors.sort_by(|a, b| key(a).cmp(&key(b)).then_with(|| a.cmp(b)));
        vectors.dedup();
        vectors
            .into_iter()
            .map(|v| self.indeterminates.iter().cloned().zip(v).collect())
            .collect()
    }
}

/// Parameter playing the role of `n` in the sanity condition `0 ≤ e ≤ n`:
/// the positively weighted parameter of a resilience constraint of the
/// shape `n > Σ δ_i·t_i` (or `≥`, with a nonpositive constant), preferring
/// one named `n`.
pub fn sanity_parameter(env: &Environment) -> Option<ParamId> {
    let mut found = Vec::new();
    for c in &env.resilience {
        if !matches!(c.rel, Rel::Gt | Rel::Ge) || c.expr.constant.is_positive() {
            continue;
        }
        let pos: Vec<ParamId> = c.expr.coeffs.iter().filter(|(_, v)| v.is_positive()).map(|(&p, _)| p).collect();
        if let [p] = pos.as_slice() {
            found.push(*p);
        }
    }
    found
        .iter()
        .copied()
        .find(|&p| env.params[p] == "n")
        .or_else(|| found.first().copied())
}

/// Largest numerator magnitude tried when no bound is given.
const PROBE_CAP: i64 = 64;

/// Builds the candidate space. With `num_bound = Some(b)` numerators range
/// over `[-b·d, b·d]`; otherwise each indeterminate is probed outward from 0
/// with solver queries until the sanity condition fails on both sides. In
/// both cases values that make a guard insane are removed (guards with more
/// than one indeterminate are not filtered, and need `b`).
pub fn sane_space(
    sketch: &SketchTA,
    denom: i64,
    num_bound: Option<i64>,
    cfg: &SolverConfig,
) -> Result<CandidateSpace, SynthError> {
    if denom <= 0 {
        return Err(SynthError::BadDenominator);
    }
    let n = sanity_parameter(&sketch.env);
    let mut numerators = Vec::new();
    for v in &sketch.indeterminates {
        let exprs = single_indeterminate_exprs(sketch, v);
        let shared_guard = sketch.rules.iter().flat_map(|r| &r.guards).any(|g| {
            let ids = indeterminates_of(&g.rhs);
            ids.len() > 1 && ids.contains(&v.as_str())
        });
        let sane = |k: i64| -> Result<bool, SynthError> {
            let Some(n) = n else { return Ok(true) };
            let value = Rational::new(k, denom);
            for e in &exprs {
                if !is_sane(&sketch.env, n, &bind(e, v, value), cfg)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let nums = match num_bound {
            Some(b) => {
                let mut out = Vec::new();
                for k in -b * denom..=b * denom {
                    if sane(k)? {
                        out.push(k);
                    }
                }
                out
            }
            None => {
                if n.is_none() {
                    return Err(SynthError::UnboundedSpace(
                        "the resilience condition has no `n > Σ δ·t` constraint; give a numerator bound".into(),
                    ));
                }
                if shared_guard {
                    return Err(SynthError::UnboundedSpace(format!(
                        "`{v}` shares a guard with another indeterminate; give a numerator bound"
                    )));
                }
                probe(&sane, PROBE_CAP * denom, v)?
            }
        };
        numerators.push(nums);
    }
    Ok(CandidateSpace {
        indeterminates: sketch.indeterminates.clone(),
        numerators,
        denom,
    })
}

/// Sane numerators form an interval; walk outward from 0 until both ends
/// are found.
fn probe(
    sane: &dyn Fn(i64) -> Result<bool, SynthError>,
    cap: i64,
    v: &str,
) -> Result<Vec<i64>, SynthError> {
    let mut out = Vec::new();
    let mut seen_sane = false;
    let (mut up_done, mut down_done) = (false, false);
    for step in 0..=cap {
        for k in if step == 0 { vec![0] } else { vec![step, -step] } {
            let done = if k >= 0 { &mut up_done } else { &mut down_done };
            if *done {
                continue;
            }
            if sane(k)? {
                seen_sane = true;
                out.push(k);
            } else if seen_sane {
                *done = true;
            }
        }
        if up_done && down_done {
            out.sort();
            return Ok(out);
        }
    }
    Err(SynthError::UnboundedSpace(format!(
        "no sanity bound for `{v}` within numerators ±{cap}"
    )))
}

fn indeterminates_of(e: &LinearExpr<Coefficient>) -> Vec<&str> {
    let mut ids: Vec<&str> = std::iter::once(&e.constant)
        .chain(e.coeffs.values())
        .filter_map(|c| match c {
            Coefficient::Indeterminate(v) => Some(v.as_str()),
            Coefficient::Const(_) => None,
        })
        .collect();
    ids.sort();
    ids.dedup();
    ids
}

/// Guard right-hand sides whose only indeterminate is `v`.
fn single_indeterminate_exprs(sketch: &SketchTA, v: &str) -> Vec<LinearExpr<Coefficient>> {
    let mut out: Vec<LinearExpr<Coefficient>> = Vec::new();
    for g in sketch.rules.iter().flat_map(|r| &r.guards) {
        if indeterminates_of(&g.rhs) == [v] && !out.contains(&g.rhs) {
            out.push(g.rhs.clone());
        }
    }
    out
}

fn bind(e: &LinearExpr<Coefficient>, v: &str, value: Rational) -> LinearExpr {
    let conv = |c: &Coefficient| match c {
        Coefficient::Const(r) => *r,
        Coefficient::Indeterminate(w) => {
            debug_assert_eq!(w, v);
            value
        }
    };
    LinearExpr::with_coeffs(conv(&e.constant), e.coeffs.iter().map(|(&p, c)| (p, conv(c))))
}

/// `0 ≤ e(p) ≤ p_n` for every admissible natural parameter valuation.
fn is_sane(env: &Environment, n: ParamId, e: &LinearExpr, cfg: &SolverConfig) -> Result<bool, SynthError> {
    let mut prob = Problem::new();
    let params: Vec<LinTerm> = env.params.iter().map(|p| prob.nat(format!("p_{p}"))).collect();
    let scaled = |e: &LinearExpr| -> (LinTerm, i64) {
        let d = e.denominator_lcm();
        let ie = e.scaled_to_int(d);
        let mut t = LinTerm::constant(ie.constant);
        for (&p, &c) in &ie.coeffs {
            t = t + params[p].clone() * c;
        }
        (t, d)
    };
    let mut fs = Vec::new();
    for c in &env.resilience {
        let (t, _) = scaled(&c.expr);
        fs.push(Formula::atom(t, c.rel, LinTerm::constant(0)));
    }
    let (t, d) = scaled(e);
    fs.push(Formula::or([
        Formula::lt(t.clone(), LinTerm::constant(0)),
        Formula::gt(t, params[n].clone() * d),
    ]));
    prob.assert(Formula::and(fs));
    match solve(&prob, cfg)? {
        Verdict::Unsat => Ok(true),
        Verdict::Sat(_) => Ok(false),
        Verdict::Unknown(r) => Err(SynthError::UnboundedSpace(format!(
            "sanity query undecided: {r}"
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct SynthOptions {
    pub denom: i64,
    pub num_bound: Option<i64>,
    pub budget: Duration,
    /// Seeds the choice of pruned candidates that are re-verified.
    pub seed: u64,
    /// How many pruned candidates to re-verify.
    pub reverify: usize,
    pub check: CheckOptions,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            denom: 1,
            num_bound: None,
            budget: Duration::from_secs(300),
            seed: 0,
            reverify: 5,
            check: CheckOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStatus {
    /// The liveness check found no violation.
    Holds,
    /// The checker returned a replayable violation.
    Violated,
    /// The violation of an earlier candidate replays verbatim here.
    Pruned { by: usize },
    NotMultiplicative { reason: String },
    Unknown { reason: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateLog {
    pub assignment: BTreeMap<String, String>,
    pub status: CandidateStatus,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthReport {
    pub space_size: usize,
    pub candidates_tried: usize,
    pub pruned: usize,
    pub log: Vec<CandidateLog>,
    /// Pruned candidates that were checked again, with the verdict.
    pub reverified: Vec<(BTreeMap<String, String>, String)>,
}

impl SynthReport {
    /// Whether every re-verified pruned candidate was indeed violated.
    pub fn pruning_confirmed(&self) -> bool {
        self.reverified.iter().all(|(_, v)| v == "violated")
    }
}

#[derive(Clone, Debug)]
pub enum SynthOutcome {
    Found(Assignment),
    NoneInSpace,
    Unknown(String),
}

/// CEGIS over the sane space: the first candidate (in space order) for
/// which `phi` has no run in `TA[μ]` is returned.
pub fn synthesize(
    sketch: &SketchTA,
    phi: &EltlFormula,
    opts: &SynthOptions,
) -> Result<(SynthOutcome, SynthReport), SynthError> {
    let start = Instant::now();
    let space = sane_space(sketch, opts.denom, opts.num_bound, &opts.check.solver)?;
    let cands = space.candidates();
    log::info!("candidate space has {} assignments", cands.len());
    let mut status: Vec<Option<CandidateStatus>> = vec![None; cands.len()];
    let mut report = SynthReport {
        space_size: cands.len(),
        candidates_tried: 0,
        pruned: 0,
        log: Vec::new(),
        reverified: Vec::new(),
    };
    let check_opts = CheckOptions {
        assume_multiplicative: true,
        ..opts.check.clone()
    };
    let mut outcome = None;
    for i in 0..cands.len() {
        if status[i].is_some() {
            continue;
        }
        if start.elapsed() > opts.budget {
            outcome = Some(SynthOutcome::Unknown(format!(
                "budget of {:?} exhausted after {} candidates",
                opts.budget, report.candidates_tried
            )));
            break;
        }
        let ta = instantiate(sketch, &cands[i])?;
        if let Multiplicative::No(reason) = check_multiplicative(&ta, &phi.guards()) {
            status[i] = Some(CandidateStatus::NotMultiplicative { reason });
            continue;
        }
        report.candidates_tried += 1;
        match check_spec(&ta, phi, &check_opts)? {
            SpecOutcome::Holds => {
                status[i] = Some(CandidateStatus::Holds);
                outcome = Some(SynthOutcome::Found(cands[i].clone()));
                break;
            }
            SpecOutcome::Violated(w) => {
                status[i] = Some(CandidateStatus::Violated);
                for j in i + 1..cands.len() {
                    if status[j].is_some() {
                        continue;
                    }
                    let other = instantiate(sketch, &cands[j])?;
                    if replay_lasso(&other, &w).is_ok() {
                        status[j] = Some(CandidateStatus::Pruned { by: i });
                        report.pruned += 1;
                    }
                }
            }
            SpecOutcome::Unknown(reason) => status[i] = Some(CandidateStatus::Unknown { reason }),
        }
    }
    let outcome = outcome.unwrap_or_else(|| {
        let unknown = status
            .iter()
            .filter(|s| matches!(s, Some(CandidateStatus::Unknown { .. })))
            .count();
        if unknown > 0 {
            SynthOutcome::Unknown(format!("{unknown} candidate(s) could not be decided"))
        } else {
            SynthOutcome::NoneInSpace
        }
    });

    let mut pruned: Vec<usize> = (0..cands.len())
        .filter(|&i| matches!(status[i], Some(CandidateStatus::Pruned { .. })))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    pruned.shuffle(&mut rng);
    for &i in pruned.iter().take(opts.reverify) {
        let ta = instantiate(sketch, &cands[i])?;
        let verdict = match check_spec(&ta, phi, &check_opts)? {
            SpecOutcome::Holds => "holds".to_string(),
            SpecOutcome::Violated(_) => "violated".to_string(),
            SpecOutcome::Unknown(r) => format!("unknown: {r}"),
        };
        report.reverified.push((format_assignment(&cands[i]), verdict));
    }
    report.log = cands
        .iter()
        .zip(status)
        .filter_map(|(c, s)| {
            s.map(|status| CandidateLog {
                assignment: format_assignment(c),
                status,
            })
        })
        .collect();
    Ok((outcome, report))
}
