//! External SMT solver reached over stdin/stdout.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::{Model, Problem, Sort};
use crate::sexpr::{parse_all, SExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub timeout_ms: u64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            path: std::env::var_os("TAMC_SOLVER")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("z3")),
            timeout_ms: std::env::var("TAMC_TIMEOUT_MS")
                .ok()
                .and_then(|s| s.parse().ok())
                .unwrap_or(60_000),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(Model),
    Unsat,
    Unknown(String),
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver `{0}` unavailable: {1}")]
    SolverUnavailable(String, String),
    #[error("malformed solver output: {0}")]
    MalformedSolverOutput(String),
    #[error("solver model does not satisfy the formula (assertion {0})")]
    ModelCheckFailed(usize),
    #[error("formula uses undeclared variables: {0:?}")]
    Undeclared(Vec<String>),
}

impl SolverConfig {
    fn is_z3(&self) -> bool {
        self.path
            .file_name()
            .map(|f| f.to_string_lossy().contains("z3"))
            .unwrap_or(false)
    }

    fn args(&self) -> Vec<String> {
        if self.is_z3() {
            vec![
                "-in".into(),
                "-smt2".into(),
                format!("-t:{}", self.timeout_ms),
                format!("-T:{}", self.timeout_ms / 1000 + 5),
                format!("smt.random_seed={}", self.seed),
                format!("sat.random_seed={}", self.seed),
            ]
        } else {
            vec![
                "--lang=smt2".into(),
                "--produce-models".into(),
                format!("--tlimit-per={}", self.timeout_ms),
                format!("--seed={}", self.seed),
            ]
        }
    }
}

/// `--version` output of the configured solver (cached per path).
pub fn solver_version(cfg: &SolverConfig) -> Result<String, SolverError> {
    static CACHE: OnceLock<Mutex<HashMap<PathBuf, String>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("poisoned").get(&cfg.path) {
        return Ok(v.clone());
    }
    let out = Command::new(&cfg.path)
        .arg("--version")
        .output()
        .map_err(|e| SolverError::SolverUnavailable(cfg.path.display().to_string(), e.to_string()))?;
    let v = String::from_utf8_lossy(&out.stdout).trim().to_string();
    cache
        .lock()
        .expect("poisoned")
        .insert(cfg.path.clone(), v.clone());
    Ok(v)
}

/// Decides the problem; every Sat model is checked against the formula
/// before it is returned.
pub fn solve(problem: &Problem, cfg: &SolverConfig) -> Result<Verdict, SolverError> {
    let undeclared = problem.undeclared();
    if !undeclared.is_empty() {
        return Err(SolverError::Undeclared(undeclared));
    }
    let script = problem.to_script();
    let started = Instant::now();
    let mut child = Command::new(&cfg.path)
        .args(cfg.args())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| SolverError::SolverUnavailable(cfg.path.display().to_string(), e.to_string()))?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(script.as_bytes());
        let _ = stdin.write_all(b"(exit)\n");
    });
    let mut stdout = String::new();
    child
        .stdout
        .take()
        .expect("piped stdout")
        .read_to_string(&mut stdout)
        .map_err(|e| SolverError::MalformedSolverOutput(e.to_string()))?;
    let _ = writer.join();
    let status = child.wait().ok();
    log::debug!(
        "solver finished in {:?} ({} vars, {} assertions)",
        started.elapsed(),
        problem.decls.len(),
        problem.assertions.len()
    );

    let exprs = parse_all(&stdout).map_err(|e| SolverError::MalformedSolverOutput(e.to_string()))?;
    let Some(first) = exprs.first() else {
        if started.elapsed() >= Duration::from_millis(cfg.timeout_ms) {
            return Ok(Verdict::Unknown("timeout".into()));
        }
        return Err(SolverError::MalformedSolverOutput(format!(
            "empty output (exit status {status:?})"
        )));
    };
    match first.atom() {
        Some("unsat") => Ok(Verdict::Unsat),
        Some("unknown") | Some("timeout") => Ok(Verdict::Unknown(
            first.atom().unwrap_or_default().to_string(),
        )),
        Some("sat") => {
            let model = if problem.decls.is_empty() {
                Model::new()
            } else {
                let values = exprs.get(1).ok_or_else(|| {
                    SolverError::MalformedSolverOutput("missing get-value response".into())
                })?;
                parse_model(values)?
            };
            check_model(problem, &model)?;
            Ok(Verdict::Sat(model))
        }
        _ => Err(SolverError::MalformedSolverOutput(truncate(&stdout))),
    }
}

fn truncate(s: &str) -> String {
    s.chars().take(400).collect()
}

fn parse_model(values: &SExpr) -> Result<Model, SolverError> {
    let bad = || SolverError::MalformedSolverOutput(truncate(&values.to_string()));
    let mut model = Model::new();
    for pair in values.list().ok_or_else(bad)? {
        match pair.list() {
            Some([SExpr::Atom(name), value]) => {
                model.insert(name.clone(), parse_int(value).ok_or_else(bad)?);
            }
            _ => return Err(bad()),
        }
    }
    Ok(model)
}

fn parse_int(e: &SExpr) -> Option<i64> {
    match e {
        SExpr::Atom(a) => a.parse().ok(),
        SExpr::List(xs) => match xs.as_slice() {
            [SExpr::Atom(m), x] if m == "-" => parse_int(x).map(|v| -v),
            _ => None,
        },
    }
}

fn check_model(problem: &Problem, model: &Model) -> Result<(), SolverError> {
    for (v, sort) in &problem.decls {
        let Some(&x) = model.get(v) else {
            return Err(SolverError::MalformedSolverOutput(format!("no value for `{v}`")));
        };
        if *sort == Sort::Nat && x < 0 {
            return Err(SolverError::ModelCheckFailed(usize::MAX));
        }
    }
    for (i, a) in problem.assertions.iter().enumerate() {
        match a.eval(model) {
            Ok(true) => {}
            _ => return Err(SolverError::ModelCheckFailed(i)),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{Formula, LinTerm, Problem};
    use super::*;

    fn c(k: i64) -> LinTerm {
        LinTerm::constant(k)
    }

    #[test]
    fn forced_value_and_contradiction() {
        let cfg = SolverConfig::default();
        let mut p = Problem::new();
        let x = p.nat("x");
        p.assert(Formula::ge(x.clone(), c(1)));
        p.assert(Formula::le(x.clone(), c(1)));
        match solve(&p, &cfg).unwrap() {
            Verdict::Sat(m) => assert_eq!(m["x"], 1),
            v => panic!("{v:?}"),
        }
        p.assert(Formula::lt(x, c(1)));
        assert_eq!(solve(&p, &cfg).unwrap(), Verdict::Unsat);
    }

    #[test]
    fn flow_equation() {
        let mut p = Problem::new();
        let a = p.nat("x_r1");
        let b = p.nat("x_r3");
        p.assert(Formula::eq(a - b.clone(), c(2)));
        p.assert(Formula::eq(b, c(1)));
        match solve(&p, &SolverConfig::default()).unwrap() {
            Verdict::Sat(m) => {
                assert_eq!((m["x_r1"], m["x_r3"]), (3, 1));
                assert_eq!(p.formula().eval(&m), Ok(true));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn negative_values_roundtrip() {
        let mut p = Problem::new();
        let y = p.declare("y", Sort::Int);
        p.assert(Formula::eq(y, c(-7)));
        match solve(&p, &SolverConfig::default()).unwrap() {
            Verdict::Sat(m) => assert_eq!(m["y"], -7),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn missing_binary_is_reported() {
        let cfg = SolverConfig {
            path: "/nonexistent/solver".into(),
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve(&Problem::new(), &cfg),
            Err(SolverError::SolverUnavailable(..))
        ));
    }
}
