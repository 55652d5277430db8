//! `tamc bench`: runs a manifest of queries on a thread pool.
//!
//! Manifest format (paths relative to the manifest):
//!
//! ```json
//! {"cases": [
//!   {"name": "strb-cover", "file": "strb.ta.json",
//!    "query": {"kind": "cover", "location": "l3"}},
//!   {"name": "strb-unforg", "file": "strb.ta.json",
//!    "query": {"kind": "mc", "spec": "strb_unforg.eltl"}},
//!   {"name": "strb-reach", "file": "strb.ta.json",
//!    "query": {"kind": "reach", "zero": ["l0"], "pos": ["l3"]}}
//! ]}
//! ```

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tamc_core::cover::{cover, CoverMode, CoverOutcome};
use tamc_core::eltl::{check_spec, parse_spec, CheckOptions, SpecOutcome};
use tamc_core::reach::{solve_reach, InitSpec, ReachOutcome, ReachQuery};

use crate::report::write_text;
use crate::{load_concrete, read, CliError, Ctx};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    cases: Vec<Case>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Case {
    name: String,
    file: PathBuf,
    query: Query,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Query {
    Cover {
        location: String,
        #[serde(default)]
        bound: Option<u64>,
    },
    Reach {
        #[serde(default)]
        zero: Vec<String>,
        #[serde(default)]
        pos: Vec<String>,
        #[serde(default)]
        bound: Option<u64>,
    },
    Mc {
        spec: PathBuf,
    },
}

impl Query {
    fn label(&self) -> &'static str {
        match self {
            Query::Cover { .. } => "cover",
            Query::Reach { .. } => "reach",
            Query::Mc { .. } => "mc",
        }
    }
}

#[derive(Debug, Serialize)]
struct Row {
    case: String,
    query: String,
    locations: usize,
    rules: usize,
    verdict: String,
    time_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn run_case(ctx: &Ctx, base: &Path, case: &Case) -> Result<(usize, usize, String), CliError> {
    let ta = load_concrete(&base.join(&case.file))?;
    let size = (ta.locations.len(), ta.rules.len());
    let loc = |n: &str| {
        ta.location_index(n)
            .ok_or_else(|| CliError::input(format!("unknown location `{n}`")))
    };
    let assume = ctx.file.assume_multiplicative.unwrap_or(false);
    let verdict = match &case.query {
        Query::Cover { location, bound } => {
            match cover(&ta, loc(location)?, &CoverMode::Parameterized, bound.or(ctx.file.bound), assume, &ctx.solver)? {
                CoverOutcome::Coverable(_) => "coverable".to_string(),
                CoverOutcome::NotCoverable => "not_coverable".to_string(),
                CoverOutcome::Unknown(r) => format!("unknown: {r}"),
            }
        }
        Query::Reach { zero, pos, bound } => {
            let q = ReachQuery {
                init: InitSpec::Parameterized(None),
                zero: zero.iter().map(|n| loc(n)).collect::<Result<_, _>>()?,
                pos: pos.iter().map(|n| loc(n)).collect::<Result<_, _>>()?,
                bound: bound.or(ctx.file.bound),
                appl: Default::default(),
            };
            match solve_reach(&ta, &q, &ctx.solver)? {
                ReachOutcome::Reachable(_) => "sat".to_string(),
                ReachOutcome::Unreachable => "unsat".to_string(),
                ReachOutcome::Unknown(r) => format!("unknown: {r}"),
            }
        }
        Query::Mc { spec } => {
            let phi = parse_spec(&read(&base.join(spec))?, &ta).map_err(|e| CliError::input(e.to_string()))?;
            let opts = CheckOptions {
                assume_multiplicative: assume,
                max_orders: ctx.file.max_orders,
                solver: ctx.solver.clone(),
            };
            match check_spec(&ta, &phi, &opts)? {
                SpecOutcome::Holds => "holds".to_string(),
                SpecOutcome::Violated(_) => "violated".to_string(),
                SpecOutcome::Unknown(r) => format!("unknown: {r}"),
            }
        }
    };
    Ok((size.0, size.1, verdict))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn run_manifest(ctx: &Ctx, manifest: &Path, jobs: usize, out_dir: Option<&Path>) -> Result<u8, CliError> {
    let m: Manifest = serde_json::from_str(&read(manifest)?)
        .map_err(|e| CliError::input(format!("{}: {e}", manifest.display())))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::input(e.to_string()))?;
    let rows: Vec<Row> = pool.install(|| {
        m.cases
            .par_iter()
            .map(|case| {
                let start = Instant::now();
                let res = catch_unwind(AssertUnwindSafe(|| run_case(ctx, base, case)));
                let time_ms = start.elapsed().as_millis() as u64;
                let (locations, rules, verdict, error) = match res {
                    Ok(Ok((l, r, v))) => (l, r, v, None),
                    Ok(Err(e)) => (0, 0, "error".to_string(), Some(e.message)),
                    Err(_) => (0, 0, "error".to_string(), Some("internal error".to_string())),
                };
                Row {
                    case: case.name.clone(),
                    query: case.query.label().to_string(),
                    locations,
                    rules,
                    verdict,
                    time_ms,
                    error,
                }
            })
            .collect()
    });
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    let mut csv = String::from("case,query,locations,rules,verdict,time_ms\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_field(&r.case),
            r.query,
            r.locations,
            r.rules,
            csv_field(&r.verdict),
            r.time_ms
        ));
    }
    write_text(&dir.join("bench.csv"), &csv)?;
    let json = serde_json::to_string_pretty(&rows).expect("serializable");
    write_text(&dir.join("bench.json"), &json)?;
    println!("{json}");
    Ok(if rows.iter().any(|r| r.error.is_some()) { 2 } else { 0 })
}
