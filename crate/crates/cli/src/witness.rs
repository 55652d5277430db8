//! Witness files and their replay (`tamc oracle --replay`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tamc_core::eltl::{holds_on_lasso, parse_spec, replay_lasso, LassoWitness};
use tamc_core::reach::ReachWitness;
use tamc_core::semantics::{initial_configs, oracle_lasso, run, OracleLimits};
use tamc_core::synthesis::instantiate;
use tamc_core::ta::{Parsed, Rational, ThresholdAutomaton};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
/// Adjacently tagged: `kind` is written first, so the body deserializes
/// without buffering (integer map keys survive the round trip).
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Witness {
    /// A run from `witness.initial()` whose end satisfies the target.
    Reach {
        zero: Vec<String>,
        pos: Vec<String>,
        witness: ReachWitness,
    },
    /// An ultimately periodic run satisfying the specification.
    Lasso { witness: LassoWitness },
    /// A synthesized assignment with the specification it was checked
    /// against.
    Assignment {
        assignment: BTreeMap<String, String>,
        spec: String,
    },
}

/// Parameter bound and search sizes for the bounded check of assignments.
const REPLAY_PARAM_MAX: u64 = 3;
const REPLAY_STEM: usize = 8;
const REPLAY_LOOP: usize = 3;

fn names_to_ids(ta: &ThresholdAutomaton, names: &[String]) -> Result<Vec<usize>, CliError> {
    names
        .iter()
        .map(|n| {
            ta.location_index(n)
                .ok_or_else(|| CliError::input(format!("witness names unknown location `{n}`")))
        })
        .collect()
}

/// Checks `w` against the automaton (or sketch) it was produced for and
/// returns a one-line description. `Err` with code 1 means the witness is
/// invalid.
pub fn replay(parsed: &Parsed, w: &Witness) -> Result<String, CliError> {
    match w {
        Witness::Reach { zero, pos, witness } => {
            let ta = concrete(parsed)?;
            let init = witness.initial();
            if !init.is_valid(&ta) || !init.is_initial(&ta) {
                return Err(CliError::negative("initial configuration is not initial"));
            }
            let end = run(&ta, init, &witness.realize_path())
                .map_err(|e| CliError::negative(format!("schedule does not replay: {e}")))?;
            if &end != witness.last() {
                return Err(CliError::negative("schedule ends elsewhere than recorded"));
            }
            for l in names_to_ids(&ta, zero)? {
                if end.kappa[l] != 0 {
                    return Err(CliError::negative(format!("`{}` is not empty", ta.locations[l])));
                }
            }
            for l in names_to_ids(&ta, pos)? {
                if end.kappa[l] == 0 {
                    return Err(CliError::negative(format!("`{}` is empty", ta.locations[l])));
                }
            }
            Ok(format!("run of {} rules replays", witness.realize_path().len()))
        }
        Witness::Lasso { witness } => {
            let ta = concrete(parsed)?;
            replay_lasso(&ta, witness).map_err(|e| CliError::negative(e.to_string()))?;
            Ok(format!(
                "lasso with stem {} and loop {} replays",
                witness.stem().len(),
                witness.cycle().len()
            ))
        }
        Witness::Assignment { assignment, spec } => {
            let sketch = match parsed {
                Parsed::Sketch(s) => s.clone(),
                Parsed::Concrete(ta) => ta.to_sketch(),
            };
            let mut mu = BTreeMap::new();
            for (k, v) in assignment {
                mu.insert(k.clone(), parse_rational(v)?);
            }
            let ta = instantiate(&sketch, &mu).map_err(|e| CliError::input(e.to_string()))?;
            let phi = parse_spec(spec, &ta).map_err(|e| CliError::input(e.to_string()))?;
            let bounds = vec![(0, REPLAY_PARAM_MAX); ta.env.params.len()];
            let init = initial_configs(&ta, &bounds, OracleLimits::default())
                .map_err(|e| CliError::unknown(e.to_string()))?;
            let found = oracle_lasso(&ta, &init, REPLAY_STEM, REPLAY_LOOP, 2_000_000, |lp| {
                holds_on_lasso(&phi, lp)
            })
            .map_err(|e| CliError::unknown(e.to_string()))?;
            match found {
                Some(lp) => Err(CliError::negative(format!(
                    "bounded search found a run satisfying the specification (stem {:?}, loop {:?})",
                    lp.stem, lp.cycle
                ))),
                None => Ok(format!(
                    "no violating lasso with stem ≤ {REPLAY_STEM}, loop ≤ {REPLAY_LOOP}, parameters ≤ {REPLAY_PARAM_MAX}"
                )),
            }
        }
    }
}

fn concrete(parsed: &Parsed) -> Result<ThresholdAutomaton, CliError> {
    parsed
        .clone()
        .into_concrete()
        .map_err(|e| CliError::input(e.to_string()))
}

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::input(format!("`{s}` is not a rational number"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}
