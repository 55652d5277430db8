//! Shared fixtures for unit tests.

use crate::ta::{parse_ta, ThresholdAutomaton};

pub const STRB: &str = include_str!("../../../benchmarks/strb.ta.json");

pub fn strb() -> ThresholdAutomaton {
    parse_ta(STRB).unwrap().into_concrete().unwrap()
}
