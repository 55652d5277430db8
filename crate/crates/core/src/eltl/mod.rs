//! ELTL_FT: specifications over counter emptiness and guards, checked by
//! searching for lasso-shaped counterexamples.
//!
//! A specification describes the *bad* behaviour: [`check_spec`] answers
//! `Holds` when no fair run satisfies it and `Violated` with a replayable
//! lasso otherwise.

mod ast;
mod encode;
mod lasso;
mod normal;
mod parse;

use thiserror::Error;

pub use ast::{EltlFormula, Prop};
pub use encode::{check_spec, phi_prop, prop_at, CheckOptions, SpecOutcome};
pub use lasso::{holds_on_lasso, replay_lasso, LassoSegment, LassoWitness};
pub use normal::{
    cut_graph, to_normal_form, topo_orders, CutGraph, Node, NodeKind, NormalForm, TopoOrders,
    LOOP_END, LOOP_ST, ROOT,
};
pub use parse::{parse_spec, print_spec, SpecError};

use crate::presburger::SolverError;
use crate::reach::ReachError;

#[derive(Debug, Error)]
pub enum EltlError {
    #[error("formula cannot be brought into normal form: {0}")]
    NormalizationFailed(String),
    #[error("unsupported proposition shape for a G-part: {0}")]
    UnsupportedShape(String),
    #[error("environment is not known to be multiplicative: {0}")]
    NotMultiplicative(String),
    #[error("invalid certificate: {0}")]
    CertificateInvalid(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Reach(#[from] ReachError),
}
