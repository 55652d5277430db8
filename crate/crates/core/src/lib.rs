//! Parameterized verification and synthesis for threshold automata.
//!
//! * [`ta`]: automata, environments, the `.ta.json` format.
//! * [`semantics`]: counter-system semantics and a bounded brute-force oracle.
//! * [`presburger`]: linear integer formulas and the external SMT solver.
//! * [`reach`]: the steady-segment reachability encoding and witness realization.
//! * [`cover`]: coverability (saturation for constant rise guards).
//! * [`eltl`]: ELTL_FT specifications and lasso witnesses.
//! * [`synthesis`]: bounded synthesis of guard coefficients.
//! * [`generators`]: automata compiled from 3-SAT and Σ₂-3-SAT instances.

pub mod cover;
pub mod eltl;
pub mod generators;
pub mod presburger;
pub mod reach;
pub mod semantics;
pub mod synthesis;
pub mod sexpr;
pub mod ta;

#[cfg(test)]
mod testutil;
