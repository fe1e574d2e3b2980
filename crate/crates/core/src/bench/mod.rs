//! Ground truth: brute-force oracles, repair semantics, reduction generators
//! with independent solvers, and fixtures.

mod fixtures;
pub mod graph;
pub mod lexmax;
pub mod oracle;
pub mod random;
pub mod repairs;

use num_bigint::BigUint;
use thiserror::Error;

use crate::interp::InterpError;
use crate::reason::ReasonError;

pub use fixtures::visa_fixture;
pub use graph::{gen_3col, gen_independent_set, Graph};
pub use lexmax::{gen_lexmax, Slot, TwoTwoFormula};
pub use oracle::{enumerate_interpretations, oracle_bcs, oracle_entails, oracle_opt, OracleTable, Signature};
pub use repairs::{ar_entails, brave_entails, enumerate_w_repairs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("enumeration of {0} interpretations exceeds the budget")]
    BudgetExceeded(BigUint),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("the formula is unsatisfiable")]
    UnsatisfiableInput,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("could not decide within the domain bound: {0}")]
    Inconclusive(String),
    #[error("expected a Boolean query")]
    NotBoolean,
    #[error("query individual `{0}` does not occur in the KB")]
    UnknownQueryIndividual(String),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Reason(#[from] ReasonError),
}
