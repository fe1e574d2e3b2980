//! Reasoning over weighted description-logic knowledge bases: interpretation
//! costs, bounded-cost satisfiability, optimal cost, and query entailment
//! under cost-bounded and optimal-cost semantics.

pub mod bench;
pub mod configs;
pub mod interp;
pub mod kb;
pub mod text;
pub mod reason;
pub mod search;
