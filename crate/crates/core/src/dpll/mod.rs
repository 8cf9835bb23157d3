//! The garbled-circuit search driver and its oblivious subroutines.

mod event;
mod solver;

pub use event::{parse_trace, trace_text, SearchEvent};
pub use solver::{
    branch_circuit, check_circuit, resolve_circuit, unit_search_circuit, SharedFormula, SolveOutcome, Solver,
    StepMetrics, Subroutine,
};
