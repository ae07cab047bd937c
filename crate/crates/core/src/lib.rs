//! Counting Skolem functions of relational specifications.
//!
//! A specification `∃Y. F(X, Y)` admits one Skolem function vector per
//! choice of output at each input. This crate estimates the logarithm of
//! their number with sampling and projected counting oracles
//! ([`skolemfc`]), and computes it exactly by enumeration ([`baseline`])
//! or by truth table ([`brute_force_skolem_count`]).

pub mod budget;
pub mod count;
pub mod error;
pub mod estimator;
pub mod formula;
pub mod instances;
pub mod parse;
pub mod sample;
pub mod sat;
pub mod transform;

pub use budget::{Budget, Limits};
pub use count::{CountResult, Counter, ExactCounter, ExternalCounter, HashCounter};
pub use error::{Error, LimitKind, Result};
pub use estimator::{
    baseline, brute_force_output_counts, brute_force_skolem_count, derive_params, skolemfc,
    stopping_rule, AbortCheck, BaselineRun, LogBase, LogCount, Oracles, Outcome, ParamSet,
    RunStats, SkolemConfig, SkolemRun,
};
pub use formula::{
    validate, Assignment, Clause, Cnf, Diagnostic, Literal, ProjectedFormula, Specification, VarId,
};
pub use parse::{
    parse_dimacs_annotated, parse_projected_dimacs, parse_qdimacs, to_annotated_dimacs,
    to_projected_dimacs, to_qdimacs,
};
pub use sample::{ExternalSampler, HashSampler, SampleResult, Sampler, SelfReducibleSampler};
pub use transform::{build_g, cofactor, cofactor_on_outputs, DoubledFormula};
