//! Generation, validation, transformation and scoring of PDDL planning
//! datasets.
//!
//! The pipeline runs bottom-up through these modules:
//!
//! * [`pddl`]: lexing, parsing and canonical printing of domains, problems
//!   and sequential plans.
//! * [`semantics`]: grounding and closed-world STRIPS execution.
//! * [`validator`]: plan validation with a four-way outcome.
//! * [`planner`]: an internal forward-search planner and an adapter for
//!   external planners.
//! * [`dpgc`]: random problem generation from declarative configs.
//! * [`transforms`]: anonymization, curriculum schedules and the compact
//!   plan codec.
//! * [`dataset`]: deduplication, stratified splits, JSONL I/O and token
//!   statistics.
//! * [`reward`]: verifier rewards and group-relative advantages.
//! * [`cost`]: the planner-based vs verifier-reward cost model.
//! * [`pipeline`]: the end-to-end dataset build.

pub mod atomic;
pub mod cost;
pub mod dataset;
pub mod dpgc;
pub mod fixtures;
pub mod pddl;
pub mod pipeline;
pub mod planner;
pub mod reward;
pub mod seed;
pub mod semantics;
pub mod transforms;
pub mod validator;

pub use pddl::{Domain, Name, Problem, TimedPlan};
pub use validator::{validate, Outcome, ValidationReport};

/// Order-preserving map, parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}
