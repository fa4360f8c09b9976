//! Sequential plan validation with VAL semantics and a single outcome label
//! per plan.
//!
//! Precedence, highest first: `Malformed` (the plan does not parse or a step
//! does not ground), `PreconditionFailure` (earliest inapplicable step;
//! execution halts there), `ExecutableNoGoal`, `Valid`.

use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use crate::pddl::{self, Domain, Literal, Problem, TimedPlan};
use crate::semantics::{self, GroundAction, Satisfaction, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Valid,
    ExecutableNoGoal,
    PreconditionFailure,
    Malformed,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [
        Outcome::Valid,
        Outcome::ExecutableNoGoal,
        Outcome::PreconditionFailure,
        Outcome::Malformed,
    ];

    pub fn is_valid(self) -> bool {
        self == Outcome::Valid
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Valid => "Valid",
            Outcome::ExecutableNoGoal => "ExecutableNoGoal",
            Outcome::PreconditionFailure => "PreconditionFailure",
            Outcome::Malformed => "Malformed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// 1-based position in the plan.
    pub index: usize,
    pub action: GroundAction,
    pub pre_state_atoms: usize,
    pub satisfaction: Satisfaction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureDetail {
    Malformed { reason: String },
    Precondition { step: usize, violated: Vec<Literal> },
    Goal { unsatisfied: Vec<Literal> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub outcome: Outcome,
    pub trace: Vec<TraceStep>,
    pub failure: Option<FailureDetail>,
    pub final_cost: u64,
    /// State at the point execution stopped.
    pub final_state: State,
    pub terminated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidatorError {
    #[error("domain and problem are inconsistent: {0}")]
    InvalidInputs(String),
}

fn joined(lits: &[Literal]) -> String {
    lits.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

impl ValidationReport {
    fn malformed(reason: String, problem: &Problem) -> Self {
        ValidationReport {
            outcome: Outcome::Malformed,
            trace: Vec::new(),
            failure: Some(FailureDetail::Malformed { reason }),
            final_cost: 0,
            final_state: State::initial(problem),
            terminated: false,
        }
    }

    /// One-line description of why the plan is not valid.
    pub fn failure_summary(&self) -> Option<String> {
        Some(match self.failure.as_ref()? {
            FailureDetail::Malformed { reason } => format!("malformed plan: {reason}"),
            FailureDetail::Precondition { step, violated } => {
                format!("precondition of step {step} violated: {}", joined(violated))
            }
            FailureDetail::Goal { unsatisfied } => {
                format!("goal not satisfied: {}", joined(unsatisfied))
            }
        })
    }

    /// Stable line-oriented rendering of trace, failure and outcome.
    pub fn verbose(&self) -> String {
        let mut out = String::new();
        for t in &self.trace {
            write!(
                out,
                "step {}: {} atoms={} ",
                t.index, t.action, t.pre_state_atoms
            )
            .unwrap();
            if t.satisfaction.is_satisfied() {
                out.push_str("ok\n");
            } else {
                writeln!(out, "violated {}", joined(&t.satisfaction.violated)).unwrap();
            }
        }
        if let Some(f) = self.failure_summary() {
            writeln!(out, "failure: {f}").unwrap();
        }
        writeln!(out, "cost: {}", self.final_cost).unwrap();
        write!(out, "outcome: {}", self.outcome).unwrap();
        out
    }
}

/// Rejects a domain/problem pair that does not bind (a caller bug, not a
/// plan defect).
pub fn check_inputs(domain: &Domain, problem: &Problem) -> Result<(), ValidatorError> {
    pddl::check_problem(domain, problem).map_err(|e| ValidatorError::InvalidInputs(e.to_string()))
}

/// Parses and validates `plan_text`. Plan defects are outcomes, never errors.
pub fn validate(
    domain: &Domain,
    problem: &Problem,
    plan_text: &str,
) -> Result<ValidationReport, ValidatorError> {
    check_inputs(domain, problem)?;
    match pddl::parse_plan(plan_text) {
        Ok(plan) => Ok(execute(domain, problem, &plan)),
        Err(e) => Ok(ValidationReport::malformed(e.to_string(), problem)),
    }
}

/// Validates an already parsed plan.
pub fn validate_plan(
    domain: &Domain,
    problem: &Problem,
    plan: &TimedPlan,
) -> Result<ValidationReport, ValidatorError> {
    check_inputs(domain, problem)?;
    Ok(execute(domain, problem, plan))
}

fn execute(domain: &Domain, problem: &Problem, plan: &TimedPlan) -> ValidationReport {
    // Ground everything first: a grounding failure anywhere outranks an
    // earlier precondition failure.
    let mut actions = Vec::with_capacity(plan.steps.len());
    for (i, step) in plan.steps.iter().enumerate() {
        match semantics::ground(domain, problem, &step.action, &step.args) {
            Ok(g) => actions.push(g),
            Err(e) => {
                let mut r =
                    ValidationReport::malformed(format!("step {} {step}: {e}", i + 1), problem);
                r.terminated = plan.terminated;
                return r;
            }
        }
    }
    let mut state = State::initial(problem);
    let mut trace = Vec::with_capacity(actions.len());
    for (i, action) in actions.into_iter().enumerate() {
        let satisfaction = semantics::applicable(&state, &action);
        let pre_state_atoms = state.atoms.len();
        if !satisfaction.is_satisfied() {
            let violated = satisfaction.violated.clone();
            trace.push(TraceStep {
                index: i + 1,
                action,
                pre_state_atoms,
                satisfaction,
            });
            return ValidationReport {
                outcome: Outcome::PreconditionFailure,
                trace,
                failure: Some(FailureDetail::Precondition {
                    step: i + 1,
                    violated,
                }),
                final_cost: state.cost,
                final_state: state,
                terminated: plan.terminated,
            };
        }
        state = semantics::apply(&state, &action).expect("applicability checked above");
        trace.push(TraceStep {
            index: i + 1,
            action,
            pre_state_atoms,
            satisfaction,
        });
    }
    let unsatisfied = semantics::unsatisfied(&state, &problem.goal);
    let (outcome, failure) = if unsatisfied.is_empty() {
        (Outcome::Valid, None)
    } else {
        (
            Outcome::ExecutableNoGoal,
            Some(FailureDetail::Goal { unsatisfied }),
        )
    };
    ValidationReport {
        outcome,
        trace,
        failure,
        final_cost: state.cost,
        final_state: state,
        terminated: plan.terminated,
    }
}

/// Share of plans classified `Valid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanRate {
    pub valid: usize,
    pub total: usize,
}

impl PlanRate {
    pub fn percent(&self) -> f64 {
        100.0 * self.valid as f64 / self.total as f64
    }
}

impl fmt::Display for PlanRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1}%", self.percent())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RateError {
    #[error("no cases to score")]
    EmptyInput,
    #[error(transparent)]
    Validator(#[from] ValidatorError),
}

pub fn valid_plan_rate<'a>(
    cases: impl IntoIterator<Item = (&'a Domain, &'a Problem, &'a str)>,
) -> Result<PlanRate, RateError> {
    let mut rate = PlanRate { valid: 0, total: 0 };
    for (d, p, text) in cases {
        rate.total += 1;
        if validate(d, p, text)?.outcome.is_valid() {
            rate.valid += 1;
        }
    }
    if rate.total == 0 {
        return Err(RateError::EmptyInput);
    }
    Ok(rate)
}
