//! Reference plan production: an internal grounded forward-search planner
//! and an adapter that runs external planners and converts their output.

mod external;
mod task;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::pddl::{Domain, Problem, TimedPlan};
use crate::seed;
use crate::validator::{self, Outcome, ValidationReport};

pub use external::{
    external_solve, external_validate, parse_planner_output, run_command, CommandOutput,
    ExternalError,
};
pub use task::GroundingExplosion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    GreedyBestFirst,
    BreadthFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    /// Number of unsatisfied goal literals.
    GoalCount,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub heuristic: Heuristic,
    pub max_expansions: u64,
    pub max_plan_length: usize,
    pub seed: u64,
    /// Upper bound on ground actions before giving up.
    pub max_ground_actions: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::GreedyBestFirst,
            heuristic: Heuristic::GoalCount,
            max_expansions: 200_000,
            max_plan_length: 1_000,
            seed: 0,
            max_ground_actions: 1_000_000,
        }
    }
}

impl SearchConfig {
    pub fn breadth_first() -> Self {
        SearchConfig {
            strategy: Strategy::BreadthFirst,
            heuristic: Heuristic::Zero,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnsolvedReason {
    /// Every reachable state within `max_plan_length` was explored.
    Exhausted,
    /// `max_expansions` was hit first.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Solved(TimedPlan),
    Unsolved(UnsolvedReason),
}

impl SolveOutcome {
    pub fn plan(&self) -> Option<&TimedPlan> {
        match self {
            SolveOutcome::Solved(p) => Some(p),
            SolveOutcome::Unsolved(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlannerError {
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    GroundingExplosion(#[from] GroundingExplosion),
    #[error(transparent)]
    Inputs(#[from] validator::ValidatorError),
    /// The postcondition check failed; indicates a planner bug.
    #[error("internal planner produced an invalid plan ({})", .0.outcome)]
    Unsound(Box<ValidationReport>),
}

struct Node {
    state: task::Bits,
    parent: Option<usize>,
    action: Option<usize>,
    depth: usize,
}

/// Forward search over the grounded task. A returned plan has been validated.
pub fn solve(
    domain: &Domain,
    problem: &Problem,
    config: &SearchConfig,
) -> Result<SolveOutcome, PlannerError> {
    if config.strategy == Strategy::BreadthFirst && config.heuristic != Heuristic::Zero {
        return Err(PlannerError::InvalidConfig(
            "breadth-first search requires the zero heuristic".into(),
        ));
    }
    if config.max_expansions == 0 || config.max_plan_length == 0 {
        return Err(PlannerError::InvalidConfig(
            "max-expansions and max-plan-length must be positive".into(),
        ));
    }
    validator::check_inputs(domain, problem)?;
    let task = task::ground_task(domain, problem, config.max_ground_actions)?;
    let outcome = search(&task, config);
    if let SolveOutcome::Solved(plan) = &outcome {
        let report = validator::validate_plan(domain, problem, plan)?;
        if report.outcome != Outcome::Valid {
            return Err(PlannerError::Unsound(Box::new(report)));
        }
    }
    Ok(outcome)
}

fn extract(task: &task::Task, nodes: &[Node], mut at: usize) -> TimedPlan {
    let mut actions = Vec::new();
    while let (Some(parent), Some(a)) = (nodes[at].parent, nodes[at].action) {
        let act = &task.actions[a];
        actions.push((act.name.clone(), act.args.clone()));
        at = parent;
    }
    actions.reverse();
    TimedPlan::from_actions(actions)
}

fn search(task: &task::Task, config: &SearchConfig) -> SolveOutcome {
    if task.goal_impossible {
        return SolveOutcome::Unsolved(UnsolvedReason::Exhausted);
    }
    let mut rng = seed::rng(config.seed);
    let h = |s: &[u64]| match config.heuristic {
        Heuristic::GoalCount => task.unsatisfied_goals(s),
        Heuristic::Zero => 0,
    };
    let mut nodes = vec![Node {
        state: task.init.clone(),
        parent: None,
        action: None,
        depth: 0,
    }];
    // best depth at which each state has been reached
    let mut best: HashMap<task::Bits, usize> = HashMap::new();
    best.insert(task.init.clone(), 0);

    let mut fifo: VecDeque<usize> = VecDeque::new();
    let mut heap: BinaryHeap<Reverse<(usize, u64, usize)>> = BinaryHeap::new();
    let mut counter = 0u64;
    match config.strategy {
        Strategy::BreadthFirst => fifo.push_back(0),
        Strategy::GreedyBestFirst => heap.push(Reverse((h(&task.init), counter, 0))),
    }
    let mut expansions = 0u64;
    let mut order: Vec<usize> = Vec::new();
    loop {
        let id = match config.strategy {
            Strategy::BreadthFirst => fifo.pop_front(),
            Strategy::GreedyBestFirst => heap.pop().map(|Reverse((_, _, id))| id),
        };
        let Some(id) = id else {
            return SolveOutcome::Unsolved(UnsolvedReason::Exhausted);
        };
        let depth = nodes[id].depth;
        if best.get(&nodes[id].state).is_some_and(|&d| d < depth) {
            continue; // stale entry, reached more cheaply since
        }
        if task.unsatisfied_goals(&nodes[id].state) == 0 {
            return SolveOutcome::Solved(extract(task, &nodes, id));
        }
        if expansions >= config.max_expansions {
            return SolveOutcome::Unsolved(UnsolvedReason::Budget);
        }
        expansions += 1;
        if depth >= config.max_plan_length {
            continue;
        }
        order.clear();
        order.extend(
            task.actions
                .iter()
                .enumerate()
                .filter(|(_, a)| a.applicable(&nodes[id].state))
                .map(|(i, _)| i),
        );
        order.shuffle(&mut rng);
        for &a in &order {
            let next = task.actions[a].successor(&nodes[id].state);
            if best.get(&next).is_some_and(|&d| d <= depth + 1) {
                continue;
            }
            best.insert(next.clone(), depth + 1);
            let hv = h(&next);
            nodes.push(Node {
                state: next,
                parent: Some(id),
                action: Some(a),
                depth: depth + 1,
            });
            let child = nodes.len() - 1;
            counter += 1;
            match config.strategy {
                Strategy::BreadthFirst => fifo.push_back(child),
                Strategy::GreedyBestFirst => heap.push(Reverse((hv, counter, child))),
            }
        }
    }
}
