//! Verifier rewards and group-relative advantages for scoring sampled plans.

use serde::{Deserialize, Serialize};

use crate::pddl::{Domain, Problem};
use crate::transforms::decode_plan;
use crate::validator::{self, Outcome, ValidatorError};

pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Scalar reward for a validation outcome.
pub fn reward(outcome: Outcome) -> f64 {
    match outcome {
        Outcome::Valid => 1.0,
        Outcome::ExecutableNoGoal => 0.1,
        Outcome::PreconditionFailure => -0.1,
        Outcome::Malformed => 0.0,
    }
}

/// `(r - mean) / (std + epsilon)` with the population standard deviation.
/// Groups whose rewards are all equal get exactly zero advantages.
pub fn group_advantages(rewards: &[f64], epsilon: f64) -> Vec<f64> {
    if rewards.is_empty() {
        return Vec::new();
    }
    if rewards.iter().all(|&r| r == rewards[0]) {
        return vec![0.0; rewards.len()];
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let denom = var.sqrt() + epsilon;
    rewards.iter().map(|r| (r - mean) / denom).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardRecord {
    pub tuple_id: String,
    pub candidate_index: usize,
    pub outcome: Outcome,
    pub reward: f64,
    /// Why the candidate was not valid, if it was not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutGroup {
    pub tuple_id: String,
    pub records: Vec<RewardRecord>,
    pub advantages: Vec<f64>,
}

fn score_one(
    domain: &Domain,
    problem: &Problem,
    compact: &str,
) -> Result<(Outcome, Option<String>), ValidatorError> {
    let text = match decode_plan(compact) {
        Ok(t) => t,
        Err(e) => return Ok((Outcome::Malformed, Some(e.to_string()))),
    };
    let report = validator::validate(domain, problem, &text)?;
    Ok((report.outcome, report.failure_summary()))
}

/// Decodes, validates and rewards each compact candidate, then normalizes
/// the rewards within the group. Bad candidate text is `Malformed`, never an
/// error; only a broken domain/problem pair fails.
pub fn score_candidates(
    domain: &Domain,
    problem: &Problem,
    tuple_id: &str,
    candidates: &[String],
    epsilon: f64,
) -> Result<RolloutGroup, ValidatorError> {
    validator::check_inputs(domain, problem)?;
    let scored = crate::par_map(candidates, |c| score_one(domain, problem, c));
    let mut records = Vec::with_capacity(candidates.len());
    for (i, s) in scored.into_iter().enumerate() {
        let (outcome, detail) = s?;
        records.push(RewardRecord {
            tuple_id: tuple_id.to_string(),
            candidate_index: i,
            outcome,
            reward: reward(outcome),
            detail,
        });
    }
    let rewards: Vec<f64> = records.iter().map(|r| r.reward).collect();
    Ok(RolloutGroup {
        tuple_id: tuple_id.to_string(),
        advantages: group_advantages(&rewards, epsilon),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn reward_table() {
        assert_eq!(reward(Outcome::Valid), 1.0);
        assert_eq!(reward(Outcome::ExecutableNoGoal), 0.1);
        assert_eq!(reward(Outcome::PreconditionFailure), -0.1);
        assert_eq!(reward(Outcome::Malformed), 0.0);
    }

    #[test]
    fn degenerate_groups() {
        assert_eq!(
            group_advantages(&[1.0, 1.0, 1.0], DEFAULT_EPSILON),
            vec![0.0; 3]
        );
        assert_eq!(group_advantages(&[0.5], DEFAULT_EPSILON), vec![0.0]);
    }

    #[test]
    fn ferry_candidates() {
        let (d, p) = fixtures::ferry();
        let cands = vec![
            "board c1 l1\nsail l1 l2\ndebark c1 l2".to_string(),
            "board c1 l1".to_string(),
            "%% not a plan".to_string(),
        ];
        let g = score_candidates(&d, &p, "t", &cands, DEFAULT_EPSILON).unwrap();
        let outcomes: Vec<_> = g.records.iter().map(|r| r.outcome).collect();
        assert_eq!(
            outcomes,
            vec![
                Outcome::Valid,
                Outcome::ExecutableNoGoal,
                Outcome::Malformed
            ]
        );
        assert!(g.advantages[0] > 0.0 && g.advantages[1] < 0.0 && g.advantages[2] < 0.0);
        let empty = score_candidates(&d, &p, "t", &[String::new()], DEFAULT_EPSILON).unwrap();
        assert_eq!(empty.records[0].outcome, Outcome::ExecutableNoGoal);
    }
}
