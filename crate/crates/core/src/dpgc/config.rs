use std::fmt;

use serde::{Deserialize, Serialize};

/// A generation config: how to populate objects, init and goal for random
/// problems of one domain. See `docs/dpgc.md` for the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct DpgcConfig {
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem_name: Option<String>,
    #[serde(default)]
    pub object_pools: Vec<ObjectPool>,
    /// Ground atoms always placed in init, written `["pred", "obj", ...]`.
    #[serde(default)]
    pub init_invariants: Vec<Vec<String>>,
    #[serde(default)]
    pub goal_invariants: Vec<Vec<String>>,
    #[serde(default)]
    pub init_values: Vec<InitValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<String>>,
    #[serde(default)]
    pub init_groups: Vec<PoolGroup>,
    #[serde(default)]
    pub goal_groups: Vec<PoolGroup>,
    #[serde(default)]
    pub solvability: Solvability,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    /// Redraw problems whose goal already holds in the initial state.
    #[serde(default = "yes")]
    pub reject_trivial: bool,
}

fn default_retries() -> u32 {
    20
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct InitValue {
    pub function: Vec<String>,
    pub value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Without replacement within one predicate pool.
    Exclusive,
    /// In order, wrapping around; the cursor persists for the whole problem.
    Sequential,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    Fixed(u64),
    Between { min: u64, max: u64 },
}

impl Range {
    pub fn bounds(self) -> (u64, u64) {
        match self {
            Range::Fixed(n) => (n, n),
            Range::Between { min, max } => (min, max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ObjectPool {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub count: Range,
    pub prefix: String,
    pub selection: Selection,
}

/// How many atoms a predicate pool emits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Count {
    Range(Range),
    PerPool {
        #[serde(rename = "per-pool")]
        per_pool: String,
    },
    PerTag {
        #[serde(rename = "per-tag")]
        per_tag: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ArgSource {
    Object {
        object: String,
    },
    Pool {
        pool: String,
        /// Never pick the object stored at the same position of this tag.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        avoid: Option<String>,
    },
    /// Reuse the objects published under a tag, element `j` for atom `j`
    /// (wrapping).
    Tag {
        tag: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Emit {
    pub tag: String,
    pub arg: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicatePool {
    pub name: String,
    pub predicate: String,
    pub count: Count,
    pub args: Vec<ArgSource>,
    #[serde(default)]
    pub emits: Vec<Emit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupMode {
    All,
    ExclusiveChoice { weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolGroup {
    pub name: String,
    pub mode: GroupMode,
    pub members: Vec<PredicatePool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solvability {
    None,
    PlannerCheck {
        /// Overrides the planner's expansion budget.
        #[serde(default, rename = "max-expansions")]
        max_expansions: Option<u64>,
    },
}

impl Default for Solvability {
    fn default() -> Self {
        Solvability::PlannerCheck {
            max_expansions: Some(50_000),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid generation config: {0}")]
pub struct ConfigError(#[from] serde_json::Error);

impl DpgcConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Predicate pools in sampling order: init groups, then goal groups.
    pub fn pools_in_order(&self) -> impl Iterator<Item = (Phase, &PoolGroup, &PredicatePool)> {
        let init = self
            .init_groups
            .iter()
            .flat_map(|g| g.members.iter().map(move |m| (Phase::Init, g, m)));
        let goal = self
            .goal_groups
            .iter()
            .flat_map(|g| g.members.iter().map(move |m| (Phase::Goal, g, m)));
        init.chain(goal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Init,
    Goal,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Init => "init",
            Phase::Goal => "goal",
        })
    }
}
