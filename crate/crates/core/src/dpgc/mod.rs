//! Random problem generation driven by declarative generation configs:
//! object pools, predicate pools with tag synchronization, exclusive-choice
//! groups and planner-checked solvability.

mod config;
mod validate;

use std::collections::{HashMap, HashSet};
use std::time::Duration;

use indexmap::IndexSet;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::pddl::{
    check_problem, render_domain, render_problem, Atom, Domain, FunctionValue, Literal, Name,
    Problem, TimedPlan, TypedName,
};
use crate::planner::{
    self, ExternalError, PlannerError, SearchConfig, SolveOutcome, UnsolvedReason,
};
use crate::seed;

pub use config::*;
pub use validate::{validate_dpgc, Diagnostic};

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("generation config has {} problem(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Diagnostic>),
    #[error("sampling failed after {attempts} attempt(s): {reason}")]
    SamplingFailure { attempts: u32, reason: String },
    #[error("slot {slot} exhausted its retries; {succeeded} of {count} slots succeeded")]
    BatchExhausted {
        slot: usize,
        succeeded: usize,
        count: usize,
    },
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    External(#[from] ExternalError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Why a single draw was discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Reject {
    Exhausted(String),
    EmptyTag(String),
    EmptyGoal,
    Trivial,
    Invalid(String),
}

impl std::fmt::Display for Reject {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reject::Exhausted(p) => write!(f, "pool `{p}` ran out of objects"),
            Reject::EmptyTag(t) => write!(f, "tag `{t}` was empty when consumed"),
            Reject::EmptyGoal => f.write_str("goal came out empty"),
            Reject::Trivial => f.write_str("goal already holds initially"),
            Reject::Invalid(m) => write!(f, "generated problem does not check: {m}"),
        }
    }
}

/// One sampled problem plus the member chosen in each exclusive-choice group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub problem: Problem,
    pub choices: Vec<(String, String)>,
}

struct Sampler<'a> {
    config: &'a DpgcConfig,
    rng: ChaCha8Rng,
    objects: HashMap<&'a str, Vec<Name>>,
    cursors: HashMap<&'a str, usize>,
    tags: HashMap<&'a str, Vec<Name>>,
    init: IndexSet<Atom>,
    goal: IndexSet<Atom>,
    choices: Vec<(String, String)>,
}

fn fixed_atom(parts: &[String]) -> Atom {
    Atom::new(
        Name::new(&parts[0]),
        parts[1..].iter().map(Name::new).collect(),
    )
}

impl<'a> Sampler<'a> {
    fn run_group(&mut self, g: &'a PoolGroup, phase: Phase) -> Result<(), Reject> {
        match &g.mode {
            GroupMode::All => {
                for m in &g.members {
                    self.run_pool(m, phase)?;
                }
            }
            GroupMode::ExclusiveChoice { weights } => {
                let dist = WeightedIndex::new(weights)
                    .map_err(|e| Reject::Invalid(format!("group {}: {e}", g.name)))?;
                let m = &g.members[dist.sample(&mut self.rng)];
                self.choices.push((g.name.clone(), m.name.clone()));
                self.run_pool(m, phase)?;
            }
        }
        Ok(())
    }

    fn tag_at(&self, tag: &str, j: usize) -> Result<Name, Reject> {
        match self.tags.get(tag) {
            Some(v) if !v.is_empty() => Ok(v[j % v.len()].clone()),
            _ => Err(Reject::EmptyTag(tag.into())),
        }
    }

    fn run_pool(&mut self, p: &'a PredicatePool, phase: Phase) -> Result<(), Reject> {
        let n = match &p.count {
            Count::Range(r) => {
                let (lo, hi) = r.bounds();
                self.rng.gen_range(lo..=hi) as usize
            }
            Count::PerPool { per_pool } => self.objects.get(per_pool.as_str()).map_or(0, Vec::len),
            Count::PerTag { per_tag } => self.tags.get(per_tag.as_str()).map_or(0, Vec::len),
        };
        // exclusive pools draw without replacement within this predicate pool
        let mut remaining: HashMap<&str, Vec<Name>> = HashMap::new();
        for j in 0..n {
            let mut args = Vec::with_capacity(p.args.len());
            for a in &p.args {
                let name = match a {
                    ArgSource::Object { object } => Name::new(object),
                    ArgSource::Tag { tag } => self.tag_at(tag, j)?,
                    ArgSource::Pool { pool, avoid } => {
                        let avoid = avoid.as_ref().map(|t| self.tag_at(t, j)).transpose()?;
                        self.draw(pool, avoid.as_ref(), &mut remaining)?
                    }
                };
                args.push(name);
            }
            for e in &p.emits {
                self.tags
                    .entry(e.tag.as_str())
                    .or_default()
                    .push(args[e.arg].clone());
            }
            let atom = Atom::new(Name::new(&p.predicate), args);
            match phase {
                Phase::Init => self.init.insert(atom),
                Phase::Goal => self.goal.insert(atom),
            };
        }
        Ok(())
    }

    fn draw(
        &mut self,
        pool: &'a str,
        avoid: Option<&Name>,
        remaining: &mut HashMap<&'a str, Vec<Name>>,
    ) -> Result<Name, Reject> {
        let pool_cfg = self
            .config
            .object_pools
            .iter()
            .find(|p| p.name == pool)
            .ok_or_else(|| Reject::Invalid(format!("unknown pool {pool}")))?;
        let objs = &self.objects[pool];
        let ok = |o: &Name| Some(o) != avoid;
        match pool_cfg.selection {
            Selection::Uniform => {
                let cands: Vec<&Name> = objs.iter().filter(|o| ok(o)).collect();
                if cands.is_empty() {
                    return Err(Reject::Exhausted(pool.into()));
                }
                Ok(cands[self.rng.gen_range(0..cands.len())].clone())
            }
            Selection::Sequential => {
                let cur = self.cursors.entry(pool).or_insert(0);
                for _ in 0..objs.len() {
                    let o = &objs[*cur % objs.len()];
                    *cur += 1;
                    if ok(o) {
                        return Ok(o.clone());
                    }
                }
                Err(Reject::Exhausted(pool.into()))
            }
            Selection::Exclusive => {
                let left = remaining.entry(pool).or_insert_with(|| objs.clone());
                let cands: Vec<usize> = (0..left.len()).filter(|&i| ok(&left[i])).collect();
                if cands.is_empty() {
                    return Err(Reject::Exhausted(pool.into()));
                }
                let i = cands[self.rng.gen_range(0..cands.len())];
                Ok(left.remove(i))
            }
        }
    }
}

fn problem_name(config: &DpgcConfig) -> Name {
    match &config.problem_name {
        Some(n) => Name::new(n),
        None => Name::new(format!("{}-problem", config.domain)),
    }
}

/// One draw from a config assumed valid. Never retries.
fn sample_once(domain: &Domain, config: &DpgcConfig, seed: u64) -> Result<Sample, Reject> {
    let mut s = Sampler {
        config,
        rng: seed::rng(seed),
        objects: HashMap::new(),
        cursors: HashMap::new(),
        tags: HashMap::new(),
        init: IndexSet::new(),
        goal: IndexSet::new(),
        choices: Vec::new(),
    };
    let mut objects = Vec::new();
    for p in &config.object_pools {
        let (lo, hi) = p.count.bounds();
        let n = s.rng.gen_range(lo..=hi);
        let names: Vec<Name> = (1..=n)
            .map(|k| Name::new(format!("{}{k}", p.prefix)))
            .collect();
        objects.extend(names.iter().map(|name| TypedName {
            name: name.clone(),
            ty: Name::new(&p.ty),
        }));
        s.objects.insert(p.name.as_str(), names);
    }
    for a in &config.init_invariants {
        s.init.insert(fixed_atom(a));
    }
    for g in &config.init_groups {
        s.run_group(g, Phase::Init)?;
    }
    for a in &config.goal_invariants {
        s.goal.insert(fixed_atom(a));
    }
    for g in &config.goal_groups {
        s.run_group(g, Phase::Goal)?;
    }

    let has_goal_sources = !config.goal_invariants.is_empty() || !config.goal_groups.is_empty();
    if s.goal.is_empty() && has_goal_sources {
        return Err(Reject::EmptyGoal);
    }
    if config.reject_trivial && !s.goal.is_empty() && s.goal.iter().all(|g| s.init.contains(g)) {
        return Err(Reject::Trivial);
    }
    let problem = Problem {
        name: problem_name(config),
        domain_name: domain.name.clone(),
        objects,
        init: s.init.into_iter().collect(),
        init_values: config
            .init_values
            .iter()
            .map(|v| FunctionValue {
                function: fixed_atom(&v.function),
                value: v.value,
            })
            .collect(),
        goal: s.goal.into_iter().map(Literal::pos).collect(),
        metric: config.metric.as_deref().map(fixed_atom),
    };
    check_problem(domain, &problem).map_err(|e| Reject::Invalid(e.to_string()))?;
    Ok(Sample {
        problem,
        choices: s.choices,
    })
}

fn ensure_valid(domain: &Domain, config: &DpgcConfig) -> Result<(), GenerateError> {
    let diags = validate_dpgc(config, domain);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(GenerateError::Invalid(diags))
    }
}

/// Draws one problem, retrying with derived seeds on sampling failures.
pub fn generate_sample(
    domain: &Domain,
    config: &DpgcConfig,
    seed: u64,
) -> Result<Sample, GenerateError> {
    ensure_valid(domain, config)?;
    let attempts = config.max_retries.max(1);
    let mut last = None;
    for attempt in 0..attempts {
        match sample_once(domain, config, seed::derive(seed, &[attempt as u64])) {
            Ok(s) => return Ok(s),
            Err(r) => last = Some(r),
        }
    }
    Err(GenerateError::SamplingFailure {
        attempts,
        reason: last.map(|r| r.to_string()).unwrap_or_default(),
    })
}

pub fn generate_problem(
    domain: &Domain,
    config: &DpgcConfig,
    seed: u64,
) -> Result<Problem, GenerateError> {
    generate_sample(domain, config, seed).map(|s| s.problem)
}

/// Where reference plans come from.
#[derive(Debug, Clone)]
pub enum Solver {
    Internal(SearchConfig),
    /// A command template with `{domain}` and `{problem}` placeholders.
    External {
        command: String,
        timeout: Duration,
    },
}

impl Default for Solver {
    fn default() -> Self {
        Solver::Internal(SearchConfig::default())
    }
}

impl Solver {
    pub fn solve(&self, domain: &Domain, problem: &Problem) -> Result<SolveOutcome, GenerateError> {
        match self {
            Solver::Internal(cfg) => match planner::solve(domain, problem, cfg) {
                Ok(out) => Ok(out),
                Err(PlannerError::GroundingExplosion(e)) => {
                    log::warn!("treating draw as unsolved: {e}");
                    Ok(SolveOutcome::Unsolved(UnsolvedReason::Budget))
                }
                Err(e) => Err(e.into()),
            },
            Solver::External { command, timeout } => {
                let dir = tempfile::tempdir()?;
                let dpath = dir.path().join("domain.pddl");
                let ppath = dir.path().join("problem.pddl");
                std::fs::write(&dpath, render_domain(domain))?;
                std::fs::write(&ppath, render_problem(problem))?;
                match planner::external_solve(command, &dpath, &ppath, *timeout) {
                    Ok(plan) => Ok(SolveOutcome::Solved(plan)),
                    Err(ExternalError::ExternalFailure { reason, .. }) => {
                        log::warn!("external planner gave no plan: {reason}");
                        Ok(SolveOutcome::Unsolved(UnsolvedReason::Budget))
                    }
                    Err(e) => Err(e.into()),
                }
            }
        }
    }

    fn with_budget(&self, budget: Option<u64>) -> Solver {
        match (self, budget) {
            (Solver::Internal(cfg), Some(b)) => Solver::Internal(SearchConfig {
                max_expansions: b,
                ..cfg.clone()
            }),
            _ => self.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchItem {
    pub slot: usize,
    /// Seed of the accepted draw.
    pub seed: u64,
    pub problem: Problem,
    pub plan: SolveOutcome,
    /// Earlier slot with an identical problem, if any.
    pub duplicate_of: Option<usize>,
}

impl BatchItem {
    pub fn plan(&self) -> Option<&TimedPlan> {
        self.plan.plan()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub items: Vec<BatchItem>,
    /// Draws discarded across all slots (sampling failures and unsolved).
    pub rejected: usize,
}

impl Batch {
    pub fn duplicates(&self) -> usize {
        self.items
            .iter()
            .filter(|i| i.duplicate_of.is_some())
            .count()
    }
}

enum SlotError {
    Exhausted,
    Fatal(GenerateError),
}

fn run_slot(
    domain: &Domain,
    config: &DpgcConfig,
    seed: u64,
    slot: usize,
    solver: &Solver,
) -> Result<(BatchItem, usize), SlotError> {
    let check = match &config.solvability {
        Solvability::None => None,
        Solvability::PlannerCheck { max_expansions } => Some(solver.with_budget(*max_expansions)),
    };
    let mut rejected = 0;
    for attempt in 0..config.max_retries.max(1) {
        let sub = seed::derive(seed, &[slot as u64, attempt as u64]);
        let sample = match sample_once(domain, config, sub) {
            Ok(s) => s,
            Err(r) => {
                log::debug!("slot {slot} attempt {attempt}: {r}");
                rejected += 1;
                continue;
            }
        };
        let outcome = check
            .as_ref()
            .unwrap_or(solver)
            .solve(domain, &sample.problem)
            .map_err(SlotError::Fatal)?;
        if check.is_some() && outcome.plan().is_none() {
            log::debug!("slot {slot} attempt {attempt}: unsolved, redrawing");
            rejected += 1;
            continue;
        }
        let item = BatchItem {
            slot,
            seed: sub,
            problem: sample.problem,
            plan: outcome,
            duplicate_of: None,
        };
        return Ok((item, rejected));
    }
    Err(SlotError::Exhausted)
}

/// Generates `count` problems with reference plans. Slot `k` uses seeds
/// derived from `(seed, k, attempt)`, so the batch is the same whatever the
/// thread count.
pub fn generate_batch(
    domain: &Domain,
    config: &DpgcConfig,
    count: usize,
    seed: u64,
    solver: &Solver,
) -> Result<Batch, GenerateError> {
    generate_slots(domain, config, 0..count, seed, solver)
}

/// Like [`generate_batch`] for an arbitrary slot range, so a batch can be
/// extended later with identical results.
pub fn generate_slots(
    domain: &Domain,
    config: &DpgcConfig,
    slots: std::ops::Range<usize>,
    seed: u64,
    solver: &Solver,
) -> Result<Batch, GenerateError> {
    ensure_valid(domain, config)?;
    let count = slots.len();
    let slots: Vec<usize> = slots.collect();
    let results = crate::par_map(&slots, |&slot| run_slot(domain, config, seed, slot, solver));

    let succeeded = results.iter().filter(|r| r.is_ok()).count();
    let mut items = Vec::with_capacity(count);
    let mut rejected = 0;
    let mut first_exhausted = None;
    for (slot, r) in slots.iter().zip(results) {
        match r {
            Ok((item, rej)) => {
                rejected += rej;
                items.push(item);
            }
            Err(SlotError::Fatal(e)) => return Err(e),
            Err(SlotError::Exhausted) => {
                first_exhausted.get_or_insert(*slot);
            }
        }
    }
    if let Some(slot) = first_exhausted {
        return Err(GenerateError::BatchExhausted {
            slot,
            succeeded,
            count,
        });
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    for item in &mut items {
        let text = render_problem(&item.problem);
        match seen.get(&text) {
            Some(&first) => item.duplicate_of = Some(first),
            None => {
                seen.insert(text, item.slot);
            }
        }
    }
    Ok(Batch { items, rejected })
}

/// Objects that no atom of the problem mentions.
pub fn unused_objects(problem: &Problem) -> Vec<Name> {
    let used: HashSet<&Name> = problem
        .init
        .iter()
        .chain(problem.goal.iter().map(|l| &l.atom))
        .flat_map(|a| &a.args)
        .collect();
    problem
        .objects
        .iter()
        .filter(|o| !used.contains(&o.name))
        .map(|o| o.name.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::pddl::{parse_domain, parse_problem};

    fn ferry() -> (Domain, DpgcConfig) {
        (
            parse_domain(FERRY_DOMAIN).unwrap(),
            DpgcConfig::from_json(FERRY_DPGC).unwrap(),
        )
    }

    #[test]
    fn shipped_configs_are_clean() {
        for (name, d, c) in generation_fixtures() {
            let d = parse_domain(d).unwrap();
            let c = DpgcConfig::from_json(c).unwrap();
            assert_eq!(validate_dpgc(&c, &d), vec![], "{name}");
        }
    }

    #[test]
    fn undefined_tag_and_exhaustible_pool() {
        let (d, mut c) = ferry();
        c.goal_groups[0].members[0].args[1] = ArgSource::Tag { tag: "loc".into() };
        assert!(validate_dpgc(&c, &d).contains(&Diagnostic::TagUndefined { tag: "loc".into() }));

        let (d, mut c) = ferry();
        c.object_pools[0].count = Range::Fixed(2);
        c.init_groups.push(PoolGroup {
            name: "extra".into(),
            mode: GroupMode::All,
            members: vec![PredicatePool {
                name: "boarded".into(),
                predicate: "on-ferry".into(),
                count: Count::Range(Range::Fixed(5)),
                args: vec![ArgSource::Pool {
                    pool: "cars".into(),
                    avoid: None,
                }],
                emits: vec![],
            }],
        });
        let diags = validate_dpgc(&c, &d);
        assert!(
            diags.iter().any(|d| matches!(
                d,
                Diagnostic::PoolExhaustible {
                    draws: 5,
                    size: 2,
                    ..
                }
            )),
            "{diags:?}"
        );
    }

    #[test]
    fn ferry_problem_has_one_goal_per_car() {
        let (d, c) = ferry();
        let p = generate_problem(&d, &c, 42).unwrap();
        let cars = p.objects.iter().filter(|o| o.ty.as_str() == "car").count();
        assert!((1..=3).contains(&cars));
        assert_eq!(p.goal.len(), cars);
        let reparsed = parse_problem(&render_problem(&p), &d).unwrap();
        assert_eq!(reparsed, p);
        assert_eq!(generate_problem(&d, &c, 42).unwrap(), p);
    }

    #[test]
    fn invariants_only_config_is_seed_independent() {
        let d = parse_domain(FERRY_DOMAIN).unwrap();
        let c = DpgcConfig::from_json(
            r#"{"domain": "ferry",
                "object-pools": [{"name": "cars", "type": "car", "count": 1, "prefix": "c", "selection": "uniform"},
                                 {"name": "locs", "type": "location", "count": 2, "prefix": "l", "selection": "uniform"}],
                "init-invariants": [["at", "c1", "l1"], ["ferry-at", "l1"], ["empty"]],
                "goal-invariants": [["at", "c1", "l2"]]}"#,
        )
        .unwrap();
        let a = generate_problem(&d, &c, 1).unwrap();
        for s in 2..20 {
            assert_eq!(generate_problem(&d, &c, s).unwrap(), a);
        }
    }

    #[test]
    fn batch_is_deterministic_and_valid() {
        let (d, c) = ferry();
        let a = generate_batch(&d, &c, 6, 9, &Solver::default()).unwrap();
        let b = generate_batch(&d, &c, 6, 9, &Solver::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.items.len(), 6);
        for it in &a.items {
            let r = crate::validator::validate_plan(&d, &it.problem, it.plan().unwrap()).unwrap();
            assert!(r.outcome.is_valid());
        }
    }

    #[test]
    fn exhausted_slot_reports_progress() {
        let d = parse_domain(FERRY_ROUTES_DOMAIN).unwrap();
        let c = DpgcConfig::from_json(
            r#"{"domain": "ferry-routes", "max-retries": 2,
                "object-pools": [{"name": "cars", "type": "car", "count": 1, "prefix": "c", "selection": "uniform"},
                                 {"name": "locs", "type": "location", "count": 2, "prefix": "l", "selection": "uniform"}],
                "init-invariants": [["at", "c1", "l1"], ["ferry-at", "l1"], ["empty"]],
                "goal-invariants": [["at", "c1", "l2"]]}"#,
        )
        .unwrap();
        let err = generate_batch(&d, &c, 3, 0, &Solver::default()).unwrap_err();
        assert!(matches!(
            err,
            GenerateError::BatchExhausted {
                slot: 0,
                succeeded: 0,
                count: 3
            }
        ));
    }
}
