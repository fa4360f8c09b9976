use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::config::*;
use crate::pddl::{is_identifier, Domain, Name};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnostic {
    DomainMismatch {
        expected: String,
        found: String,
    },
    DuplicateName {
        name: String,
    },
    UnknownType {
        at: String,
        ty: String,
    },
    UnknownPredicate {
        at: String,
        predicate: String,
    },
    UnknownFunction {
        at: String,
        function: String,
    },
    UnknownPool {
        at: String,
        pool: String,
    },
    UnknownObject {
        at: String,
        object: String,
    },
    ArityMismatch {
        at: String,
        expected: usize,
        found: usize,
    },
    TypeMismatch {
        at: String,
        arg: usize,
        expected: String,
        found: String,
    },
    InvalidCount {
        at: String,
        msg: String,
    },
    InvalidPrefix {
        pool: String,
        prefix: String,
    },
    InvalidEmit {
        at: String,
        arg: usize,
    },
    InvalidWeights {
        group: String,
        msg: String,
    },
    TagUndefined {
        tag: String,
    },
    TagOutOfOrder {
        at: String,
        tag: String,
    },
    TagCycle {
        pools: Vec<String>,
    },
    PoolExhaustible {
        at: String,
        pool: String,
        draws: u64,
        size: u64,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Diagnostic::*;
        match self {
            DomainMismatch { expected, found } => {
                write!(f, "config is for domain `{found}`, not `{expected}`")
            }
            DuplicateName { name } => write!(f, "duplicate name `{name}`"),
            UnknownType { at, ty } => write!(f, "{at}: unknown type `{ty}`"),
            UnknownPredicate { at, predicate } => {
                write!(f, "{at}: unknown predicate `{predicate}`")
            }
            UnknownFunction { at, function } => write!(f, "{at}: unknown function `{function}`"),
            UnknownPool { at, pool } => write!(f, "{at}: unknown object pool `{pool}`"),
            UnknownObject { at, object } => write!(f, "{at}: unknown object `{object}`"),
            ArityMismatch {
                at,
                expected,
                found,
            } => {
                write!(f, "{at}: expected {expected} arguments, found {found}")
            }
            TypeMismatch {
                at,
                arg,
                expected,
                found,
            } => {
                write!(
                    f,
                    "{at}: argument {arg} needs `{expected}`, source gives `{found}`"
                )
            }
            InvalidCount { at, msg } => write!(f, "{at}: invalid count: {msg}"),
            InvalidPrefix { pool, prefix } => {
                write!(
                    f,
                    "pool `{pool}`: prefix `{prefix}` is not a usable name stem"
                )
            }
            InvalidEmit { at, arg } => write!(f, "{at}: emitted argument {arg} is out of range"),
            InvalidWeights { group, msg } => write!(f, "group `{group}`: {msg}"),
            TagUndefined { tag } => write!(f, "tag `{tag}` is consumed but never emitted"),
            TagOutOfOrder { at, tag } => {
                write!(f, "{at}: tag `{tag}` is consumed before it is emitted")
            }
            TagCycle { pools } => write!(f, "tag dependency cycle through {}", pools.join(" -> ")),
            PoolExhaustible {
                at,
                pool,
                draws,
                size,
            } => write!(
                f,
                "{at}: may draw {draws} objects from exclusive pool `{pool}` of size {size}"
            ),
        }
    }
}

fn at(phase: Phase, p: &PredicatePool) -> String {
    format!("{phase}/{}", p.name)
}

fn tags_consumed(p: &PredicatePool) -> Vec<&str> {
    let mut out: Vec<&str> = p
        .args
        .iter()
        .filter_map(|a| match a {
            ArgSource::Tag { tag } => Some(tag.as_str()),
            ArgSource::Pool { avoid: Some(t), .. } => Some(t.as_str()),
            _ => None,
        })
        .collect();
    if let Count::PerTag { per_tag } = &p.count {
        out.push(per_tag);
    }
    out
}

/// Checks a config against its domain. An empty result means generation
/// cannot fail for structural reasons.
pub fn validate_dpgc(config: &DpgcConfig, domain: &Domain) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut push = |d: Diagnostic| {
        if !diags.contains(&d) {
            diags.push(d)
        }
    };

    if Name::new(&config.domain) != domain.name {
        push(Diagnostic::DomainMismatch {
            expected: domain.name.to_string(),
            found: config.domain.clone(),
        });
    }

    // unique names over object pools, groups and predicate pools
    let mut seen = HashSet::new();
    let names = config
        .object_pools
        .iter()
        .map(|p| &p.name)
        .chain(
            config
                .init_groups
                .iter()
                .chain(&config.goal_groups)
                .map(|g| &g.name),
        )
        .chain(config.pools_in_order().map(|(_, _, p)| &p.name));
    for n in names {
        if !seen.insert(n.as_str()) {
            push(Diagnostic::DuplicateName { name: n.clone() });
        }
    }

    // object pools
    let mut pools: HashMap<&str, &ObjectPool> = HashMap::new();
    let mut objects: HashMap<Name, Name> = domain
        .constants
        .iter()
        .map(|c| (c.name.clone(), c.ty.clone()))
        .collect();
    let mut prefixes = HashSet::new();
    for p in &config.object_pools {
        pools.insert(p.name.as_str(), p);
        let ty = Name::new(&p.ty);
        if !domain.has_type(&ty) {
            push(Diagnostic::UnknownType {
                at: format!("pool {}", p.name),
                ty: p.ty.clone(),
            });
        }
        let (lo, hi) = p.count.bounds();
        if lo == 0 || lo > hi {
            push(Diagnostic::InvalidCount {
                at: format!("pool {}", p.name),
                msg: format!("object counts need 1 <= min <= max, got {lo}..{hi}"),
            });
        }
        let stem_ok = is_identifier(&p.prefix)
            && !p.prefix.ends_with(|c: char| c.is_ascii_digit())
            && prefixes.insert(p.prefix.to_ascii_lowercase());
        let clashes = domain.constants.iter().any(|c| {
            c.name
                .as_str()
                .strip_prefix(&p.prefix.to_ascii_lowercase())
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        });
        if !stem_ok || clashes {
            push(Diagnostic::InvalidPrefix {
                pool: p.name.clone(),
                prefix: p.prefix.clone(),
            });
        }
        // names that exist in every instance
        for k in 1..=lo.min(hi) {
            objects.insert(Name::new(format!("{}{k}", p.prefix)), ty.clone());
        }
    }
    let pool_min = |name: &str| pools.get(name).map(|p| p.count.bounds().0).unwrap_or(0);
    let pool_max = |name: &str| pools.get(name).map(|p| p.count.bounds().1).unwrap_or(0);

    // fixed atoms
    let check_atom = |where_: String, atom: &[String], push: &mut dyn FnMut(Diagnostic)| {
        let Some((pred, args)) = atom.split_first() else {
            push(Diagnostic::ArityMismatch {
                at: where_,
                expected: 1,
                found: 0,
            });
            return;
        };
        let Some(sig) = domain.predicate(&Name::new(pred)) else {
            push(Diagnostic::UnknownPredicate {
                at: where_,
                predicate: pred.clone(),
            });
            return;
        };
        if sig.params.len() != args.len() {
            push(Diagnostic::ArityMismatch {
                at: where_.clone(),
                expected: sig.params.len(),
                found: args.len(),
            });
        }
        for (i, (a, param)) in args.iter().zip(&sig.params).enumerate() {
            match objects.get(&Name::new(a)) {
                None => push(Diagnostic::UnknownObject {
                    at: where_.clone(),
                    object: a.clone(),
                }),
                Some(ty) if !domain.is_subtype(ty, &param.ty) => push(Diagnostic::TypeMismatch {
                    at: where_.clone(),
                    arg: i + 1,
                    expected: param.ty.to_string(),
                    found: ty.to_string(),
                }),
                _ => {}
            }
        }
    };
    for a in &config.init_invariants {
        check_atom("init-invariants".into(), a, &mut push);
    }
    for a in &config.goal_invariants {
        check_atom("goal-invariants".into(), a, &mut push);
    }
    let fn_atoms = config
        .init_values
        .iter()
        .map(|v| ("init-values", &v.function))
        .chain(config.metric.iter().map(|m| ("metric", m)));
    for (where_, f) in fn_atoms {
        let Some((name, args)) = f.split_first() else {
            push(Diagnostic::UnknownFunction {
                at: where_.into(),
                function: String::new(),
            });
            continue;
        };
        match domain.function(&Name::new(name)) {
            None => push(Diagnostic::UnknownFunction {
                at: where_.into(),
                function: name.clone(),
            }),
            Some(sig) if sig.params.len() != args.len() => push(Diagnostic::ArityMismatch {
                at: where_.into(),
                expected: sig.params.len(),
                found: args.len(),
            }),
            Some(_) => {
                for a in args {
                    if !objects.contains_key(&Name::new(a)) {
                        push(Diagnostic::UnknownObject {
                            at: where_.into(),
                            object: a.clone(),
                        });
                    }
                }
            }
        }
    }

    // groups
    for g in config.init_groups.iter().chain(&config.goal_groups) {
        if let GroupMode::ExclusiveChoice { weights } = &g.mode {
            let msg = if g.members.len() < 2 {
                Some("exclusive choice needs at least two members".to_string())
            } else if weights.len() != g.members.len() {
                Some(format!(
                    "{} weights for {} members",
                    weights.len(),
                    g.members.len()
                ))
            } else if !weights.iter().all(|w| w.is_finite() && *w > 0.0) {
                Some("weights must be positive and finite".to_string())
            } else {
                None
            };
            if let Some(msg) = msg {
                push(Diagnostic::InvalidWeights {
                    group: g.name.clone(),
                    msg,
                });
            }
        }
    }

    // predicate pools, in sampling order
    let ordered: Vec<(Phase, &PredicatePool)> =
        config.pools_in_order().map(|(ph, _, p)| (ph, p)).collect();
    let mut emitters: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, (_, p)) in ordered.iter().enumerate() {
        for e in &p.emits {
            emitters.entry(e.tag.as_str()).or_default().push(i);
        }
    }
    let mut tag_types: HashMap<&str, Vec<Name>> = HashMap::new();
    let mut tag_max: HashMap<&str, u64> = HashMap::new();

    for (i, (phase, p)) in ordered.iter().enumerate() {
        let here = at(*phase, p);
        let sig = domain.predicate(&Name::new(&p.predicate));
        if sig.is_none() {
            push(Diagnostic::UnknownPredicate {
                at: here.clone(),
                predicate: p.predicate.clone(),
            });
        }
        if let Some(sig) = sig {
            if sig.params.len() != p.args.len() {
                push(Diagnostic::ArityMismatch {
                    at: here.clone(),
                    expected: sig.params.len(),
                    found: p.args.len(),
                });
            }
        }

        // tag references
        for tag in tags_consumed(p) {
            match emitters.get(tag) {
                None => push(Diagnostic::TagUndefined { tag: tag.into() }),
                Some(src) if !src.iter().any(|&j| j < i) && !src.contains(&i) => {
                    push(Diagnostic::TagOutOfOrder {
                        at: here.clone(),
                        tag: tag.into(),
                    })
                }
                _ => {}
            }
        }

        // count
        let count_max = match &p.count {
            Count::Range(r) => {
                let (lo, hi) = r.bounds();
                if lo > hi {
                    push(Diagnostic::InvalidCount {
                        at: here.clone(),
                        msg: format!("min {lo} exceeds max {hi}"),
                    });
                }
                hi
            }
            Count::PerPool { per_pool } => {
                if !pools.contains_key(per_pool.as_str()) {
                    push(Diagnostic::UnknownPool {
                        at: here.clone(),
                        pool: per_pool.clone(),
                    });
                }
                pool_max(per_pool)
            }
            Count::PerTag { per_tag } => tag_max.get(per_tag.as_str()).copied().unwrap_or(0),
        };

        // argument sources
        let mut source_types: Vec<Option<Vec<Name>>> = Vec::new();
        let mut exclusive_draws: HashMap<&str, (u64, bool)> = HashMap::new();
        for (k, a) in p.args.iter().enumerate() {
            let tys = match a {
                ArgSource::Object { object } => match objects.get(&Name::new(object)) {
                    Some(t) => Some(vec![t.clone()]),
                    None => {
                        push(Diagnostic::UnknownObject {
                            at: here.clone(),
                            object: object.clone(),
                        });
                        None
                    }
                },
                ArgSource::Pool { pool, avoid } => match pools.get(pool.as_str()) {
                    Some(op) => {
                        let avoids = avoid.is_some();
                        match op.selection {
                            Selection::Exclusive => {
                                let e = exclusive_draws.entry(pool.as_str()).or_default();
                                e.0 += 1;
                                e.1 |= avoids;
                            }
                            _ if avoids && pool_min(pool) < 2 => {
                                push(Diagnostic::PoolExhaustible {
                                    at: here.clone(),
                                    pool: pool.clone(),
                                    draws: 2,
                                    size: pool_min(pool),
                                })
                            }
                            _ => {}
                        }
                        Some(vec![Name::new(&op.ty)])
                    }
                    None => {
                        push(Diagnostic::UnknownPool {
                            at: here.clone(),
                            pool: pool.clone(),
                        });
                        None
                    }
                },
                ArgSource::Tag { tag } => tag_types.get(tag.as_str()).cloned(),
            };
            if let (Some(tys), Some(sig)) = (&tys, sig) {
                if let Some(param) = sig.params.get(k) {
                    for t in tys {
                        if !domain.is_subtype(t, &param.ty) {
                            push(Diagnostic::TypeMismatch {
                                at: here.clone(),
                                arg: k + 1,
                                expected: param.ty.to_string(),
                                found: t.to_string(),
                            });
                        }
                    }
                }
            }
            source_types.push(tys);
        }
        let mut draws: Vec<_> = exclusive_draws.into_iter().collect();
        draws.sort();
        for (pool, (per_atom, avoids)) in draws {
            // one draw per atom from the pool that sets the count is always safe
            let covered = matches!(&p.count, Count::PerPool { per_pool } if per_pool == pool)
                && per_atom == 1
                && !avoids;
            let needed = count_max * per_atom + u64::from(avoids);
            if !covered && needed > pool_min(pool) {
                push(Diagnostic::PoolExhaustible {
                    at: here.clone(),
                    pool: pool.into(),
                    draws: needed,
                    size: pool_min(pool),
                });
            }
        }

        // emitted tags
        for e in &p.emits {
            match source_types.get(e.arg) {
                None => push(Diagnostic::InvalidEmit {
                    at: here.clone(),
                    arg: e.arg,
                }),
                Some(tys) => {
                    let entry = tag_types.entry(e.tag.as_str()).or_default();
                    for t in tys.iter().flatten() {
                        if !entry.contains(t) {
                            entry.push(t.clone());
                        }
                    }
                    *tag_max.entry(e.tag.as_str()).or_default() += count_max;
                }
            }
        }
    }

    for cycle in tag_cycles(&ordered) {
        push(Diagnostic::TagCycle { pools: cycle });
    }
    diags
}

/// Cycles in the emitter -> consumer graph, each reported once.
fn tag_cycles(ordered: &[(Phase, &PredicatePool)]) -> Vec<Vec<String>> {
    let n = ordered.len();
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, (_, p)) in ordered.iter().enumerate() {
        for tag in tags_consumed(p) {
            for (j, (_, q)) in ordered.iter().enumerate() {
                if q.emits.iter().any(|e| e.tag == tag) && !edges[j].contains(&i) {
                    edges[j].push(i);
                }
            }
        }
    }
    // colour-marking DFS
    let mut state = vec![0u8; n];
    let mut path: Vec<usize> = Vec::new();
    let mut found = Vec::new();
    fn visit(
        v: usize,
        edges: &[Vec<usize>],
        state: &mut [u8],
        path: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
    ) {
        state[v] = 1;
        path.push(v);
        for &w in &edges[v] {
            if state[w] == 1 {
                let start = path.iter().position(|&x| x == w).unwrap();
                found.push(path[start..].to_vec());
            } else if state[w] == 0 {
                visit(w, edges, state, path, found);
            }
        }
        path.pop();
        state[v] = 2;
    }
    for v in 0..n {
        if state[v] == 0 {
            visit(v, &edges, &mut state, &mut path, &mut found);
        }
    }
    found
        .into_iter()
        .map(|c| c.iter().map(|&i| ordered[i].1.name.clone()).collect())
        .collect()
}
