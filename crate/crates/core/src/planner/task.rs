//! Compact grounded representation used by the search: atoms are interned
//! to bit positions and states are fixed-width bitsets.

use std::collections::HashMap;

use crate::pddl::{Atom, CostAmount, Domain, Literal, Name, Problem, Term};

pub(crate) type Bits = Vec<u64>;

#[derive(Debug, Clone)]
pub(crate) struct TaskAction {
    pub name: Name,
    pub args: Vec<Name>,
    pub pre_pos: Vec<usize>,
    pub pre_neg: Vec<usize>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
}

#[derive(Debug)]
pub(crate) struct Task {
    pub actions: Vec<TaskAction>,
    pub init: Bits,
    pub goal_pos: Vec<usize>,
    pub goal_neg: Vec<usize>,
    /// Goal literals over `=` that are false; the task is unsolvable.
    pub goal_impossible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("grounding produced more than {cap} actions ({count} so far)")]
pub struct GroundingExplosion {
    pub count: usize,
    pub cap: usize,
}

pub(crate) fn test(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

pub(crate) fn set(bits: &mut [u64], i: usize, v: bool) {
    if v {
        bits[i / 64] |= 1 << (i % 64);
    } else {
        bits[i / 64] &= !(1 << (i % 64));
    }
}

#[derive(Default)]
struct Interner {
    index: HashMap<Atom, usize>,
}

impl Interner {
    fn id(&mut self, atom: Atom) -> usize {
        let n = self.index.len();
        *self.index.entry(atom).or_insert(n)
    }
}

fn subst(atom: &Atom<Term>, binding: &[Option<Name>], params: &[Name]) -> Option<Atom> {
    let mut args = Vec::with_capacity(atom.args.len());
    for t in &atom.args {
        match t {
            Term::Const(c) => args.push(c.clone()),
            Term::Var(v) => {
                let i = params.iter().position(|p| p == v)?;
                args.push(binding[i].clone()?);
            }
        }
    }
    Some(Atom {
        predicate: atom.predicate.clone(),
        args,
    })
}

/// Grounds every schema over type-compatible objects, pruning bindings that
/// violate static or equality preconditions as soon as they are decidable.
pub(crate) fn ground_task(
    domain: &Domain,
    problem: &Problem,
    cap: usize,
) -> Result<Task, GroundingExplosion> {
    let statics = domain.static_predicates();
    let init_set: std::collections::HashSet<&Atom> = problem.init.iter().collect();
    let objects: Vec<(&Name, &Name)> = domain
        .constants
        .iter()
        .chain(&problem.objects)
        .map(|o| (&o.name, &o.ty))
        .collect();

    let mut interner = Interner::default();
    for a in &problem.init {
        interner.id(a.clone());
    }
    let mut actions = Vec::new();

    for schema in &domain.actions {
        let params: Vec<Name> = schema.params.iter().map(|p| p.name.clone()).collect();
        let candidates: Vec<Vec<&Name>> = schema
            .params
            .iter()
            .map(|p| {
                objects
                    .iter()
                    .filter(|(_, ty)| domain.is_subtype(ty, &p.ty))
                    .map(|(n, _)| *n)
                    .collect()
            })
            .collect();
        // precondition literals that can be decided from the binding alone
        let checkable: Vec<&Literal<Term>> = schema
            .precondition
            .iter()
            .filter(|l| l.atom.is_equality() || statics.contains(&l.atom.predicate))
            .collect();

        let mut binding: Vec<Option<Name>> = vec![None; params.len()];
        let mut stack: Vec<usize> = vec![0];
        // iterative depth-first enumeration of bindings
        while let Some(&choice) = stack.last() {
            let depth = stack.len() - 1;
            if depth == params.len() {
                let args: Vec<Name> = binding.iter().map(|b| b.clone().unwrap()).collect();
                let ground = |a: &Atom<Term>| subst(a, &binding, &params).unwrap();
                let mut act = TaskAction {
                    name: schema.name.clone(),
                    args,
                    pre_pos: Vec::new(),
                    pre_neg: Vec::new(),
                    add: Vec::new(),
                    del: Vec::new(),
                };
                for l in &schema.precondition {
                    if l.atom.is_equality() || statics.contains(&l.atom.predicate) {
                        continue;
                    }
                    let id = interner.id(ground(&l.atom));
                    if l.positive {
                        act.pre_pos.push(id);
                    } else {
                        act.pre_neg.push(id);
                    }
                }
                for a in &schema.effect.add {
                    let id = interner.id(ground(a));
                    if !act.add.contains(&id) {
                        act.add.push(id);
                    }
                }
                for a in &schema.effect.delete {
                    let id = interner.id(ground(a));
                    if !act.add.contains(&id) && !act.del.contains(&id) {
                        act.del.push(id);
                    }
                }
                // cost functions must be defined for the action to be usable
                let cost_ok = match schema.effect.cost.as_ref().map(|c| &c.amount) {
                    Some(CostAmount::Function(f)) => problem.function_value(&ground(f)).is_some(),
                    _ => true,
                };
                if cost_ok {
                    actions.push(act);
                    if actions.len() > cap {
                        return Err(GroundingExplosion {
                            count: actions.len(),
                            cap,
                        });
                    }
                }
                stack.pop();
                if let Some(last) = stack.last_mut() {
                    *last += 1;
                }
                continue;
            }
            if choice >= candidates[depth].len() {
                binding[depth] = None;
                stack.pop();
                if let Some(last) = stack.last_mut() {
                    *last += 1;
                }
                continue;
            }
            binding[depth] = Some(candidates[depth][choice].clone());
            let consistent = checkable
                .iter()
                .all(|l| match subst(&l.atom, &binding, &params) {
                    None => true,
                    Some(atom) => {
                        let truth = if atom.is_equality() {
                            atom.args[0] == atom.args[1]
                        } else {
                            init_set.contains(&atom)
                        };
                        truth == l.positive
                    }
                });
            if consistent {
                stack.push(0);
            } else {
                *stack.last_mut().unwrap() += 1;
            }
        }
    }

    let mut goal_pos = Vec::new();
    let mut goal_neg = Vec::new();
    let mut goal_impossible = false;
    for l in &problem.goal {
        if l.atom.is_equality() {
            if (l.atom.args[0] == l.atom.args[1]) != l.positive {
                goal_impossible = true;
            }
            continue;
        }
        let id = interner.id(l.atom.clone());
        if l.positive {
            goal_pos.push(id);
        } else {
            goal_neg.push(id);
        }
    }
    let words = interner.index.len().div_ceil(64).max(1);
    let mut init = vec![0u64; words];
    for a in &problem.init {
        set(&mut init, interner.index[a], true);
    }
    Ok(Task {
        actions,
        init,
        goal_pos,
        goal_neg,
        goal_impossible,
    })
}

impl TaskAction {
    pub fn applicable(&self, s: &[u64]) -> bool {
        self.pre_pos.iter().all(|&i| test(s, i)) && self.pre_neg.iter().all(|&i| !test(s, i))
    }

    pub fn successor(&self, s: &[u64]) -> Bits {
        let mut next = s.to_vec();
        for &d in &self.del {
            set(&mut next, d, false);
        }
        for &a in &self.add {
            set(&mut next, a, true);
        }
        next
    }
}

impl Task {
    pub fn unsatisfied_goals(&self, s: &[u64]) -> usize {
        self.goal_pos.iter().filter(|&&i| !test(s, i)).count()
            + self.goal_neg.iter().filter(|&&i| test(s, i)).count()
    }
}
