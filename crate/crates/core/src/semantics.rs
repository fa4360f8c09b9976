//! Grounding and STRIPS state-transition semantics under the closed-world
//! assumption.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pddl::{Atom, CostAmount, Domain, Literal, Name, Problem, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("unknown action `{0}`")]
    UnknownAction(Name),
    #[error("action `{action}` takes {expected} arguments, got {found}")]
    ArityMismatch {
        action: Name,
        expected: usize,
        found: usize,
    },
    #[error("unknown object `{0}`")]
    UnknownObject(Name),
    #[error("parameter {index} ({param}) of `{action}` expects type `{expected}`, but `{object}` has type `{found}`")]
    TypeMismatch {
        action: Name,
        /// 1-based
        index: usize,
        param: Name,
        expected: Name,
        object: Name,
        found: Name,
    },
    #[error("cost function value `{0}` is not initialised")]
    UndefinedCost(String),
}

/// A fully instantiated action. `add` and `delete` are disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundAction {
    pub schema: Name,
    pub args: Vec<Name>,
    pub precondition: Vec<Literal>,
    pub add: Vec<Atom>,
    pub delete: Vec<Atom>,
    pub cost: u64,
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.schema)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

fn substitute(atom: &Atom<Term>, params: &[Name], args: &[Name]) -> Atom {
    Atom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => {
                    let i = params
                        .iter()
                        .position(|p| p == v)
                        .expect("parser guarantees variables are bound");
                    args[i].clone()
                }
                Term::Const(c) => c.clone(),
            })
            .collect(),
    }
}

/// Instantiates schema `name` with `args`, checking arity and parameter types.
#[allow(clippy::result_large_err)]
pub fn ground(
    domain: &Domain,
    problem: &Problem,
    name: &Name,
    args: &[Name],
) -> Result<GroundAction, GroundError> {
    let schema = domain
        .action(name)
        .ok_or_else(|| GroundError::UnknownAction(name.clone()))?;
    if schema.params.len() != args.len() {
        return Err(GroundError::ArityMismatch {
            action: name.clone(),
            expected: schema.params.len(),
            found: args.len(),
        });
    }
    let types = problem.object_types(domain);
    for (i, (param, arg)) in schema.params.iter().zip(args).enumerate() {
        let ty = *types
            .get(arg)
            .ok_or_else(|| GroundError::UnknownObject(arg.clone()))?;
        if !domain.is_subtype(ty, &param.ty) {
            return Err(GroundError::TypeMismatch {
                action: name.clone(),
                index: i + 1,
                param: param.name.clone(),
                expected: param.ty.clone(),
                object: arg.clone(),
                found: ty.clone(),
            });
        }
    }
    let params: Vec<Name> = schema.params.iter().map(|p| p.name.clone()).collect();
    let precondition = schema
        .precondition
        .iter()
        .map(|l| Literal {
            positive: l.positive,
            atom: substitute(&l.atom, &params, args),
        })
        .collect();
    let mut add: Vec<Atom> = Vec::new();
    for a in &schema.effect.add {
        let g = substitute(a, &params, args);
        if !add.contains(&g) {
            add.push(g);
        }
    }
    // delete-then-add: an atom both deleted and added ends up true
    let mut delete: Vec<Atom> = Vec::new();
    for a in &schema.effect.delete {
        let g = substitute(a, &params, args);
        if !add.contains(&g) && !delete.contains(&g) {
            delete.push(g);
        }
    }
    let cost = match &schema.effect.cost {
        None => 0,
        Some(c) => match &c.amount {
            CostAmount::Constant(n) => *n,
            CostAmount::Function(f) => {
                let g = substitute(f, &params, args);
                problem
                    .function_value(&g)
                    .ok_or_else(|| GroundError::UndefinedCost(g.to_string()))?
            }
        },
    };
    Ok(GroundAction {
        schema: name.clone(),
        args: args.to_vec(),
        precondition,
        add,
        delete,
        cost,
    })
}

/// A closed-world state: atoms not present are false.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct State {
    pub atoms: BTreeSet<Atom>,
    pub cost: u64,
}

impl State {
    pub fn initial(problem: &Problem) -> Self {
        State {
            atoms: problem.init.iter().cloned().collect(),
            cost: 0,
        }
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }
}

/// Truth of a ground literal; `=` is decided on object names.
pub fn literal_holds(state: &State, lit: &Literal) -> bool {
    let truth = if lit.atom.is_equality() {
        lit.atom.args.first() == lit.atom.args.get(1)
    } else {
        state.contains(&lit.atom)
    };
    truth == lit.positive
}

/// Outcome of a precondition check; empty `violated` means applicable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Satisfaction {
    pub violated: Vec<Literal>,
}

impl Satisfaction {
    pub fn is_satisfied(&self) -> bool {
        self.violated.is_empty()
    }
}

pub fn applicable(state: &State, action: &GroundAction) -> Satisfaction {
    Satisfaction {
        violated: action
            .precondition
            .iter()
            .filter(|l| !literal_holds(state, l))
            .cloned()
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("precondition violated: {}", .violated.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "))]
pub struct PreconditionViolation {
    pub violated: Vec<Literal>,
}

/// STRIPS successor: `(atoms \ delete) ∪ add`, cost accumulated.
pub fn apply(state: &State, action: &GroundAction) -> Result<State, PreconditionViolation> {
    let sat = applicable(state, action);
    if !sat.is_satisfied() {
        return Err(PreconditionViolation {
            violated: sat.violated,
        });
    }
    let mut next = state.clone();
    for d in &action.delete {
        next.atoms.remove(d);
    }
    for a in &action.add {
        next.atoms.insert(a.clone());
    }
    next.cost += action.cost;
    Ok(next)
}

pub fn holds(state: &State, goal: &[Literal]) -> bool {
    goal.iter().all(|l| literal_holds(state, l))
}

/// Goal literals that are false in `state`.
pub fn unsatisfied(state: &State, goal: &[Literal]) -> Vec<Literal> {
    goal.iter()
        .filter(|l| !literal_holds(state, l))
        .cloned()
        .collect()
}
