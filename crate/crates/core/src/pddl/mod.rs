//! Abstract syntax for the typed-STRIPS fragment of PDDL 2.1, together with
//! the lexer, parser and canonical printer.
//!
//! Identifiers are case-insensitive; every name is lowercased on the way in,
//! so two spellings that differ only in case compare equal and render
//! identically.

mod lexer;
mod parser;
mod plan;
mod render;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use lexer::is_identifier;
pub use parser::{parse_domain, parse_problem, parse_problem_with, ProblemOptions};

/// Checks that a problem binds against a domain: declared predicates,
/// arities, objects and argument types.
pub fn check_problem(domain: &Domain, problem: &Problem) -> Result<(), ParseError> {
    parser::check_problem_bindings(domain, problem)
}
pub use plan::parse_plan;
pub use render::{render_domain, render_plan, render_problem, Render};

/// The root of every type hierarchy.
pub const OBJECT: &str = "object";

/// A lowercased PDDL identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct Name(String);

impl Name {
    pub fn new(s: impl AsRef<str>) -> Self {
        Name(s.as_ref().to_ascii_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn object() -> Self {
        Name(OBJECT.to_string())
    }

    pub fn is_variable(&self) -> bool {
        self.0.starts_with('?')
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name::new(s)
    }
}

impl From<Name> for String {
    fn from(n: Name) -> Self {
        n.0
    }
}

impl std::borrow::Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Name {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Argument of a lifted atom: a schema parameter or a constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(Name),
    Const(Name),
}

impl Term {
    pub fn name(&self) -> &Name {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name().as_str())
    }
}

/// `(predicate arg ...)`. With `A = Name` this is a ground atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom<A = Name> {
    pub predicate: Name,
    pub args: Vec<A>,
}

impl<A> Atom<A> {
    pub fn new(predicate: impl Into<Name>, args: Vec<A>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// Built-in `=`; never stored in states.
    pub fn is_equality(&self) -> bool {
        self.predicate.as_str() == "="
    }
}

impl<A: fmt::Display> fmt::Display for Atom<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A possibly negated atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal<A = Name> {
    pub positive: bool,
    pub atom: Atom<A>,
}

impl<A> Literal<A> {
    pub fn pos(atom: Atom<A>) -> Self {
        Literal {
            positive: true,
            atom,
        }
    }

    pub fn neg(atom: Atom<A>) -> Self {
        Literal {
            positive: false,
            atom,
        }
    }
}

impl<A: fmt::Display> fmt::Display for Literal<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Requirement {
    Strips,
    Typing,
    NegativePreconditions,
    Equality,
    ActionCosts,
}

impl Requirement {
    pub fn keyword(&self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::NegativePreconditions => ":negative-preconditions",
            Requirement::Equality => ":equality",
            Requirement::ActionCosts => ":action-costs",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            ":strips" => Requirement::Strips,
            ":typing" => Requirement::Typing,
            ":negative-preconditions" => Requirement::NegativePreconditions,
            ":equality" => Requirement::Equality,
            ":action-costs" => Requirement::ActionCosts,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypedName {
    pub name: Name,
    pub ty: Name,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: Name,
    pub parent: Name,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredicateSignature {
    pub name: Name,
    pub params: Vec<TypedName>,
}

/// A numeric function. Only cost bookkeeping is supported.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionSignature {
    pub name: Name,
    pub params: Vec<TypedName>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostAmount {
    Constant(u64),
    Function(Atom<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostIncrease {
    pub function: Atom<Term>,
    pub amount: CostAmount,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Effect {
    pub add: Vec<Atom<Term>>,
    pub delete: Vec<Atom<Term>>,
    pub cost: Option<CostIncrease>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: Name,
    pub params: Vec<TypedName>,
    pub precondition: Vec<Literal<Term>>,
    pub effect: Effect,
}

impl ActionSchema {
    pub fn param_index(&self, var: &Name) -> Option<usize> {
        self.params.iter().position(|p| &p.name == var)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    pub name: Name,
    pub requirements: Vec<Requirement>,
    /// Declared types in source order; `object` is implicit.
    pub types: Vec<TypeDecl>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateSignature>,
    pub functions: Vec<FunctionSignature>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate(&self, name: &Name) -> Option<&PredicateSignature> {
        self.predicates.iter().find(|p| &p.name == name)
    }

    pub fn action(&self, name: &Name) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| &a.name == name)
    }

    pub fn function(&self, name: &Name) -> Option<&FunctionSignature> {
        self.functions.iter().find(|f| &f.name == name)
    }

    pub fn has_type(&self, ty: &Name) -> bool {
        ty.as_str() == OBJECT || self.types.iter().any(|t| &t.name == ty)
    }

    pub fn parent_of(&self, ty: &Name) -> Option<&Name> {
        self.types.iter().find(|t| &t.name == ty).map(|t| &t.parent)
    }

    /// True iff `sup` lies on the parent chain of `sub` (reflexive).
    pub fn is_subtype(&self, sub: &Name, sup: &Name) -> bool {
        if sup.as_str() == OBJECT {
            return true;
        }
        let mut cur = sub;
        // the parser guarantees acyclicity, the bound is belt and braces
        for _ in 0..=self.types.len() {
            if cur == sup {
                return true;
            }
            match self.parent_of(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }

    /// Predicates that no action adds or deletes.
    pub fn static_predicates(&self) -> Vec<Name> {
        self.predicates
            .iter()
            .filter(|p| {
                !self.actions.iter().any(|a| {
                    a.effect
                        .add
                        .iter()
                        .chain(&a.effect.delete)
                        .any(|e| e.predicate == p.name)
                })
            })
            .map(|p| p.name.clone())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionValue {
    pub function: Atom,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Problem {
    pub name: Name,
    pub domain_name: Name,
    pub objects: Vec<TypedName>,
    /// Ground atoms, duplicates merged, source order kept.
    pub init: Vec<Atom>,
    pub init_values: Vec<FunctionValue>,
    pub goal: Vec<Literal>,
    /// `(:metric minimize (total-cost))`, kept only so it survives a round trip.
    pub metric: Option<Atom>,
}

impl Problem {
    /// Object name → type, including the domain's constants.
    pub fn object_types<'a>(&'a self, domain: &'a Domain) -> HashMap<&'a Name, &'a Name> {
        domain
            .constants
            .iter()
            .chain(&self.objects)
            .map(|o| (&o.name, &o.ty))
            .collect()
    }

    pub fn function_value(&self, f: &Atom) -> Option<u64> {
        self.init_values
            .iter()
            .find(|v| &v.function == f)
            .map(|v| v.value)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanStep {
    pub time: u64,
    pub action: Name,
    pub args: Vec<Name>,
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.action)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A sequential plan in VAL's `time: (action args)` format.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimedPlan {
    pub steps: Vec<PlanStep>,
    /// Whether the source text carried the `END` marker.
    pub terminated: bool,
}

impl TimedPlan {
    /// Steps numbered 1..k, terminated.
    pub fn from_actions(actions: impl IntoIterator<Item = (Name, Vec<Name>)>) -> Self {
        let steps = actions
            .into_iter()
            .enumerate()
            .map(|(i, (action, args))| PlanStep {
                time: i as u64 + 1,
                action,
                args,
            })
            .collect();
        TimedPlan {
            steps,
            terminated: true,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The bare action sequence, timestamps dropped.
    pub fn actions(&self) -> Vec<(Name, Vec<Name>)> {
        self.steps
            .iter()
            .map(|s| (s.action.clone(), s.args.clone()))
            .collect()
    }
}

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("lex error at {pos}: {msg}")]
    Lex { pos: Pos, msg: String },
    #[error("structure error at {pos}: {msg}")]
    Structure { pos: Pos, msg: String },
    #[error("unsupported feature `{construct}` at {pos}")]
    Unsupported { pos: Pos, construct: String },
    /// The text is well formed but breaks a domain or problem invariant.
    #[error("invalid {what}: {msg}")]
    Invalid { what: &'static str, msg: String },
    #[error("binding error in `{atom}`: {msg}")]
    Binding { atom: String, msg: String },
    #[error("problem is for domain `{found}`, expected `{expected}`")]
    DomainMismatch { expected: Name, found: Name },
    #[error("plan line {line}: {msg}")]
    PlanFormat { line: usize, msg: String },
    #[error("plan line {line}: timestamp {time} does not exceed previous timestamp {prev}")]
    NonMonotonicTimestamps { line: usize, prev: u64, time: u64 },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_case_insensitive() {
        assert_eq!(Name::new("Truck1"), Name::new("truck1"));
        assert_eq!(Name::new("AT").to_string(), "at");
    }

    #[test]
    fn subtype_chain() {
        let d = parse_domain(
            "(define (domain d) (:requirements :typing)
               (:types truck - vehicle vehicle place - object)
               (:predicates (at ?v - vehicle ?p - place)))",
        )
        .unwrap();
        let t = Name::new("truck");
        assert!(d.is_subtype(&t, &Name::new("vehicle")));
        assert!(d.is_subtype(&t, &Name::object()));
        assert!(d.is_subtype(&t, &t));
        assert!(!d.is_subtype(&t, &Name::new("place")));
        assert!(!d.is_subtype(&Name::new("vehicle"), &t));
    }
}
