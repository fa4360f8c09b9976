use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::pddl::{
    ActionSchema, Atom, CostAmount, Domain, Literal, Name, Problem, Requirement, Term, TimedPlan,
    TypedName, OBJECT,
};

pub const ANON_DOMAIN: &str = "domain";
pub const ANON_PROBLEM: &str = "problem";

/// Original → synthetic names, one table per symbol category.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolMap {
    pub actions: IndexMap<Name, Name>,
    pub predicates: IndexMap<Name, Name>,
    pub objects: IndexMap<Name, Name>,
    pub types: IndexMap<Name, Name>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent tuple: {0}")]
pub struct InconsistentTuple(pub String);

fn assign(map: &mut IndexMap<Name, Name>, prefix: &str, n: &Name) {
    if n.as_str() == OBJECT || map.contains_key(n) {
        return;
    }
    let synthetic = Name::new(format!("{prefix}{}", map.len()));
    map.insert(n.clone(), synthetic);
}

impl SymbolMap {
    fn ty(&mut self, t: &Name) {
        assign(&mut self.types, "t_", t);
    }
    fn obj(&mut self, o: &Name) {
        assign(&mut self.objects, "o_", o);
    }
    fn pred(&mut self, p: &Name) {
        if p.as_str() != "=" {
            assign(&mut self.predicates, "p_", p);
        }
    }
    fn act(&mut self, a: &Name) {
        assign(&mut self.actions, "a_", a);
    }

    /// Visits a typed list in printed order: each run of names, then its type.
    fn typed(&mut self, items: &[TypedName], shown: bool, names_are_objects: bool) {
        for (i, it) in items.iter().enumerate() {
            if names_are_objects {
                self.obj(&it.name);
            }
            let run_ends = items.get(i + 1).is_none_or(|next| next.ty != it.ty);
            if shown && run_ends {
                self.ty(&it.ty);
            }
        }
    }

    fn term_atom(&mut self, a: &Atom<Term>) {
        self.pred(&a.predicate);
        for t in &a.args {
            if let Term::Const(c) = t {
                self.obj(c);
            }
        }
    }

    fn ground_atom(&mut self, a: &Atom) {
        self.pred(&a.predicate);
        for o in &a.args {
            self.obj(o);
        }
    }

    fn get<'a>(map: &'a IndexMap<Name, Name>, n: &'a Name) -> &'a Name {
        map.get(n).unwrap_or(n)
    }
}

fn domain_typed(d: &Domain) -> bool {
    !d.types.is_empty() || d.requirements.contains(&Requirement::Typing)
}

/// Builds the map by first occurrence in printed order: domain, problem, plan.
fn collect(domain: &Domain, problem: &Problem, plan: &TimedPlan) -> SymbolMap {
    let mut m = SymbolMap::default();
    let typed = domain_typed(domain);
    // the types section prints as `names - parent` runs
    for (i, t) in domain.types.iter().enumerate() {
        m.ty(&t.name);
        if domain.types.get(i + 1).is_none_or(|n| n.parent != t.parent) {
            m.ty(&t.parent);
        }
    }
    m.typed(&domain.constants, typed, true);
    for p in &domain.predicates {
        m.pred(&p.name);
        m.typed(&p.params, typed, false);
    }
    for f in &domain.functions {
        m.typed(&f.params, typed, false);
    }
    for a in &domain.actions {
        m.act(&a.name);
        m.typed(&a.params, typed, false);
        for l in &a.precondition {
            m.term_atom(&l.atom);
        }
        for atom in a.effect.add.iter().chain(&a.effect.delete) {
            m.term_atom(atom);
        }
        if let Some(c) = &a.effect.cost {
            let amount = match &c.amount {
                CostAmount::Function(f) => Some(f),
                CostAmount::Constant(_) => None,
            };
            for t in c
                .function
                .args
                .iter()
                .chain(amount.iter().flat_map(|f| &f.args))
            {
                if let Term::Const(o) = t {
                    m.obj(o);
                }
            }
        }
    }

    let typed_objects = problem.objects.iter().any(|o| o.ty.as_str() != OBJECT);
    m.typed(&problem.objects, typed_objects, true);
    for a in &problem.init {
        m.ground_atom(a);
    }
    for v in &problem.init_values {
        for o in &v.function.args {
            m.obj(o);
        }
    }
    for l in &problem.goal {
        m.ground_atom(&l.atom);
    }
    for s in &plan.steps {
        m.act(&s.action);
        for o in &s.args {
            m.obj(o);
        }
    }
    m
}

fn check(domain: &Domain, problem: &Problem, plan: &TimedPlan) -> Result<(), InconsistentTuple> {
    let objects: HashSet<&Name> = domain
        .constants
        .iter()
        .chain(&problem.objects)
        .map(|o| &o.name)
        .collect();
    let pred_ok = |p: &Name| p.as_str() == "=" || domain.predicate(p).is_some();
    for a in problem
        .init
        .iter()
        .chain(problem.goal.iter().map(|l| &l.atom))
    {
        if !pred_ok(&a.predicate) {
            return Err(InconsistentTuple(format!(
                "unknown predicate `{}`",
                a.predicate
            )));
        }
        if let Some(o) = a.args.iter().find(|o| !objects.contains(o)) {
            return Err(InconsistentTuple(format!("undeclared object `{o}` in {a}")));
        }
    }
    for s in &plan.steps {
        if domain.action(&s.action).is_none() {
            return Err(InconsistentTuple(format!(
                "plan uses unknown action `{}`",
                s.action
            )));
        }
        if let Some(o) = s.args.iter().find(|o| !objects.contains(o)) {
            return Err(InconsistentTuple(format!(
                "plan uses undeclared object `{o}`"
            )));
        }
    }
    Ok(())
}

fn var(i: usize) -> Name {
    Name::new(format!("?v{i}"))
}

struct Rewriter<'a> {
    m: &'a SymbolMap,
}

impl Rewriter<'_> {
    fn ty(&self, t: &Name) -> Name {
        SymbolMap::get(&self.m.types, t).clone()
    }
    fn obj(&self, o: &Name) -> Name {
        SymbolMap::get(&self.m.objects, o).clone()
    }
    fn pred(&self, p: &Name) -> Name {
        SymbolMap::get(&self.m.predicates, p).clone()
    }

    /// Parameters become `?v0 ?v1 ...`; `vars` maps the old names.
    fn params(&self, params: &[TypedName]) -> (Vec<TypedName>, IndexMap<Name, Name>) {
        let mut vars = IndexMap::new();
        let out = params
            .iter()
            .enumerate()
            .map(|(i, p)| {
                vars.insert(p.name.clone(), var(i));
                TypedName {
                    name: var(i),
                    ty: self.ty(&p.ty),
                }
            })
            .collect();
        (out, vars)
    }

    fn term_atom(&self, a: &Atom<Term>, vars: &IndexMap<Name, Name>) -> Atom<Term> {
        Atom {
            predicate: self.pred(&a.predicate),
            args: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Term::Var(vars.get(v).cloned().unwrap_or_else(|| v.clone())),
                    Term::Const(c) => Term::Const(self.obj(c)),
                })
                .collect(),
        }
    }

    fn ground_atom(&self, a: &Atom) -> Atom {
        Atom {
            predicate: self.pred(&a.predicate),
            args: a.args.iter().map(|o| self.obj(o)).collect(),
        }
    }

    fn action(&self, a: &ActionSchema) -> ActionSchema {
        let (params, vars) = self.params(&a.params);
        let mut effect = a.effect.clone();
        effect.add = a
            .effect
            .add
            .iter()
            .map(|x| self.term_atom(x, &vars))
            .collect();
        effect.delete = a
            .effect
            .delete
            .iter()
            .map(|x| self.term_atom(x, &vars))
            .collect();
        if let Some(c) = &mut effect.cost {
            // function names are kept; only their arguments are rewritten
            let keep = |f: &Atom<Term>| {
                let mut g = self.term_atom(f, &vars);
                g.predicate = f.predicate.clone();
                g
            };
            c.function = keep(&c.function);
            if let CostAmount::Function(f) = &c.amount {
                c.amount = CostAmount::Function(keep(f));
            }
        }
        ActionSchema {
            name: SymbolMap::get(&self.m.actions, &a.name).clone(),
            params,
            precondition: a
                .precondition
                .iter()
                .map(|l| Literal {
                    positive: l.positive,
                    atom: self.term_atom(&l.atom, &vars),
                })
                .collect(),
            effect,
        }
    }

    fn domain(&self, d: &Domain) -> Domain {
        let mut out = d.clone();
        out.name = Name::new(ANON_DOMAIN);
        for t in &mut out.types {
            t.name = self.ty(&t.name);
            t.parent = self.ty(&t.parent);
        }
        for c in &mut out.constants {
            c.name = self.obj(&c.name);
            c.ty = self.ty(&c.ty);
        }
        for p in &mut out.predicates {
            p.name = self.pred(&p.name);
            p.params = self.params(&p.params).0;
        }
        for f in &mut out.functions {
            f.params = self.params(&f.params).0;
        }
        out.actions = d.actions.iter().map(|a| self.action(a)).collect();
        out
    }

    fn problem(&self, p: &Problem) -> Problem {
        let mut out = p.clone();
        out.name = Name::new(ANON_PROBLEM);
        out.domain_name = Name::new(ANON_DOMAIN);
        for o in &mut out.objects {
            o.name = self.obj(&o.name);
            o.ty = self.ty(&o.ty);
        }
        out.init = p.init.iter().map(|a| self.ground_atom(a)).collect();
        for v in &mut out.init_values {
            v.function.args = v.function.args.iter().map(|o| self.obj(o)).collect();
        }
        out.goal = p
            .goal
            .iter()
            .map(|l| Literal {
                positive: l.positive,
                atom: self.ground_atom(&l.atom),
            })
            .collect();
        out
    }

    fn plan(&self, plan: &TimedPlan) -> TimedPlan {
        let mut out = plan.clone();
        for s in &mut out.steps {
            s.action = SymbolMap::get(&self.m.actions, &s.action).clone();
            s.args = s.args.iter().map(|o| self.obj(o)).collect();
        }
        out
    }
}

/// Replaces action, predicate, object and type names with synthetic
/// symbols (`a_0`, `p_3`, `o_7`, `t_1`), consistently across the three
/// artifacts. Parameters are renamed `?v0 ...` and the domain and problem
/// get fixed names. Counters follow first occurrence in printed order, so
/// the result does not depend on `seed`.
pub fn anonymize_tuple(
    domain: &Domain,
    problem: &Problem,
    plan: &TimedPlan,
    _seed: u64,
) -> Result<(Domain, Problem, TimedPlan, SymbolMap), InconsistentTuple> {
    check(domain, problem, plan)?;
    let map = collect(domain, problem, plan);
    let rw = Rewriter { m: &map };
    Ok((rw.domain(domain), rw.problem(problem), rw.plan(plan), map))
}
