//! Random typed STRIPS instances with a self-contained reference simulator.
//! Nothing here goes through the library's grounding or execution code; the
//! library is only used to parse the rendered text.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write;

use plangen::Outcome;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    plangen::seed::rng(seed)
}

const TYPES: [(&str, &str); 3] = [("ta", "object"), ("tb", "object"), ("tc", "ta")];
const ALL_TYPES: [&str; 4] = ["object", "ta", "tb", "tc"];
const OBJ_TYPES: [&str; 3] = ["ta", "tb", "tc"];

pub fn subtype(sub: &str, sup: &str) -> bool {
    let mut cur = sub;
    loop {
        if cur == sup {
            return true;
        }
        match TYPES.iter().find(|(t, _)| *t == cur) {
            Some((_, p)) => cur = p,
            None => return false,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Lit {
    Atom {
        pos: bool,
        pred: usize,
        args: Vec<usize>,
    },
    Eq {
        pos: bool,
        a: usize,
        b: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Schema {
    pub name: String,
    pub params: Vec<&'static str>,
    pub pre: Vec<Lit>,
    pub add: Vec<(usize, Vec<usize>)>,
    pub del: Vec<(usize, Vec<usize>)>,
}

#[derive(Debug, Clone)]
pub struct Inst {
    pub id: u64,
    pub preds: Vec<Vec<&'static str>>,
    pub schemas: Vec<Schema>,
    pub objects: Vec<&'static str>,
    pub init: BTreeSet<String>,
    /// `(positive, atom)`
    pub goal: Vec<(bool, String)>,
    /// A plan reaching the goal, found while building it.
    pub witness: Vec<Step>,
}

/// One line of a candidate plan.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Act(String, Vec<String>),
    /// A line that cannot parse as a plan step.
    Garbage(String),
}

pub type State = BTreeSet<String>;

fn pred_name(i: usize) -> String {
    format!("q{i}")
}

fn obj_name(i: usize) -> String {
    format!("o{i}")
}

pub fn atom(pred: usize, args: &[String]) -> String {
    let mut s = format!("({}", pred_name(pred));
    for a in args {
        s.push(' ');
        s.push_str(a);
    }
    s.push(')');
    s
}

impl Inst {
    pub fn random(rng: &mut ChaCha8Rng, id: u64) -> Inst {
        let n_obj = rng.gen_range(1..=6);
        let objects: Vec<&'static str> = (0..n_obj)
            .map(|_| *OBJ_TYPES.choose(rng).unwrap())
            .collect();
        let preds: Vec<Vec<&'static str>> = (0..rng.gen_range(2..=4))
            .map(|_| {
                (0..rng.gen_range(0..=2))
                    .map(|_| *ALL_TYPES.choose(rng).unwrap())
                    .collect()
            })
            .collect();
        let schemas = (0..rng.gen_range(1..=3))
            .map(|k| random_schema(rng, k, &preds))
            .collect();
        let mut inst = Inst {
            id,
            preds,
            schemas,
            objects,
            init: BTreeSet::new(),
            goal: Vec::new(),
            witness: Vec::new(),
        };
        let all = inst.ground_atoms();
        inst.init = all.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();

        let mut state = inst.init.clone();
        for _ in 0..rng.gen_range(0..=6) {
            let succ = inst.successors(&state);
            let Some((name, args, next)) = succ.choose(rng).cloned() else {
                break;
            };
            inst.witness.push(Step::Act(name, args));
            state = next;
        }
        if !all.is_empty() {
            for _ in 0..rng.gen_range(1..=3) {
                let a = all.choose(rng).unwrap().clone();
                let pos = state.contains(&a);
                if !inst.goal.iter().any(|(_, g)| *g == a) {
                    inst.goal.push((pos, a));
                }
            }
        }
        inst
    }

    /// Same domain and init with an arbitrary goal, which may be
    /// unreachable. The witness is dropped.
    pub fn with_random_goal(&self, rng: &mut ChaCha8Rng) -> Inst {
        let all = self.ground_atoms();
        let mut goal: Vec<(bool, String)> = Vec::new();
        if !all.is_empty() {
            for _ in 0..rng.gen_range(1..=3) {
                let a = all.choose(rng).unwrap().clone();
                if !goal.iter().any(|(_, g)| *g == a) {
                    goal.push((rng.gen_bool(0.7), a));
                }
            }
        }
        Inst {
            goal,
            witness: Vec::new(),
            ..self.clone()
        }
    }

    pub fn object_name(&self, i: usize) -> String {
        obj_name(i)
    }

    fn objects_of(&self, ty: &str) -> Vec<String> {
        (0..self.objects.len())
            .filter(|&i| subtype(self.objects[i], ty))
            .map(obj_name)
            .collect()
    }

    fn tuples(&self, types: &[&str]) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new()];
        for ty in types {
            let objs = self.objects_of(ty);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    objs.iter().map(move |o| {
                        let mut v = prefix.clone();
                        v.push(o.clone());
                        v
                    })
                })
                .collect();
        }
        out
    }

    pub fn ground_atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (p, types) in self.preds.iter().enumerate() {
            for args in self.tuples(types) {
                out.push(atom(p, &args));
            }
        }
        out
    }

    fn bind(&self, pred: usize, idx: &[usize], args: &[String]) -> String {
        let a: Vec<String> = idx.iter().map(|&i| args[i].clone()).collect();
        atom(pred, &a)
    }

    fn holds(&self, state: &State, lit: &Lit, args: &[String]) -> bool {
        match lit {
            Lit::Atom {
                pos,
                pred,
                args: idx,
            } => state.contains(&self.bind(*pred, idx, args)) == *pos,
            Lit::Eq { pos, a, b } => (args[*a] == args[*b]) == *pos,
        }
    }

    /// Successor if the schema's precondition holds.
    pub fn apply(&self, state: &State, s: &Schema, args: &[String]) -> Option<State> {
        if !s.pre.iter().all(|l| self.holds(state, l, args)) {
            return None;
        }
        let mut next = state.clone();
        for (p, idx) in &s.del {
            next.remove(&self.bind(*p, idx, args));
        }
        for (p, idx) in &s.add {
            next.insert(self.bind(*p, idx, args));
        }
        Some(next)
    }

    pub fn successors(&self, state: &State) -> Vec<(String, Vec<String>, State)> {
        let mut out = Vec::new();
        for s in &self.schemas {
            for args in self.tuples(&s.params) {
                if let Some(next) = self.apply(state, s, &args) {
                    out.push((s.name.clone(), args, next));
                }
            }
        }
        out
    }

    /// Every type-correct action instance, applicable or not.
    pub fn all_actions(&self) -> Vec<(String, Vec<String>)> {
        let mut out = Vec::new();
        for s in &self.schemas {
            for args in self.tuples(&s.params) {
                out.push((s.name.clone(), args));
            }
        }
        out
    }

    pub fn goal_holds(&self, state: &State) -> bool {
        self.goal.iter().all(|(pos, a)| state.contains(a) == *pos)
    }

    /// Reference classification of a candidate plan.
    pub fn classify(&self, plan: &[Step]) -> Outcome {
        let mut resolved = Vec::new();
        for step in plan {
            let Step::Act(name, args) = step else {
                return Outcome::Malformed;
            };
            let Some(s) = self.schemas.iter().find(|s| &s.name == name) else {
                return Outcome::Malformed;
            };
            if s.params.len() != args.len() {
                return Outcome::Malformed;
            }
            for (ty, a) in s.params.iter().zip(args) {
                let Some(i) = a.strip_prefix('o').and_then(|n| n.parse::<usize>().ok()) else {
                    return Outcome::Malformed;
                };
                if i >= self.objects.len() || obj_name(i) != *a || !subtype(self.objects[i], ty) {
                    return Outcome::Malformed;
                }
            }
            resolved.push((s, args));
        }
        let mut state = self.init.clone();
        for (s, args) in resolved {
            match self.apply(&state, s, args) {
                Some(next) => state = next,
                None => return Outcome::PreconditionFailure,
            }
        }
        if self.goal_holds(&state) {
            Outcome::Valid
        } else {
            Outcome::ExecutableNoGoal
        }
    }

    /// Shortest plan length by exhaustive breadth-first search, `None` if
    /// unreachable, `Err` if more than `cap` states are reachable.
    pub fn optimal_length(&self, cap: usize) -> Result<Option<usize>, ()> {
        let mut seen: HashSet<State> = HashSet::from([self.init.clone()]);
        let mut queue = VecDeque::from([(self.init.clone(), 0usize)]);
        while let Some((s, d)) = queue.pop_front() {
            if self.goal_holds(&s) {
                return Ok(Some(d));
            }
            for (_, _, next) in self.successors(&s) {
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(());
                    }
                    queue.push_back((next, d + 1));
                }
            }
        }
        Ok(None)
    }

    pub fn domain_text(&self) -> String {
        let mut t = format!(
            "(define (domain rand{})\n  (:requirements :strips :typing :negative-preconditions :equality)\n  (:types ta tb - object tc - ta)\n  (:predicates",
            self.id
        );
        for (i, types) in self.preds.iter().enumerate() {
            write!(t, " ({}", pred_name(i)).unwrap();
            for (k, ty) in types.iter().enumerate() {
                write!(t, " ?a{k} - {ty}").unwrap();
            }
            t.push(')');
        }
        t.push_str(")\n");
        for s in &self.schemas {
            let var = |i: &usize| format!("?x{i}");
            let atom_l = |p: &usize, idx: &Vec<usize>| {
                let mut a = format!("({}", pred_name(*p));
                for i in idx {
                    write!(a, " {}", var(i)).unwrap();
                }
                a + ")"
            };
            write!(t, "  (:action {}\n    :parameters (", s.name).unwrap();
            let ps: Vec<String> = s
                .params
                .iter()
                .enumerate()
                .map(|(i, ty)| format!("{} - {ty}", var(&i)))
                .collect();
            t.push_str(&ps.join(" "));
            t.push_str(")\n    :precondition (and");
            for l in &s.pre {
                let (pos, body) = match l {
                    Lit::Atom { pos, pred, args } => (*pos, atom_l(pred, args)),
                    Lit::Eq { pos, a, b } => (*pos, format!("(= {} {})", var(a), var(b))),
                };
                if pos {
                    write!(t, " {body}").unwrap();
                } else {
                    write!(t, " (not {body})").unwrap();
                }
            }
            t.push_str(")\n    :effect (and");
            for (p, idx) in &s.add {
                write!(t, " {}", atom_l(p, idx)).unwrap();
            }
            for (p, idx) in &s.del {
                write!(t, " (not {})", atom_l(p, idx)).unwrap();
            }
            t.push_str("))\n");
        }
        t.push_str(")\n");
        t
    }

    pub fn problem_text(&self) -> String {
        let mut t = format!(
            "(define (problem inst{0})\n  (:domain rand{0})\n  (:objects",
            self.id
        );
        for (i, ty) in self.objects.iter().enumerate() {
            write!(t, " {} - {ty}", obj_name(i)).unwrap();
        }
        t.push_str(")\n  (:init");
        for a in &self.init {
            write!(t, " {a}").unwrap();
        }
        t.push_str(")\n  (:goal (and");
        for (pos, a) in &self.goal {
            if *pos {
                write!(t, " {a}").unwrap();
            } else {
                write!(t, " (not {a})").unwrap();
            }
        }
        t.push_str(")))\n");
        t
    }

    pub fn parse(&self) -> (plangen::Domain, plangen::Problem) {
        let d = plangen::pddl::parse_domain(&self.domain_text())
            .unwrap_or_else(|e| panic!("{e}\n{}", self.domain_text()));
        let p = plangen::pddl::parse_problem(&self.problem_text(), &d)
            .unwrap_or_else(|e| panic!("{e}\n{}", self.problem_text()));
        (d, p)
    }

    /// The witness plan plus adversarial variants of it.
    pub fn candidate_plans(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<Step>> {
        let w = &self.witness;
        let mut out = vec![w.clone(), Vec::new()];
        if !w.is_empty() {
            let mut p = w.clone();
            p.remove(rng.gen_range(0..p.len()));
            out.push(p);
            out.push(w[..w.len() - 1].to_vec());
            let mut p = w.clone();
            let i = rng.gen_range(0..p.len());
            if let Step::Act(_, args) = &mut p[i] {
                if args.len() >= 2 {
                    let (a, b) = (rng.gen_range(0..args.len()), rng.gen_range(0..args.len()));
                    args.swap(a, b);
                }
            }
            out.push(p);
            let mut p = w.clone();
            let (a, b) = (rng.gen_range(0..p.len()), rng.gen_range(0..p.len()));
            p.swap(a, b);
            out.push(p);
            let mut p = w.clone();
            let i = rng.gen_range(0..=p.len());
            p.insert(i, p[rng.gen_range(0..p.len())].clone());
            out.push(p);
        }
        // random step sequences, type-correct and not
        let acts = self.all_actions();
        for _ in 0..2 {
            let p: Vec<Step> = (0..rng.gen_range(1..=4))
                .filter_map(|_| acts.choose(rng).cloned())
                .map(|(n, a)| Step::Act(n, a))
                .collect();
            out.push(p);
        }
        let s = self.schemas.choose(rng).unwrap();
        let mistyped: Vec<String> = s
            .params
            .iter()
            .map(|_| obj_name(rng.gen_range(0..self.objects.len())))
            .collect();
        let mut p = w.clone();
        p.push(Step::Act(s.name.clone(), mistyped));
        out.push(p);
        let broken = match rng.gen_range(0..4) {
            0 => Step::Act("nosuch".into(), Vec::new()),
            1 => Step::Act(s.name.clone(), vec![obj_name(0); s.params.len() + 1]),
            2 => Step::Act(s.name.clone(), vec!["zz".into(); s.params.len()]),
            _ => Step::Garbage(
                ["(", "move (a b", "x: (a)", "3 (a)"]
                    .choose(rng)
                    .unwrap()
                    .to_string(),
            ),
        };
        let mut p = w.clone();
        let i = rng.gen_range(0..=p.len());
        p.insert(i, broken);
        out.push(p);
        out
    }
}

fn random_schema(rng: &mut ChaCha8Rng, k: usize, preds: &[Vec<&'static str>]) -> Schema {
    let params: Vec<&'static str> = (0..rng.gen_range(0..=3))
        .map(|_| *ALL_TYPES.choose(rng).unwrap())
        .collect();
    // lifted atom over the schema's parameters, if the types allow one
    let lifted = |rng: &mut ChaCha8Rng| -> Option<(usize, Vec<usize>)> {
        let p = rng.gen_range(0..preds.len());
        let mut idx = Vec::new();
        for ty in &preds[p] {
            let fits: Vec<usize> = (0..params.len())
                .filter(|&i| subtype(params[i], ty))
                .collect();
            idx.push(*fits.choose(rng)?);
        }
        Some((p, idx))
    };
    let mut pre = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        if let Some((pred, args)) = lifted(rng) {
            pre.push(Lit::Atom {
                pos: rng.gen_bool(0.7),
                pred,
                args,
            });
        }
    }
    if params.len() >= 2 && rng.gen_bool(0.3) {
        pre.push(Lit::Eq {
            pos: rng.gen_bool(0.3),
            a: 0,
            b: 1,
        });
    }
    let mut add: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut del: Vec<(usize, Vec<usize>)> = Vec::new();
    for _ in 0..8 {
        if add.len() >= 2 {
            break;
        }
        if let Some(a) = lifted(rng) {
            if !add.contains(&a) {
                add.push(a);
            }
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        if let Some(a) = lifted(rng) {
            if !add.contains(&a) && !del.contains(&a) {
                del.push(a);
            }
        }
    }
    if add.is_empty() && del.is_empty() {
        // some predicate with no parameters may not exist; fall back to a
        // fresh nullary effect via an arity-0 predicate if there is one
        if let Some(p) = preds.iter().position(|t| t.is_empty()) {
            add.push((p, Vec::new()));
        }
    }
    Schema {
        name: format!("act{k}"),
        params,
        pre,
        add,
        del,
    }
}

pub fn plan_text(plan: &[Step], rng: &mut ChaCha8Rng) -> String {
    let mut t = String::new();
    let mut time = 0u64;
    for s in plan {
        time += rng.gen_range(1..=3);
        match s {
            Step::Act(n, args) => {
                write!(t, "{time}: ({n}").unwrap();
                for a in args {
                    write!(t, " {a}").unwrap();
                }
                t.push_str(")\n");
            }
            Step::Garbage(g) => {
                t.push_str(g);
                t.push('\n');
            }
        }
    }
    if rng.gen_bool(0.5) {
        t.push_str("END\n");
    }
    t
}

/// Counts per outcome, for checking a corpus is not one-sided.
pub fn tally(outcomes: impl IntoIterator<Item = Outcome>) -> HashMap<Outcome, usize> {
    let mut m = HashMap::new();
    for o in outcomes {
        *m.entry(o).or_insert(0) += 1;
    }
    m
}
