use std::fmt::Write;

use super::{
    ActionSchema, CostAmount, Domain, Literal, Problem, Requirement, TimedPlan, TypedName, OBJECT,
};

/// Canonical text form. `parse(render(x)) == x` for every parsed `x`.
pub trait Render {
    fn render(&self) -> String;
}

impl Render for Domain {
    fn render(&self) -> String {
        render_domain(self)
    }
}

impl Render for Problem {
    fn render(&self) -> String {
        render_problem(self)
    }
}

impl Render for TimedPlan {
    fn render(&self) -> String {
        render_plan(self)
    }
}

/// `a b - t c - u`, grouping consecutive names of the same type.
fn typed_list(items: &[TypedName], show_types: bool) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < items.len() {
        let ty = &items[i].ty;
        let mut j = i;
        while j < items.len() && &items[j].ty == ty {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(items[j].name.as_str());
            j += 1;
        }
        if show_types {
            write!(out, " - {ty}").unwrap();
        }
        i = j;
    }
    out
}

fn conjunction<A: std::fmt::Display>(lits: &[Literal<A>]) -> String {
    let mut out = String::from("(and");
    for l in lits {
        write!(out, " {l}").unwrap();
    }
    out.push(')');
    out
}

fn render_action(out: &mut String, a: &ActionSchema, typed: bool) {
    writeln!(out, "  (:action {}", a.name).unwrap();
    write!(out, "    :parameters ({})", typed_list(&a.params, typed)).unwrap();
    if !a.precondition.is_empty() {
        write!(out, "\n    :precondition {}", conjunction(&a.precondition)).unwrap();
    }
    let mut eff = String::from("(and");
    for atom in &a.effect.add {
        write!(eff, " {atom}").unwrap();
    }
    for atom in &a.effect.delete {
        write!(eff, " (not {atom})").unwrap();
    }
    if let Some(c) = &a.effect.cost {
        let amount = match &c.amount {
            CostAmount::Constant(n) => n.to_string(),
            CostAmount::Function(f) => f.to_string(),
        };
        write!(eff, " (increase {} {amount})", c.function).unwrap();
    }
    eff.push(')');
    write!(out, "\n    :effect {eff})").unwrap();
}

pub fn render_domain(d: &Domain) -> String {
    let typed = !d.types.is_empty() || d.requirements.contains(&Requirement::Typing);
    let mut out = String::new();
    write!(out, "(define (domain {})", d.name).unwrap();
    if !d.requirements.is_empty() {
        let reqs: Vec<_> = d.requirements.iter().map(Requirement::keyword).collect();
        write!(out, "\n  (:requirements {})", reqs.join(" ")).unwrap();
    }
    if !d.types.is_empty() {
        let decls: Vec<TypedName> = d
            .types
            .iter()
            .map(|t| TypedName {
                name: t.name.clone(),
                ty: t.parent.clone(),
            })
            .collect();
        write!(out, "\n  (:types {})", typed_list(&decls, true)).unwrap();
    }
    if !d.constants.is_empty() {
        write!(out, "\n  (:constants {})", typed_list(&d.constants, typed)).unwrap();
    }
    if !d.predicates.is_empty() {
        out.push_str("\n  (:predicates");
        for p in &d.predicates {
            if p.params.is_empty() {
                write!(out, "\n    ({})", p.name).unwrap();
            } else {
                write!(out, "\n    ({} {})", p.name, typed_list(&p.params, typed)).unwrap();
            }
        }
        out.push(')');
    }
    if !d.functions.is_empty() {
        out.push_str("\n  (:functions");
        for f in &d.functions {
            if f.params.is_empty() {
                write!(out, "\n    ({}) - number", f.name).unwrap();
            } else {
                write!(
                    out,
                    "\n    ({} {}) - number",
                    f.name,
                    typed_list(&f.params, typed)
                )
                .unwrap();
            }
        }
        out.push(')');
    }
    for a in &d.actions {
        out.push('\n');
        render_action(&mut out, a, typed);
    }
    out.push(')');
    out
}

pub fn render_problem(p: &Problem) -> String {
    let mut out = String::new();
    write!(out, "(define (problem {})", p.name).unwrap();
    write!(out, "\n  (:domain {})", p.domain_name).unwrap();
    if !p.objects.is_empty() {
        let typed = p.objects.iter().any(|o| o.ty.as_str() != OBJECT);
        write!(out, "\n  (:objects {})", typed_list(&p.objects, typed)).unwrap();
    }
    out.push_str("\n  (:init");
    for a in &p.init {
        write!(out, "\n    {a}").unwrap();
    }
    for v in &p.init_values {
        write!(out, "\n    (= {} {})", v.function, v.value).unwrap();
    }
    out.push(')');
    write!(out, "\n  (:goal {})", conjunction(&p.goal)).unwrap();
    if let Some(m) = &p.metric {
        write!(out, "\n  (:metric minimize {m})").unwrap();
    }
    out.push(')');
    out
}

/// VAL sequential format with 5-digit zero padded timestamps.
pub fn render_plan(plan: &TimedPlan) -> String {
    let mut lines: Vec<String> = plan
        .steps
        .iter()
        .map(|s| format!("{:05}: {s}", s.time))
        .collect();
    if plan.terminated {
        lines.push("END".to_string());
    }
    lines.join("\n")
}
