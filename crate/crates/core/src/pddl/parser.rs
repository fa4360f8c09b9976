use std::collections::{HashMap, HashSet};

use super::lexer::{read, Sexp};
use super::{
    ActionSchema, Atom, CostAmount, CostIncrease, Domain, Effect, FunctionSignature, FunctionValue,
    Literal, Name, ParseError, Pos, PredicateSignature, Problem, Requirement, Term, TypeDecl,
    TypedName, OBJECT,
};

const UNSUPPORTED_REQUIREMENTS: &[&str] = &[
    ":adl",
    ":conditional-effects",
    ":disjunctive-preconditions",
    ":existential-preconditions",
    ":universal-preconditions",
    ":quantified-preconditions",
    ":numeric-fluents",
    ":fluents",
    ":object-fluents",
    ":durative-actions",
    ":duration-inequalities",
    ":continuous-effects",
    ":derived-predicates",
    ":timed-initial-literals",
    ":preferences",
    ":constraints",
];

const UNSUPPORTED_FORMULAS: &[&str] = &[
    "or",
    "imply",
    "exists",
    "forall",
    "when",
    "<",
    ">",
    "<=",
    ">=",
    "decrease",
    "assign",
    "scale-up",
    "scale-down",
];

fn structure(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Structure {
        pos,
        msg: msg.into(),
    }
}

fn unsupported(pos: Pos, construct: impl Into<String>) -> ParseError {
    ParseError::Unsupported {
        pos,
        construct: construct.into(),
    }
}

fn invalid(what: &'static str, msg: impl Into<String>) -> ParseError {
    ParseError::Invalid {
        what,
        msg: msg.into(),
    }
}

fn expect_list<'a>(e: &'a Sexp, what: &str) -> Result<&'a [Sexp], ParseError> {
    e.as_list()
        .ok_or_else(|| structure(e.pos(), format!("expected list for {what}")))
}

fn expect_symbol<'a>(e: &'a Sexp, what: &str) -> Result<&'a str, ParseError> {
    e.as_symbol()
        .ok_or_else(|| structure(e.pos(), format!("expected symbol for {what}")))
}

fn expect_name(e: &Sexp, what: &str) -> Result<Name, ParseError> {
    let s = expect_symbol(e, what)?;
    if !super::is_identifier(s) {
        return Err(structure(e.pos(), format!("`{s}` is not a legal {what}")));
    }
    Ok(Name::new(s))
}

/// `(define (<kind> <name>) sections...)` → (name, sections)
fn header<'a>(root: &'a Sexp, kind: &str) -> Result<(Name, &'a [Sexp]), ParseError> {
    let items = expect_list(root, "define")?;
    match items.first().and_then(Sexp::as_symbol) {
        Some("define") => {}
        _ => return Err(structure(root.pos(), "expected `(define ...)`")),
    }
    let head = items
        .get(1)
        .ok_or_else(|| structure(root.pos(), format!("missing `({kind} <name>)`")))?;
    let head_items = expect_list(head, kind)?;
    if head_items.len() != 2 || head_items[0].as_symbol() != Some(kind) {
        return Err(structure(head.pos(), format!("expected `({kind} <name>)`")));
    }
    let name = expect_name(&head_items[1], &format!("{kind} name"))?;
    Ok((name, &items[2..]))
}

/// Parses `a b - t c - u d` into typed names. Untyped trailing names get `object`.
fn typed_list(items: &[Sexp], allow_vars: bool) -> Result<Vec<TypedName>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<Name> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let e = &items[i];
        let s = match e {
            Sexp::List(..) => return Err(structure(e.pos(), "unexpected list in typed list")),
            Sexp::Symbol(s, _) => s.as_str(),
        };
        if s == "-" {
            let ty_e = items
                .get(i + 1)
                .ok_or_else(|| structure(e.pos(), "`-` without a type"))?;
            if ty_e.head() == Some("either") {
                return Err(unsupported(ty_e.pos(), "either"));
            }
            let ty = expect_name(ty_e, "type name")?;
            if pending.is_empty() {
                return Err(structure(e.pos(), "`-` with nothing to type"));
            }
            for name in pending.drain(..) {
                out.push(TypedName {
                    name,
                    ty: ty.clone(),
                });
            }
            i += 2;
            continue;
        }
        let name = if allow_vars {
            let body = s
                .strip_prefix('?')
                .ok_or_else(|| structure(e.pos(), format!("expected variable, found `{s}`")))?;
            if !super::is_identifier(body) {
                return Err(structure(e.pos(), format!("illegal variable `{s}`")));
            }
            Name::new(s)
        } else {
            expect_name(e, "name")?
        };
        pending.push(name);
        i += 1;
    }
    for name in pending {
        out.push(TypedName {
            name,
            ty: Name::object(),
        });
    }
    Ok(out)
}

fn check_unique<'a>(
    what: &'static str,
    names: impl IntoIterator<Item = &'a Name>,
) -> Result<(), ParseError> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(invalid(what, format!("duplicate name `{n}`")));
        }
    }
    Ok(())
}

/// Parses a domain file.
pub fn parse_domain(text: &str) -> Result<Domain, ParseError> {
    let root = read(text)?;
    let (name, sections) = header(&root, "domain")?;
    let mut domain = Domain {
        name,
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        functions: Vec::new(),
        actions: Vec::new(),
    };
    let mut raw_actions = Vec::new();
    for sec in sections {
        let items = expect_list(sec, "domain section")?;
        let key = items
            .first()
            .and_then(Sexp::as_symbol)
            .ok_or_else(|| structure(sec.pos(), "section without keyword"))?;
        let body = &items[1..];
        match key {
            ":requirements" => {
                for r in body {
                    let kw = expect_symbol(r, "requirement")?;
                    match Requirement::from_keyword(kw) {
                        Some(req) => {
                            if !domain.requirements.contains(&req) {
                                domain.requirements.push(req)
                            }
                        }
                        None if UNSUPPORTED_REQUIREMENTS.contains(&kw) => {
                            return Err(unsupported(r.pos(), kw))
                        }
                        None => {
                            return Err(structure(r.pos(), format!("unknown requirement `{kw}`")))
                        }
                    }
                }
            }
            ":types" => {
                for t in typed_list(body, false)? {
                    if t.name.as_str() == OBJECT {
                        continue;
                    }
                    domain.types.push(TypeDecl {
                        name: t.name,
                        parent: t.ty,
                    });
                }
            }
            ":constants" => domain.constants.extend(typed_list(body, false)?),
            ":predicates" => {
                for p in body {
                    let p_items = expect_list(p, "predicate declaration")?;
                    let pname = expect_name(
                        p_items
                            .first()
                            .ok_or_else(|| structure(p.pos(), "empty predicate declaration"))?,
                        "predicate name",
                    )?;
                    domain.predicates.push(PredicateSignature {
                        name: pname,
                        params: typed_list(&p_items[1..], true)?,
                    });
                }
            }
            ":functions" => domain.functions = parse_functions(body)?,
            ":action" => raw_actions.push(sec),
            ":durative-action" | ":derived" | ":constraints" => {
                return Err(unsupported(sec.pos(), key))
            }
            other => {
                return Err(structure(
                    sec.pos(),
                    format!("unknown domain section `{other}`"),
                ))
            }
        }
    }
    // Parent types that are never declared themselves are implicit subtypes of object.
    let declared: HashSet<Name> = domain.types.iter().map(|t| t.name.clone()).collect();
    let mut implicit = Vec::new();
    for t in &domain.types {
        if t.parent.as_str() != OBJECT
            && !declared.contains(&t.parent)
            && !implicit.iter().any(|d: &TypeDecl| d.name == t.parent)
        {
            implicit.push(TypeDecl {
                name: t.parent.clone(),
                parent: Name::object(),
            });
        }
    }
    domain.types.extend(implicit);
    check_types(&domain)?;

    for sec in raw_actions {
        let action = parse_action(sec, &domain)?;
        domain.actions.push(action);
    }
    check_unique("domain", domain.predicates.iter().map(|p| &p.name))?;
    check_unique("domain", domain.actions.iter().map(|a| &a.name))?;
    check_unique("domain", domain.functions.iter().map(|f| &f.name))?;
    check_unique("domain", domain.constants.iter().map(|c| &c.name))?;
    for p in &domain.predicates {
        check_unique("domain", p.params.iter().map(|x| &x.name))?;
        for param in &p.params {
            require_type(&domain, &param.ty, &format!("predicate `{}`", p.name))?;
        }
    }
    for f in &domain.functions {
        for param in &f.params {
            require_type(&domain, &param.ty, &format!("function `{}`", f.name))?;
        }
    }
    for c in &domain.constants {
        require_type(&domain, &c.ty, &format!("constant `{}`", c.name))?;
    }
    Ok(domain)
}

fn require_type(domain: &Domain, ty: &Name, site: &str) -> Result<(), ParseError> {
    if domain.has_type(ty) {
        Ok(())
    } else {
        Err(invalid(
            "domain",
            format!("undeclared type `{ty}` in {site}"),
        ))
    }
}

fn check_types(domain: &Domain) -> Result<(), ParseError> {
    check_unique("domain", domain.types.iter().map(|t| &t.name))?;
    let parents: HashMap<&Name, &Name> =
        domain.types.iter().map(|t| (&t.name, &t.parent)).collect();
    for t in &domain.types {
        let mut cur = &t.name;
        let mut steps = 0;
        while cur.as_str() != OBJECT {
            cur = parents
                .get(cur)
                .ok_or_else(|| invalid("domain", format!("undeclared type `{cur}`")))?;
            steps += 1;
            if steps > domain.types.len() {
                return Err(invalid(
                    "domain",
                    format!("type cycle through `{}`", t.name),
                ));
            }
        }
    }
    Ok(())
}

fn parse_functions(body: &[Sexp]) -> Result<Vec<FunctionSignature>, ParseError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < body.len() {
        let e = &body[i];
        match e {
            Sexp::List(items, pos) => {
                let fname = expect_name(
                    items
                        .first()
                        .ok_or_else(|| structure(*pos, "empty function declaration"))?,
                    "function name",
                )?;
                out.push(FunctionSignature {
                    name: fname,
                    params: typed_list(&items[1..], true)?,
                });
                i += 1;
            }
            Sexp::Symbol(s, pos) if s == "-" => {
                match body.get(i + 1).and_then(Sexp::as_symbol) {
                    Some("number") => {}
                    Some(other) => {
                        return Err(unsupported(*pos, format!("function type `{other}`")))
                    }
                    None => return Err(structure(*pos, "`-` without function type")),
                }
                i += 2;
            }
            Sexp::Symbol(s, pos) => {
                return Err(structure(*pos, format!("unexpected `{s}` in :functions")))
            }
        }
    }
    for f in &out {
        if f.name.as_str() != "total-cost" && !f.params.is_empty() {
            log::debug!("function `{}` accepted as a cost table", f.name);
        }
    }
    Ok(out)
}

struct ActionScope<'a> {
    domain: &'a Domain,
    params: &'a [TypedName],
    action: &'a Name,
}

impl ActionScope<'_> {
    fn term(&self, e: &Sexp) -> Result<Term, ParseError> {
        let s = expect_symbol(e, "term")?;
        if s.starts_with('?') {
            let n = Name::new(s);
            if !self.params.iter().any(|p| p.name == n) {
                return Err(invalid(
                    "domain",
                    format!(
                        "variable `{s}` is not a parameter of action `{}`",
                        self.action
                    ),
                ));
            }
            Ok(Term::Var(n))
        } else {
            let n = Name::new(s);
            if !self.domain.constants.iter().any(|c| c.name == n) {
                return Err(invalid(
                    "domain",
                    format!("unknown constant `{s}` in action `{}`", self.action),
                ));
            }
            Ok(Term::Const(n))
        }
    }

    fn atom(&self, e: &Sexp) -> Result<Atom<Term>, ParseError> {
        let items = expect_list(e, "atom")?;
        let head = items
            .first()
            .ok_or_else(|| structure(e.pos(), "empty atom"))?;
        let pred = expect_symbol(head, "predicate")?;
        let args = items[1..]
            .iter()
            .map(|a| self.term(a))
            .collect::<Result<Vec<_>, _>>()?;
        if pred == "=" {
            if args.len() != 2 {
                return Err(structure(e.pos(), "`=` takes exactly two arguments"));
            }
            return Ok(Atom::new("=", args));
        }
        let name = Name::new(pred);
        let sig = self.domain.predicate(&name).ok_or_else(|| {
            invalid(
                "domain",
                format!("undeclared predicate `{pred}` in action `{}`", self.action),
            )
        })?;
        if sig.params.len() != args.len() {
            return Err(invalid(
                "domain",
                format!(
                    "predicate `{pred}` expects {} arguments, got {} in action `{}`",
                    sig.params.len(),
                    args.len(),
                    self.action
                ),
            ));
        }
        Ok(Atom {
            predicate: name,
            args,
        })
    }

    fn function_term(&self, e: &Sexp) -> Result<Atom<Term>, ParseError> {
        let items = expect_list(e, "function term")?;
        let fname = expect_name(
            items
                .first()
                .ok_or_else(|| structure(e.pos(), "empty function term"))?,
            "function name",
        )?;
        let sig = self.domain.function(&fname).ok_or_else(|| {
            invalid(
                "domain",
                format!("undeclared function `{fname}` in action `{}`", self.action),
            )
        })?;
        let args = items[1..]
            .iter()
            .map(|a| self.term(a))
            .collect::<Result<Vec<_>, _>>()?;
        if args.len() != sig.params.len() {
            return Err(invalid(
                "domain",
                format!("function `{fname}` arity mismatch"),
            ));
        }
        Ok(Atom {
            predicate: fname,
            args,
        })
    }

    fn literal(&self, e: &Sexp) -> Result<Literal<Term>, ParseError> {
        if e.head() == Some("not") {
            let items = e.as_list().unwrap_or_default();
            if items.len() != 2 {
                return Err(structure(e.pos(), "`not` takes exactly one argument"));
            }
            if let Some(h) = items[1].head() {
                if UNSUPPORTED_FORMULAS.contains(&h) || h == "and" || h == "not" {
                    return Err(unsupported(items[1].pos(), format!("(not ({h} ...))")));
                }
            }
            Ok(Literal::neg(self.atom(&items[1])?))
        } else {
            Ok(Literal::pos(self.atom(e)?))
        }
    }

    fn condition(&self, e: &Sexp, out: &mut Vec<Literal<Term>>) -> Result<(), ParseError> {
        let items = expect_list(e, "condition")?;
        match e.head() {
            None if items.is_empty() => Ok(()),
            Some("and") => {
                for c in &items[1..] {
                    self.condition(c, out)?;
                }
                Ok(())
            }
            Some(h) if UNSUPPORTED_FORMULAS.contains(&h) => Err(unsupported(e.pos(), h)),
            _ => {
                out.push(self.literal(e)?);
                Ok(())
            }
        }
    }

    fn effect(&self, e: &Sexp, out: &mut Effect) -> Result<(), ParseError> {
        let items = expect_list(e, "effect")?;
        match e.head() {
            None if items.is_empty() => Ok(()),
            Some("and") => {
                for c in &items[1..] {
                    self.effect(c, out)?;
                }
                Ok(())
            }
            Some("increase") => {
                if items.len() != 3 {
                    return Err(structure(e.pos(), "`increase` takes two arguments"));
                }
                if out.cost.is_some() {
                    return Err(invalid(
                        "domain",
                        format!("action `{}` has more than one cost effect", self.action),
                    ));
                }
                let function = self.function_term(&items[1])?;
                let amount = match &items[2] {
                    Sexp::Symbol(s, pos) => CostAmount::Constant(
                        s.parse::<u64>()
                            .map_err(|_| unsupported(*pos, format!("non-integer cost `{s}`")))?,
                    ),
                    list => CostAmount::Function(self.function_term(list)?),
                };
                out.cost = Some(CostIncrease { function, amount });
                Ok(())
            }
            Some(h) if UNSUPPORTED_FORMULAS.contains(&h) => Err(unsupported(e.pos(), h)),
            _ => {
                let lit = self.literal(e)?;
                if lit.atom.is_equality() {
                    return Err(structure(e.pos(), "`=` cannot appear in an effect"));
                }
                if lit.positive {
                    out.add.push(lit.atom);
                } else {
                    out.delete.push(lit.atom);
                }
                Ok(())
            }
        }
    }
}

fn parse_action(sec: &Sexp, domain: &Domain) -> Result<ActionSchema, ParseError> {
    let items = expect_list(sec, "action")?;
    let name = expect_name(
        items
            .get(1)
            .ok_or_else(|| structure(sec.pos(), "action without name"))?,
        "action name",
    )?;
    let mut params = Vec::new();
    let mut pre_e = None;
    let mut eff_e = None;
    let mut i = 2;
    while i < items.len() {
        let key = expect_symbol(&items[i], "action keyword")?;
        let val = items
            .get(i + 1)
            .ok_or_else(|| structure(items[i].pos(), format!("`{key}` without value")))?;
        match key {
            ":parameters" => params = typed_list(expect_list(val, ":parameters")?, true)?,
            ":precondition" => pre_e = Some(val),
            ":effect" => eff_e = Some(val),
            ":duration" => return Err(unsupported(items[i].pos(), key)),
            other => {
                return Err(structure(
                    items[i].pos(),
                    format!("unknown action keyword `{other}`"),
                ))
            }
        }
        i += 2;
    }
    check_unique("domain", params.iter().map(|p| &p.name))?;
    for p in &params {
        require_type(domain, &p.ty, &format!("action `{name}`"))?;
    }
    let scope = ActionScope {
        domain,
        params: &params,
        action: &name,
    };
    let mut precondition = Vec::new();
    if let Some(e) = pre_e {
        scope.condition(e, &mut precondition)?;
    }
    let mut effect = Effect::default();
    if let Some(e) = eff_e {
        scope.effect(e, &mut effect)?;
    }
    if let Some(a) = effect.add.iter().find(|a| effect.delete.contains(a)) {
        return Err(invalid(
            "domain",
            format!("action `{name}` both adds and deletes {a}"),
        ));
    }
    Ok(ActionSchema {
        name,
        params,
        precondition,
        effect,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ProblemOptions {
    /// Treat a `(:domain ...)` name that differs from the domain's as an error.
    pub strict_domain_name: bool,
}

/// Parses a problem file and binds it against `domain`.
pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, ParseError> {
    parse_problem_with(text, domain, ProblemOptions::default())
}

pub fn parse_problem_with(
    text: &str,
    domain: &Domain,
    opts: ProblemOptions,
) -> Result<Problem, ParseError> {
    let root = read(text)?;
    let (name, sections) = header(&root, "problem")?;
    let mut problem = Problem {
        name,
        domain_name: domain.name.clone(),
        objects: Vec::new(),
        init: Vec::new(),
        init_values: Vec::new(),
        goal: Vec::new(),
        metric: None,
    };
    let mut seen_domain = false;
    let mut init_e = None;
    let mut goal_e = None;
    for sec in sections {
        let items = expect_list(sec, "problem section")?;
        let key = items
            .first()
            .and_then(Sexp::as_symbol)
            .ok_or_else(|| structure(sec.pos(), "section without keyword"))?;
        let body = &items[1..];
        match key {
            ":domain" => {
                if body.len() != 1 {
                    return Err(structure(sec.pos(), "expected `(:domain <name>)`"));
                }
                problem.domain_name = expect_name(&body[0], "domain name")?;
                seen_domain = true;
            }
            ":requirements" => {}
            ":objects" => problem.objects.extend(typed_list(body, false)?),
            ":init" => init_e = Some(body),
            ":goal" => {
                if body.len() != 1 {
                    return Err(structure(sec.pos(), "expected exactly one goal formula"));
                }
                goal_e = Some(&body[0]);
            }
            ":metric" => {
                let ok = body.len() == 2
                    && body[0].as_symbol() == Some("minimize")
                    && body[1].as_list().is_some_and(|l| l.len() == 1);
                if !ok {
                    return Err(unsupported(sec.pos(), "metric other than (minimize (f))"));
                }
                let f = expect_name(&body[1].as_list().unwrap_or_default()[0], "metric function")?;
                problem.metric = Some(Atom::new(f, Vec::new()));
            }
            ":constraints" => return Err(unsupported(sec.pos(), key)),
            other => {
                return Err(structure(
                    sec.pos(),
                    format!("unknown problem section `{other}`"),
                ))
            }
        }
    }
    if !seen_domain {
        return Err(structure(root.pos(), "problem lacks `(:domain ...)`"));
    }
    if problem.domain_name != domain.name {
        if opts.strict_domain_name {
            return Err(ParseError::DomainMismatch {
                expected: domain.name.clone(),
                found: problem.domain_name.clone(),
            });
        }
        log::warn!(
            "problem `{}` names domain `{}` but is bound against `{}`",
            problem.name,
            problem.domain_name,
            domain.name
        );
    }
    check_unique(
        "problem",
        domain
            .constants
            .iter()
            .chain(&problem.objects)
            .map(|o| &o.name),
    )?;
    for o in &problem.objects {
        if !domain.has_type(&o.ty) {
            return Err(invalid(
                "problem",
                format!("object `{}` has undeclared type `{}`", o.name, o.ty),
            ));
        }
    }

    if let Some(body) = init_e {
        for e in body {
            if e.head() == Some("=") {
                let items = e.as_list().unwrap_or_default();
                if items.len() != 3 {
                    return Err(structure(e.pos(), "expected `(= (f args) value)`"));
                }
                let f = ground_atom(&items[1])?;
                let value = expect_symbol(&items[2], "function value")?;
                let value = value.parse::<u64>().map_err(|_| {
                    unsupported(items[2].pos(), format!("non-integer value `{value}`"))
                })?;
                if domain.function(&f.predicate).is_none() {
                    return Err(ParseError::Binding {
                        atom: f.to_string(),
                        msg: "undeclared function".into(),
                    });
                }
                problem
                    .init_values
                    .push(FunctionValue { function: f, value });
                continue;
            }
            if e.head() == Some("not") {
                return Err(structure(e.pos(), "negative literal in :init"));
            }
            let atom = ground_atom(e)?;
            if !problem.init.contains(&atom) {
                problem.init.push(atom);
            }
        }
    }
    if let Some(g) = goal_e {
        ground_condition(g, &mut problem.goal)?;
    }
    check_problem_bindings(domain, &problem)?;
    Ok(problem)
}

fn ground_atom(e: &Sexp) -> Result<Atom, ParseError> {
    let items = expect_list(e, "ground atom")?;
    let head = items
        .first()
        .ok_or_else(|| structure(e.pos(), "empty atom"))?;
    let pred = expect_symbol(head, "predicate")?;
    if pred != "=" && !super::is_identifier(pred) {
        return Err(structure(head.pos(), format!("illegal predicate `{pred}`")));
    }
    let args = items[1..]
        .iter()
        .map(|a| {
            let s = expect_symbol(a, "object")?;
            if s.starts_with('?') {
                return Err(structure(a.pos(), format!("variable `{s}` in ground atom")));
            }
            expect_name(a, "object name")
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Atom::new(pred, args))
}

fn ground_condition(e: &Sexp, out: &mut Vec<Literal>) -> Result<(), ParseError> {
    let items = expect_list(e, "goal")?;
    match e.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => {
            for c in &items[1..] {
                ground_condition(c, out)?;
            }
            Ok(())
        }
        Some("not") => {
            if items.len() != 2 {
                return Err(structure(e.pos(), "`not` takes exactly one argument"));
            }
            if let Some(h) = items[1].head() {
                if UNSUPPORTED_FORMULAS.contains(&h) || h == "and" || h == "not" {
                    return Err(unsupported(items[1].pos(), format!("(not ({h} ...))")));
                }
            }
            out.push(Literal::neg(ground_atom(&items[1])?));
            Ok(())
        }
        Some(h) if UNSUPPORTED_FORMULAS.contains(&h) => Err(unsupported(e.pos(), h)),
        _ => {
            out.push(Literal::pos(ground_atom(e)?));
            Ok(())
        }
    }
}

/// Checks that every init and goal atom matches a declared predicate and
/// that its arguments are declared objects of compatible types.
pub(crate) fn check_problem_bindings(domain: &Domain, problem: &Problem) -> Result<(), ParseError> {
    let types = problem.object_types(domain);
    let check = |atom: &Atom| -> Result<(), ParseError> {
        let binding = |msg: String| ParseError::Binding {
            atom: atom.to_string(),
            msg,
        };
        if atom.is_equality() {
            if atom.args.len() != 2 {
                return Err(binding("`=` takes two arguments".into()));
            }
            for a in &atom.args {
                if !types.contains_key(a) {
                    return Err(binding(format!("undeclared object `{a}`")));
                }
            }
            return Ok(());
        }
        let sig = domain
            .predicate(&atom.predicate)
            .ok_or_else(|| binding(format!("undeclared predicate `{}`", atom.predicate)))?;
        if sig.params.len() != atom.args.len() {
            return Err(binding(format!(
                "expected {} arguments, got {}",
                sig.params.len(),
                atom.args.len()
            )));
        }
        for (i, (arg, param)) in atom.args.iter().zip(&sig.params).enumerate() {
            let ty = types
                .get(arg)
                .ok_or_else(|| binding(format!("undeclared object `{arg}`")))?;
            if !domain.is_subtype(ty, &param.ty) {
                return Err(binding(format!(
                    "argument {} `{arg}` has type `{ty}`, expected `{}`",
                    i + 1,
                    param.ty
                )));
            }
        }
        Ok(())
    };
    for a in &problem.init {
        if a.is_equality() {
            return Err(ParseError::Binding {
                atom: a.to_string(),
                msg: "`=` in :init".into(),
            });
        }
        check(a)?;
    }
    for l in &problem.goal {
        check(&l.atom)?;
    }
    for v in &problem.init_values {
        let sig = domain
            .function(&v.function.predicate)
            .ok_or_else(|| ParseError::Binding {
                atom: v.function.to_string(),
                msg: "undeclared function".into(),
            })?;
        if sig.params.len() != v.function.args.len() {
            return Err(ParseError::Binding {
                atom: v.function.to_string(),
                msg: "function arity mismatch".into(),
            });
        }
        for a in &v.function.args {
            if !types.contains_key(a) {
                return Err(ParseError::Binding {
                    atom: v.function.to_string(),
                    msg: format!("undeclared object `{a}`"),
                });
            }
        }
    }
    Ok(())
}
