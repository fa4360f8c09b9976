use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context as _, Result};
use rayon::prelude::*;
use serde_json::json;

use plangen::cost::{self, CostParams};
use plangen::dataset::{self, DatasetTuple, Encoding, Provenance, Ratios, WhitespaceCounter};
use plangen::dpgc::{self, DpgcConfig, Solver};
use plangen::pddl::{
    parse_domain, parse_plan, parse_problem, parse_problem_with, render_domain, render_plan,
    render_problem, ProblemOptions,
};
use plangen::pipeline;
use plangen::planner::{self, Heuristic, SearchConfig, SolveOutcome, Strategy};
use plangen::reward;
use plangen::transforms::{anonymize_tuple, decode_plan, encode_plan};
use plangen::{atomic, seed, validator, Domain, Problem};

use crate::exit::{NEGATIVE, OK};
use crate::*;

pub struct Context {
    pub seed: Option<u64>,
    pub verbose: u8,
}

impl Context {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

fn read(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(p) => atomic::write_file(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout"),
    }
}

fn load_domain(path: &Path) -> Result<Domain> {
    parse_domain(&read(path)?).with_context(|| format!("parsing domain {}", path.display()))
}

fn load_pair(domain: &Path, problem: &Path) -> Result<(Domain, Problem)> {
    let d = load_domain(domain)?;
    let p = parse_problem(&read(problem)?, &d)
        .with_context(|| format!("parsing problem {}", problem.display()))?;
    Ok((d, p))
}

fn secs(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| anyhow::anyhow!("invalid timeout {s}"))
}

pub fn validate(ctx: &Context, a: ValidateArgs) -> Result<u8> {
    let d = load_domain(&a.domain)?;
    let opts = ProblemOptions {
        strict_domain_name: a.strict_domain_name,
    };
    let p = parse_problem_with(&read(&a.problem)?, &d, opts)
        .with_context(|| format!("parsing problem {}", a.problem.display()))?;
    if p.domain_name != d.name {
        log::warn!(
            "problem names domain `{}`, loaded `{}`",
            p.domain_name,
            d.name
        );
    }
    let plan_text = read(&a.plan)?;
    let report = validator::validate(&d, &p, &plan_text)?;
    if ctx.verbose > 0 {
        println!("{}", report.verbose());
    } else {
        println!("{}", report.outcome);
    }
    if let Some(summary) = report.failure_summary() {
        eprintln!("{summary}");
    }

    if let Some(cmd) = &a.external_val {
        if a.plan.as_os_str() == "-" {
            bail!("--external-val needs the plan as a file, not stdin");
        }
        let external =
            planner::external_validate(cmd, &a.domain, &a.problem, &a.plan, secs(a.timeout)?)?;
        if external != report.outcome.is_valid() {
            eprintln!(
                "external validator disagrees: it says {}, internal outcome is {}",
                if external { "valid" } else { "not valid" },
                report.outcome
            );
        } else {
            log::info!("external validator agrees");
        }
    }
    Ok(if report.outcome.is_valid() {
        OK
    } else {
        NEGATIVE
    })
}

fn search_config(
    strategy: &str,
    heuristic: Option<&str>,
    max_exp: u64,
    max_len: usize,
    seed: u64,
) -> Result<SearchConfig> {
    let strategy = match strategy {
        "greedy-best-first" | "gbfs" => Strategy::GreedyBestFirst,
        "breadth-first" | "bfs" => Strategy::BreadthFirst,
        s => bail!("unknown strategy `{s}`; use greedy-best-first or breadth-first"),
    };
    let heuristic = match heuristic {
        Some("goal-count") => Heuristic::GoalCount,
        Some("zero") => Heuristic::Zero,
        Some(h) => bail!("unknown heuristic `{h}`; use goal-count or zero"),
        None if strategy == Strategy::BreadthFirst => Heuristic::Zero,
        None => Heuristic::GoalCount,
    };
    Ok(SearchConfig {
        strategy,
        heuristic,
        max_expansions: max_exp,
        max_plan_length: max_len,
        seed,
        ..SearchConfig::default()
    })
}

pub fn plan(ctx: &Context, a: PlanArgs) -> Result<u8> {
    let plan = if let Some(cmd) = &a.external {
        planner::external_solve(cmd, &a.domain, &a.problem, secs(a.timeout)?)?
    } else {
        let (d, p) = load_pair(&a.domain, &a.problem)?;
        let cfg = search_config(
            &a.strategy,
            a.heuristic.as_deref(),
            a.max_expansions,
            a.max_plan_length,
            ctx.seed(),
        )?;
        match planner::solve(&d, &p, &cfg)? {
            SolveOutcome::Solved(plan) => plan,
            SolveOutcome::Unsolved(reason) => {
                eprintln!("no plan found ({reason:?})");
                return Ok(NEGATIVE);
            }
        }
    };
    log::info!("plan with {} steps", plan.len());
    emit(a.output.as_deref(), &render_plan(&plan))?;
    Ok(OK)
}

pub fn gen(ctx: &Context, a: GenArgs) -> Result<u8> {
    let d = load_domain(&a.domain)?;
    let cfg = DpgcConfig::from_json(&read(&a.dpgc)?)
        .with_context(|| format!("parsing generation config {}", a.dpgc.display()))?;
    let diags = dpgc::validate_dpgc(&cfg, &d);
    for diag in &diags {
        eprintln!("{}: {diag}", a.dpgc.display());
    }
    if a.check {
        return Ok(if diags.is_empty() { OK } else { exit::USAGE });
    }
    if a.count == 0 {
        bail!("--count must be positive");
    }
    let seed = ctx.seed();
    let dpgc_name = a.dpgc.display().to_string();
    let mut files: Vec<(String, String)> = vec![("domain.pddl".into(), render_domain(&d))];
    let config = json!({
        "domain": a.domain.display().to_string(),
        "dpgc": dpgc_name,
        "count": a.count,
        "seed": seed,
        "solve": !a.no_solve,
        "external": a.external,
        "generation": cfg,
    });

    if a.no_solve {
        let slots: Vec<usize> = (0..a.count).collect();
        let problems: Result<Vec<Problem>, _> = slots
            .par_iter()
            .map(|&k| dpgc::generate_problem(&d, &cfg, seed::derive(seed, &[k as u64])))
            .collect();
        for (k, p) in problems?.iter().enumerate() {
            files.push((format!("problem_{k:04}.pddl"), render_problem(p)));
        }
        files.push((
            "summary.json".into(),
            serde_json::to_string_pretty(&json!({ "config": config, "problems": a.count }))?,
        ));
        atomic::write_dir(&a.out_dir, &files)
            .with_context(|| format!("writing {}", a.out_dir.display()))?;
        println!("{} problems written to {}", a.count, a.out_dir.display());
        return Ok(OK);
    }

    let (solver, planner_id) = match &a.external {
        Some(cmd) => (
            Solver::External {
                command: cmd.clone(),
                timeout: secs(a.timeout)?,
            },
            "external".to_string(),
        ),
        None => (Solver::default(), "internal:greedy-best-first".to_string()),
    };
    let batch = dpgc::generate_batch(&d, &cfg, a.count, seed, &solver)?;
    let mut tuples = String::new();
    let mut unsolved = 0;
    for item in &batch.items {
        let k = item.slot;
        files.push((
            format!("problem_{k:04}.pddl"),
            render_problem(&item.problem),
        ));
        let Some(plan) = item.plan() else {
            unsolved += 1;
            continue;
        };
        files.push((format!("plan_{k:04}.txt"), render_plan(plan) + "\n"));
        let provenance = Provenance {
            dpgc: dpgc_name.clone(),
            seed: item.seed,
            planner: planner_id.clone(),
        };
        let t = pipeline::make_tuple(&d, &item.problem, plan, Encoding::Standard, provenance)?;
        tuples.push_str(&serde_json::to_string(&t)?);
        tuples.push('\n');
    }
    files.push(("tuples.jsonl".into(), tuples));
    let summary = json!({
        "config": config,
        "problems": batch.items.len(),
        "solved": batch.items.len() - unsolved,
        "unsolved": unsolved,
        "duplicates": batch.duplicates(),
        "rejected-draws": batch.rejected,
    });
    files.push((
        "summary.json".into(),
        serde_json::to_string_pretty(&summary)?,
    ));
    atomic::write_dir(&a.out_dir, &files)
        .with_context(|| format!("writing {}", a.out_dir.display()))?;
    println!(
        "{} problems ({} solved, {} duplicates, {} rejected draws) written to {}",
        batch.items.len(),
        batch.items.len() - unsolved,
        batch.duplicates(),
        batch.rejected,
        a.out_dir.display()
    );
    Ok(OK)
}

pub fn anonymize(ctx: &Context, a: AnonymizeArgs) -> Result<u8> {
    let (d, p) = load_pair(&a.domain, &a.problem)?;
    let plan = parse_plan(&read(&a.plan)?)
        .with_context(|| format!("parsing plan {}", a.plan.display()))?;
    let (d2, p2, plan2, map) = anonymize_tuple(&d, &p, &plan, ctx.seed())?;
    let files = [
        ("domain.pddl", render_domain(&d2)),
        ("problem.pddl", render_problem(&p2)),
        ("plan.txt", render_plan(&plan2) + "\n"),
    ];
    atomic::write_dir(&a.out_dir, &files)
        .with_context(|| format!("writing {}", a.out_dir.display()))?;
    if let Some(path) = &a.map_out {
        atomic::write_file(path, serde_json::to_string_pretty(&map)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "{} actions, {} predicates, {} objects, {} types renamed",
        map.actions.len(),
        map.predicates.len(),
        map.objects.len(),
        map.types.len()
    );
    Ok(OK)
}

pub fn encode(a: EncodeArgs) -> Result<u8> {
    let plan = parse_plan(&read(&a.plan)?).context("parsing plan")?;
    emit(a.output.as_deref(), &encode_plan(&plan))?;
    Ok(OK)
}

pub fn decode(a: DecodeArgs) -> Result<u8> {
    match decode_plan(&read(&a.compact)?) {
        Ok(text) => {
            emit(a.output.as_deref(), &text)?;
            Ok(OK)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(NEGATIVE)
        }
    }
}

fn read_tuples(dir: &Path) -> Result<Vec<DatasetTuple>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "jsonl"));
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        for (i, line) in read(&path)?.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let t: DatasetTuple = serde_json::from_str(line)
                .with_context(|| format!("{}:{}", path.display(), i + 1))?;
            if t.expected_id() != t.id {
                bail!(
                    "{}:{}: tuple content does not hash to id {}",
                    path.display(),
                    i + 1,
                    t.id
                );
            }
            out.push(t);
        }
    }
    Ok(out)
}

pub fn assemble(ctx: &Context, a: AssembleArgs) -> Result<u8> {
    let tuples = read_tuples(&a.in_dir)?;
    let ratios = Ratios::parse(&a.ratios)?;
    let splits = dataset::assemble(&tuples, ratios, ctx.seed())?;
    let config = json!({
        "in-dir": a.in_dir.display().to_string(),
        "ratios": ratios.as_array(),
        "seed": ctx.seed(),
    });
    dataset::write_dataset_with(&a.out, &splits, &tuples, Some(config), &[])?;
    println!(
        "{} tuples ({} duplicates dropped): train {}, validation {}, test {}",
        splits.len(),
        splits.dedup_log.len(),
        splits.train.len(),
        splits.validation.len(),
        splits.test.len()
    );
    Ok(OK)
}

pub fn stats(a: StatsArgs) -> Result<u8> {
    if a.counter != "whitespace" {
        bail!(
            "unknown token counter `{}`; available: whitespace",
            a.counter
        );
    }
    let (_, tuples) = dataset::read_dataset(&a.dataset)?;
    let stats = dataset::token_stats(&tuples, a.limit, &WhitespaceCounter)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&stats)?);
        return Ok(OK);
    }
    println!("counter {}, limit {}", stats.counter, stats.limit);
    println!(
        "{:<24} {:>8} {:>10} {:>8}",
        "domain", "tuples", "over-limit", "longest"
    );
    for (name, t) in &stats.per_domain {
        println!(
            "{name:<24} {:>8} {:>10} {:>8}",
            t.tuples, t.over_limit, t.longest
        );
    }
    Ok(OK)
}

/// Blank-line separated blocks.
fn split_candidates(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !cur.is_empty() {
                out.push(cur.join("\n"));
                cur.clear();
            }
        } else {
            cur.push(line);
        }
    }
    if !cur.is_empty() {
        out.push(cur.join("\n"));
    }
    out
}

pub fn score(a: ScoreArgs) -> Result<u8> {
    let (d, p) = load_pair(&a.domain, &a.problem)?;
    let candidates = split_candidates(&read(&a.candidates)?);
    if candidates.is_empty() {
        bail!("no candidates in {}", a.candidates.display());
    }
    let id = a.tuple_id.clone().unwrap_or_else(|| {
        a.problem
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let group = reward::score_candidates(&d, &p, &id, &candidates, a.epsilon)?;
    println!(
        "{:>5} {:<20} {:>7} {:>10}",
        "index", "outcome", "reward", "advantage"
    );
    let mut lines = String::new();
    for (r, adv) in group.records.iter().zip(&group.advantages) {
        println!(
            "{:>5} {:<20} {:>7.2} {:>10.4}",
            r.candidate_index,
            r.outcome.to_string(),
            r.reward,
            adv
        );
        let mut v = serde_json::to_value(r)?;
        v["advantage"] = json!(adv);
        lines.push_str(&serde_json::to_string(&v)?);
        lines.push('\n');
    }
    if let Some(path) = &a.jsonl {
        atomic::write_file(path, lines).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(OK)
}

fn load_params(path: &Path) -> Result<CostParams> {
    let p: CostParams = serde_json::from_str(&read(path)?)
        .with_context(|| format!("parsing cost parameters {}", path.display()))?;
    let defaulted = p.defaulted();
    if !defaulted.is_empty() {
        log::warn!(
            "{}: unit cost assumed for {}",
            path.display(),
            defaulted.join(", ")
        );
    }
    Ok(p)
}

pub fn cost(a: CostArgs) -> Result<u8> {
    let params = load_params(&a.params)?;
    let rl = match &a.rl_params {
        Some(p) => load_params(p)?,
        None => params.clone(),
    };
    if a.compare {
        let c = cost::compare(&params, &rl, a.e_max)?;
        if a.json {
            println!("{}", serde_json::to_string_pretty(&c)?);
        } else {
            println!(
                "{}\n{}\ndelta {:.4}\n{}",
                c.planner, c.rl, c.delta, c.narrative
            );
        }
        return Ok(OK);
    }
    let planner = cost::planner_total(&params)?;
    let rl = cost::rl_total(&rl)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&json!([planner, rl]))?);
    } else {
        println!("{planner}\n{rl}");
    }
    Ok(OK)
}

pub fn pipeline(ctx: &Context, a: PipelineArgs) -> Result<u8> {
    let (mut cfg, base) = pipeline::load_config(&a.config)?;
    if let Some(s) = ctx.seed {
        cfg.seed = s;
    }
    let report = pipeline::run_pipeline(&cfg, &base, &a.out)?;
    for s in &report.sources {
        println!(
            "{}: {} tuples from {} slots ({} rejected draws, {} duplicates)",
            s.domain, s.tuples, s.slots, s.rejected_draws, s.duplicates
        );
    }
    println!(
        "train {}, validation {}, test {}; {} plans validated; written to {}",
        report.train,
        report.validation,
        report.test,
        report.valid_plans,
        a.out.display()
    );
    Ok(OK)
}
