//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every function takes and returns plain strings; structured results are
//! JSON so the page can `JSON.parse` them.

use serde_json::json;
use wasm_bindgen::prelude::*;

use plangen::dpgc::{generate_batch, DpgcConfig, Solver};
use plangen::pddl::{
    parse_domain, parse_plan, parse_problem, render_domain, render_plan, render_problem,
};
use plangen::transforms::{anonymize_tuple, encode_plan};
use plangen::{validate, Domain, Problem};

fn pair(domain: &str, problem: &str) -> Result<(Domain, Problem), String> {
    let d = parse_domain(domain).map_err(|e| format!("domain: {e}"))?;
    let p = parse_problem(problem, &d).map_err(|e| format!("problem: {e}"))?;
    Ok((d, p))
}

/// Validates a plan. Returns `{outcome, reward, summary, report, atoms}`
/// where `atoms` is the state size before each executed step followed by
/// the final state size.
#[wasm_bindgen]
pub fn validate_plan(domain: &str, problem: &str, plan: &str) -> Result<String, String> {
    let (d, p) = pair(domain, problem)?;
    let r = validate(&d, &p, plan).map_err(|e| e.to_string())?;
    let mut atoms: Vec<usize> = r.trace.iter().map(|t| t.pre_state_atoms).collect();
    if r.outcome != plangen::Outcome::PreconditionFailure
        && r.outcome != plangen::Outcome::Malformed
    {
        atoms.push(r.final_state.atoms.len());
    }
    Ok(json!({
        "outcome": r.outcome.to_string(),
        "reward": plangen::reward::reward(r.outcome),
        "summary": r.failure_summary(),
        "report": r.verbose(),
        "atoms": atoms,
    })
    .to_string())
}

/// Draws one problem from a generation config and solves it. Returns
/// `{problem, plan}` texts.
#[wasm_bindgen]
pub fn generate(domain: &str, dpgc: &str, seed: u32) -> Result<String, String> {
    let d = parse_domain(domain).map_err(|e| format!("domain: {e}"))?;
    let cfg = DpgcConfig::from_json(dpgc).map_err(|e| format!("config: {e}"))?;
    let batch =
        generate_batch(&d, &cfg, 1, seed.into(), &Solver::default()).map_err(|e| e.to_string())?;
    let item = &batch.items[0];
    Ok(json!({
        "problem": render_problem(&item.problem),
        "plan": item.plan().map(render_plan),
    })
    .to_string())
}

/// Anonymizes a tuple and encodes its plan compactly. Returns
/// `{domain, problem, plan, compact, map}`.
#[wasm_bindgen]
pub fn anonymize(domain: &str, problem: &str, plan: &str) -> Result<String, String> {
    let (d, p) = pair(domain, problem)?;
    let plan = parse_plan(plan).map_err(|e| format!("plan: {e}"))?;
    let (d2, p2, plan2, map) = anonymize_tuple(&d, &p, &plan, 0).map_err(|e| e.to_string())?;
    Ok(json!({
        "domain": render_domain(&d2),
        "problem": render_problem(&p2),
        "plan": render_plan(&plan2),
        "compact": encode_plan(&plan2),
        "map": map,
    })
    .to_string())
}

/// The toy ferry domain, problem and generation config the page starts with.
#[wasm_bindgen]
pub fn examples() -> String {
    use plangen::fixtures::*;
    json!({
        "domain": FERRY_DOMAIN,
        "problem": FERRY_PROBLEM,
        "plan": FERRY_PLAN_VALID,
        "dpgc": FERRY_DPGC,
    })
    .to_string()
}
