mod common;

use std::time::Duration;

use common::{rng, Inst, Step};
use plangen::dpgc::{generate_batch, DpgcConfig, Solver};
use plangen::pddl::{parse_domain, render_domain, render_problem};
use plangen::planner::{external_solve, solve, SearchConfig, SolveOutcome, UnsolvedReason};
use plangen::validator::validate_plan;
use plangen::{fixtures, Outcome};

fn steps(plan: &plangen::TimedPlan) -> Vec<Step> {
    plan.actions()
        .into_iter()
        .map(|(a, args)| Step::Act(a.to_string(), args.iter().map(|n| n.to_string()).collect()))
        .collect()
}

#[test]
fn generated_fixture_plans_validate() {
    let mut total = 0;
    for (name, dtext, ctext) in fixtures::generation_fixtures() {
        let d = parse_domain(dtext).unwrap();
        let cfg = DpgcConfig::from_json(ctext).unwrap();
        let batch = generate_batch(&d, &cfg, 170, 11, &Solver::default()).unwrap();
        for item in &batch.items {
            let plan = item
                .plan()
                .unwrap_or_else(|| panic!("{name} slot {} unsolved", item.slot));
            let r = validate_plan(&d, &item.problem, plan).unwrap();
            assert_eq!(r.outcome, Outcome::Valid, "{name} slot {}", item.slot);
            total += 1;
        }
    }
    assert!(total >= 500);
}

#[test]
fn random_instances_greedy_and_breadth_first() {
    let mut r = rng(3);
    let mut optimal_checked = 0;
    let mut unsolvable = 0;
    for id in 0..400 {
        let mut inst = Inst::random(&mut r, id);
        if id % 3 == 0 {
            inst = inst.with_random_goal(&mut r);
        }
        let (d, p) = inst.parse();
        let reference = inst.optimal_length(10_000);

        let greedy = solve(
            &d,
            &p,
            &SearchConfig {
                seed: id,
                ..Default::default()
            },
        )
        .unwrap();
        match &greedy {
            SolveOutcome::Solved(plan) => {
                assert_eq!(inst.classify(&steps(plan)), Outcome::Valid);
                assert!(matches!(reference, Ok(Some(_)) | Err(_)));
            }
            SolveOutcome::Unsolved(UnsolvedReason::Exhausted) => {
                assert!(
                    matches!(reference, Ok(None) | Err(_)),
                    "missed a plan on {id}"
                );
            }
            other => panic!("unexpected {other:?}"),
        }

        let bfs = solve(&d, &p, &SearchConfig::breadth_first()).unwrap();
        match (reference, &bfs) {
            (Ok(Some(n)), SolveOutcome::Solved(plan)) => {
                assert_eq!(plan.len(), n, "instance {id}");
                assert_eq!(inst.classify(&steps(plan)), Outcome::Valid);
                optimal_checked += 1;
            }
            (Ok(None), SolveOutcome::Unsolved(UnsolvedReason::Exhausted)) => unsolvable += 1,
            (Err(()), _) => {}
            (reference, got) => panic!("instance {id}: reference {reference:?}, planner {got:?}"),
        }
    }
    assert!(optimal_checked >= 200, "{optimal_checked}");
    assert!(unsolvable > 0);
}

#[test]
fn breadth_first_is_optimal_on_fixtures() {
    // ferry with a fixed layout: optimal plans are short enough to enumerate
    let (d, p) = fixtures::ferry();
    let plan = solve(&d, &p, &SearchConfig::breadth_first()).unwrap();
    assert_eq!(plan.plan().unwrap().len(), 3);
}

#[test]
fn stub_external_planner_plans_validate() {
    let dir = tempfile::tempdir().unwrap();
    let d = parse_domain(fixtures::GRIPPER_DOMAIN).unwrap();
    let cfg = DpgcConfig::from_json(fixtures::GRIPPER_DPGC).unwrap();
    let batch = generate_batch(&d, &cfg, 25, 5, &Solver::default()).unwrap();
    let dpath = dir.path().join("domain.pddl");
    std::fs::write(&dpath, render_domain(&d)).unwrap();
    for item in &batch.items {
        let ppath = dir.path().join(format!("p{}.pddl", item.slot));
        std::fs::write(&ppath, render_problem(&item.problem)).unwrap();
        // the stub prints a precomputed bare plan
        let bare: String = item
            .plan()
            .unwrap()
            .steps
            .iter()
            .map(|s| format!("{s}\n"))
            .collect();
        let plan_file = dir.path().join(format!("p{}.plan", item.slot));
        std::fs::write(&plan_file, bare).unwrap();
        let cmd = format!("cat '{}' # {{domain}} {{problem}}", plan_file.display());
        let plan = external_solve(&cmd, &dpath, &ppath, Duration::from_secs(10)).unwrap();
        let r = validate_plan(&d, &item.problem, &plan).unwrap();
        assert_eq!(r.outcome, Outcome::Valid);
        assert_eq!(plan.actions(), item.plan().unwrap().actions());
    }
}

#[test]
fn stub_external_planner_bad_plan_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let dpath = dir.path().join("d.pddl");
    let ppath = dir.path().join("p.pddl");
    std::fs::write(&dpath, fixtures::FERRY_DOMAIN).unwrap();
    std::fs::write(&ppath, fixtures::FERRY_PROBLEM).unwrap();
    let err = external_solve(
        "echo '(board c1 l1)'",
        &dpath,
        &ppath,
        Duration::from_secs(10),
    )
    .unwrap_err();
    assert!(matches!(
        err,
        plangen::planner::ExternalError::InvalidExternalPlan(_)
    ));
    let err = external_solve("exit 4", &dpath, &ppath, Duration::from_secs(10)).unwrap_err();
    assert!(matches!(
        err,
        plangen::planner::ExternalError::ExternalFailure { .. }
    ));
    let err = external_solve("sleep 5", &dpath, &ppath, Duration::from_millis(200)).unwrap_err();
    assert!(matches!(
        err,
        plangen::planner::ExternalError::ExternalFailure { .. }
    ));
}
