//! Small domains shipped with the crate, used by tests, the CLI examples and
//! the browser demo.

use crate::pddl::{parse_domain, parse_problem, Domain, Problem};

pub const FERRY_DOMAIN: &str = include_str!("../fixtures/ferry/domain.pddl");
pub const FERRY_PROBLEM: &str = include_str!("../fixtures/ferry/problem.pddl");
pub const FERRY_PLAN_VALID: &str = include_str!("../fixtures/ferry/plan-valid.txt");
pub const FERRY_PLAN_NOGOAL: &str = include_str!("../fixtures/ferry/plan-nogoal.txt");
pub const FERRY_PLAN_PRECONDITION: &str = include_str!("../fixtures/ferry/plan-precondition.txt");
pub const FERRY_PLAN_MALFORMED: &str = include_str!("../fixtures/ferry/plan-malformed.txt");
pub const FERRY_DPGC: &str = include_str!("../fixtures/ferry/dpgc.json");

pub const FERRY_ROUTES_DOMAIN: &str = include_str!("../fixtures/ferry-routes/domain.pddl");
pub const FERRY_ROUTES_UNREACHABLE: &str =
    include_str!("../fixtures/ferry-routes/problem-unreachable.pddl");

pub const BLOCKSWORLD_DOMAIN: &str = include_str!("../fixtures/blocksworld/domain.pddl");
pub const BLOCKSWORLD_DPGC: &str = include_str!("../fixtures/blocksworld/dpgc.json");

pub const GRIPPER_DOMAIN: &str = include_str!("../fixtures/gripper/domain.pddl");
pub const GRIPPER_DPGC: &str = include_str!("../fixtures/gripper/dpgc.json");

/// The toy ferry domain with its one-car, two-location problem.
pub fn ferry() -> (Domain, Problem) {
    let d = parse_domain(FERRY_DOMAIN).expect("ferry fixture parses");
    let p = parse_problem(FERRY_PROBLEM, &d).expect("ferry problem parses");
    (d, p)
}

/// Every shipped domain with its generation config, by name.
pub fn generation_fixtures() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("ferry", FERRY_DOMAIN, FERRY_DPGC),
        ("blocksworld", BLOCKSWORLD_DOMAIN, BLOCKSWORLD_DPGC),
        ("gripper", GRIPPER_DOMAIN, GRIPPER_DPGC),
    ]
}
