use plangen_web::{anonymize, examples, generate, validate_plan};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn round_trip_through_the_page_operations() {
    let ex = parse(&examples());
    let (d, p, plan, cfg) = (
        ex["domain"].as_str().unwrap(),
        ex["problem"].as_str().unwrap(),
        ex["plan"].as_str().unwrap(),
        ex["dpgc"].as_str().unwrap(),
    );

    let v = parse(&validate_plan(d, p, plan).unwrap());
    assert_eq!(v["outcome"], "Valid");
    assert_eq!(v["reward"], 1.0);
    assert_eq!(v["atoms"].as_array().unwrap().len(), 4);

    let g = parse(&generate(d, cfg, 9).unwrap());
    let v = parse(
        &validate_plan(
            d,
            g["problem"].as_str().unwrap(),
            g["plan"].as_str().unwrap(),
        )
        .unwrap(),
    );
    assert_eq!(v["outcome"], "Valid");
    assert_eq!(generate(d, cfg, 9).unwrap(), generate(d, cfg, 9).unwrap());

    let a = parse(&anonymize(d, p, plan).unwrap());
    let v = parse(
        &validate_plan(
            a["domain"].as_str().unwrap(),
            a["problem"].as_str().unwrap(),
            a["plan"].as_str().unwrap(),
        )
        .unwrap(),
    );
    assert_eq!(v["outcome"], "Valid");
    assert_eq!(a["compact"], "a_0 o_0 o_1\na_1 o_1 o_2\na_2 o_0 o_2");
}

#[test]
fn failures_are_reported_not_thrown() {
    let ex = parse(&examples());
    let (d, p) = (
        ex["domain"].as_str().unwrap(),
        ex["problem"].as_str().unwrap(),
    );
    let v = parse(&validate_plan(d, p, "00001: (sail l1 l2)\n00002: (board c1 l1)\nEND").unwrap());
    assert_eq!(v["outcome"], "PreconditionFailure");
    assert_eq!(v["atoms"].as_array().unwrap().len(), 2);
    assert!(v["summary"].as_str().unwrap().contains("step 2"));
    assert!(validate_plan("(define", p, "")
        .unwrap_err()
        .starts_with("domain:"));
    assert!(generate(d, "{}", 0).is_err());
}
