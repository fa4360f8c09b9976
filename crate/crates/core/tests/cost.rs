use plangen::cost::{
    compare, planner_total, rl_total, Cheaper, CostError, CostExpr, CostFunctions, CostParams,
    Monomial, DEFAULT_E_MAX,
};
use rand::Rng;

fn mono(coef: f64, x: f64, y: f64, log_x: f64) -> Monomial {
    Monomial { coef, x, y, log_x }
}

struct Draw {
    params: CostParams,
    // closed forms of the same cost functions, written out by hand
    c_plan: f64,
    c_gen: f64,
    c_val: f64,
    c_lm: f64,
    c_up: f64,
}

impl Draw {
    fn planner(&self, n: f64) -> f64 {
        self.c_plan * n * n * n.log2()
    }
    fn generation(&self, n: f64) -> f64 {
        self.c_gen * n
    }
    fn validation(&self, n: f64, l: f64) -> f64 {
        self.c_val * n * l
    }
    fn lm(&self, p: f64, t: f64) -> f64 {
        self.c_lm * p * t * t
    }
    fn update(&self, p: f64, t: f64) -> f64 {
        self.c_up * p * t
    }

    fn planner_total(&self) -> (f64, f64) {
        let p = &self.params;
        let mut data = 0.0;
        let mut train = 0.0;
        for i in 0..p.sizes.len() {
            data += self.generation(p.sizes[i]) + self.planner(p.sizes[i]);
            train += self.lm(p.parameters, p.tokens[i]) + self.update(p.parameters, p.tokens[i]);
        }
        (data, p.epochs as f64 * train)
    }

    fn rl_total(&self) -> (f64, f64) {
        let p = &self.params;
        let mut data = 0.0;
        let mut train = 0.0;
        for i in 0..p.sizes.len() {
            data += self.generation(p.sizes[i]);
            train += self.lm(p.parameters, p.tokens[i])
                + self.validation(p.sizes[i], p.plan_lengths[i])
                + self.update(p.parameters, p.tokens[i]);
        }
        (data, p.epochs as f64 * p.rollouts as f64 * train)
    }
}

fn random_draw(r: &mut impl Rng) -> Draw {
    let n = r.gen_range(1..20);
    let (c_plan, c_gen, c_val, c_lm, c_up) = (
        r.gen_range(0.0..10.0),
        r.gen_range(0.0..2.0),
        r.gen_range(0.0..3.0),
        r.gen_range(0.0..1e-3),
        r.gen_range(0.0..1e-2),
    );
    let params = CostParams {
        sizes: (0..n).map(|_| r.gen_range(2.0..200.0)).collect(),
        plan_lengths: (0..n).map(|_| r.gen_range(1.0..100.0)).collect(),
        tokens: (0..n).map(|_| r.gen_range(50.0..4000.0)).collect(),
        epochs: r.gen_range(0..20),
        rollouts: r.gen_range(1..16),
        parameters: r.gen_range(0.1..8.0),
        costs: CostFunctions {
            planner: Some(CostExpr::Poly {
                poly: vec![mono(c_plan, 2.0, 0.0, 1.0)],
            }),
            generation: Some(CostExpr::Poly {
                poly: vec![mono(c_gen, 1.0, 0.0, 0.0)],
            }),
            validation: Some(CostExpr::Poly {
                poly: vec![mono(c_val, 1.0, 1.0, 0.0)],
            }),
            language_model: Some(CostExpr::Poly {
                poly: vec![mono(c_lm, 1.0, 2.0, 0.0)],
            }),
            update: Some(CostExpr::Poly {
                poly: vec![mono(c_up, 1.0, 1.0, 0.0)],
            }),
        },
    };
    Draw {
        params,
        c_plan,
        c_gen,
        c_val,
        c_lm,
        c_up,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn totals_match_hand_evaluated_closed_forms() {
    let mut r = plangen::seed::rng(8);
    for _ in 0..100 {
        let d = random_draw(&mut r);
        let a = planner_total(&d.params).unwrap();
        let (data, train) = d.planner_total();
        assert!(close(a.data_generation, data) && close(a.training, train));
        assert!(close(a.total, data + train));
        let b = rl_total(&d.params).unwrap();
        let (data, train) = d.rl_total();
        assert!(close(b.data_generation, data) && close(b.training, train));
        assert!(close(b.total, data + train));
    }
}

#[test]
fn single_rollout_without_validation_cost_matches_training_terms() {
    let mut r = plangen::seed::rng(9);
    for _ in 0..100 {
        let mut d = random_draw(&mut r);
        d.params.rollouts = 1;
        d.params.costs.validation = Some(CostExpr::Constant(0.0));
        let a = planner_total(&d.params).unwrap();
        let b = rl_total(&d.params).unwrap();
        assert!(close(a.training, b.training));
    }
}

#[test]
fn totals_are_monotone() {
    let mut r = plangen::seed::rng(10);
    for _ in 0..100 {
        let d = random_draw(&mut r);
        let base_a = planner_total(&d.params).unwrap().total;
        let base_b = rl_total(&d.params).unwrap().total;
        let mut p = d.params.clone();
        match r.gen_range(0..5) {
            0 => p.epochs += 1,
            1 => p.rollouts += 1,
            2 => {
                let i = r.gen_range(0..p.sizes.len());
                p.sizes[i] *= 1.5;
            }
            3 => {
                let i = r.gen_range(0..p.tokens.len());
                p.tokens[i] += 10.0;
            }
            _ => p.parameters *= 2.0,
        }
        assert!(planner_total(&p).unwrap().total >= base_a);
        assert!(rl_total(&p).unwrap().total >= base_b);
    }
}

#[test]
fn comparison_examples() {
    let mut planner = CostParams::uniform(10, 5.0, 5.0, 100.0, 1, 3);
    planner.costs.planner = Some(CostExpr::Constant(100.0));
    let cmp = compare(&planner, &planner, DEFAULT_E_MAX).unwrap();
    assert_eq!(cmp.cheaper, Cheaper::VerifierReward);
    assert!(cmp.rl.total < cmp.planner.total);
    // the rl training term grows faster in E, so it eventually costs more
    assert!(cmp.break_even_epochs.is_some());

    let mut heavy = CostParams::uniform(10, 5.0, 5.0, 100.0, 1, 3);
    heavy.costs.validation = Some(CostExpr::Constant(1e6));
    let cmp = compare(&heavy, &heavy, DEFAULT_E_MAX).unwrap();
    assert_eq!(cmp.cheaper, Cheaper::PlannerBased);

    let mut zero = CostParams::uniform(3, 1.0, 1.0, 1.0, 2, 2);
    zero.costs = CostFunctions {
        planner: Some(CostExpr::Constant(0.0)),
        generation: Some(CostExpr::Constant(0.0)),
        validation: Some(CostExpr::Constant(0.0)),
        language_model: Some(CostExpr::Constant(0.0)),
        update: Some(CostExpr::Constant(0.0)),
    };
    let cmp = compare(&zero, &zero, DEFAULT_E_MAX).unwrap();
    assert_eq!(cmp.delta, 0.0);
    assert_eq!(cmp.cheaper, Cheaper::Equal);

    let other = CostParams::uniform(4, 1.0, 1.0, 1.0, 1, 1);
    assert!(matches!(
        compare(&zero, &other, 10),
        Err(CostError::IncompatibleParams(3, 4))
    ));
}

#[test]
fn break_even_is_the_first_crossing() {
    let mut r = plangen::seed::rng(11);
    for _ in 0..50 {
        let d = random_draw(&mut r);
        let cmp = compare(&d.params, &d.params, 200).unwrap();
        let exceeds = |e: u64| {
            let p = CostParams {
                epochs: e,
                ..d.params.clone()
            };
            rl_total(&p).unwrap().total > planner_total(&p).unwrap().total
        };
        match cmp.break_even_epochs {
            Some(e) => {
                assert!(exceeds(e));
                assert!((0..e).all(|k| !exceeds(k)));
            }
            None => assert!((0..=200).all(|k| !exceeds(k))),
        }
    }
}

#[test]
fn params_json_forms() {
    let p: CostParams = serde_json::from_str(
        r#"{"sizes": [1, 2], "plan-lengths": [3, 4], "tokens": [5, 6], "epochs": 2,
            "costs": {"planner": {"table": [[0, 0], [2, 10]]}, "validation": 0.5}}"#,
    )
    .unwrap();
    assert_eq!(p.rollouts, 1);
    let a = planner_total(&p).unwrap();
    // planner table at n=1 and n=2: 5 + 10; unit generation
    assert_eq!(a.items["planner"], 15.0);
    assert_eq!(a.items["generation"], 2.0);
    assert!(p.defaulted().contains(&"generation"));
    let bad: CostParams = serde_json::from_str(
        r#"{"sizes": [1], "plan-lengths": [1, 2], "tokens": [1], "epochs": 1}"#,
    )
    .unwrap();
    assert!(matches!(planner_total(&bad), Err(CostError::Invalid(_))));
}
