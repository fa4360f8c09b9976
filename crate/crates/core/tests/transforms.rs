mod common;

use std::collections::HashSet;

use common::{plan_text, rng, Inst, Step};
use indexmap::IndexMap;
use plangen::pddl::{
    parse_domain, parse_plan, parse_problem, render_domain, render_plan, render_problem,
};
use plangen::transforms::{
    anonymize_tuple, curriculum_expand, decode_plan, encode_plan, SymbolMap,
};
use plangen::{validate, Name, Outcome, TimedPlan};
use rand::Rng;

fn random_identifier(r: &mut impl Rng) -> String {
    const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789-_";
    let mut s = String::new();
    s.push(FIRST[r.gen_range(0..FIRST.len())] as char);
    for _ in 0..r.gen_range(0..8) {
        s.push(REST[r.gen_range(0..REST.len())] as char);
    }
    s
}

fn random_plan(r: &mut impl Rng) -> TimedPlan {
    TimedPlan::from_actions((0..r.gen_range(0..12)).map(|_| {
        let args = (0..r.gen_range(0..5))
            .map(|_| Name::new(random_identifier(r)))
            .collect();
        (Name::new(random_identifier(r)), args)
    }))
}

#[test]
fn codec_round_trips_plan_corpus() {
    let mut r = rng(10);
    for _ in 0..2000 {
        let plan = random_plan(&mut r);
        let compact = encode_plan(&plan);
        let standard = decode_plan(&compact).unwrap();
        let back = parse_plan(&standard).unwrap();
        assert_eq!(back.actions(), plan.actions());
        assert!(back.terminated);
        assert_eq!(encode_plan(&back), compact);
    }
}

#[test]
fn codec_example_pair() {
    let plan = parse_plan("00100: (move truck1 depot1 depot2)\nEND").unwrap();
    assert_eq!(encode_plan(&plan), "move truck1 depot1 depot2");
    let decoded = decode_plan("move truck1 depot1 depot2").unwrap();
    assert_eq!(decoded, "00001: (move truck1 depot1 depot2)\nEND");
    assert_eq!(parse_plan(&decoded).unwrap().actions(), plan.actions());
}

fn values_distinct(m: &IndexMap<Name, Name>) -> bool {
    m.values().collect::<HashSet<_>>().len() == m.len()
}

fn tokens(text: &str) -> HashSet<String> {
    text.split(|c: char| c.is_whitespace() || c == '(' || c == ')')
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn inverse(m: &IndexMap<Name, Name>) -> std::collections::HashMap<&Name, &Name> {
    m.iter().map(|(k, v)| (v, k)).collect()
}

/// Outcome on the anonymized tuple, after checking it reparses and maps back.
fn check_tuple(
    inst: &Inst,
    plan: &[Step],
    r: &mut rand_chacha::ChaCha8Rng,
) -> Option<(Outcome, SymbolMap)> {
    let (d, p) = inst.parse();
    let text = plan_text(plan, r);
    let parsed = parse_plan(&text).ok()?;
    let before = validate(&d, &p, &text).unwrap().outcome;
    let (ad, ap, aplan, map) = match anonymize_tuple(&d, &p, &parsed, 0) {
        Ok(t) => t,
        Err(_) => {
            assert_eq!(before, Outcome::Malformed);
            return None;
        }
    };
    // reparse from text
    let dt = render_domain(&ad);
    let pt = render_problem(&ap);
    let lt = render_plan(&aplan);
    let d2 = parse_domain(&dt).unwrap();
    let p2 = parse_problem(&pt, &d2).unwrap();
    assert_eq!(d2, ad);
    assert_eq!(p2, ap);
    let after = validate(&d2, &p2, &lt).unwrap().outcome;
    assert_eq!(before, after, "outcome changed\n{dt}\n{pt}\n{lt}");

    // bijective per category, and no original symbol leaks
    for m in [&map.actions, &map.predicates, &map.objects, &map.types] {
        assert!(values_distinct(m));
    }
    let all = tokens(&format!("{dt}\n{pt}\n{lt}"));
    for m in [&map.actions, &map.predicates, &map.objects, &map.types] {
        for k in m.keys() {
            assert!(!all.contains(k.as_str()), "{k} survived");
        }
    }
    let inv_a = inverse(&map.actions);
    let inv_o = inverse(&map.objects);
    let restored: Vec<_> = aplan
        .actions()
        .into_iter()
        .map(|(a, args)| {
            (
                (*inv_a[&a]).clone(),
                args.iter().map(|o| (*inv_o[o]).clone()).collect::<Vec<_>>(),
            )
        })
        .collect();
    assert_eq!(restored, parsed.actions());
    assert_eq!(anonymize_tuple(&d, &p, &parsed, 99).unwrap().3, map);
    Some((after, map))
}

#[test]
fn anonymization_preserves_outcomes_over_corpus() {
    let mut r = rng(11);
    let mut checked = 0;
    let mut outcomes = HashSet::new();
    let mut id = 0;
    while checked < 1500 {
        let inst = Inst::random(&mut r, id);
        id += 1;
        for plan in inst.candidate_plans(&mut r) {
            if let Some((o, _)) = check_tuple(&inst, &plan, &mut r) {
                outcomes.insert(o);
                checked += 1;
            }
        }
    }
    assert_eq!(outcomes.len(), 4, "{outcomes:?}");
}

#[test]
fn tuples_sharing_vocabulary_get_independent_maps() {
    let mut r = rng(12);
    let mut differing = 0;
    for id in 0..300 {
        let inst = Inst::random(&mut r, id);
        let (d, p) = inst.parse();
        let plan = parse_plan(&plan_text(&inst.witness, &mut r)).unwrap();
        let (.., map_a) = anonymize_tuple(&d, &p, &plan, 0).unwrap();

        // same vocabulary, objects declared in reverse order
        let mut q = p.clone();
        q.objects.reverse();
        let (.., map_b) = anonymize_tuple(&d, &q, &plan, 0).unwrap();
        let (.., map_b_after_a) = {
            let _ = anonymize_tuple(&d, &p, &plan, 0).unwrap();
            anonymize_tuple(&d, &q, &plan, 0).unwrap()
        };
        assert_eq!(map_b, map_b_after_a);

        // each map numbers objects in its own first-occurrence order
        let order_b: Vec<&Name> = map_b.objects.keys().collect();
        let text_b = render_problem(&q);
        let positions: Vec<usize> = order_b
            .iter()
            .map(|o| {
                text_b
                    .find(&format!(" {o} "))
                    .or_else(|| text_b.find(&format!(" {o})")))
                    .unwrap_or(usize::MAX)
            })
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
        if map_a.objects != map_b.objects {
            differing += 1;
        }
    }
    assert!(differing > 50, "{differing}");
}

#[test]
fn curriculum_schedule_statistics() {
    let n = 10_000;
    let ids: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    for seed in 0..10 {
        let items = curriculum_expand(&ids, 1, seed, seed % 2 == 0);
        assert_eq!(items.len(), n);
        assert_eq!(items[0].probability(), 0.0);
        assert!(!items[0].anonymize);
        assert_eq!(items[n - 1].probability(), 1.0);
        assert!(items[n - 1].anonymize);
        let frac = items.iter().filter(|i| i.anonymize).count() as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 0.02, "seed {seed}: {frac}");
        let decile = |k: usize| {
            items[k * n / 10..(k + 1) * n / 10]
                .iter()
                .filter(|i| i.anonymize)
                .count()
        };
        assert!(decile(0) < decile(9), "seed {seed}");
        for k in 0..10 {
            let expected = (k as f64 + 0.5) / 10.0;
            let got = decile(k) as f64 / (n / 10) as f64;
            assert!(
                (got - expected).abs() < 0.06,
                "seed {seed} decile {k}: {got}"
            );
        }
    }
}

#[test]
fn curriculum_multiple_copies() {
    let ids: Vec<String> = (0..50).map(|i| format!("t{i}")).collect();
    let items = curriculum_expand(&ids, 3, 4, false);
    assert_eq!(items.len(), 150);
    for id in &ids {
        assert_eq!(items.iter().filter(|i| &i.source_id == id).count(), 3);
    }
    assert_eq!(items, curriculum_expand(&ids, 3, 4, false));
    let single = curriculum_expand(&ids[..1], 1, 4, true);
    assert_eq!(single[0].probability(), 0.0);
    assert!(!single[0].anonymize);
}
