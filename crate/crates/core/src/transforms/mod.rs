//! Representation transforms: per-tuple symbol anonymization, the
//! curriculum schedule over a stacked dataset, and the compact plan codec.

mod anonymize;
mod codec;
mod curriculum;

pub use anonymize::{anonymize_tuple, InconsistentTuple, SymbolMap, ANON_DOMAIN, ANON_PROBLEM};
pub use codec::{decode_plan, encode_plan, DecodeFailure};
pub use curriculum::{anonymize_draw, curriculum_expand, CurriculumItem};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, *};
    use crate::pddl::{
        parse_domain, parse_plan, parse_problem, render_domain, render_plan, render_problem,
    };
    use crate::validator::validate;

    #[test]
    fn ferry_symbols_follow_first_occurrence() {
        let (d, p) = fixtures::ferry();
        let plan = parse_plan(FERRY_PLAN_VALID).unwrap();
        let (ad, ap, aplan, map) = anonymize_tuple(&d, &p, &plan, 0).unwrap();
        assert_eq!(map.actions["board"].as_str(), "a_0");
        assert_eq!(map.predicates["at"].as_str(), "p_0");
        assert_eq!(map.objects["c1"].as_str(), "o_0");
        assert_eq!(map.objects["l1"].as_str(), "o_1");
        assert_eq!(map.types["car"].as_str(), "t_0");
        assert_eq!(aplan.steps[0].to_string(), "(a_0 o_0 o_1)");

        let d2 = parse_domain(&render_domain(&ad)).unwrap();
        assert_eq!(d2, ad);
        let p2 = parse_problem(&render_problem(&ap), &d2).unwrap();
        assert_eq!(p2, ap);
        let r = validate(&d2, &p2, &render_plan(&aplan)).unwrap();
        assert!(r.outcome.is_valid());
        assert!(!render_domain(&ad).contains("ferry"));

        let again = anonymize_tuple(&d, &p, &plan, 99).unwrap();
        assert_eq!(again.3, map);
    }

    #[test]
    fn objectless_tuple() {
        let d = parse_domain(
            "(define (domain sw) (:predicates (on)) (:action flip :parameters () :effect (on)))",
        )
        .unwrap();
        let p =
            parse_problem("(define (problem x) (:domain sw) (:init) (:goal (on)))", &d).unwrap();
        let plan = parse_plan("1: (flip)").unwrap();
        let (_, _, _, map) = anonymize_tuple(&d, &p, &plan, 0).unwrap();
        assert!(map.objects.is_empty());
        assert_eq!(map.actions["flip"].as_str(), "a_0");
    }

    #[test]
    fn unknown_plan_symbol_is_inconsistent() {
        let (d, p) = fixtures::ferry();
        let plan = parse_plan("1: (fly c1 l1)").unwrap();
        assert!(anonymize_tuple(&d, &p, &plan, 0).is_err());
        let plan = parse_plan("1: (board c9 l1)").unwrap();
        assert!(anonymize_tuple(&d, &p, &plan, 0).is_err());
    }

    #[test]
    fn schedule_endpoints() {
        let items = curriculum_expand(&["t".to_string()], 3, 5, false);
        let ps: Vec<f64> = items.iter().map(|i| i.probability()).collect();
        assert_eq!(ps, vec![0.0, 0.5, 1.0]);
        assert!(!items[0].anonymize);
        assert!(items[2].anonymize);
        let one = curriculum_expand(&["t".to_string()], 1, 5, false);
        assert_eq!(one[0].probability(), 0.0);
        assert!(!one[0].anonymize);
        let five = curriculum_expand(&["t".to_string()], 5, 5, false);
        assert_eq!(five[2].probability(), 0.5);
    }

    #[test]
    fn codec_examples() {
        let plan = parse_plan("00100: (move truck1 depot1 depot2)\nEND").unwrap();
        assert_eq!(encode_plan(&plan), "move truck1 depot1 depot2");
        assert_eq!(
            decode_plan("move truck1 depot1 depot2").unwrap(),
            "00001: (move truck1 depot1 depot2)\nEND"
        );
        assert_eq!(decode_plan("").unwrap(), "END");
        assert_eq!(encode_plan(&parse_plan("END").unwrap()), "");
        assert_eq!(
            encode_plan(&parse_plan(FERRY_PLAN_VALID).unwrap()),
            "board c1 l1\nsail l1 l2\ndebark c1 l2"
        );
        assert_eq!(decode_plan("a b\n\n(c d)").unwrap_err().line, 3);
    }
}
