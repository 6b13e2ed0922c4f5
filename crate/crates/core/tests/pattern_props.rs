use hpnet_core::interval::TimeInterval;
use hpnet_core::pattern::{check_bounds_against_oracle, pattern_to_net, teb_eval, BoundsRelation, PatternExpr};
use hpnet_core::untimed::check_wellformed_workflow;
use hpnet_core::ExploreLimits;
use proptest::prelude::*;

fn interval(max: u64) -> impl Strategy<Value = TimeInterval> {
    (0..=max, 0..=max).prop_map(|(a, b)| TimeInterval::new(a.min(b), a.max(b)))
}

fn tree(with_cond: bool) -> impl Strategy<Value = PatternExpr> {
    let leaf = ("[a-e]", interval(4)).prop_map(|(id, teb)| PatternExpr::leaf(id, teb));
    leaf.prop_recursive(3, 12, 3, move |inner| {
        let mut options = vec![
            (inner.clone(), inner.clone(), interval(2)).prop_map(|(a, b, tec)| PatternExpr::seq(a, b, tec)).boxed(),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(PatternExpr::par).boxed(),
            (inner.clone(), 1..=2u64).prop_map(|(b, k)| PatternExpr::repeat(b, k)).boxed(),
        ];
        if with_cond {
            options.push(
                (inner.clone(), prop::collection::vec(inner, 2..=3), interval(2))
                    .prop_map(|(p, bs, tec)| PatternExpr::cond(p, bs, tec))
                    .boxed(),
            );
        }
        prop::strategy::Union::new(options)
    })
}

fn lim() -> ExploreLimits {
    ExploreLimits::new(200_000, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cond_free_trees_agree_exactly(e in tree(false)) {
        let r = check_bounds_against_oracle(&e, lim());
        prop_assert_eq!(r.relation, BoundsRelation::Equal, "{} calculus {} statespace {:?}", e, r.calculus, r.statespace);
    }

    #[test]
    fn calculus_never_underestimates_worst_case(e in tree(true)) {
        let r = check_bounds_against_oracle(&e, lim());
        prop_assert!(matches!(r.relation, BoundsRelation::Equal | BoundsRelation::CalculusContainsStatespace), "{} {:?}", e, r);
    }

    #[test]
    fn generated_nets_are_workflows(e in tree(true)) {
        prop_assert!(check_wellformed_workflow(&pattern_to_net(&e)).passed());
    }

    #[test]
    fn loop_scales(e in tree(true), k in 1..6u64) {
        let body = teb_eval(&e);
        prop_assert_eq!(teb_eval(&PatternExpr::repeat(e.clone(), 1)), body);
        let looped = teb_eval(&PatternExpr::repeat(e, k));
        prop_assert_eq!(looped.lo, k * body.lo);
        prop_assert_eq!(looped.hi, body.hi.map(|h| k * h));
        prop_assert!(looped.is_ordered());
    }
}
