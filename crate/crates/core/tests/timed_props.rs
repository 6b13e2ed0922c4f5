use std::collections::BTreeSet;

use hpnet_core::interval::TimeInterval;
use hpnet_core::pattern::{pattern_to_net, PatternExpr};
use hpnet_core::timed::{check_schedulability, timed_state_graph};
use hpnet_core::untimed::reachability_graph;
use hpnet_core::{ExploreLimits, Marking, Net, Place, PlaceRole, Transition, Verdict};
use proptest::prelude::*;

/// Untimed nets over places `p0..pn`, entry `p0`, exit the last place.
fn untimed_net() -> impl Strategy<Value = Net> {
    (2..5usize).prop_flat_map(|places| {
        let arcs = (prop::collection::btree_set(0..places, 1..=2), prop::collection::btree_set(0..places, 0..=2));
        prop::collection::vec(arcs, 1..5).prop_map(move |ts| {
            let mut n = Net::new("random");
            for p in 0..places {
                let role = match p {
                    0 => PlaceRole::Entry,
                    p if p == places - 1 => PlaceRole::Exit,
                    _ => PlaceRole::Internal,
                };
                n.add_place(Place::new(format!("p{p}")).with_role(role));
            }
            for (i, (pre, post)) in ts.into_iter().enumerate() {
                let t = format!("t{i}");
                n.add_transition(Transition::new(t.clone()));
                for p in pre {
                    n.add_arc(format!("p{p}"), t.clone());
                }
                for p in post {
                    n.add_arc(t.clone(), format!("p{p}"));
                }
            }
            n
        })
    })
}

fn pattern() -> impl Strategy<Value = PatternExpr> {
    let iv = (0..4u64, 0..4u64).prop_map(|(a, b)| TimeInterval::new(a.min(b), a.max(b)));
    let leaf = ("[a-c]", iv.clone()).prop_map(|(id, teb)| PatternExpr::leaf(id, teb));
    leaf.prop_recursive(3, 10, 3, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), iv.clone()).prop_map(|(a, b, tec)| PatternExpr::seq(a, b, tec)),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(PatternExpr::par),
            (inner.clone(), prop::collection::vec(inner, 2..=2), iv.clone()).prop_map(|(p, bs, tec)| PatternExpr::cond(p, bs, tec)),
        ]
    })
}

fn lim() -> ExploreLimits {
    ExploreLimits::new(50_000, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erasing_time_gives_untimed_markings(n in untimed_net()) {
        let untimed = reachability_graph(&n, &n.initial_marking(), lim()).unwrap();
        let timed = timed_state_graph(&n, lim()).unwrap();
        prop_assume!(!untimed.truncated && !timed.truncated);
        let a: BTreeSet<Marking> = untimed.states.iter().cloned().collect();
        let b: BTreeSet<Marking> = (0..timed.states.len()).map(|s| timed.marking(s)).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn widening_a_transition_window_keeps_schedulability(e in pattern(), pick in any::<prop::sample::Index>(), lower in any::<bool>()) {
        let mut n = pattern_to_net(&e);
        let before = check_schedulability(&n, None, lim()).unwrap();
        prop_assume!(before.schedulable == Verdict::Yes);
        let t = pick.get_mut(&mut n.transitions);
        let w = t.effective_window();
        t.window = Some(if lower { TimeInterval { lo: w.lo.saturating_sub(1), hi: w.hi } } else { TimeInterval { lo: w.lo, hi: w.hi.map(|h| h + 1) } });
        let after = check_schedulability(&n, None, lim()).unwrap();
        prop_assert_eq!(after.schedulable, Verdict::Yes);
        let (b, a) = (before.completion.unwrap(), after.completion.unwrap());
        prop_assert!(a.lo <= b.lo);
        prop_assert!(b.hi.zip(a.hi).is_none_or(|(bh, ah)| ah >= bh));
    }

    #[test]
    fn reports_are_deterministic(e in pattern()) {
        let n = pattern_to_net(&e);
        prop_assert_eq!(check_schedulability(&n, Some(10), lim()).unwrap(), check_schedulability(&n, Some(10), lim()).unwrap());
    }
}
