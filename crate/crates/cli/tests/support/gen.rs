//! Seeded random generators for nets, pattern trees and hierarchies.

use hpnet_core::hierarchy::HierarchicalNet;
use hpnet_core::pattern::pattern_to_net;
use hpnet_core::{Marking, Net, PatternExpr, Place, PlaceRole, TimeInterval, Transition, TransitionRef};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

fn window(rng: &mut StdRng, max: u64) -> TimeInterval {
    let a = rng.random_range(0..=max);
    let b = rng.random_range(0..=max);
    TimeInterval::new(a.min(b), a.max(b))
}

fn place(i: usize, n: usize) -> Place {
    let role = match i {
        0 => PlaceRole::Entry,
        _ if i == n - 1 => PlaceRole::Exit,
        _ => PlaceRole::Internal,
    };
    Place::new(format!("p{i}")).with_role(role)
}

/// Arbitrary place/transition net with entry `p0`, exit at the last place,
/// and a start marking of at most two tokens.
pub fn untimed_net(rng: &mut StdRng) -> (Net, Marking) {
    let np = rng.random_range(2..=6);
    let nt = rng.random_range(1..=6);
    let mut net = Net::new("R");
    for i in 0..np {
        net.add_place(place(i, np));
    }
    for t in 0..nt {
        let id = format!("t{t}");
        net.add_transition(Transition::new(&id));
        for p in 0..np {
            if rng.random_bool(0.3) {
                net.add_arc(format!("p{p}"), &id);
            }
            if rng.random_bool(0.3) {
                net.add_arc(&id, format!("p{p}"));
            }
        }
    }
    let mut m0 = Marking::new();
    if rng.random_bool(0.5) {
        m0 = net.initial_marking();
    } else {
        for _ in 0..rng.random_range(1..=2) {
            let p = format!("p{}", rng.random_range(0..np));
            m0.set(&p, m0.get(&p) + 1);
        }
    }
    (net, m0)
}

/// Random pattern tree. `budget` bounds the number of leaves.
pub fn pattern(rng: &mut StdRng, depth: usize, budget: &mut usize, with_cond: bool, max: u64) -> PatternExpr {
    *budget = budget.saturating_sub(1);
    if depth == 0 || *budget == 0 || rng.random_bool(0.3) {
        let id = ["a", "b", "c", "d", "e"].choose(rng).unwrap();
        return PatternExpr::leaf(*id, window(rng, max));
    }
    let kinds = if with_cond { 4 } else { 3 };
    match rng.random_range(0..kinds) {
        0 => {
            let a = pattern(rng, depth - 1, budget, with_cond, max);
            let b = pattern(rng, depth - 1, budget, with_cond, max);
            PatternExpr::seq(a, b, window(rng, max))
        }
        1 => {
            let n = rng.random_range(2..=3);
            PatternExpr::par((0..n).map(|_| pattern(rng, depth - 1, budget, with_cond, max)).collect())
        }
        2 => PatternExpr::repeat(pattern(rng, depth - 1, budget, with_cond, max), rng.random_range(1..=2)),
        _ => {
            let pre = pattern(rng, depth - 1, budget, with_cond, max);
            let n = rng.random_range(2..=3);
            let branches = (0..n).map(|_| pattern(rng, depth - 1, budget, with_cond, max)).collect();
            PatternExpr::cond(pre, branches, window(rng, max))
        }
    }
}

/// Acyclic timed net with finite transition windows and constants at most
/// `max`. Half are perturbed pattern nets, half arbitrary DAGs whose exit
/// place has no consumers.
pub fn timed_net(rng: &mut StdRng, max: u64) -> Net {
    let mut net = if rng.random_bool(0.5) {
        let mut budget = 4;
        pattern_to_net(&pattern(rng, 3, &mut budget, true, max))
    } else {
        dag(rng)
    };
    for p in &mut net.places {
        p.window = match rng.random_range(0..4) {
            0 => Some(window(rng, max)),
            1 => Some(TimeInterval::unbounded(rng.random_range(0..=max))),
            _ => None,
        };
    }
    for t in &mut net.transitions {
        t.window = Some(window(rng, max));
        t.duration = if rng.random_bool(0.3) { rng.random_range(0..=max) } else { 0 };
    }
    net
}

fn dag(rng: &mut StdRng) -> Net {
    let np = rng.random_range(3..=5);
    let nt = rng.random_range(2..=4);
    let mut net = Net::new("D");
    for i in 0..np {
        net.add_place(place(i, np));
    }
    for t in 0..nt {
        let id = format!("t{t}");
        net.add_transition(Transition::new(&id));
        let mut pre: Vec<usize> = (0..np - 1).filter(|_| rng.random_bool(0.35)).collect();
        if pre.is_empty() {
            pre.push(rng.random_range(0..np - 1));
        }
        let top = *pre.iter().max().unwrap();
        let mut post: Vec<usize> = (top + 1..np).filter(|_| rng.random_bool(0.4)).collect();
        if post.is_empty() {
            post.push(rng.random_range(top + 1..np));
        }
        for p in pre {
            net.add_arc(format!("p{p}"), &id);
        }
        for p in post {
            net.add_arc(&id, format!("p{p}"));
        }
    }
    net
}

fn renamed(mut net: Net, name: &str) -> Net {
    net.name = name.to_string();
    net
}

/// Root pattern net with one or two named transitions refined by pattern
/// subnets, keeping the flat net at `max_flat` transitions or fewer.
pub fn two_level(rng: &mut StdRng, max_flat: usize) -> HierarchicalNet {
    loop {
        let mut budget = 3;
        let mut root = renamed(pattern_to_net(&pattern(rng, 2, &mut budget, true, 3)), "Root");
        let named: Vec<String> = root.transitions.iter().filter(|t| !t.is_silent()).map(|t| t.id.clone()).collect();
        let count = rng.random_range(1..=2);
        let picks: Vec<String> = named.choose_multiple(rng, count).cloned().collect();
        let mut h = HierarchicalNet::new(root.clone());
        let mut flat = root.transitions.len();
        for (i, tid) in picks.iter().enumerate() {
            let mut budget = 2;
            let sub = renamed(pattern_to_net(&pattern(rng, 2, &mut budget, true, 3)), &format!("S{i}"));
            flat += sub.transitions.len() + 1;
            root.transition_mut(tid).unwrap().refinable = true;
            h.subnets.insert(sub.name.clone(), sub);
            h.bindings.insert(TransitionRef::new("Root", tid), format!("S{i}"));
        }
        h.root = root;
        if flat <= max_flat {
            return h;
        }
    }
}

const LABELS: [&str; 4] = ["ok", "paid", "x.y", "ready"];

/// Random net exercising every attribute of the concrete syntax, optionally
/// with a bound subnet.
pub fn decorated(rng: &mut StdRng) -> HierarchicalNet {
    let (mut root, _) = untimed_net(rng);
    root.name = "Top".into();
    for p in &mut root.places {
        if rng.random_bool(0.4) {
            p.window = Some(if rng.random_bool(0.5) { window(rng, 20) } else { TimeInterval::unbounded(rng.random_range(0..9)) });
        }
    }
    for t in &mut root.transitions {
        if rng.random_bool(0.5) {
            t.name = Some(["Check in", "say \"hi\"", "a\\b", ""].choose(rng).unwrap().to_string());
        }
        if rng.random_bool(0.3) {
            t.guard = Some("g.ok".into());
        }
        for l in LABELS {
            if rng.random_bool(0.2) {
                t.pre_conditions.insert(l.into());
            }
            if rng.random_bool(0.2) {
                t.post_conditions.insert(l.into());
            }
        }
        if rng.random_bool(0.4) {
            t.window = Some(window(rng, 20));
        }
        if rng.random_bool(0.3) {
            t.duration = rng.random_range(1..=9);
        }
        t.refinable = rng.random_bool(0.2);
    }
    let mut h = HierarchicalNet::new(root);
    if rng.random_bool(0.5) {
        let mut budget = 3;
        let sub = renamed(pattern_to_net(&pattern(rng, 2, &mut budget, true, 5)), "Sub");
        let tid = h.root.transitions[0].id.clone();
        h.root.transitions[0].refinable = true;
        h.bindings.insert(TransitionRef::new("Top", tid), sub.name.clone());
        h.subnets.insert(sub.name.clone(), sub);
    }
    h
}
