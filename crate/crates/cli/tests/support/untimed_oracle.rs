//! Exhaustive depth-first marking enumerator, written against the plain
//! arc list rather than the library's indexed engine.

use std::collections::{BTreeMap, BTreeSet};

use hpnet_core::{Marking, Net, Verdict};

pub type M = BTreeMap<String, u32>;

fn to_map(m: &Marking) -> M {
    m.iter().map(|(p, c)| (p.to_string(), c)).collect()
}

pub fn enabled(net: &Net, m: &M) -> Vec<String> {
    net.transitions
        .iter()
        .filter(|t| net.arcs.iter().filter(|a| a.target == t.id).all(|a| m.get(&a.source).copied().unwrap_or(0) > 0))
        .map(|t| t.id.clone())
        .collect()
}

pub fn fire(net: &Net, m: &M, t: &str) -> M {
    let mut next = m.clone();
    for a in net.arcs.iter().filter(|a| a.target == t) {
        *next.get_mut(&a.source).unwrap() -= 1;
    }
    for a in net.arcs.iter().filter(|a| a.source == t) {
        *next.entry(a.target.clone()).or_insert(0) += 1;
    }
    next.retain(|_, c| *c > 0);
    next
}

pub struct Enumeration {
    states: BTreeSet<M>,
    /// Some marking exceeded the cap and was not expanded.
    capped: bool,
}

/// All markings reachable from `m0`, not expanding any marking where some
/// place holds more than `cap` tokens.
pub fn enumerate(net: &Net, m0: &Marking, cap: u32) -> Enumeration {
    let mut states = BTreeSet::new();
    let mut capped = false;
    let mut stack = vec![to_map(m0)];
    while let Some(m) = stack.pop() {
        if !states.insert(m.clone()) {
            continue;
        }
        if m.values().any(|&c| c > cap) {
            capped = true;
            continue;
        }
        for t in enabled(net, &m) {
            stack.push(fire(net, &m, &t));
        }
    }
    Enumeration { states, capped }
}

fn is_final(net: &Net, m: &M) -> bool {
    let exit = net.exit.as_deref().unwrap_or_default();
    m.len() == 1 && m.get(exit) == Some(&1)
}

pub fn safe(net: &Net, m0: &Marking, cap: u32) -> Verdict {
    let e = enumerate(net, m0, cap);
    if e.states.iter().any(|m| m.values().any(|&c| c > 1)) {
        Verdict::No
    } else if e.capped {
        Verdict::Unknown
    } else {
        Verdict::Yes
    }
}

pub fn deadlock_free(net: &Net, m0: &Marking, cap: u32) -> Verdict {
    let e = enumerate(net, m0, cap);
    if e.states.iter().any(|m| !is_final(net, m) && enabled(net, m).is_empty()) {
        Verdict::No
    } else if e.capped {
        Verdict::Unknown
    } else {
        Verdict::Yes
    }
}

pub fn proper_completion(net: &Net, cap: u32) -> Verdict {
    let e = enumerate(net, &net.initial_marking(), cap);
    let exit = net.exit.as_deref().unwrap_or_default();
    if e.states.iter().any(|m| m.contains_key(exit) && !is_final(net, m)) {
        Verdict::No
    } else if e.capped {
        Verdict::Unknown
    } else if e.states.iter().any(|m| is_final(net, m)) {
        Verdict::Yes
    } else {
        Verdict::No
    }
}
