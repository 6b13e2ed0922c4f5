//! Complete firing sequences of acyclic nets, and the erasure mapping from
//! flat sequences back to abstract ones.

use std::collections::BTreeSet;

use hpnet_core::Net;

use super::untimed_oracle::{enabled, fire, M};

/// Every firing sequence leading from `{entry: 1}` to `{exit: 1}`.
pub fn complete_sequences(net: &Net) -> BTreeSet<Vec<String>> {
    let exit = net.exit.clone().unwrap();
    let start: M = [(net.entry.clone().unwrap(), 1)].into();
    let mut out = BTreeSet::new();
    let mut stack = vec![(start, Vec::new())];
    while let Some((m, seq)) = stack.pop() {
        if m.len() == 1 && m.get(&exit) == Some(&1) {
            out.insert(seq.clone());
        }
        for t in enabled(net, &m) {
            let mut next = seq.clone();
            next.push(t.clone());
            stack.push((fire(net, &m, &t), next));
        }
    }
    out
}

/// Maps a flat sequence to the abstract level: `t.__in` becomes `t` and
/// every other step inside a refinement (`t.` prefix) is erased.
pub fn erase(seq: &[String], refined: &BTreeSet<String>) -> Vec<String> {
    seq.iter()
        .filter_map(|s| {
            if let Some(t) = s.strip_suffix(".__in").filter(|t| refined.contains(*t)) {
                return Some(t.to_string());
            }
            let inner = refined.iter().any(|t| s.starts_with(&format!("{t}.")));
            (!inner).then(|| s.clone())
        })
        .collect()
}
