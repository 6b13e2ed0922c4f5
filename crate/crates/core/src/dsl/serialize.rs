use std::fmt::Write;

use crate::hierarchy::{HierarchicalNet, TransitionRef};
use crate::net::{Net, PlaceRole};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn labels(set: &std::collections::BTreeSet<String>) -> String {
    format!("{{{}}}", set.iter().cloned().collect::<Vec<_>>().join(", "))
}

fn write_net(out: &mut String, net: &Net, bindings: &HierarchicalNet) {
    let net = net.canonical();
    let _ = writeln!(out, "net {} {{", net.name);
    for p in &net.places {
        let _ = write!(out, "  place {}", p.id);
        let is_entry = net.entry.as_deref() == Some(p.id.as_str());
        let is_exit = net.exit.as_deref() == Some(p.id.as_str());
        match (is_entry || p.role == PlaceRole::Entry, is_exit || p.role == PlaceRole::Exit) {
            (true, true) => out.push_str(" entry exit"),
            (true, false) => out.push_str(" entry"),
            (false, true) => out.push_str(" exit"),
            (false, false) => {}
        }
        if let Some(w) = p.window {
            let _ = write!(out, " tc {w}");
        }
        out.push_str(";\n");
    }
    for t in &net.transitions {
        let _ = write!(out, "  trans {}", t.id);
        if let Some(name) = &t.name {
            let _ = write!(out, " {}", quote(name));
        }
        if let Some(g) = &t.guard {
            let _ = write!(out, " guard {g}");
        }
        if !t.pre_conditions.is_empty() {
            let _ = write!(out, " pre {}", labels(&t.pre_conditions));
        }
        if !t.post_conditions.is_empty() {
            let _ = write!(out, " post {}", labels(&t.post_conditions));
        }
        if let Some(w) = t.window {
            let _ = write!(out, " tc {w}");
        }
        if t.duration > 0 {
            let _ = write!(out, " td {}", t.duration);
        }
        match bindings.bindings.get(&TransitionRef::new(&net.name, &t.id)) {
            Some(target) => {
                let _ = write!(out, " refine {target}");
            }
            None if t.refinable => out.push_str(" refinable"),
            None => {}
        }
        out.push_str(";\n");
    }
    for a in &net.arcs {
        let _ = writeln!(out, "  arc {} -> {};", a.source, a.target);
    }
    out.push_str("}\n");
}

/// Canonical text for a single net: nodes sorted by id, one declaration per line.
pub fn serialize_net(net: &Net) -> String {
    let mut out = String::new();
    write_net(&mut out, net, &HierarchicalNet::new(Net::new("")));
    out
}

/// Canonical text for a hierarchical net: the root first, then subnets by name.
pub fn serialize_hierarchy(h: &HierarchicalNet) -> String {
    let mut out = String::new();
    write_net(&mut out, &h.root, h);
    for sub in h.subnets.values() {
        out.push('\n');
        write_net(&mut out, sub, h);
    }
    out
}
