//! Interval calculus over workflow-pattern trees and the matching net
//! generator.

use std::fmt;

use serde::Serialize;

use crate::interval::{interval_add, interval_max, TimeInterval};
use crate::net::{Net, Place, PlaceRole, Transition};
use crate::timed::check_schedulability;
use crate::untimed::ExploreLimits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternExpr {
    Leaf { id: String, teb: TimeInterval },
    Seq { first: Box<PatternExpr>, second: Box<PatternExpr>, connector_tec: TimeInterval },
    Par { branches: Vec<PatternExpr> },
    Cond { pre: Box<PatternExpr>, branches: Vec<PatternExpr>, connector_tec: TimeInterval },
    Loop { body: Box<PatternExpr>, k: u64 },
}

impl PatternExpr {
    pub fn leaf(id: impl Into<String>, teb: TimeInterval) -> Self {
        PatternExpr::Leaf { id: id.into(), teb }
    }

    pub fn seq(first: PatternExpr, second: PatternExpr, connector_tec: TimeInterval) -> Self {
        PatternExpr::Seq { first: Box::new(first), second: Box::new(second), connector_tec }
    }

    pub fn par(branches: Vec<PatternExpr>) -> Self {
        PatternExpr::Par { branches }
    }

    pub fn cond(pre: PatternExpr, branches: Vec<PatternExpr>, connector_tec: TimeInterval) -> Self {
        PatternExpr::Cond { pre: Box::new(pre), branches, connector_tec }
    }

    pub fn repeat(body: PatternExpr, k: u64) -> Self {
        PatternExpr::Loop { body: Box::new(body), k }
    }

    pub fn contains_cond(&self) -> bool {
        match self {
            PatternExpr::Leaf { .. } => false,
            PatternExpr::Seq { first, second, .. } => first.contains_cond() || second.contains_cond(),
            PatternExpr::Par { branches } => branches.iter().any(PatternExpr::contains_cond),
            PatternExpr::Cond { .. } => true,
            PatternExpr::Loop { body, .. } => body.contains_cond(),
        }
    }

    pub fn depth(&self) -> usize {
        1 + match self {
            PatternExpr::Leaf { .. } => 0,
            PatternExpr::Seq { first, second, .. } => first.depth().max(second.depth()),
            PatternExpr::Par { branches } => branches.iter().map(PatternExpr::depth).max().unwrap_or(0),
            PatternExpr::Cond { pre, branches, .. } => {
                branches.iter().map(PatternExpr::depth).max().unwrap_or(0).max(pre.depth())
            }
            PatternExpr::Loop { body, .. } => body.depth(),
        }
    }

    /// Structural invariants: ordered intervals, arities of at least two, k ≥ 1.
    pub fn is_valid(&self) -> bool {
        match self {
            PatternExpr::Leaf { teb, .. } => teb.is_ordered(),
            PatternExpr::Seq { first, second, connector_tec } => {
                connector_tec.is_ordered() && first.is_valid() && second.is_valid()
            }
            PatternExpr::Par { branches } => branches.len() >= 2 && branches.iter().all(PatternExpr::is_valid),
            PatternExpr::Cond { pre, branches, connector_tec } => {
                connector_tec.is_ordered()
                    && branches.len() >= 2
                    && pre.is_valid()
                    && branches.iter().all(PatternExpr::is_valid)
            }
            PatternExpr::Loop { body, k } => *k >= 1 && body.is_valid(),
        }
    }
}

impl fmt::Display for PatternExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |items: &[PatternExpr]| items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        match self {
            PatternExpr::Leaf { id, teb } => write!(f, "act({id}, teb={teb})"),
            PatternExpr::Seq { first, second, connector_tec } => {
                write!(f, "seq({first}, {second}, tec={connector_tec})")
            }
            PatternExpr::Par { branches } => write!(f, "par({})", list(branches)),
            PatternExpr::Cond { pre, branches, connector_tec } => {
                write!(f, "cond({pre}, {}, tec={connector_tec})", list(branches))
            }
            PatternExpr::Loop { body, k } => write!(f, "loop({body}, k={k})"),
        }
    }
}

/// The execution-bound interval of a pattern tree.
///
/// Conditional choice uses the componentwise maximum over branches for both
/// bounds, so its lower bound is an envelope rather than the semantic minimum.
pub fn teb_eval(e: &PatternExpr) -> TimeInterval {
    match e {
        PatternExpr::Leaf { teb, .. } => *teb,
        PatternExpr::Seq { first, second, connector_tec } => {
            interval_add(interval_add(teb_eval(first), teb_eval(second)), *connector_tec)
        }
        PatternExpr::Par { branches } => branches.iter().map(teb_eval).fold(TimeInterval::ZERO, interval_max),
        PatternExpr::Cond { pre, branches, connector_tec } => {
            let head = interval_add(teb_eval(pre), *connector_tec);
            branches.iter().map(|b| interval_add(head, teb_eval(b))).fold(TimeInterval::ZERO, interval_max)
        }
        PatternExpr::Loop { body, k } => teb_eval(body).scale(*k),
    }
}

struct Builder {
    net: Net,
    next: usize,
}

struct Fragment {
    entry: String,
    exit: String,
}

impl Builder {
    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn place(&mut self) -> String {
        let id = self.fresh("p");
        self.net.add_place(Place::new(id.clone()));
        id
    }

    /// Silent transition from `from` to `to` with the given firing window.
    fn link(&mut self, prefix: &str, from: &[&str], to: &[&str], window: TimeInterval) {
        let id = self.fresh(prefix);
        self.net.add_transition(Transition::silent(id.clone()).with_window(window));
        for p in from {
            self.net.add_arc(*p, id.clone());
        }
        for p in to {
            self.net.add_arc(id.clone(), *p);
        }
    }

    fn build(&mut self, e: &PatternExpr) -> Fragment {
        match e {
            PatternExpr::Leaf { id, teb } => {
                let (entry, exit) = (self.place(), self.place());
                let t = format!("{}_{id}", self.fresh("t"));
                self.net.add_transition(Transition::new(t.clone()).named(id.clone()).with_window(*teb));
                self.net.add_arc(entry.clone(), t.clone()).add_arc(t, exit.clone());
                Fragment { entry, exit }
            }
            PatternExpr::Seq { first, second, connector_tec } => {
                let a = self.build(first);
                let b = self.build(second);
                self.link("c", &[&a.exit], &[&b.entry], *connector_tec);
                Fragment { entry: a.entry, exit: b.exit }
            }
            PatternExpr::Par { branches } => {
                let (entry, exit) = (self.place(), self.place());
                let frags: Vec<Fragment> = branches.iter().map(|b| self.build(b)).collect();
                let ins: Vec<&str> = frags.iter().map(|f| f.entry.as_str()).collect();
                let outs: Vec<&str> = frags.iter().map(|f| f.exit.as_str()).collect();
                self.link("s", &[&entry], &ins, TimeInterval::ZERO);
                self.link("j", &outs, &[&exit], TimeInterval::ZERO);
                Fragment { entry, exit }
            }
            PatternExpr::Cond { pre, branches, connector_tec } => {
                let head = self.build(pre);
                let decision = self.place();
                self.link("c", &[&head.exit], &[&decision], *connector_tec);
                let exit = self.place();
                for b in branches {
                    let f = self.build(b);
                    self.link("ch", &[&decision], &[&f.entry], TimeInterval::ZERO);
                    self.link("m", &[&f.exit], &[&exit], TimeInterval::ZERO);
                }
                Fragment { entry: head.entry, exit }
            }
            PatternExpr::Loop { body, k } => {
                let first = self.build(body);
                let mut exit = first.exit;
                for _ in 1..*k {
                    let f = self.build(body);
                    self.link("g", &[&exit], &[&f.entry], TimeInterval::ZERO);
                    exit = f.exit;
                }
                Fragment { entry: first.entry, exit }
            }
        }
    }
}

/// Generates a workflow net whose timed completion interval realizes the
/// calculus. Leaves keep their own entry place with the default window so that
/// every leaf's firing window is measured from its enabling; connector
/// intervals sit on silent transitions between fragments.
pub fn pattern_to_net(e: &PatternExpr) -> Net {
    let mut b = Builder { net: Net::new("pattern"), next: 0 };
    let frag = b.build(e);
    for p in &mut b.net.places {
        if p.id == frag.entry {
            p.role = PlaceRole::Entry;
        } else if p.id == frag.exit {
            p.role = PlaceRole::Exit;
        }
    }
    b.net.entry = Some(frag.entry);
    b.net.exit = Some(frag.exit);
    b.net.canonicalize();
    b.net
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsRelation {
    Equal,
    CalculusContainsStatespace,
    Mismatch,
    /// The state space could not be explored within the limits.
    Unknown,
}

impl BoundsRelation {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundsRelation::Equal => "equal",
            BoundsRelation::CalculusContainsStatespace => "calculus_contains_statespace",
            BoundsRelation::Mismatch => "mismatch",
            BoundsRelation::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub calculus: TimeInterval,
    pub statespace: Option<TimeInterval>,
    pub relation: BoundsRelation,
}

/// Compares `teb_eval(e)` with the completion interval of `pattern_to_net(e)`.
pub fn check_bounds_against_oracle(e: &PatternExpr, lim: ExploreLimits) -> BoundsReport {
    let calculus = teb_eval(e);
    let report = check_schedulability(&pattern_to_net(e), None, lim).expect("generated nets are structurally valid");
    let statespace = if report.truncated { None } else { report.completion };
    let relation = match statespace {
        None => BoundsRelation::Unknown,
        Some(s) if s == calculus => BoundsRelation::Equal,
        Some(s) if hi_le(s.hi, calculus.hi) && s.lo <= calculus.lo => BoundsRelation::CalculusContainsStatespace,
        Some(_) => BoundsRelation::Mismatch,
    };
    BoundsReport { calculus, statespace, relation }
}

fn hi_le(a: Option<u64>, b: Option<u64>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => a <= b,
    }
}
