//! Net model: places (conditions), transitions (actions), arcs (flow) and
//! markings (process state), with structural validation and the untimed
//! token game.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::TimeInterval;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("`{0}` is not a transition")]
    NotATransition(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("net `{net}` is structurally invalid: {report}")]
    Invalid { net: String, report: ValidationReport },
}

impl NetError {
    pub fn code(&self) -> &'static str {
        match self {
            NetError::UnknownNode(_) => "UNKNOWN_NODE",
            NetError::NotATransition(_) => "NOT_A_TRANSITION",
            NetError::NotEnabled(_) => "NOT_ENABLED",
            NetError::Invalid { .. } => "INVALID_NET",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceRole {
    Internal,
    Entry,
    Exit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Place {
    pub id: String,
    pub role: PlaceRole,
    /// Consumability window relative to token arrival. `None` means `[0, inf]`.
    pub window: Option<TimeInterval>,
}

impl Place {
    pub fn new(id: impl Into<String>) -> Self {
        Place { id: id.into(), role: PlaceRole::Internal, window: None }
    }

    pub fn with_role(mut self, role: PlaceRole) -> Self {
        self.role = role;
        self
    }

    pub fn with_window(mut self, window: TimeInterval) -> Self {
        self.window = Some(window);
        self
    }

    pub fn effective_window(&self) -> TimeInterval {
        self.window.unwrap_or(TimeInterval::ANY)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub id: String,
    /// Service name; `None` is the empty label of a purely structural step.
    pub name: Option<String>,
    /// Uninterpreted guard label. Guarded transitions are treated as
    /// nondeterministically enabled by every analysis.
    pub guard: Option<String>,
    /// Declared precondition labels, used by the condition-alteration check.
    pub pre_conditions: BTreeSet<String>,
    /// Declared postcondition labels.
    pub post_conditions: BTreeSet<String>,
    /// Firing window relative to enabling. `None` means `[0, 0]`.
    pub window: Option<TimeInterval>,
    /// Firing duration: outputs appear this many time units after firing.
    pub duration: u64,
    pub refinable: bool,
}

impl Transition {
    pub fn new(id: impl Into<String>) -> Self {
        Transition {
            id: id.into(),
            name: None,
            guard: None,
            pre_conditions: BTreeSet::new(),
            post_conditions: BTreeSet::new(),
            window: None,
            duration: 0,
            refinable: false,
        }
    }

    /// A zero-time structural transition with the empty label.
    pub fn silent(id: impl Into<String>) -> Self {
        Transition::new(id).with_window(TimeInterval::ZERO)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_window(mut self, window: TimeInterval) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_duration(mut self, duration: u64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_guard(mut self, guard: impl Into<String>) -> Self {
        self.guard = Some(guard.into());
        self
    }

    pub fn refinable(mut self) -> Self {
        self.refinable = true;
        self
    }

    pub fn effective_window(&self) -> TimeInterval {
        self.window.unwrap_or(TimeInterval::ZERO)
    }

    pub fn is_silent(&self) -> bool {
        self.name.is_none()
    }

    pub fn has_timing(&self) -> bool {
        self.window.is_some() || self.duration > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub source: String,
    pub target: String,
}

impl Arc {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Arc { source: source.into(), target: target.into() }
    }
}

/// A single-level net. Fields are public so arbitrary candidates can be
/// built and then checked with [`validate_structure`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Net {
    pub name: String,
    pub places: Vec<Place>,
    pub transitions: Vec<Transition>,
    pub arcs: Vec<Arc>,
    pub entry: Option<String>,
    pub exit: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Place,
    Transition,
}

impl Net {
    pub fn new(name: impl Into<String>) -> Self {
        Net {
            name: name.into(),
            places: Vec::new(),
            transitions: Vec::new(),
            arcs: Vec::new(),
            entry: None,
            exit: None,
        }
    }

    /// Adds a place, recording it as the net's entry or exit when its role says so.
    pub fn add_place(&mut self, place: Place) -> &mut Self {
        match place.role {
            PlaceRole::Entry => self.entry = Some(place.id.clone()),
            PlaceRole::Exit => self.exit = Some(place.id.clone()),
            PlaceRole::Internal => {}
        }
        self.places.push(place);
        self
    }

    pub fn add_transition(&mut self, transition: Transition) -> &mut Self {
        self.transitions.push(transition);
        self
    }

    pub fn add_arc(&mut self, source: impl Into<String>, target: impl Into<String>) -> &mut Self {
        self.arcs.push(Arc::new(source, target));
        self
    }

    pub fn place(&self, id: &str) -> Option<&Place> {
        self.places.iter().find(|p| p.id == id)
    }

    pub fn transition(&self, id: &str) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.id == id)
    }

    pub fn transition_mut(&mut self, id: &str) -> Option<&mut Transition> {
        self.transitions.iter_mut().find(|t| t.id == id)
    }

    pub fn node_kind(&self, id: &str) -> Option<NodeKind> {
        if self.place(id).is_some() {
            Some(NodeKind::Place)
        } else if self.transition(id).is_some() {
            Some(NodeKind::Transition)
        } else {
            None
        }
    }

    /// Sorts places, transitions and arcs by id so that structurally equal
    /// nets compare equal with `==`.
    pub fn canonicalize(&mut self) {
        self.places.sort_by(|a, b| a.id.cmp(&b.id));
        self.transitions.sort_by(|a, b| a.id.cmp(&b.id));
        self.arcs.sort();
    }

    pub fn canonical(&self) -> Net {
        let mut n = self.clone();
        n.canonicalize();
        n
    }

    /// Equality up to declaration order.
    pub fn structurally_eq(&self, other: &Net) -> bool {
        self.canonical() == other.canonical()
    }

    /// The marking `{entry: 1}`.
    pub fn initial_marking(&self) -> Marking {
        let mut m = Marking::new();
        if let Some(entry) = &self.entry {
            m.set(entry, 1);
        }
        m
    }

    /// The proper-completion marking `{exit: 1}`.
    pub fn final_marking(&self) -> Marking {
        let mut m = Marking::new();
        if let Some(exit) = &self.exit {
            m.set(exit, 1);
        }
        m
    }
}

/// Token counts per place. Places absent from the map hold zero tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Marking(BTreeMap<String, u32>);

impl Marking {
    pub fn new() -> Self {
        Marking(BTreeMap::new())
    }

    pub fn get(&self, place: &str) -> u32 {
        self.0.get(place).copied().unwrap_or(0)
    }

    pub fn set(&mut self, place: &str, count: u32) {
        if count == 0 {
            self.0.remove(place);
        } else {
            self.0.insert(place.to_string(), count);
        }
    }

    pub fn total(&self) -> u64 {
        self.0.values().map(|&c| u64::from(c)).sum()
    }

    pub fn max_count(&self) -> u32 {
        self.0.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(p, &c)| (p.as_str(), c))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, u32)> for Marking {
    fn from_iter<I: IntoIterator<Item = (S, u32)>>(iter: I) -> Self {
        let mut m = Marking::new();
        for (p, c) in iter {
            let p = p.into();
            let total = m.get(&p) + c;
            m.set(&p, total);
        }
        m
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}:{c}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    EmptyNet,
    DuplicateId,
    UnknownNode,
    ArcShape,
    DuplicateArc,
    MultipleEntry,
    MultipleExit,
    MissingEntry,
    MissingExit,
    RoleMismatch,
    IntervalOrder,
    IntervalNotStrict,
    UnboundedInterval,
}

impl ViolationCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationCode::EmptyNet => "EMPTY_NET",
            ViolationCode::DuplicateId => "DUPLICATE_ID",
            ViolationCode::UnknownNode => "UNKNOWN_NODE",
            ViolationCode::ArcShape => "ARC_SHAPE",
            ViolationCode::DuplicateArc => "DUPLICATE_ARC",
            ViolationCode::MultipleEntry => "MULTIPLE_ENTRY",
            ViolationCode::MultipleExit => "MULTIPLE_EXIT",
            ViolationCode::MissingEntry => "MISSING_ENTRY",
            ViolationCode::MissingExit => "MISSING_EXIT",
            ViolationCode::RoleMismatch => "ROLE_MISMATCH",
            ViolationCode::IntervalOrder => "INTERVAL_ORDER",
            ViolationCode::IntervalNotStrict => "INTERVAL_NOT_STRICT",
            ViolationCode::UnboundedInterval => "UNBOUNDED_INTERVAL",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    /// Node id the violation is attached to; the net name for net-level issues.
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} at `{}`: {}", v.code, v.location, v.message)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Require `lo < hi` on every explicit interval and reject unbounded ones.
    pub strict_intervals: bool,
}

pub fn validate_structure(net: &Net) -> ValidationReport {
    validate_structure_with(net, ValidationOptions::default())
}

pub fn validate_structure_with(net: &Net, opts: ValidationOptions) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |code, location: &str, message: String| {
        out.push(Violation { code, location: location.to_string(), message });
    };

    if net.places.is_empty() && net.transitions.is_empty() {
        push(ViolationCode::EmptyNet, &net.name, "net has no places and no transitions".into());
    }

    let mut kinds: HashMap<&str, NodeKind> = HashMap::new();
    for p in &net.places {
        if kinds.insert(&p.id, NodeKind::Place).is_some() {
            push(ViolationCode::DuplicateId, &p.id, format!("id `{}` is declared more than once", p.id));
        }
    }
    for t in &net.transitions {
        if kinds.insert(&t.id, NodeKind::Transition).is_some() {
            push(ViolationCode::DuplicateId, &t.id, format!("id `{}` is declared more than once", t.id));
        }
    }

    let mut seen_arcs = BTreeSet::new();
    for a in &net.arcs {
        let (s, t) = (kinds.get(a.source.as_str()), kinds.get(a.target.as_str()));
        for (end, kind) in [(&a.source, s), (&a.target, t)] {
            if kind.is_none() {
                push(ViolationCode::UnknownNode, end, format!("arc {} -> {} references unknown node `{end}`", a.source, a.target));
            }
        }
        if let (Some(s), Some(t)) = (s, t) {
            if s == t {
                push(ViolationCode::ArcShape, &a.source, format!("arc {} -> {} connects two nodes of the same kind", a.source, a.target));
            }
        }
        if !seen_arcs.insert((&a.source, &a.target)) {
            push(ViolationCode::DuplicateArc, &a.source, format!("arc {} -> {} is declared more than once", a.source, a.target));
        }
    }

    let entries: Vec<&Place> = net.places.iter().filter(|p| p.role == PlaceRole::Entry).collect();
    let exits: Vec<&Place> = net.places.iter().filter(|p| p.role == PlaceRole::Exit).collect();
    if entries.len() > 1 {
        push(ViolationCode::MultipleEntry, &entries[1].id, format!("{} places have the entry role", entries.len()));
    }
    if exits.len() > 1 {
        push(ViolationCode::MultipleExit, &exits[1].id, format!("{} places have the exit role", exits.len()));
    }

    // A single place may serve as both entry and exit; it then carries the entry role.
    let shared = net.entry.is_some() && net.entry == net.exit;
    match &net.entry {
        None => push(ViolationCode::MissingEntry, &net.name, "net has no entry place".into()),
        Some(e) => match net.place(e) {
            None => push(ViolationCode::UnknownNode, e, format!("entry `{e}` is not a place")),
            Some(p) if p.role != PlaceRole::Entry => {
                push(ViolationCode::RoleMismatch, e, format!("entry place `{e}` does not have the entry role"))
            }
            _ => {}
        },
    }
    match &net.exit {
        None => push(ViolationCode::MissingExit, &net.name, "net has no exit place".into()),
        Some(x) => match net.place(x) {
            None => push(ViolationCode::UnknownNode, x, format!("exit `{x}` is not a place")),
            Some(p) if !shared && p.role != PlaceRole::Exit => {
                push(ViolationCode::RoleMismatch, x, format!("exit place `{x}` does not have the exit role"))
            }
            _ => {}
        },
    }
    for p in &net.places {
        let stray = match p.role {
            PlaceRole::Entry => net.entry.as_deref() != Some(p.id.as_str()),
            PlaceRole::Exit => net.exit.as_deref() != Some(p.id.as_str()),
            PlaceRole::Internal => false,
        };
        if stray && entries.len() <= 1 && exits.len() <= 1 {
            push(ViolationCode::RoleMismatch, &p.id, format!("place `{}` has role {:?} but is not the net's {:?}", p.id, p.role, p.role));
        }
    }

    let windows = net
        .places
        .iter()
        .filter_map(|p| p.window.map(|w| (&p.id, w)))
        .chain(net.transitions.iter().filter_map(|t| t.window.map(|w| (&t.id, w))));
    for (id, w) in windows {
        if !w.is_ordered() {
            push(ViolationCode::IntervalOrder, id, format!("interval {w} has lo > hi"));
        } else if opts.strict_intervals {
            if !w.is_bounded() {
                push(ViolationCode::UnboundedInterval, id, format!("interval {w} is unbounded"));
            } else if !w.is_strict() {
                push(ViolationCode::IntervalNotStrict, id, format!("interval {w} is not strict (lo < hi required)"));
            }
        }
    }

    out.sort_by(|a, b| a.location.cmp(&b.location).then(a.code.cmp(&b.code)));
    ValidationReport { violations: out }
}

fn check_node(net: &Net, node: &str) -> Result<(), NetError> {
    net.node_kind(node).map(|_| ()).ok_or_else(|| NetError::UnknownNode(node.to_string()))
}

/// Sources of arcs into `node`, sorted and deduplicated.
pub fn preset<'a>(net: &'a Net, node: &str) -> Result<Vec<&'a str>, NetError> {
    check_node(net, node)?;
    let set: BTreeSet<&str> = net.arcs.iter().filter(|a| a.target == node).map(|a| a.source.as_str()).collect();
    Ok(set.into_iter().collect())
}

/// Targets of arcs out of `node`, sorted and deduplicated.
pub fn postset<'a>(net: &'a Net, node: &str) -> Result<Vec<&'a str>, NetError> {
    check_node(net, node)?;
    let set: BTreeSet<&str> = net.arcs.iter().filter(|a| a.source == node).map(|a| a.target.as_str()).collect();
    Ok(set.into_iter().collect())
}

/// Transitions whose every input place holds at least one token.
pub fn enabled_transitions(net: &Net, m: &Marking) -> BTreeSet<String> {
    net.transitions
        .iter()
        .filter(|t| net.arcs.iter().filter(|a| a.target == t.id).all(|a| m.get(&a.source) >= 1))
        .map(|t| t.id.clone())
        .collect()
}

pub fn fire(net: &Net, m: &Marking, t: &str) -> Result<Marking, NetError> {
    if net.transition(t).is_none() {
        return Err(match net.node_kind(t) {
            Some(_) => NetError::NotATransition(t.to_string()),
            None => NetError::UnknownNode(t.to_string()),
        });
    }
    let inputs = preset(net, t)?;
    if inputs.iter().any(|p| m.get(p) == 0) {
        return Err(NetError::NotEnabled(t.to_string()));
    }
    let mut next = m.clone();
    for p in inputs {
        next.set(p, next.get(p) - 1);
    }
    for p in postset(net, t)? {
        next.set(p, next.get(p) + 1);
    }
    Ok(next)
}

/// Dense, index-based view of a net used by the state-space engines.
///
/// Places and transitions are numbered in sorted-id order, so iteration over
/// indices is iteration in id order.
#[derive(Debug, Clone)]
pub struct NetIndex {
    pub places: Vec<String>,
    pub transitions: Vec<String>,
    pub pre: Vec<Vec<usize>>,
    pub post: Vec<Vec<usize>>,
    /// Transitions consuming from each place.
    pub consumers: Vec<Vec<usize>>,
    pub place_windows: Vec<TimeInterval>,
    pub transition_windows: Vec<TimeInterval>,
    pub durations: Vec<u64>,
    pub entry: Option<usize>,
    pub exit: Option<usize>,
    place_lookup: HashMap<String, usize>,
}

impl NetIndex {
    pub fn new(net: &Net) -> Result<Self, NetError> {
        let report = validate_structure(net);
        let fatal = report.violations.iter().any(|v| {
            matches!(
                v.code,
                ViolationCode::UnknownNode | ViolationCode::ArcShape | ViolationCode::DuplicateId | ViolationCode::DuplicateArc
            )
        });
        if fatal {
            return Err(NetError::Invalid { net: net.name.clone(), report });
        }
        let mut places: Vec<&Place> = net.places.iter().collect();
        places.sort_by(|a, b| a.id.cmp(&b.id));
        let mut transitions: Vec<&Transition> = net.transitions.iter().collect();
        transitions.sort_by(|a, b| a.id.cmp(&b.id));
        let place_lookup: HashMap<String, usize> = places.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect();
        let trans_lookup: HashMap<&str, usize> = transitions.iter().enumerate().map(|(i, t)| (t.id.as_str(), i)).collect();
        let mut pre = vec![Vec::new(); transitions.len()];
        let mut post = vec![Vec::new(); transitions.len()];
        let mut consumers = vec![Vec::new(); places.len()];
        for a in &net.arcs {
            if let (Some(&p), Some(&t)) = (place_lookup.get(&a.source), trans_lookup.get(a.target.as_str())) {
                pre[t].push(p);
                consumers[p].push(t);
            } else if let (Some(&t), Some(&p)) = (trans_lookup.get(a.source.as_str()), place_lookup.get(&a.target)) {
                post[t].push(p);
            }
        }
        for v in pre.iter_mut().chain(post.iter_mut()).chain(consumers.iter_mut()) {
            v.sort_unstable();
        }
        Ok(NetIndex {
            places: places.iter().map(|p| p.id.clone()).collect(),
            transitions: transitions.iter().map(|t| t.id.clone()).collect(),
            pre,
            post,
            consumers,
            place_windows: places.iter().map(|p| p.effective_window()).collect(),
            transition_windows: transitions.iter().map(|t| t.effective_window()).collect(),
            durations: transitions.iter().map(|t| t.duration).collect(),
            entry: net.entry.as_ref().and_then(|e| place_lookup.get(e).copied()),
            exit: net.exit.as_ref().and_then(|x| place_lookup.get(x).copied()),
            place_lookup,
        })
    }

    pub fn place_index(&self, id: &str) -> Option<usize> {
        self.place_lookup.get(id).copied()
    }

    /// Dense token vector for `m`; tokens on unknown places are ignored.
    pub fn dense(&self, m: &Marking) -> Vec<u32> {
        let mut v = vec![0; self.places.len()];
        for (p, c) in m.iter() {
            if let Some(i) = self.place_index(p) {
                v[i] = c;
            }
        }
        v
    }

    pub fn sparse(&self, v: &[u32]) -> Marking {
        self.places.iter().zip(v).filter(|(_, &c)| c > 0).map(|(p, &c)| (p.clone(), c)).collect()
    }

    pub fn is_enabled(&self, v: &[u32], t: usize) -> bool {
        self.pre[t].iter().all(|&p| v[p] > 0)
    }

    pub fn fire_dense(&self, v: &[u32], t: usize) -> Vec<u32> {
        let mut next = v.to_vec();
        for &p in &self.pre[t] {
            next[p] -= 1;
        }
        for &p in &self.post[t] {
            next[p] += 1;
        }
        next
    }

    /// `{exit: 1}` with every other place empty.
    pub fn is_final(&self, v: &[u32]) -> bool {
        match self.exit {
            Some(x) => v.iter().enumerate().all(|(i, &c)| if i == x { c == 1 } else { c == 0 }),
            None => false,
        }
    }
}
