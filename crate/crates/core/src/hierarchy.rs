//! Hierarchical nets: refinement bindings from refinable transitions to
//! subnets, the layered-design checks, and flattening by transition
//! substitution.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{postset, preset, Net, NetError, Place, PlaceRole, Transition};
use crate::untimed::{check_wellformed_workflow, WorkflowReport};

/// A transition qualified by the net that declares it. Transition ids are
/// only unique within one net.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionRef {
    pub net: String,
    pub transition: String,
}

impl TransitionRef {
    pub fn new(net: impl Into<String>, transition: impl Into<String>) -> Self {
        TransitionRef { net: net.into(), transition: transition.into() }
    }
}

impl fmt::Display for TransitionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.net, self.transition)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("unknown transition {0}")]
    UnknownTransition(TransitionRef),
    #[error("transition {0} is not refinable")]
    NotRefinable(TransitionRef),
    #[error("unknown subnet `{0}`")]
    UnknownSubnet(String),
    #[error("refinement cycle: {}", path.join(" -> "))]
    RefinementCycle { path: Vec<String> },
    #[error("transition {0} has no refinement")]
    UnboundTransition(TransitionRef),
    #[error("subnet `{net}` bound by {binding} lacks an entry or exit place")]
    MissingBoundary { net: String, binding: TransitionRef },
    #[error("subnet `{net}` bound by {binding} is not a well-formed workflow net")]
    NotWellFormed { net: String, binding: TransitionRef, report: WorkflowReport },
    #[error("refinement depth exceeds {limit} at {binding}")]
    DepthExceeded { limit: usize, binding: TransitionRef },
    #[error("flattening {binding} produces duplicate node id `{id}`")]
    IdCollision { id: String, binding: TransitionRef },
    #[error(transparent)]
    Net(#[from] NetError),
}

impl HierarchyError {
    pub fn code(&self) -> &'static str {
        match self {
            HierarchyError::UnknownTransition(_) => "UNKNOWN_TRANSITION",
            HierarchyError::NotRefinable(_) => "NOT_REFINABLE",
            HierarchyError::UnknownSubnet(_) => "UNKNOWN_SUBNET",
            HierarchyError::RefinementCycle { .. } => "REFINEMENT_CYCLE",
            HierarchyError::UnboundTransition(_) => "UNBOUND_TRANSITION",
            HierarchyError::MissingBoundary { .. } => "MISSING_BOUNDARY",
            HierarchyError::NotWellFormed { .. } => "NOT_WELL_FORMED",
            HierarchyError::DepthExceeded { .. } => "DEPTH_EXCEEDED",
            HierarchyError::IdCollision { .. } => "ID_COLLISION",
            HierarchyError::Net(e) => e.code(),
        }
    }
}

/// A root net plus named subnets and the refinement function binding
/// refinable transitions to subnets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchicalNet {
    pub root: Net,
    pub subnets: BTreeMap<String, Net>,
    pub bindings: BTreeMap<TransitionRef, String>,
}

impl HierarchicalNet {
    pub fn new(root: Net) -> Self {
        HierarchicalNet { root, subnets: BTreeMap::new(), bindings: BTreeMap::new() }
    }

    pub fn with_subnet(mut self, net: Net) -> Self {
        self.subnets.insert(net.name.clone(), net);
        self
    }

    /// The root or a subnet, by name.
    pub fn net(&self, name: &str) -> Option<&Net> {
        if self.root.name == name {
            Some(&self.root)
        } else {
            self.subnets.get(name)
        }
    }

    pub fn nets(&self) -> impl Iterator<Item = &Net> {
        std::iter::once(&self.root).chain(self.subnets.values())
    }

    fn transition(&self, t: &TransitionRef) -> Result<&Transition, HierarchyError> {
        self.net(&t.net)
            .and_then(|n| n.transition(&t.transition))
            .ok_or_else(|| HierarchyError::UnknownTransition(t.clone()))
    }

    /// Returns a copy with `t` bound to `subnet`.
    pub fn attach_refinement(&self, t: &TransitionRef, subnet: &str) -> Result<HierarchicalNet, HierarchyError> {
        if !self.transition(t)?.refinable {
            return Err(HierarchyError::NotRefinable(t.clone()));
        }
        if !self.subnets.contains_key(subnet) {
            return Err(HierarchyError::UnknownSubnet(subnet.to_string()));
        }
        let mut next = self.clone();
        next.bindings.insert(t.clone(), subnet.to_string());
        if let Some(path) = next.find_cycle() {
            return Err(HierarchyError::RefinementCycle { path });
        }
        Ok(next)
    }

    /// First refinement cycle in net-name order, as a closed path of net names.
    pub fn find_cycle(&self) -> Option<Vec<String>> {
        let mut edges: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (t, target) in &self.bindings {
            edges.entry(t.net.as_str()).or_default().insert(target.as_str());
        }
        fn dfs<'a>(
            node: &'a str,
            edges: &BTreeMap<&'a str, BTreeSet<&'a str>>,
            stack: &mut Vec<&'a str>,
            done: &mut HashSet<&'a str>,
        ) -> Option<Vec<String>> {
            if let Some(pos) = stack.iter().position(|&n| n == node) {
                let mut path: Vec<String> = stack[pos..].iter().map(|s| s.to_string()).collect();
                path.push(node.to_string());
                return Some(path);
            }
            if done.contains(node) {
                return None;
            }
            stack.push(node);
            for &next in edges.get(node).into_iter().flatten() {
                if let Some(p) = dfs(next, edges, stack, done) {
                    return Some(p);
                }
            }
            stack.pop();
            done.insert(node);
            None
        }
        let mut done = HashSet::new();
        let starts: Vec<&str> = edges.keys().copied().collect();
        starts.into_iter().find_map(|s| dfs(s, &edges, &mut Vec::new(), &mut done))
    }

    /// Every violated hierarchy invariant, in binding order.
    pub fn check_invariants(&self) -> Vec<HierarchyError> {
        let mut out = Vec::new();
        for (t, target) in &self.bindings {
            match self.transition(t) {
                Err(e) => out.push(e),
                Ok(tr) if !tr.refinable => out.push(HierarchyError::NotRefinable(t.clone())),
                Ok(_) => {}
            }
            match self.subnets.get(target) {
                None => out.push(HierarchyError::UnknownSubnet(target.clone())),
                Some(sub) if sub.entry.is_none() || sub.exit.is_none() => {
                    out.push(HierarchyError::MissingBoundary { net: target.clone(), binding: t.clone() })
                }
                Some(_) => {}
            }
        }
        if let Some(path) = self.find_cycle() {
            out.push(HierarchyError::RefinementCycle { path });
        }
        out
    }

    pub fn flatten(&self) -> Result<Flattened, HierarchyError> {
        self.flatten_with(FlattenOptions::default())
    }

    /// Substitutes every bound refinable transition by a prefixed copy of its
    /// (recursively flattened) subnet, glued in with fresh silent transitions.
    pub fn flatten_with(&self, opts: FlattenOptions) -> Result<Flattened, HierarchyError> {
        if let Some(e) = self.check_invariants().into_iter().next() {
            return Err(e);
        }
        let mut warnings = Vec::new();
        let mut net = self.expand(&self.root.name, 0, opts, &mut warnings, "")?;
        net.canonicalize();
        Ok(Flattened { net, warnings })
    }

    fn expand(
        &self,
        name: &str,
        depth: usize,
        opts: FlattenOptions,
        warnings: &mut Vec<FlattenWarning>,
        qualifier: &str,
    ) -> Result<Net, HierarchyError> {
        let mut net = self.net(name).ok_or_else(|| HierarchyError::UnknownSubnet(name.to_string()))?.clone();
        let mut refinable: Vec<String> = net.transitions.iter().filter(|t| t.refinable).map(|t| t.id.clone()).collect();
        refinable.sort();
        for tid in refinable {
            let binding = TransitionRef::new(name, &tid);
            let Some(target) = self.bindings.get(&binding) else {
                warnings.push(FlattenWarning {
                    code: FlattenWarningCode::UnboundRefinable,
                    location: format!("{qualifier}{tid}"),
                    message: format!("refinable transition {binding} has no refinement and is kept as is"),
                });
                continue;
            };
            if depth + 1 > opts.max_depth {
                return Err(HierarchyError::DepthExceeded { limit: opts.max_depth, binding });
            }
            let sub = &self.subnets[target];
            let report = check_wellformed_workflow(sub);
            if !report.passed() {
                return Err(HierarchyError::NotWellFormed { net: target.clone(), binding, report });
            }
            if net.transition(&tid).is_some_and(|t| t.has_timing()) {
                warnings.push(FlattenWarning {
                    code: FlattenWarningCode::TimingShadowed,
                    location: format!("{qualifier}{tid}"),
                    message: format!("timing on {binding} is dropped in favour of the timing inside `{target}`"),
                });
            }
            let flat_sub = self.expand(target, depth + 1, opts, warnings, &format!("{qualifier}{tid}."))?;
            substitute(&mut net, &tid, &flat_sub).map_err(|id| HierarchyError::IdCollision { id, binding })?;
        }
        Ok(net)
    }

    /// Checks that the subnet bound to `t` has a precondition no stronger and
    /// a postcondition no weaker than `t`'s declared ones.
    ///
    /// Predicates are uninterpreted, so "weaker" and "stronger" are
    /// approximated by inclusion of label sets.
    pub fn check_condition_alteration(&self, t: &TransitionRef) -> Result<ConditionReport, HierarchyError> {
        let abstract_t = self.transition(t)?;
        let target = self.bindings.get(t).ok_or_else(|| HierarchyError::UnboundTransition(t.clone()))?;
        let sub = self.subnets.get(target).ok_or_else(|| HierarchyError::UnknownSubnet(target.clone()))?;
        let (Some(entry), Some(exit)) = (&sub.entry, &sub.exit) else {
            return Err(HierarchyError::MissingBoundary { net: target.clone(), binding: t.clone() });
        };
        let first: Vec<&Transition> = postset(sub, entry)?.into_iter().filter_map(|id| sub.transition(id)).collect();
        let last: Vec<&Transition> = preset(sub, exit)?.into_iter().filter_map(|id| sub.transition(id)).collect();

        let mut failures = Vec::new();
        for s in &first {
            let extra: Vec<&String> = s.pre_conditions.difference(&abstract_t.pre_conditions).collect();
            if !extra.is_empty() {
                failures.push(format!(
                    "precondition of `{}` requires {:?} beyond those of {t}; it must be the same or weaker",
                    s.id, extra
                ));
            }
        }
        for s in &last {
            let missing: Vec<&String> = abstract_t.post_conditions.difference(&s.post_conditions).collect();
            if !missing.is_empty() {
                failures.push(format!(
                    "postcondition of `{}` lacks {:?} established by {t}; it must be the same or stronger",
                    s.id, missing
                ));
            }
        }
        let vacuous = abstract_t.pre_conditions.is_empty()
            && abstract_t.post_conditions.is_empty()
            && first.iter().chain(&last).all(|s| s.pre_conditions.is_empty() && s.post_conditions.is_empty());
        let mut notes = vec!["conditions are compared as label sets, approximating logical implication".to_string()];
        if vacuous {
            notes.push("VACUOUS: no conditions declared on either level".to_string());
        }
        Ok(ConditionReport {
            transition: t.clone(),
            subnet: target.clone(),
            passed: failures.is_empty(),
            vacuous,
            failures,
            notes,
        })
    }
}

/// Replaces transition `tid` of `net` by a copy of `sub` with ids prefixed
/// `tid.`. Returns the colliding id on failure.
fn substitute(net: &mut Net, tid: &str, sub: &Net) -> Result<(), String> {
    let prefix = |id: &str| format!("{tid}.{id}");
    let glue_in = format!("{tid}.__in");
    let glue_out = format!("{tid}.__out");
    let inputs: Vec<String> = net.arcs.iter().filter(|a| a.target == tid).map(|a| a.source.clone()).collect();
    let outputs: Vec<String> = net.arcs.iter().filter(|a| a.source == tid).map(|a| a.target.clone()).collect();
    net.transitions.retain(|t| t.id != tid);
    net.arcs.retain(|a| a.source != tid && a.target != tid);

    let mut ids: HashSet<String> =
        net.places.iter().map(|p| p.id.clone()).chain(net.transitions.iter().map(|t| t.id.clone())).collect();
    let mut claim = |id: &str| if ids.insert(id.to_string()) { Ok(()) } else { Err(id.to_string()) };
    claim(&glue_in)?;
    claim(&glue_out)?;
    for p in &sub.places {
        let id = prefix(&p.id);
        claim(&id)?;
        net.places.push(Place { id, role: PlaceRole::Internal, window: p.window });
    }
    for t in &sub.transitions {
        let id = prefix(&t.id);
        claim(&id)?;
        net.transitions.push(Transition { id, ..t.clone() });
    }
    for a in &sub.arcs {
        net.add_arc(prefix(&a.source), prefix(&a.target));
    }
    net.transitions.push(Transition::silent(&glue_in));
    net.transitions.push(Transition::silent(&glue_out));
    for p in inputs {
        net.add_arc(p, &glue_in);
    }
    // Boundary presence is an invariant checked before substitution.
    net.add_arc(&glue_in, prefix(sub.entry.as_deref().unwrap_or_default()));
    net.add_arc(prefix(sub.exit.as_deref().unwrap_or_default()), &glue_out);
    for q in outputs {
        net.add_arc(&glue_out, q);
    }
    Ok(())
}

/// Ids of the glue transitions inserted for a refined transition `t`.
pub fn glue_ids(t: &str) -> (String, String) {
    (format!("{t}.__in"), format!("{t}.__out"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlattenOptions {
    pub max_depth: usize,
}

impl Default for FlattenOptions {
    fn default() -> Self {
        FlattenOptions { max_depth: 32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FlattenWarningCode {
    TimingShadowed,
    UnboundRefinable,
}

impl FlattenWarningCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            FlattenWarningCode::TimingShadowed => "TIMING_SHADOWED",
            FlattenWarningCode::UnboundRefinable => "UNBOUND_REFINABLE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlattenWarning {
    pub code: FlattenWarningCode,
    /// Qualified id of the transition in the flat net's naming scheme.
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flattened {
    pub net: Net,
    pub warnings: Vec<FlattenWarning>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub transition: TransitionRef,
    pub subnet: String,
    pub passed: bool,
    pub vacuous: bool,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}
