//! Explicit-state untimed analyses: reachability graph, k-boundedness,
//! deadlock freedom, proper completion and workflow well-formedness.
//!
//! Exploration is breadth-first with transitions tried in sorted-id order,
//! so graphs and witnesses are deterministic and witnesses are shortest.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::net::{Marking, Net, NetError, NetIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreLimits {
    pub max_states: usize,
    /// Per-place token cap; a marking exceeding it is flagged as an
    /// unboundedness suspect and not expanded further.
    pub max_token_bound: u32,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits { max_states: 1_000_000, max_token_bound: 16 }
    }
}

impl ExploreLimits {
    pub fn new(max_states: usize, max_token_bound: u32) -> Self {
        ExploreLimits { max_states: max_states.max(1), max_token_bound: max_token_bound.max(1) }
    }
}

/// Three-valued verdict. `Unknown` only arises from exploration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub transition: String,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachGraph {
    /// States in discovery (BFS) order; index 0 is the initial marking.
    pub states: Vec<Marking>,
    pub edges: Vec<Edge>,
    pub truncated: bool,
    /// Indices of markings that exceeded `max_token_bound`.
    pub unbounded_suspects: Vec<usize>,
    /// BFS tree: predecessor state and edge index for every state but the initial one.
    parents: Vec<Option<(usize, usize)>>,
}

impl ReachGraph {
    pub fn initial(&self) -> &Marking {
        &self.states[0]
    }

    /// Shortest firing sequence from the initial marking to `state`.
    pub fn trace_to(&self, state: usize) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = state;
        while let Some((prev, edge)) = self.parents[cur] {
            out.push(self.edges[edge].transition.clone());
            cur = prev;
        }
        out.reverse();
        out
    }

    pub fn successors(&self, state: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.source == state)
    }
}

/// Internal exploration result that keeps dense markings for the checks.
struct Exploration {
    index: NetIndex,
    dense: Vec<Vec<u32>>,
    graph: ReachGraph,
    /// Per state: number of enabled transitions.
    enabled: Vec<usize>,
}

fn explore(net: &Net, m0: &Marking, lim: ExploreLimits) -> Result<Exploration, NetError> {
    let index = NetIndex::new(net)?;
    let start = index.dense(m0);
    let over_bound = |v: &[u32]| v.iter().any(|&c| c > lim.max_token_bound);
    let mut ids: HashMap<Vec<u32>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut suspect = vec![over_bound(&start)];
    let mut dense = vec![start];
    let mut parents = vec![None];
    let mut edges = Vec::new();
    let mut enabled = Vec::new();
    let mut truncated = suspect[0];

    // Every discovered state is queued exactly once, so `enabled` fills in discovery order.
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let cur = dense[s].clone();
        let fireable: Vec<usize> = (0..index.transitions.len()).filter(|&t| index.is_enabled(&cur, t)).collect();
        enabled.push(fireable.len());
        if suspect[s] {
            continue;
        }
        for t in fireable {
            let next = index.fire_dense(&cur, t);
            let target = match ids.get(&next) {
                Some(&id) => id,
                None if dense.len() >= lim.max_states => {
                    truncated = true;
                    continue;
                }
                None => {
                    let id = dense.len();
                    ids.insert(next.clone(), id);
                    let over = over_bound(&next);
                    truncated |= over;
                    suspect.push(over);
                    dense.push(next);
                    parents.push(Some((s, edges.len())));
                    queue.push_back(id);
                    id
                }
            };
            edges.push(Edge { source: s, transition: index.transitions[t].clone(), target });
        }
    }
    let suspects = (0..dense.len()).filter(|&s| suspect[s]).collect();
    let states = dense.iter().map(|v| index.sparse(v)).collect();
    Ok(Exploration {
        graph: ReachGraph { states, edges, truncated, unbounded_suspects: suspects, parents },
        index,
        dense,
        enabled,
    })
}

pub fn reachability_graph(net: &Net, m0: &Marking, lim: ExploreLimits) -> Result<ReachGraph, NetError> {
    explore(net, m0, lim).map(|e| e.graph)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub marking: Marking,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub k: u32,
    pub bounded: Verdict,
    pub witness: Option<Witness>,
    pub states_explored: usize,
}

/// `k = 1` is the safeness check.
pub fn check_boundedness(net: &Net, m0: &Marking, k: u32, lim: ExploreLimits) -> Result<BoundednessReport, NetError> {
    let ex = explore(net, m0, lim)?;
    let g = &ex.graph;
    let over = (0..g.states.len()).find(|&s| ex.dense[s].iter().any(|&c| c > k));
    let (bounded, witness) = match over {
        Some(s) => (Verdict::No, Some(Witness { marking: g.states[s].clone(), trace: g.trace_to(s) })),
        None if g.truncated => (Verdict::Unknown, None),
        None => (Verdict::Yes, None),
    };
    Ok(BoundednessReport { k, bounded, witness, states_explored: g.states.len() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeadlockReport {
    pub deadlock_free: Verdict,
    pub witness: Option<Witness>,
    pub states_explored: usize,
}

/// A deadlock is a reachable marking with nothing enabled other than the
/// proper-completion marking `{exit: 1}`.
pub fn check_deadlock_freedom(net: &Net, m0: &Marking, lim: ExploreLimits) -> Result<DeadlockReport, NetError> {
    let ex = explore(net, m0, lim)?;
    let g = &ex.graph;
    let dead = (0..g.states.len()).find(|&s| ex.enabled[s] == 0 && !ex.index.is_final(&ex.dense[s]));
    let (deadlock_free, witness) = match dead {
        Some(s) => (Verdict::No, Some(Witness { marking: g.states[s].clone(), trace: g.trace_to(s) })),
        None if g.truncated => (Verdict::Unknown, None),
        None => (Verdict::Yes, None),
    };
    Ok(DeadlockReport { deadlock_free, witness, states_explored: g.states.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionClause {
    /// `{exit: 1}` is not reachable from `{entry: 1}`.
    ExitUnreachable,
    /// A marking marks the exit while other tokens remain.
    ResidualTokens,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionReport {
    pub proper_completion: Verdict,
    pub failed_clause: Option<CompletionClause>,
    /// Trace to `{exit: 1}` when reachable, or to the residual marking on clause (b) failure.
    pub witness: Option<Witness>,
    pub states_explored: usize,
}

pub fn check_proper_completion(net: &Net, lim: ExploreLimits) -> Result<CompletionReport, NetError> {
    let ex = explore(net, &net.initial_marking(), lim)?;
    let g = &ex.graph;
    let exit = ex.index.exit;
    let done = (0..g.states.len()).find(|&s| ex.index.is_final(&ex.dense[s]));
    let residual = exit.and_then(|x| (0..g.states.len()).find(|&s| ex.dense[s][x] >= 1 && !ex.index.is_final(&ex.dense[s])));
    let witness = |s: usize| Some(Witness { marking: g.states[s].clone(), trace: g.trace_to(s) });
    let report = |v, clause, w| CompletionReport { proper_completion: v, failed_clause: clause, witness: w, states_explored: g.states.len() };
    Ok(match (residual, done) {
        (Some(r), _) => report(Verdict::No, Some(CompletionClause::ResidualTokens), witness(r)),
        (None, None) if !g.truncated => report(Verdict::No, Some(CompletionClause::ExitUnreachable), None),
        (None, Some(d)) if !g.truncated => report(Verdict::Yes, None, witness(d)),
        (None, d) => report(Verdict::Unknown, None, d.and_then(witness)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WorkflowIssueCode {
    MissingEntry,
    MissingExit,
    EmptyPresetViolation,
    EmptyPostsetViolation,
    NotOnPath,
}

impl WorkflowIssueCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            WorkflowIssueCode::MissingEntry => "MISSING_ENTRY",
            WorkflowIssueCode::MissingExit => "MISSING_EXIT",
            WorkflowIssueCode::EmptyPresetViolation => "EMPTY_PRESET_VIOLATION",
            WorkflowIssueCode::EmptyPostsetViolation => "EMPTY_POSTSET_VIOLATION",
            WorkflowIssueCode::NotOnPath => "NOT_ON_PATH",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkflowIssue {
    pub code: WorkflowIssueCode,
    pub node: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkflowReport {
    pub issues: Vec<WorkflowIssue>,
}

impl WorkflowReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Graph-only check: unique entry with empty preset, unique exit with empty
/// postset, every node on some directed path from entry to exit.
pub fn check_wellformed_workflow(net: &Net) -> WorkflowReport {
    let mut issues = Vec::new();
    let mut issue = |code, node: &str| issues.push(WorkflowIssue { code, node: node.to_string() });
    let entry = net.entry.as_deref().filter(|e| net.place(e).is_some());
    let exit = net.exit.as_deref().filter(|x| net.place(x).is_some());
    match entry {
        None => issue(WorkflowIssueCode::MissingEntry, &net.name),
        Some(e) if net.arcs.iter().any(|a| a.target == e) => issue(WorkflowIssueCode::EmptyPresetViolation, e),
        _ => {}
    }
    match exit {
        None => issue(WorkflowIssueCode::MissingExit, &net.name),
        Some(x) if net.arcs.iter().any(|a| a.source == x) => issue(WorkflowIssueCode::EmptyPostsetViolation, x),
        _ => {}
    }

    let mut forward: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut backward: HashMap<&str, Vec<&str>> = HashMap::new();
    for a in &net.arcs {
        forward.entry(&a.source).or_default().push(&a.target);
        backward.entry(&a.target).or_default().push(&a.source);
    }
    let reach = |start: Option<&str>, adj: &HashMap<&str, Vec<&str>>| -> std::collections::HashSet<String> {
        let mut seen = std::collections::HashSet::new();
        let mut stack: Vec<&str> = start.into_iter().collect();
        while let Some(n) = stack.pop() {
            if seen.insert(n.to_string()) {
                stack.extend(adj.get(n).into_iter().flatten().copied());
            }
        }
        seen
    };
    let from_entry = reach(entry, &forward);
    let to_exit = reach(exit, &backward);
    let mut nodes: Vec<&str> = net.places.iter().map(|p| p.id.as_str()).chain(net.transitions.iter().map(|t| t.id.as_str())).collect();
    nodes.sort_unstable();
    for n in nodes {
        if !(from_entry.contains(n) && to_exit.contains(n)) {
            issue(WorkflowIssueCode::NotOnPath, n);
        }
    }
    WorkflowReport { issues }
}
