//! Integer-time semantics and schedulability analysis.
//!
//! A token becomes consumable `TC_min(p)` after it arrives and stops being
//! consumable `TC_max(p)` after it arrives. For a transition `t` and one
//! chosen token per input place:
//!
//! ```text
//! e = max(arrived + TC_min(p))
//! L = max(now, e + TC_min(t))
//! U = min(e + TC_max(t), min(arrived + TC_max(p)))
//! ```
//!
//! `t` may fire at any integer `τ` in `[L, U]`, further capped by the urgency
//! deadline `D`: the earliest time some token-available transition would lose
//! its last firing opportunity. Firing consumes at `τ` and produces at
//! `τ + TD(t)`; global time moves to `τ`, so other branches proceed while the
//! firing is in flight.
//!
//! The state graph abstracts away absolute time: a state stores each token's
//! arrival relative to the current time, saturated at a per-place horizon past
//! which no constraint can distinguish two tokens. Edges carry the delay.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::interval::TimeInterval;
use crate::net::{Marking, Net, NetError, NetIndex};
use crate::untimed::{ExploreLimits, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TimedToken {
    pub place: String,
    /// Arrival time. May exceed the state's `now` while the producing firing
    /// is still in progress.
    pub arrived: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TimedState {
    pub now: u64,
    /// Sorted by place, then arrival.
    pub tokens: Vec<TimedToken>,
}

impl TimedState {
    /// One token on the entry place at time 0.
    pub fn initial(net: &Net) -> Option<TimedState> {
        let entry = net.entry.clone()?;
        Some(TimedState { now: 0, tokens: vec![TimedToken { place: entry, arrived: 0 }] })
    }

    pub fn marking(&self) -> Marking {
        let mut m = Marking::new();
        for t in &self.tokens {
            m.set(&t.place, m.get(&t.place) + 1);
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimedStep {
    pub transition: String,
    pub time: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TimingViolationKind {
    /// A transition holds tokens on every input but no choice of tokens
    /// leaves a non-empty firing window.
    EmptyWindow,
    /// The duration of `transition` delays a token past the consumable
    /// window of `place` at a downstream join.
    DurationOvershoot,
    /// Every accepting run completes after the deadline.
    DeadlineMissed,
}

impl TimingViolationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TimingViolationKind::EmptyWindow => "EMPTY_WINDOW",
            TimingViolationKind::DurationOvershoot => "DURATION_OVERSHOOT",
            TimingViolationKind::DeadlineMissed => "DEADLINE_MISSED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimingViolation {
    pub kind: TimingViolationKind,
    pub transition: Option<String>,
    pub place: Option<String>,
    pub message: String,
    pub witness: Vec<TimedStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleReport {
    pub schedulable: Verdict,
    pub deadline: Option<u64>,
    /// Earliest and latest completion over all accepting runs; `None` when
    /// there is no accepting run or exploration was truncated.
    pub completion: Option<TimeInterval>,
    pub earliest_witness: Option<Vec<TimedStep>>,
    /// Absent when the latest completion is unbounded.
    pub latest_witness: Option<Vec<TimedStep>>,
    pub violations: Vec<TimingViolation>,
    pub states_explored: usize,
    pub truncated: bool,
}

/// Static timing data of a net, in signed arithmetic.
struct Model {
    idx: NetIndex,
    pmin: Vec<i64>,
    pmax: Vec<Option<i64>>,
    tmin: Vec<i64>,
    tmax: Vec<Option<i64>>,
    td: Vec<i64>,
    /// Per-place age past which tokens are indistinguishable.
    sat: Vec<i64>,
    /// Delay after which every current token has saturated.
    horizon: i64,
}

fn to_i64(v: u64) -> i64 {
    i64::try_from(v).unwrap_or(i64::MAX / 4).min(i64::MAX / 4)
}

/// One way to fire a transition: the chosen token arrival per input place
/// (aligned with `pre[t]`) and the firing window `[lo, hi]`.
#[derive(Debug, Clone)]
struct Candidate {
    transition: usize,
    combo: Vec<i64>,
    lo: i64,
    hi: Option<i64>,
}

struct Enabling {
    candidates: Vec<Candidate>,
    empty: Vec<usize>,
}

impl Model {
    fn new(net: &Net) -> Result<Model, NetError> {
        let idx = NetIndex::new(net)?;
        let pmin: Vec<i64> = idx.place_windows.iter().map(|w| to_i64(w.lo)).collect();
        let pmax: Vec<Option<i64>> = idx.place_windows.iter().map(|w| w.hi.map(to_i64)).collect();
        let tmin: Vec<i64> = idx.transition_windows.iter().map(|w| to_i64(w.lo)).collect();
        let tmax: Vec<Option<i64>> = idx.transition_windows.iter().map(|w| w.hi.map(to_i64)).collect();
        let td: Vec<i64> = idx.durations.iter().map(|&d| to_i64(d)).collect();
        let sat: Vec<i64> = (0..idx.places.len())
            .map(|p| {
                if idx.consumers[p].is_empty() {
                    return 0;
                }
                let mut k = pmax[p].unwrap_or(0);
                for &t in &idx.consumers[p] {
                    k = k.max(pmin[p] + tmin[t].max(tmax[t].unwrap_or(0)));
                }
                k + 1
            })
            .collect();
        let horizon = sat.iter().copied().max().unwrap_or(0) + td.iter().copied().max().unwrap_or(0);
        Ok(Model { idx, pmin, pmax, tmin, tmax, td, sat, horizon })
    }

    fn window(&self, t: usize, combo: &[i64], now: i64) -> (i64, Option<i64>) {
        let pre = &self.idx.pre[t];
        let e = pre.iter().zip(combo).map(|(&p, &a)| a + self.pmin[p]).max().unwrap_or(now);
        let lo = now.max(e + self.tmin[t]);
        let mut hi = self.tmax[t].map(|m| e + m);
        for (&p, &a) in pre.iter().zip(combo) {
            if let Some(m) = self.pmax[p] {
                let d = a + m;
                hi = Some(hi.map_or(d, |h| h.min(d)));
            }
        }
        (lo, hi)
    }

    /// Every token choice with distinct arrivals per input place.
    fn combos(&self, t: usize, tokens: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for &p in &self.idx.pre[t] {
            let mut distinct = tokens[p].clone();
            distinct.dedup();
            let mut next = Vec::with_capacity(out.len() * distinct.len());
            for prefix in &out {
                for &a in &distinct {
                    let mut c = prefix.clone();
                    c.push(a);
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    /// Firing candidates under strong urgency, plus transitions whose every
    /// token choice has an empty window. `tokens[p]` is sorted.
    fn enabling(&self, tokens: &[Vec<i64>], now: i64) -> Enabling {
        let mut windows = Vec::new();
        let mut empty = Vec::new();
        let mut urgency: Option<i64> = None;
        for t in 0..self.idx.transitions.len() {
            if self.idx.pre[t].iter().any(|&p| tokens[p].is_empty()) {
                continue;
            }
            let mut open: Vec<(Vec<i64>, i64, Option<i64>)> = Vec::new();
            for combo in self.combos(t, tokens) {
                let (lo, hi) = self.window(t, &combo, now);
                if hi.is_none_or(|h| lo <= h) {
                    open.push((combo, lo, hi));
                }
            }
            if open.is_empty() {
                empty.push(t);
                continue;
            }
            // The transition must fire before its last opportunity closes.
            let last = open.iter().try_fold(i64::MIN, |acc, (_, _, hi)| hi.map(|h| acc.max(h)));
            if let Some(last) = last {
                urgency = Some(urgency.map_or(last, |u| u.min(last)));
            }
            windows.extend(open.into_iter().map(|(combo, lo, hi)| (t, combo, lo, hi)));
        }
        let candidates = windows
            .into_iter()
            .filter_map(|(transition, combo, lo, hi)| {
                let hi = match (hi, urgency) {
                    (Some(h), Some(u)) => Some(h.min(u)),
                    (h, u) => h.or(u),
                };
                hi.is_none_or(|h| lo <= h).then_some(Candidate { transition, combo, lo, hi })
            })
            .collect();
        Enabling { candidates, empty }
    }

    /// Consumes `combo`, shifts time by `delay` and produces the outputs.
    /// Arrivals are relative to the pre-firing `now = 0`.
    fn fire(&self, tokens: &[Vec<i64>], c: &Candidate, delay: i64) -> Vec<Vec<i64>> {
        let mut next = tokens.to_vec();
        for (&p, &a) in self.idx.pre[c.transition].iter().zip(&c.combo) {
            let at = next[p].iter().position(|&x| x == a).expect("combo token present");
            next[p].remove(at);
        }
        for &p in &self.idx.post[c.transition] {
            next[p].push(delay + self.td[c.transition]);
        }
        for (p, ts) in next.iter_mut().enumerate() {
            for a in ts.iter_mut() {
                *a = (*a - delay).max(-self.sat[p]);
            }
            ts.sort_unstable();
        }
        next
    }

    /// Offset of the exit token when `tokens` is exactly `{exit: 1}`.
    fn accepting(&self, tokens: &[Vec<i64>]) -> Option<i64> {
        let x = self.idx.exit?;
        let only_exit = tokens.iter().enumerate().all(|(p, ts)| if p == x { ts.len() == 1 } else { ts.is_empty() });
        only_exit.then(|| tokens[x][0])
    }

    fn initial(&self) -> Option<Vec<Vec<i64>>> {
        let mut tokens = vec![Vec::new(); self.idx.places.len()];
        tokens[self.idx.entry?].push(0);
        Some(tokens)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimedEdge {
    pub source: usize,
    pub target: usize,
    pub transition: String,
    pub delay: u64,
    /// Stands for every delay at or above `delay`; all of them lead to `target`.
    pub open: bool,
    #[serde(skip)]
    t: usize,
    #[serde(skip)]
    combo: Vec<i64>,
}

/// Abstract timed state graph. State `i` lists, per place, the saturated
/// arrival offsets of its tokens relative to the state's own time.
#[derive(Debug, Clone, Serialize)]
pub struct TimedGraph {
    pub places: Vec<String>,
    pub states: Vec<Vec<Vec<i64>>>,
    pub edges: Vec<TimedEdge>,
    pub truncated: bool,
    /// Accepting states with the exit token's offset.
    pub accepting: Vec<(usize, i64)>,
    #[serde(skip)]
    out: Vec<Vec<usize>>,
    #[serde(skip)]
    parents: Vec<Option<usize>>,
    #[serde(skip)]
    empty_windows: BTreeMap<usize, usize>,
}

impl TimedGraph {
    pub fn marking(&self, state: usize) -> Marking {
        self.places
            .iter()
            .zip(&self.states[state])
            .filter(|(_, ts)| !ts.is_empty())
            .map(|(p, ts)| (p.clone(), ts.len() as u32))
            .collect()
    }

    pub fn successors(&self, state: usize) -> impl Iterator<Item = &TimedEdge> {
        self.out[state].iter().map(move |&e| &self.edges[e])
    }

    /// Edge indices along the breadth-first tree path to `state`.
    fn path_to(&self, state: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut s = state;
        while let Some(e) = self.parents[s] {
            path.push(e);
            s = self.edges[e].source;
        }
        path.reverse();
        path
    }

    fn steps(&self, path: &[usize]) -> Vec<TimedStep> {
        let mut now = 0;
        path.iter()
            .map(|&e| {
                now += self.edges[e].delay;
                TimedStep { transition: self.edges[e].transition.clone(), time: now }
            })
            .collect()
    }
}

fn explore(model: &Model, lim: ExploreLimits) -> TimedGraph {
    let mut g = TimedGraph {
        places: model.idx.places.clone(),
        states: Vec::new(),
        edges: Vec::new(),
        truncated: false,
        accepting: Vec::new(),
        out: Vec::new(),
        parents: Vec::new(),
        empty_windows: BTreeMap::new(),
    };
    let Some(init) = model.initial() else { return g };
    let mut seen: HashMap<Vec<Vec<i64>>, usize> = HashMap::new();
    seen.insert(init.clone(), 0);
    g.states.push(init);
    g.out.push(Vec::new());
    g.parents.push(None);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let tokens = g.states[s].clone();
        if let Some(off) = model.accepting(&tokens) {
            g.accepting.push((s, off));
        }
        if tokens.iter().any(|ts| ts.len() > lim.max_token_bound as usize) {
            g.truncated = true;
            continue;
        }
        let en = model.enabling(&tokens, 0);
        for t in en.empty {
            g.empty_windows.entry(t).or_insert(s);
        }
        for c in &en.candidates {
            let (top, open) = match c.hi {
                Some(h) => (h, false),
                None => (c.lo.max(model.horizon), true),
            };
            for delay in c.lo..=top {
                let next = model.fire(&tokens, c, delay);
                let target = match seen.get(&next) {
                    Some(&i) => i,
                    None if g.states.len() >= lim.max_states => {
                        g.truncated = true;
                        continue;
                    }
                    None => {
                        let i = g.states.len();
                        seen.insert(next.clone(), i);
                        g.states.push(next);
                        g.out.push(Vec::new());
                        g.parents.push(Some(g.edges.len()));
                        queue.push_back(i);
                        i
                    }
                };
                g.out[s].push(g.edges.len());
                g.edges.push(TimedEdge {
                    source: s,
                    target,
                    transition: model.idx.transitions[c.transition].clone(),
                    delay: delay as u64,
                    open: open && delay == top,
                    t: c.transition,
                    combo: c.combo.clone(),
                });
            }
        }
    }
    g.accepting.sort_unstable();
    g
}

/// Breadth-first exploration of the abstract timed state graph from one
/// token on the entry place at time 0.
pub fn timed_state_graph(net: &Net, lim: ExploreLimits) -> Result<TimedGraph, NetError> {
    Ok(explore(&Model::new(net)?, lim))
}

/// Concrete successors of `s`: `(transition, firing time, next state)`.
///
/// An unbounded firing window is enumerated up to the saturation horizon;
/// later firing times lead to states that no constraint can tell apart.
pub fn timed_successors(net: &Net, s: &TimedState) -> Result<Vec<(String, u64, TimedState)>, NetError> {
    let model = Model::new(net)?;
    let now = to_i64(s.now);
    let mut tokens = vec![Vec::new(); model.idx.places.len()];
    for tok in &s.tokens {
        let p = model.idx.place_index(&tok.place).ok_or_else(|| NetError::UnknownNode(tok.place.clone()))?;
        tokens[p].push(to_i64(tok.arrived));
    }
    for ts in &mut tokens {
        ts.sort_unstable();
    }
    let mut out = Vec::new();
    for c in model.enabling(&tokens, now).candidates {
        let top = c.hi.unwrap_or(c.lo.max(now + model.horizon));
        for tau in c.lo..=top {
            let mut next: Vec<TimedToken> = Vec::new();
            let mut remaining = tokens.clone();
            for (&p, &a) in model.idx.pre[c.transition].iter().zip(&c.combo) {
                let at = remaining[p].iter().position(|&x| x == a).expect("combo token present");
                remaining[p].remove(at);
            }
            for &p in &model.idx.post[c.transition] {
                remaining[p].push(tau + model.td[c.transition]);
            }
            for (p, ts) in remaining.iter().enumerate() {
                next.extend(ts.iter().map(|&a| TimedToken { place: model.idx.places[p].clone(), arrived: a as u64 }));
            }
            next.sort();
            out.push((model.idx.transitions[c.transition].clone(), tau as u64, TimedState { now: tau as u64, tokens: next }));
        }
    }
    Ok(out)
}

struct Completion {
    lo: u64,
    lo_state: usize,
    hi: Option<(u64, usize)>,
    dist_parent: Vec<Option<usize>>,
    longest: Vec<u64>,
    on_path: Vec<bool>,
}

fn completion_value(base: u64, off: i64) -> u64 {
    base + off.max(0) as u64
}

/// Earliest completion by Dijkstra; latest by longest path over the states
/// that can still reach acceptance.
fn completion(g: &TimedGraph) -> Option<Completion> {
    if g.accepting.is_empty() {
        return None;
    }
    let n = g.states.len();
    let mut dist = vec![u64::MAX; n];
    let mut dist_parent = vec![None; n];
    let mut heap = BinaryHeap::from([Reverse((0u64, 0usize))]);
    dist[0] = 0;
    while let Some(Reverse((d, s))) = heap.pop() {
        if d > dist[s] {
            continue;
        }
        for &e in &g.out[s] {
            let edge = &g.edges[e];
            let nd = d + edge.delay;
            if nd < dist[edge.target] {
                dist[edge.target] = nd;
                dist_parent[edge.target] = Some(e);
                heap.push(Reverse((nd, edge.target)));
            }
        }
    }
    let (lo, lo_state) = g.accepting.iter().map(|&(s, off)| (completion_value(dist[s], off), s)).min()?;

    // States reachable from the initial state that can reach acceptance.
    let mut preds = vec![Vec::new(); n];
    for (i, e) in g.edges.iter().enumerate() {
        preds[e.target].push(i);
    }
    let mut on_path = vec![false; n];
    let mut stack: Vec<usize> = g.accepting.iter().map(|&(s, _)| s).collect();
    for &s in &stack {
        on_path[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &e in &preds[s] {
            let src = g.edges[e].source;
            if !on_path[src] {
                on_path[src] = true;
                stack.push(src);
            }
        }
    }
    let relevant = |e: &TimedEdge| on_path[e.source] && on_path[e.target];

    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(n, g.edges.len());
    for _ in 0..n {
        graph.add_node(());
    }
    for e in g.edges.iter().filter(|e| relevant(e)) {
        graph.add_edge(NodeIndex::new(e.source), NodeIndex::new(e.target), ());
    }
    let sccs: Vec<Vec<usize>> = tarjan_scc(&graph).into_iter().map(|c| c.into_iter().map(NodeIndex::index).collect()).collect();
    let mut comp = vec![0; n];
    for (i, c) in sccs.iter().enumerate() {
        for &s in c {
            comp[s] = i;
        }
    }
    let unbounded = g.edges.iter().any(|e| relevant(e) && (e.open || (e.delay > 0 && comp[e.source] == comp[e.target])));
    let mut longest = vec![0u64; n];
    let hi = if unbounded {
        None
    } else {
        // Tarjan emits components in reverse topological order.
        for c in sccs.iter().rev() {
            for &s in c {
                for &e in &g.out[s] {
                    let edge = &g.edges[e];
                    if relevant(edge) && comp[edge.target] != comp[s] {
                        longest[edge.target] = longest[edge.target].max(longest[s] + edge.delay);
                    }
                }
            }
        }
        g.accepting.iter().map(|&(s, off)| (completion_value(longest[s], off), s)).max()
    };
    Some(Completion { lo, lo_state, hi, dist_parent, longest, on_path })
}

fn earliest_path(g: &TimedGraph, c: &Completion) -> Vec<usize> {
    let mut path = Vec::new();
    let mut s = c.lo_state;
    while let Some(e) = c.dist_parent[s] {
        path.push(e);
        s = g.edges[e].source;
    }
    path.reverse();
    path
}

/// Shortest path from the initial state to `target` using only edges that
/// realize the longest-path distances.
fn latest_path(g: &TimedGraph, c: &Completion, target: usize) -> Vec<usize> {
    let mut via: Vec<Option<usize>> = vec![None; g.states.len()];
    let mut seen = vec![false; g.states.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        if s == target {
            break;
        }
        for &e in &g.out[s] {
            let edge = &g.edges[e];
            let tight = c.on_path[edge.target] && c.longest[s] + edge.delay == c.longest[edge.target];
            if tight && !seen[edge.target] {
                seen[edge.target] = true;
                via[edge.target] = Some(e);
                queue.push_back(edge.target);
            }
        }
    }
    let mut path = Vec::new();
    let mut s = target;
    while let Some(e) = via[s] {
        path.push(e);
        s = g.edges[e].source;
    }
    path.reverse();
    path
}

/// Per place: arrival time and producing transition of each token.
type Provenance = Vec<Vec<(i64, Option<usize>)>>;

/// Concrete replay of a path, tracking arrival times and producers.
fn replay(model: &Model, g: &TimedGraph, path: &[usize]) -> (i64, Provenance) {
    let mut tokens: Provenance = vec![Vec::new(); model.idx.places.len()];
    if let Some(entry) = model.idx.entry {
        tokens[entry].push((0, None));
    }
    let mut now = 0i64;
    for &e in path {
        let edge = &g.edges[e];
        for (&p, &off) in model.idx.pre[edge.t].iter().zip(&edge.combo) {
            let at = tokens[p]
                .iter()
                .position(|&(a, _)| (a - now).max(-model.sat[p]) == off)
                .expect("replayed token matches abstract state");
            tokens[p].remove(at);
        }
        now += edge.delay as i64;
        for &p in &model.idx.post[edge.t] {
            tokens[p].push((now + model.td[edge.t], Some(edge.t)));
        }
    }
    (now, tokens)
}

fn all_combos<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    choices.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut c = prefix.clone();
                    c.push(o.clone());
                    c
                })
            })
            .collect()
    })
}

/// Finds durations that push a token past another input's consumable window.
fn overshoots(model: &Model, g: &TimedGraph, t: usize, path: &[usize]) -> Vec<(usize, usize)> {
    let (now, tokens) = replay(model, g, path);
    let pre = &model.idx.pre[t];
    let choices: Vec<Vec<(i64, Option<usize>)>> = pre.iter().map(|&p| tokens[p].clone()).collect();
    let mut found = Vec::new();
    for combo in all_combos(&choices) {
        let arrivals: Vec<i64> = combo.iter().map(|&(a, _)| a).collect();
        let Some((late, _)) = pre.iter().zip(&arrivals).enumerate().max_by_key(|(_, (&p, &a))| a + model.pmin[p]) else {
            continue;
        };
        let Some(producer) = combo[late].1.filter(|&u| model.td[u] > 0) else { continue };
        let deadline_place = pre
            .iter()
            .zip(&arrivals)
            .filter_map(|(&p, &a)| model.pmax[p].map(|m| (a + m, p)))
            .min()
            .map(|(_, p)| p);
        let Some(place) = deadline_place else { continue };
        let mut earlier = arrivals.clone();
        earlier[late] -= model.td[producer];
        let (lo, hi) = model.window(t, &earlier, now);
        if hi.is_none_or(|h| lo <= h) && !found.contains(&(producer, place)) {
            found.push((producer, place));
        }
    }
    found
}

fn consistency_violations(model: &Model, g: &TimedGraph) -> Vec<TimingViolation> {
    let mut out = Vec::new();
    for (&t, &state) in &g.empty_windows {
        let path = g.path_to(state);
        let witness = g.steps(&path);
        let name = &model.idx.transitions[t];
        out.push(TimingViolation {
            kind: TimingViolationKind::EmptyWindow,
            transition: Some(name.clone()),
            place: None,
            message: format!("no choice of input tokens leaves a firing window for `{name}`"),
            witness: witness.clone(),
        });
        for (producer, place) in overshoots(model, g, t, &path) {
            let (u, p) = (&model.idx.transitions[producer], &model.idx.places[place]);
            out.push(TimingViolation {
                kind: TimingViolationKind::DurationOvershoot,
                transition: Some(u.clone()),
                place: Some(p.clone()),
                message: format!("duration {} of `{u}` outlasts the window of `{p}` at `{name}`", model.td[producer]),
                witness: witness.clone(),
            });
        }
    }
    out
}

/// Decides whether some timed run reaches `{exit: 1}` respecting every
/// window (and the deadline, if given), and bounds its completion time.
pub fn check_schedulability(net: &Net, deadline: Option<u64>, lim: ExploreLimits) -> Result<ScheduleReport, NetError> {
    let model = Model::new(net)?;
    let g = explore(&model, lim);
    let mut violations = consistency_violations(&model, &g);
    let comp = completion(&g);
    let meets = comp.as_ref().is_some_and(|c| deadline.is_none_or(|d| c.lo <= d));
    let schedulable = if meets {
        Verdict::Yes
    } else if g.truncated {
        Verdict::Unknown
    } else {
        Verdict::No
    };
    let mut report = ScheduleReport {
        schedulable,
        deadline,
        completion: None,
        earliest_witness: None,
        latest_witness: None,
        violations: Vec::new(),
        states_explored: g.states.len(),
        truncated: g.truncated,
    };
    if let Some(c) = &comp {
        let earliest = g.steps(&earliest_path(&g, c));
        if let (Some(d), false) = (deadline, meets || g.truncated) {
            violations.push(TimingViolation {
                kind: TimingViolationKind::DeadlineMissed,
                transition: None,
                place: None,
                message: format!("earliest completion {} is after the deadline {d}", c.lo),
                witness: earliest.clone(),
            });
        }
        report.earliest_witness = Some(earliest);
        report.latest_witness = c.hi.map(|(_, s)| g.steps(&latest_path(&g, c, s)));
        if !g.truncated {
            report.completion = Some(TimeInterval { lo: c.lo, hi: c.hi.map(|(h, _)| h) });
        }
    }
    report.violations = violations;
    Ok(report)
}

/// Empty firing windows and durations that overshoot downstream windows,
/// each with a shortest witness. An empty list means the net is consistent.
pub fn check_time_consistency(net: &Net, lim: ExploreLimits) -> Result<Vec<TimingViolation>, NetError> {
    let model = Model::new(net)?;
    Ok(consistency_violations(&model, &explore(&model, lim)))
}
