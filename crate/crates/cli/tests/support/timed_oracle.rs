//! Brute-force timed enumerator over absolute time. No age abstraction:
//! states carry the global clock and every token's arrival time, and every
//! integer firing time is tried. Only meant for acyclic nets with finite
//! transition windows, where every run is finite.

use std::collections::{BTreeSet, HashSet};

use hpnet_core::Net;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedOutcome {
    /// Completion times of all accepting runs.
    pub completions: BTreeSet<i64>,
    /// Transitions seen holding tokens on every input with no usable window.
    pub empty_windows: BTreeSet<String>,
}

struct Flat {
    places: Vec<String>,
    pmin: Vec<i64>,
    pmax: Vec<Option<i64>>,
    trans: Vec<String>,
    pre: Vec<Vec<usize>>,
    post: Vec<Vec<usize>>,
    tmin: Vec<i64>,
    tmax: Vec<Option<i64>>,
    td: Vec<i64>,
    exit: usize,
}

fn flat(net: &Net) -> Flat {
    let places: Vec<String> = net.places.iter().map(|p| p.id.clone()).collect();
    let pos = |id: &str| places.iter().position(|p| p == id);
    let trans: Vec<String> = net.transitions.iter().map(|t| t.id.clone()).collect();
    let pre = trans.iter().map(|t| net.arcs.iter().filter(|a| &a.target == t).filter_map(|a| pos(&a.source)).collect()).collect();
    let post = trans.iter().map(|t| net.arcs.iter().filter(|a| &a.source == t).filter_map(|a| pos(&a.target)).collect()).collect();
    Flat {
        pmin: net.places.iter().map(|p| p.effective_window().lo as i64).collect(),
        pmax: net.places.iter().map(|p| p.effective_window().hi.map(|h| h as i64)).collect(),
        tmin: net.transitions.iter().map(|t| t.effective_window().lo as i64).collect(),
        tmax: net.transitions.iter().map(|t| t.effective_window().hi.map(|h| h as i64)).collect(),
        td: net.transitions.iter().map(|t| t.duration as i64).collect(),
        exit: pos(net.exit.as_deref().unwrap()).unwrap(),
        places,
        trans,
        pre,
        post,
    }
}

/// Tokens as (place, arrival), kept sorted so equal states compare equal.
type Tokens = Vec<(usize, i64)>;

fn choices(f: &Flat, t: usize, tokens: &Tokens) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for &p in &f.pre[t] {
        let here: Vec<usize> = (0..tokens.len()).filter(|&i| tokens[i].0 == p).collect();
        out = out.iter().flat_map(|c| here.iter().map(move |&i| [c.clone(), vec![i]].concat())).collect();
    }
    out
}

fn bounds(f: &Flat, t: usize, tokens: &Tokens, pick: &[usize], now: i64) -> (i64, Option<i64>) {
    let ready = pick.iter().map(|&i| tokens[i].1 + f.pmin[tokens[i].0]).max().unwrap_or(now);
    let earliest = now.max(ready + f.tmin[t]);
    let mut latest = f.tmax[t].map(|m| ready + m);
    for &i in pick {
        if let Some(m) = f.pmax[tokens[i].0] {
            latest = Some(latest.map_or(tokens[i].1 + m, |l: i64| l.min(tokens[i].1 + m)));
        }
    }
    (earliest, latest)
}

pub fn enumerate(net: &Net, horizon: i64) -> TimedOutcome {
    let f = flat(net);
    let entry = f.places.iter().position(|p| Some(p.as_str()) == net.entry.as_deref()).unwrap();
    let mut out = TimedOutcome { completions: BTreeSet::new(), empty_windows: BTreeSet::new() };
    let mut seen: HashSet<(i64, Tokens)> = HashSet::new();
    let mut stack = vec![(0i64, vec![(entry, 0i64)])];
    while let Some((now, tokens)) = stack.pop() {
        if !seen.insert((now, tokens.clone())) {
            continue;
        }
        if tokens.len() == 1 && tokens[0].0 == f.exit {
            out.completions.insert(now.max(tokens[0].1));
        }
        // Usable (t, pick, earliest, latest) and the urgency deadline.
        let mut usable = Vec::new();
        let mut deadline: Option<i64> = None;
        for t in 0..f.trans.len() {
            if f.pre[t].iter().any(|&p| !tokens.iter().any(|tk| tk.0 == p)) {
                continue;
            }
            let mut last: Option<Option<i64>> = None;
            for pick in choices(&f, t, &tokens) {
                let (lo, hi) = bounds(&f, t, &tokens, &pick, now);
                if hi.is_some_and(|h| h < lo) {
                    continue;
                }
                last = Some(match (last, hi) {
                    (Some(None), _) | (_, None) => None,
                    (Some(Some(a)), Some(b)) => Some(a.max(b)),
                    (None, Some(b)) => Some(b),
                });
                usable.push((t, pick, lo, hi));
            }
            match last {
                None => {
                    out.empty_windows.insert(f.trans[t].clone());
                }
                Some(Some(l)) => deadline = Some(deadline.map_or(l, |d| d.min(l))),
                Some(None) => {}
            }
        }
        for (t, pick, lo, hi) in usable {
            let top = [hi, deadline].into_iter().flatten().min().unwrap_or(horizon).min(horizon);
            for tau in lo..=top {
                let mut next: Tokens = tokens.iter().enumerate().filter(|(i, _)| !pick.contains(i)).map(|(_, &tk)| tk).collect();
                next.extend(f.post[t].iter().map(|&p| (p, tau + f.td[t])));
                next.sort_unstable();
                stack.push((tau, next));
            }
        }
    }
    out
}
