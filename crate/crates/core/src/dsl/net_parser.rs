use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::lexer::{lex, Cursor, Tok};
use super::{Diagnostic, Parsed, Pos, SourceDocument};
use crate::hierarchy::{HierarchicalNet, TransitionRef};
use crate::interval::TimeInterval;
use crate::net::{validate_structure_with, Net, Place, PlaceRole, Transition, ValidationOptions};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub strict_intervals: bool,
}

struct Located<T> {
    value: T,
    pos: Pos,
}

struct PlaceDecl {
    id: Located<String>,
    entry: bool,
    exit: bool,
    tc: Option<Located<TimeInterval>>,
}

struct TransDecl {
    id: Located<String>,
    name: Option<String>,
    guard: Option<String>,
    pre: BTreeSet<String>,
    post: BTreeSet<String>,
    tc: Option<Located<TimeInterval>>,
    td: u64,
    refine: Option<Located<String>>,
    refinable: bool,
}

struct ArcDecl {
    source: Located<String>,
    target: Located<String>,
}

struct NetDecl {
    name: Located<String>,
    places: Vec<PlaceDecl>,
    transitions: Vec<TransDecl>,
    arcs: Vec<ArcDecl>,
}

struct Parser {
    cur: Cursor,
    /// Non-fatal diagnostics (both severities) gathered during the syntactic pass.
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn interval(&mut self) -> Result<Located<TimeInterval>, Diagnostic> {
        let (value, pos) = self.cur.interval()?;
        Ok(Located { value, pos })
    }

    fn labels(&mut self) -> Result<BTreeSet<String>, Diagnostic> {
        self.cur.expect(Tok::LBrace)?;
        let mut out = BTreeSet::new();
        if self.cur.peek().tok == Tok::RBrace {
            self.cur.next();
            return Ok(out);
        }
        loop {
            out.insert(self.cur.ident("a condition label")?.0);
            match self.cur.peek().tok {
                Tok::Comma => {
                    self.cur.next();
                }
                Tok::RBrace => {
                    self.cur.next();
                    return Ok(out);
                }
                _ => return Err(self.cur.unexpected("`,` or `}`")),
            }
        }
    }

    fn place(&mut self) -> Result<PlaceDecl, Diagnostic> {
        let (id, pos) = self.cur.ident("a place identifier")?;
        let (mut entry, mut exit) = (false, false);
        if self.cur.is_keyword("entry") {
            self.cur.next();
            entry = true;
            if self.cur.is_keyword("exit") {
                self.cur.next();
                exit = true;
            }
        } else if self.cur.is_keyword("exit") {
            self.cur.next();
            exit = true;
        }
        let tc = if self.cur.is_keyword("tc") {
            self.cur.next();
            Some(self.interval()?)
        } else {
            None
        };
        self.cur.expect(Tok::Semi)?;
        Ok(PlaceDecl { id: Located { value: id, pos }, entry, exit, tc })
    }

    fn transition(&mut self) -> Result<TransDecl, Diagnostic> {
        let (id, pos) = self.cur.ident("a transition identifier")?;
        let mut decl = TransDecl {
            id: Located { value: id, pos },
            name: None,
            guard: None,
            pre: BTreeSet::new(),
            post: BTreeSet::new(),
            tc: None,
            td: 0,
            refine: None,
            refinable: false,
        };
        if let Tok::Str(s) = &self.cur.peek().tok {
            decl.name = Some(s.clone());
            self.cur.next();
        }
        if self.cur.is_keyword("guard") {
            self.cur.next();
            decl.guard = Some(self.cur.ident("a guard label")?.0);
        }
        if self.cur.is_keyword("pre") {
            self.cur.next();
            decl.pre = self.labels()?;
        }
        if self.cur.is_keyword("post") {
            self.cur.next();
            decl.post = self.labels()?;
        }
        if self.cur.is_keyword("tc") {
            self.cur.next();
            decl.tc = Some(self.interval()?);
        }
        if self.cur.is_keyword("td") {
            self.cur.next();
            match self.cur.peek().tok.clone() {
                Tok::Nat(n) => {
                    self.cur.next();
                    decl.td = n;
                }
                Tok::Negative(s) => {
                    let t = self.cur.next();
                    self.diags.push(Diagnostic::error("NEGATIVE_DURATION", format!("duration {s} is negative"), t.pos));
                }
                _ => return Err(self.cur.unexpected("a duration")),
            }
        }
        if self.cur.is_keyword("refine") {
            self.cur.next();
            let (target, pos) = self.cur.ident("a subnet name")?;
            decl.refine = Some(Located { value: target, pos });
            decl.refinable = true;
        } else if self.cur.is_keyword("refinable") {
            self.cur.next();
            decl.refinable = true;
        }
        self.cur.expect(Tok::Semi)?;
        Ok(decl)
    }

    fn net(&mut self) -> Result<NetDecl, Diagnostic> {
        self.cur.expect_keyword("net")?;
        let (name, pos) = self.cur.ident("a net name")?;
        self.cur.expect(Tok::LBrace)?;
        let mut decl = NetDecl { name: Located { value: name, pos }, places: Vec::new(), transitions: Vec::new(), arcs: Vec::new() };
        loop {
            let tok = self.cur.peek().clone();
            match &tok.tok {
                Tok::RBrace => {
                    self.cur.next();
                    return Ok(decl);
                }
                Tok::Ident(kw) if kw == "place" => {
                    self.cur.next();
                    decl.places.push(self.place()?);
                }
                Tok::Ident(kw) if kw == "trans" => {
                    self.cur.next();
                    decl.transitions.push(self.transition()?);
                }
                Tok::Ident(kw) if kw == "arc" => {
                    self.cur.next();
                    let (s, spos) = self.cur.ident("an arc source")?;
                    self.cur.expect(Tok::Arrow)?;
                    let (t, tpos) = self.cur.ident("an arc target")?;
                    self.cur.expect(Tok::Semi)?;
                    decl.arcs.push(ArcDecl { source: Located { value: s, pos: spos }, target: Located { value: t, pos: tpos } });
                }
                _ => return Err(self.cur.unexpected("`place`, `trans`, `arc` or `}`")),
            }
        }
    }
}

pub fn parse_net(doc: &SourceDocument) -> Result<Parsed<HierarchicalNet>, Vec<Diagnostic>> {
    parse_net_with(doc, ParseOptions::default())
}

/// Parses a net document. On success every net in the result passes
/// structural validation.
pub fn parse_net_with(doc: &SourceDocument, opts: ParseOptions) -> Result<Parsed<HierarchicalNet>, Vec<Diagnostic>> {
    let toks = lex(&doc.text).map_err(|d| vec![d])?;
    let mut p = Parser { cur: Cursor::new(toks), diags: Vec::new() };
    let mut decls = Vec::new();
    while p.cur.peek().tok != Tok::Eof {
        match p.net() {
            Ok(d) => decls.push(d),
            Err(e) => {
                p.diags.push(e);
                return Err(errors_only(p.diags));
            }
        }
    }
    if decls.is_empty() {
        p.diags.push(Diagnostic::error("EMPTY_DOCUMENT", "document declares no net", p.cur.peek().pos));
    }
    let mut diags = p.diags;

    let mut net_names: HashMap<&str, Pos> = HashMap::new();
    for d in &decls {
        if net_names.insert(&d.name.value, d.name.pos).is_some() {
            diags.push(Diagnostic::error("DUPLICATE_NET", format!("net `{}` is declared more than once", d.name.value), d.name.pos));
        }
    }

    let mut nets = Vec::new();
    let mut bindings = BTreeMap::new();
    let mut refine_pos = HashMap::new();
    for (i, d) in decls.iter().enumerate() {
        nets.push(build_net(d, opts, &mut diags));
        for t in &d.transitions {
            let Some(target) = &t.refine else { continue };
            if i > 0 && target.value == decls[0].name.value || i == 0 && target.value == d.name.value {
                diags.push(Diagnostic::error("ROOT_REFINEMENT", "the root net cannot refine a transition", target.pos));
            } else if !net_names.contains_key(target.value.as_str()) {
                diags.push(Diagnostic::error("UNKNOWN_SUBNET", format!("no net named `{}` in this document", target.value), target.pos));
            } else {
                let key = TransitionRef::new(&d.name.value, &t.id.value);
                refine_pos.insert(key.clone(), target.pos);
                bindings.insert(key, target.value.clone());
            }
        }
    }

    if diags.iter().any(Diagnostic::is_error) {
        return Err(errors_only(diags));
    }

    let mut nets = nets.into_iter();
    let mut h = HierarchicalNet::new(nets.next().expect("at least one net"));
    for n in nets {
        h.subnets.insert(n.name.clone(), n);
    }
    h.bindings = bindings;
    if let Some(path) = h.find_cycle() {
        let first = h.bindings.iter().find(|(t, target)| t.net == path[0] && **target == path[1]).map(|(t, _)| t.clone());
        let pos = first.and_then(|t| refine_pos.get(&t).copied()).unwrap_or_default();
        return Err(vec![Diagnostic::error("REFINEMENT_CYCLE", format!("refinement cycle: {}", path.join(" -> ")), pos)]);
    }
    Ok(Parsed { value: h, warnings: diags })
}

fn errors_only(diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    let mut errs: Vec<Diagnostic> = diags.into_iter().filter(Diagnostic::is_error).collect();
    errs.sort_by_key(|d| (d.line, d.column));
    errs
}

fn build_net(d: &NetDecl, opts: ParseOptions, diags: &mut Vec<Diagnostic>) -> Net {
    let mut net = Net::new(&d.name.value);
    let mut kinds: HashMap<&str, (bool, Pos)> = HashMap::new();
    let check_interval = |tc: &Option<Located<TimeInterval>>, owner: &str, diags: &mut Vec<Diagnostic>| {
        let Some(tc) = tc else { return };
        if !tc.value.is_ordered() {
            diags.push(Diagnostic::error("INTERVAL_ORDER", format!("interval {} on `{owner}` has lo > hi", tc.value), tc.pos));
        } else if opts.strict_intervals && !tc.value.is_bounded() {
            diags.push(Diagnostic::error("UNBOUNDED_INTERVAL", format!("interval {} on `{owner}` is unbounded", tc.value), tc.pos));
        } else if opts.strict_intervals && !tc.value.is_strict() {
            diags.push(Diagnostic::error("INTERVAL_NOT_STRICT", format!("interval {} on `{owner}` needs lo < hi", tc.value), tc.pos));
        }
    };

    let (mut entry, mut exit): (Option<&Located<String>>, Option<&Located<String>>) = (None, None);
    for p in &d.places {
        if kinds.insert(&p.id.value, (true, p.id.pos)).is_some() {
            diags.push(Diagnostic::error("DUPLICATE_ID", format!("id `{}` is already declared", p.id.value), p.id.pos));
            continue;
        }
        check_interval(&p.tc, &p.id.value, diags);
        if p.entry {
            if entry.is_some() {
                diags.push(Diagnostic::error("MULTIPLE_ENTRY", format!("`{}` is a second entry place", p.id.value), p.id.pos));
            }
            entry = Some(&p.id);
        }
        if p.exit {
            if exit.is_some() {
                diags.push(Diagnostic::error("MULTIPLE_EXIT", format!("`{}` is a second exit place", p.id.value), p.id.pos));
            }
            exit = Some(&p.id);
        }
        let role = if p.entry {
            PlaceRole::Entry
        } else if p.exit {
            PlaceRole::Exit
        } else {
            PlaceRole::Internal
        };
        net.places.push(Place { id: p.id.value.clone(), role, window: p.tc.as_ref().map(|l| l.value) });
    }
    for t in &d.transitions {
        if kinds.insert(&t.id.value, (false, t.id.pos)).is_some() {
            diags.push(Diagnostic::error("DUPLICATE_ID", format!("id `{}` is already declared", t.id.value), t.id.pos));
            continue;
        }
        check_interval(&t.tc, &t.id.value, diags);
        net.transitions.push(Transition {
            id: t.id.value.clone(),
            name: t.name.clone(),
            guard: t.guard.clone(),
            pre_conditions: t.pre.clone(),
            post_conditions: t.post.clone(),
            window: t.tc.as_ref().map(|l| l.value),
            duration: t.td,
            refinable: t.refinable,
        });
    }
    match entry {
        Some(e) => net.entry = Some(e.value.clone()),
        None => diags.push(Diagnostic::error("MISSING_ENTRY", format!("net `{}` has no entry place", d.name.value), d.name.pos)),
    }
    match exit {
        Some(x) => net.exit = Some(x.value.clone()),
        None => diags.push(Diagnostic::error("MISSING_EXIT", format!("net `{}` has no exit place", d.name.value), d.name.pos)),
    }

    let mut seen = BTreeSet::new();
    for a in &d.arcs {
        let s = kinds.get(a.source.value.as_str());
        let t = kinds.get(a.target.value.as_str());
        for (end, kind) in [(&a.source, s), (&a.target, t)] {
            if kind.is_none() {
                diags.push(Diagnostic::error("UNKNOWN_NODE", format!("`{}` is not declared in net `{}`", end.value, d.name.value), end.pos));
            }
        }
        let (Some(s), Some(t)) = (s, t) else { continue };
        if s.0 == t.0 {
            let what = if s.0 { "place to place" } else { "transition to transition" };
            diags.push(Diagnostic::error("ARC_SHAPE", format!("arc connects {what}"), a.source.pos));
        } else if !seen.insert((&a.source.value, &a.target.value)) {
            diags.push(Diagnostic::error("DUPLICATE_ARC", format!("arc {} -> {} is already declared", a.source.value, a.target.value), a.source.pos));
        } else {
            net.add_arc(&a.source.value, &a.target.value);
        }
    }
    net.canonicalize();

    // Anything the checks above missed still surfaces, attached to the net name.
    let had_errors = diags.iter().any(Diagnostic::is_error);
    if !had_errors {
        let report = validate_structure_with(&net, ValidationOptions { strict_intervals: opts.strict_intervals });
        for v in report.violations {
            let pos = kinds.get(v.location.as_str()).map_or(d.name.pos, |k| k.1);
            diags.push(Diagnostic::error(v.code.as_str(), v.message, pos));
        }
    }
    net
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::validate_structure;

    fn parse(text: &str) -> Result<Parsed<HierarchicalNet>, Vec<Diagnostic>> {
        parse_net(&SourceDocument::from_memory(text))
    }

    #[test]
    fn simple_net() {
        let h = parse("net A { place p0 entry; place p1 exit; trans t1; arc p0 -> t1; arc t1 -> p1; }").unwrap().value;
        assert_eq!(h.root.places.len(), 2);
        assert_eq!(h.root.transitions.len(), 1);
        assert_eq!(h.root.arcs.len(), 2);
        assert!(validate_structure(&h.root).is_valid());
    }

    #[test]
    fn interval_order_is_positioned() {
        let errs = parse("net A { place p0 entry; place p1 exit;\n  trans t1 tc [5,2]; }").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].code, "INTERVAL_ORDER");
        assert_eq!((errs[0].line, errs[0].column), (2, 15));
    }

    #[test]
    fn refinement_binding() {
        let text = "net A { place i entry; place o exit; trans t1 refine Sub; arc i -> t1; arc t1 -> o; }\n\
                    net Sub { place i entry; place o exit; trans x; arc i -> x; arc x -> o; }";
        let h = parse(text).unwrap().value;
        assert!(h.root.transition("t1").unwrap().refinable);
        assert_eq!(h.bindings.get(&TransitionRef::new("A", "t1")).map(String::as_str), Some("Sub"));
    }

    #[test]
    fn semantic_errors() {
        let codes = |text: &str| parse(text).unwrap_err().into_iter().map(|d| d.code).collect::<Vec<_>>();
        assert_eq!(codes("net A { place p entry; place p exit; }"), vec!["MISSING_EXIT", "DUPLICATE_ID"]);
        assert_eq!(codes("net A { place p entry; place q exit; arc p -> z; }"), vec!["UNKNOWN_NODE"]);
        assert_eq!(codes("net A { place p entry; place q exit; arc p -> q; }"), vec!["ARC_SHAPE"]);
        assert_eq!(codes("net A { place p entry exit; trans t refine B; }"), vec!["UNKNOWN_SUBNET"]);
        assert_eq!(codes("net A { place p entry exit; trans t td -3; }"), vec!["NEGATIVE_DURATION"]);
        assert_eq!(codes("net A { place p entry exit; }\nnet A { place p entry exit; }"), vec!["DUPLICATE_NET"]);
        assert_eq!(codes("net A { place p entry exit tc [inf,3]; }"), vec!["INF_LOWER"]);
        assert_eq!(codes(""), vec!["EMPTY_DOCUMENT"]);
        assert_eq!(codes("net A { place p entry exit }"), vec!["EXPECTED_TOKEN"]);
    }

    #[test]
    fn cycles_and_root_refinement() {
        let text = "net R { place i entry exit; }\n\
                    net A { place i entry; place o exit; trans a refine B; arc i -> a; arc a -> o; }\n\
                    net B { place i entry; place o exit; trans b refine A; arc i -> b; arc b -> o; }";
        let errs = parse(text).unwrap_err();
        assert_eq!(errs[0].code, "REFINEMENT_CYCLE");
        assert_eq!(errs[0].line, 2);
        let errs = parse("net R { place i entry exit; trans t refine R; }").unwrap_err();
        assert_eq!(errs[0].code, "ROOT_REFINEMENT");
    }

    #[test]
    fn strict_mode() {
        let doc = SourceDocument::from_memory("net A { place p entry exit tc [3,3]; }");
        assert!(parse_net(&doc).is_ok());
        let errs = parse_net_with(&doc, ParseOptions { strict_intervals: true }).unwrap_err();
        assert_eq!(errs[0].code, "INTERVAL_NOT_STRICT");
    }

    #[test]
    fn full_transition_syntax() {
        let text = r#"net A { place p entry; place q exit;
            trans t "Svc" guard ok pre {a, b} post {} tc [1,inf] td 4 refinable;
            arc p -> t; arc t -> q; }"#;
        let h = parse(text).unwrap().value;
        let t = h.root.transition("t").unwrap();
        assert_eq!(t.name.as_deref(), Some("Svc"));
        assert_eq!(t.guard.as_deref(), Some("ok"));
        assert_eq!(t.pre_conditions.len(), 2);
        assert_eq!(t.window, Some(TimeInterval::unbounded(1)));
        assert_eq!(t.duration, 4);
        assert!(t.refinable);
        assert!(h.bindings.is_empty());
    }
}
