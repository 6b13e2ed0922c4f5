use super::lexer::{lex, Cursor, Tok};
use super::{Diagnostic, Parsed, Pos, SourceDocument};
use crate::interval::TimeInterval;
use crate::pattern::PatternExpr;

struct Parser {
    cur: Cursor,
    warnings: Vec<Diagnostic>,
}

impl Parser {
    fn interval(&mut self) -> Result<TimeInterval, Diagnostic> {
        let (iv, pos) = self.cur.interval()?;
        if !iv.is_ordered() {
            return Err(Diagnostic::error("INTERVAL_ORDER", format!("interval {iv} has lo > hi"), pos));
        }
        Ok(iv)
    }

    fn named_interval(&mut self, key: &str) -> Result<TimeInterval, Diagnostic> {
        self.cur.expect_keyword(key)?;
        self.cur.expect(Tok::Eq)?;
        self.interval()
    }

    /// Comma-separated children, optionally followed by `tec=[..]`, up to `)`.
    fn children(&mut self) -> Result<(Vec<PatternExpr>, Option<TimeInterval>), Diagnostic> {
        let mut kids = vec![self.expr()?];
        let mut tec = None;
        while self.cur.peek().tok == Tok::Comma {
            self.cur.next();
            if self.cur.is_keyword("tec") {
                tec = Some(self.named_interval("tec")?);
                break;
            }
            kids.push(self.expr()?);
        }
        self.cur.expect(Tok::RParen)?;
        Ok((kids, tec))
    }

    fn expr(&mut self) -> Result<PatternExpr, Diagnostic> {
        let (head, pos) = self.cur.ident("`act`, `seq`, `par`, `cond` or `loop`")?;
        self.cur.expect(Tok::LParen)?;
        match head.as_str() {
            "act" => {
                let (id, _) = self.cur.ident("an activity identifier")?;
                self.cur.expect(Tok::Comma)?;
                let teb = self.named_interval("teb")?;
                self.cur.expect(Tok::RParen)?;
                Ok(PatternExpr::leaf(id, teb))
            }
            "seq" => {
                let (kids, tec) = self.children()?;
                if kids.len() < 2 {
                    return Err(Diagnostic::error("SEQ_ARITY", "seq needs at least two children", pos));
                }
                let tec = tec.unwrap_or(TimeInterval::ZERO);
                let mut kids = kids.into_iter();
                let first = kids.next().expect("two children");
                Ok(kids.fold(first, |acc, k| PatternExpr::seq(acc, k, tec)))
            }
            "par" => {
                let (mut kids, tec) = self.children()?;
                if tec.is_some() {
                    return Err(Diagnostic::error("UNEXPECTED_TEC", "par takes no tec", pos));
                }
                if kids.len() == 1 {
                    self.warnings.push(Diagnostic::warning("PAR_SINGLE", "parallel of one branch is that branch", pos));
                    return Ok(kids.pop().expect("one child"));
                }
                Ok(PatternExpr::par(kids))
            }
            "cond" => {
                let (kids, tec) = self.children()?;
                let tec = tec.unwrap_or(TimeInterval::ZERO);
                let mut kids = kids.into_iter();
                let pre = kids.next().expect("one child");
                let mut branches: Vec<PatternExpr> = kids.collect();
                match branches.len() {
                    0 => Err(Diagnostic::error("COND_ARITY", "cond needs a pre pattern and at least one branch", pos)),
                    1 => {
                        self.warnings.push(Diagnostic::warning("COND_SINGLE", "choice of one branch is a sequence", pos));
                        Ok(PatternExpr::seq(pre, branches.pop().expect("one branch"), tec))
                    }
                    _ => Ok(PatternExpr::cond(pre, branches, tec)),
                }
            }
            "loop" => {
                let body = self.expr()?;
                self.cur.expect(Tok::Comma)?;
                self.cur.expect_keyword("k")?;
                self.cur.expect(Tok::Eq)?;
                if self.cur.is_keyword("inf") {
                    let at = self.cur.next().pos;
                    return Err(Diagnostic::error("UNBOUNDED_LOOP", "loop count must be a finite constant", at));
                }
                let (k, kpos) = self.cur.nat("a loop count")?;
                if k == 0 {
                    return Err(Diagnostic::error("LOOP_COUNT", "loop count must be at least 1", kpos));
                }
                self.cur.expect(Tok::RParen)?;
                Ok(PatternExpr::repeat(body, k))
            }
            other => Err(Diagnostic::error("UNKNOWN_PATTERN", format!("`{other}` is not a pattern constructor"), pos)),
        }
    }
}

/// Parses a `.pat` document holding exactly one pattern expression.
pub fn parse_pattern(doc: &SourceDocument) -> Result<Parsed<PatternExpr>, Vec<Diagnostic>> {
    let toks = lex(&doc.text).map_err(|d| vec![d])?;
    let mut p = Parser { cur: Cursor::new(toks), warnings: Vec::new() };
    if p.cur.peek().tok == Tok::Eof {
        return Err(vec![Diagnostic::error("EMPTY_DOCUMENT", "document holds no pattern", Pos { line: 1, column: 1 })]);
    }
    let value = p.expr().map_err(|d| vec![d])?;
    if p.cur.peek().tok != Tok::Eof {
        return Err(vec![p.cur.unexpected("end of input")]);
    }
    Ok(Parsed { value, warnings: p.warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Parsed<PatternExpr>, Vec<Diagnostic>> {
        parse_pattern(&SourceDocument::from_memory(text))
    }

    fn code(text: &str) -> String {
        parse(text).unwrap_err()[0].code.clone()
    }

    #[test]
    fn examples() {
        let e = parse("seq(act(i, teb=[1,2]), act(j, teb=[2,3]), tec=[0,1])").unwrap().value;
        assert!(matches!(&e, PatternExpr::Seq { connector_tec, .. } if *connector_tec == TimeInterval::new(0, 1)));
        let e = parse("loop(act(i, teb=[1,2]), k=3)").unwrap().value;
        assert!(matches!(e, PatternExpr::Loop { k: 3, .. }));
        let p = parse("par(act(i, teb=[1,2]))").unwrap();
        assert_eq!(p.warnings[0].code, "PAR_SINGLE");
        assert!(matches!(p.value, PatternExpr::Leaf { .. }));
    }

    #[test]
    fn round_trips_through_display() {
        let text = "cond(act(p, teb=[0,0]), par(act(a, teb=[1,4]), act(b, teb=[2,inf])), loop(act(c, teb=[1,2]), k=2), tec=[0,3])";
        let e = parse(text).unwrap().value;
        assert_eq!(e.to_string(), text);
        let nary = parse("seq(act(a, teb=[1,1]), act(b, teb=[1,1]), act(c, teb=[1,1]))").unwrap().value;
        assert_eq!(parse(&nary.to_string()).unwrap().value, nary);
    }

    #[test]
    fn errors() {
        assert_eq!(code("loop(act(i, teb=[1,2]), k=0)"), "LOOP_COUNT");
        assert_eq!(code("loop(act(i, teb=[1,2]), k=inf)"), "UNBOUNDED_LOOP");
        assert_eq!(code("act(i, teb=[3,1])"), "INTERVAL_ORDER");
        assert_eq!(code("act(i, teb=[inf,1])"), "INF_LOWER");
        assert_eq!(code("seq(act(i, teb=[1,2]))"), "SEQ_ARITY");
        assert_eq!(code("cond(act(i, teb=[1,2]))"), "COND_ARITY");
        assert_eq!(code("star(act(i, teb=[1,2]))"), "UNKNOWN_PATTERN");
        assert_eq!(code("act(i, teb=[1,2]) x"), "EXPECTED_TOKEN");
        assert_eq!(code("  "), "EMPTY_DOCUMENT");
        let e = &parse("act(i,\n  teb=[1,2)").unwrap_err()[0];
        assert_eq!((e.line, e.column), (2, 11));
    }

    #[test]
    fn single_branch_cond_is_a_sequence() {
        let p = parse("cond(act(p, teb=[1,1]), act(a, teb=[2,2]), tec=[0,1])").unwrap();
        assert_eq!(p.warnings[0].code, "COND_SINGLE");
        assert!(matches!(p.value, PatternExpr::Seq { .. }));
    }
}
