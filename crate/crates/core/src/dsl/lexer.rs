use super::{Diagnostic, Pos};
use crate::interval::TimeInterval;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Nat(u64),
    /// A `-` immediately followed by digits; only ever an error.
    Negative(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Arrow,
    Eq,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Nat(n) => format!("number {n}"),
            Tok::Negative(s) => format!("negative number {s}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let start = i;
        let single = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        let tok = if let Some(t) = single {
            i += 1;
            t
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            Tok::Arrow
        } else if c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Negative(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            match digits.parse::<u64>() {
                Ok(n) => Tok::Nat(n),
                Err(_) => return Err(Diagnostic::error("NUMBER_OVERFLOW", format!("number {digits} is too large"), pos)),
            }
        } else if is_ident_start(c) {
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(Diagnostic::error("UNTERMINATED_STRING", "string literal is not terminated", pos));
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        let esc = match chars.get(i + 1) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            _ => {
                                let at = Pos { line, column: col + (i - start) };
                                return Err(Diagnostic::error("BAD_ESCAPE", "unknown escape sequence in string", at));
                            }
                        };
                        s.push(esc);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            Tok::Str(s)
        } else {
            return Err(Diagnostic::error("UNEXPECTED_CHAR", format!("unexpected character {c:?}"), pos));
        };
        col += i - start;
        out.push(Token { tok, pos });
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, column: col } });
    Ok(out)
}

/// Shared cursor over a token stream.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub(crate) fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, at: 0 }
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.toks[self.at.min(self.toks.len() - 1)]
    }

    pub(crate) fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.toks.len() - 1 {
            self.at += 1;
        }
        t
    }

    pub(crate) fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    pub(crate) fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::error("EXPECTED_TOKEN", format!("expected {expected}, found {}", t.tok.describe()), t.pos)
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<Token, Diagnostic> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> Result<Token, Diagnostic> {
        if self.is_keyword(kw) {
            Ok(self.next())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<(String, Pos), Diagnostic> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.next().pos))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub(crate) fn nat(&mut self, what: &str) -> Result<(u64, Pos), Diagnostic> {
        match &self.peek().tok {
            Tok::Nat(n) => {
                let n = *n;
                Ok((n, self.next().pos))
            }
            Tok::Negative(s) => {
                let s = s.clone();
                Err(Diagnostic::error("NEGATIVE_TIME", format!("{s} is negative"), self.next().pos))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// `[lo, hi]` with `inf` allowed only as `hi`. Order is not checked here.
    pub(crate) fn interval(&mut self) -> Result<(TimeInterval, Pos), Diagnostic> {
        let open = self.expect(Tok::LBracket)?;
        if self.is_keyword("inf") {
            return Err(Diagnostic::error("INF_LOWER", "`inf` is only allowed as an upper bound", self.next().pos));
        }
        let (lo, _) = self.nat("a lower bound")?;
        self.expect(Tok::Comma)?;
        let hi = if self.is_keyword("inf") {
            self.next();
            None
        } else {
            Some(self.nat("an upper bound or `inf`")?.0)
        };
        self.expect(Tok::RBracket)?;
        Ok((TimeInterval { lo, hi }, open.pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = lex("net A { # comment\n  arc p -> t;\n}").unwrap();
        let arc = toks.iter().find(|t| t.tok == Tok::Ident("arc".into())).unwrap();
        assert_eq!(arc.pos, Pos { line: 2, column: 3 });
        assert!(toks.iter().any(|t| t.tok == Tok::Arrow));
        assert_eq!(toks.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn strings_and_errors() {
        let toks = lex(r#""a \"b\"""#).unwrap();
        assert_eq!(toks[0].tok, Tok::Str("a \"b\"".into()));
        assert_eq!(lex("\"open").unwrap_err().code, "UNTERMINATED_STRING");
        let e = lex("x @").unwrap_err();
        assert_eq!((e.code.as_str(), e.line, e.column), ("UNEXPECTED_CHAR", 1, 3));
        assert_eq!(lex("99999999999999999999999").unwrap_err().code, "NUMBER_OVERFLOW");
        assert_eq!(lex("-4").unwrap()[0].tok, Tok::Negative("-4".into()));
    }
}
