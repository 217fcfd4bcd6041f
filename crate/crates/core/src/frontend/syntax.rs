//! Tokenizer and raw (unresolved) syntax for theory files and tactic strings.

use std::fmt;

use super::FrontendError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMBOLS: &[&str] = &["-->", "->", "=", "|", ":", "(", ")", "[", "]", "{", "}", ";", ",", "."];

pub const KEYWORDS: &[&str] = &[
    "datatype", "fun", "where", "goal", "expect", "rule", "for", "case", "from", "forall",
];

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, FrontendError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') && chars.get(i + 2) != Some(&'>') {
            while i < chars.len() && chars[i] != '\n' {
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
            continue;
        }
        if c == '"' {
            advance(&mut i, &mut line, &mut col, c);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(FrontendError::Parse {
                            pos,
                            expected: vec!["closing `\"`".into()],
                            found: "end of line".into(),
                        })
                    }
                    Some('"') => {
                        advance(&mut i, &mut line, &mut col, '"');
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(&mut i, &mut line, &mut col, ch);
                    }
                }
            }
            out.push((Tok::Str(s), pos));
            continue;
        }
        if ident_char(c) {
            let mut s = String::new();
            while i < chars.len() {
                let ch = chars[i];
                let dotted = ch == '.' && chars.get(i + 1).is_some_and(|n| ident_char(*n)) && !s.is_empty();
                if ident_char(ch) || dotted {
                    s.push(ch);
                    advance(&mut i, &mut line, &mut col, ch);
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                for _ in 0..sym.len() {
                    let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
                }
                out.push((Tok::Sym(sym), pos));
            }
            None => {
                return Err(FrontendError::Parse {
                    pos,
                    expected: vec!["token".into()],
                    found: format!("`{c}`"),
                })
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTerm {
    Ident(String, Pos),
    App(Box<RawTerm>, Vec<RawTerm>),
}

impl RawTerm {
    pub fn pos(&self) -> Pos {
        match self {
            RawTerm::Ident(_, p) => *p,
            RawTerm::App(h, _) => h.pos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawProp {
    Eq(RawTerm, RawTerm),
    Imp(Box<RawProp>, Box<RawProp>),
    Forall(String, Box<RawProp>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawType {
    Name(String, Vec<RawType>, Pos),
    Arrow(Box<RawType>, Box<RawType>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRuleCase {
    pub conclusion: Vec<RawTerm>,
    pub hyps: Vec<Vec<RawTerm>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Datatype {
        name: String,
        params: Vec<String>,
        ctors: Vec<(String, Vec<RawType>, Pos)>,
        pos: Pos,
    },
    Fun {
        name: String,
        sig: RawType,
        clauses: Vec<(RawTerm, RawTerm)>,
        pos: Pos,
    },
    Goal {
        name: String,
        prop: RawProp,
        expect: Option<String>,
        pos: Pos,
    },
    Rule {
        name: String,
        target: String,
        cases: Vec<RawRuleCase>,
        pos: Pos,
    },
}

/// Recursive-descent parser over a token stream, with cheap backtracking.
pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, FrontendError>;

impl Parser {
    pub fn new(src: &str) -> PResult<Parser> {
        Ok(Parser { toks: tokenize(src)?, at: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(FrontendError::Parse {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&[&format!("`{s}`")])
        }
    }

    pub fn expect_keyword(&mut self, k: &str) -> PResult<()> {
        if self.is_keyword(k) {
            self.bump();
            Ok(())
        } else {
            self.error(&[&format!("`{k}`")])
        }
    }

    /// A non-keyword identifier.
    pub fn name(&mut self) -> PResult<(String, Pos)> {
        let pos = self.pos();
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok((s, pos))
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn at_atom_start(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            Tok::Sym("(") => true,
            _ => false,
        }
    }

    pub fn atom(&mut self) -> PResult<RawTerm> {
        if self.eat_sym("(") {
            let t = self.term()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        let (n, p) = self.name()?;
        Ok(RawTerm::Ident(n, p))
    }

    pub fn term(&mut self) -> PResult<RawTerm> {
        if !self.at_atom_start() {
            return self.error(&["term"]);
        }
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.at_atom_start() {
            args.push(self.atom()?);
        }
        Ok(if args.is_empty() { head } else { RawTerm::App(Box::new(head), args) })
    }

    pub fn prop(&mut self) -> PResult<RawProp> {
        if self.is_keyword("forall") {
            self.bump();
            let mut vars = vec![self.name()?.0];
            while !self.is_sym(".") {
                vars.push(self.name()?.0);
            }
            self.expect_sym(".")?;
            let body = self.prop()?;
            return Ok(vars.into_iter().rev().fold(body, |b, v| RawProp::Forall(v, Box::new(b))));
        }
        let lhs = self.prop_atom()?;
        if self.eat_sym("-->") {
            let rhs = self.prop()?;
            return Ok(RawProp::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn prop_atom(&mut self) -> PResult<RawProp> {
        if self.is_sym("(") {
            let save = self.at;
            self.bump();
            if let Ok(p) = self.prop() {
                if self.eat_sym(")") && !self.is_sym("=") && !self.at_atom_start() {
                    return Ok(p);
                }
            }
            self.at = save;
        }
        let l = self.term()?;
        self.expect_sym("=")?;
        let r = self.term()?;
        Ok(RawProp::Eq(l, r))
    }

    fn type_atom(&mut self) -> PResult<RawType> {
        if self.eat_sym("(") {
            let t = self.ty()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        let (n, p) = self.name()?;
        Ok(RawType::Name(n, Vec::new(), p))
    }

    pub fn ty(&mut self) -> PResult<RawType> {
        let base = if self.is_sym("(") {
            self.type_atom()?
        } else {
            let (n, p) = self.name()?;
            let mut args = Vec::new();
            while self.at_atom_start() {
                args.push(self.type_atom()?);
            }
            RawType::Name(n, args, p)
        };
        if self.eat_sym("->") {
            let rest = self.ty()?;
            return Ok(RawType::Arrow(Box::new(base), Box::new(rest)));
        }
        Ok(base)
    }

    fn tuple(&mut self) -> PResult<Vec<RawTerm>> {
        self.expect_sym("[")?;
        let mut out = vec![self.term()?];
        while self.eat_sym(",") {
            out.push(self.term()?);
        }
        self.expect_sym("]")?;
        Ok(out)
    }

    pub fn item(&mut self) -> PResult<Item> {
        let pos = self.pos();
        match self.peek() {
            Tok::Ident(k) if k == "datatype" => {
                self.bump();
                let (name, _) = self.name()?;
                let mut params = Vec::new();
                while !self.is_sym("=") {
                    params.push(self.name()?.0);
                }
                self.expect_sym("=")?;
                let mut ctors = Vec::new();
                loop {
                    let (c, cpos) = self.name()?;
                    let mut args = Vec::new();
                    while self.at_atom_start() {
                        args.push(self.type_atom()?);
                    }
                    ctors.push((c, args, cpos));
                    if !self.eat_sym("|") {
                        break;
                    }
                }
                Ok(Item::Datatype { name, params, ctors, pos })
            }
            Tok::Ident(k) if k == "fun" => {
                self.bump();
                let (name, _) = self.name()?;
                self.expect_sym(":")?;
                let sig = self.ty()?;
                self.expect_keyword("where")?;
                let mut clauses = Vec::new();
                loop {
                    let l = self.term()?;
                    self.expect_sym("=")?;
                    let r = self.term()?;
                    clauses.push((l, r));
                    if !self.eat_sym("|") {
                        break;
                    }
                }
                Ok(Item::Fun { name, sig, clauses, pos })
            }
            Tok::Ident(k) if k == "goal" => {
                self.bump();
                let (name, _) = self.name()?;
                self.expect_sym(":")?;
                let prop = self.prop()?;
                let expect = if self.is_keyword("expect") {
                    self.bump();
                    match self.bump() {
                        Tok::Str(s) => Some(s),
                        _ => {
                            self.at -= 1;
                            return self.error(&["string literal"]);
                        }
                    }
                } else {
                    None
                };
                Ok(Item::Goal { name, prop, expect, pos })
            }
            Tok::Ident(k) if k == "rule" => {
                self.bump();
                let (name, _) = self.name()?;
                self.expect_keyword("for")?;
                let (target, _) = self.name()?;
                self.expect_sym("{")?;
                let mut cases = Vec::new();
                while self.is_keyword("case") {
                    self.bump();
                    let conclusion = self.tuple()?;
                    let mut hyps = Vec::new();
                    if self.is_keyword("from") {
                        self.bump();
                        hyps.push(self.tuple()?);
                        while self.is_sym("[") {
                            hyps.push(self.tuple()?);
                        }
                    }
                    self.expect_sym(";")?;
                    cases.push(RawRuleCase { conclusion, hyps });
                }
                self.expect_sym("}")?;
                Ok(Item::Rule { name, target, cases, pos })
            }
            _ => self.error(&["`datatype`", "`fun`", "`goal`", "`rule`"]),
        }
    }

    pub fn items(&mut self) -> PResult<Vec<Item>> {
        let mut out = Vec::new();
        while !self.at_eof() {
            out.push(self.item()?);
        }
        Ok(out)
    }
}
