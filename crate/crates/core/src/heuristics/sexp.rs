//! S-expression reader with line/column positions.

use crate::frontend::Pos;

use super::HeuristicError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Symbol(String, Pos),
    Int(i64, Pos),
    Str(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol(_, p) | Sexp::Int(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            _ => None,
        }
    }
}

fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, HeuristicError> {
    Err(HeuristicError::Parse { pos, message: msg.into() })
}

/// Reads every top-level expression of `src`. `;` starts a line comment.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, HeuristicError> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1, 1);
    // stack of open lists: (items, position of the parenthesis)
    let mut stack: Vec<(Vec<Sexp>, Pos)> = vec![(Vec::new(), Pos { line: 1, col: 1 })];
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let mut step = |i: &mut usize, ch: char| {
            *i += 1;
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
        if c.is_whitespace() {
            step(&mut i, c);
        } else if c == ';' {
            while i < chars.len() && chars[i] != '\n' {
                let ch = chars[i];
                step(&mut i, ch);
            }
        } else if c == '(' {
            step(&mut i, c);
            stack.push((Vec::new(), pos));
        } else if c == ')' {
            step(&mut i, c);
            if stack.len() == 1 {
                return err(pos, "unbalanced `)`");
            }
            let (items, open) = stack.pop().expect("checked above");
            stack.last_mut().expect("outer list").0.push(Sexp::List(items, open));
        } else if c == '"' {
            step(&mut i, c);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return err(pos, "unterminated string"),
                    Some('"') => {
                        step(&mut i, '"');
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        step(&mut i, ch);
                    }
                }
            }
            stack.last_mut().expect("outer list").0.push(Sexp::Str(s, pos));
        } else {
            let mut s = String::new();
            while i < chars.len() && !chars[i].is_whitespace() && !"();\"".contains(chars[i]) {
                let ch = chars[i];
                s.push(ch);
                step(&mut i, ch);
            }
            let atom = match s.parse::<i64>() {
                Ok(n) => Sexp::Int(n, pos),
                Err(_) => Sexp::Symbol(s, pos),
            };
            stack.last_mut().expect("outer list").0.push(atom);
        }
    }
    if stack.len() > 1 {
        let (_, open) = stack.pop().expect("nonempty");
        return err(open, "unclosed `(`");
    }
    Ok(stack.pop().expect("top level").0)
}
