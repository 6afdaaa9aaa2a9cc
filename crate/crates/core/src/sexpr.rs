//! A small s-expression reader shared by the grammar and structure formats.
//!
//! Atoms are bare symbols (`Vfin`, `:class`, `12`) or double-quoted strings.
//! `;` starts a comment running to the end of the line.

use std::fmt;

use thiserror::Error;

/// Line and column (both 1-based) of a token in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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
pub enum Sexp {
    Symbol(String, Pos),
    Str(String, Pos),
    List(Vec<Sexp>, Pos),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError {
            pos,
            msg: msg.into(),
        }
    }
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }

    /// The head symbol of a list like `(head ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|items| items.first())
            .and_then(Sexp::as_symbol)
    }

    pub fn expect_symbol(&self, what: &str) -> Result<&str, SyntaxError> {
        self.as_symbol()
            .ok_or_else(|| SyntaxError::new(self.pos(), format!("expected {what}")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[Sexp], SyntaxError> {
        self.as_list()
            .ok_or_else(|| SyntaxError::new(self.pos(), format!("expected {what}")))
    }

    pub fn expect_usize(&self, what: &str) -> Result<usize, SyntaxError> {
        self.as_symbol()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| SyntaxError::new(self.pos(), format!("expected {what}")))
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, SyntaxError> {
        self.skip_trivia();
        let start = self.pos();
        match self.chars.peek().copied() {
            None => Err(SyntaxError::new(start, "unexpected end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(SyntaxError::new(start, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(SyntaxError::new(start, "unexpected ')'")),
            Some('"') => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        None => return Err(SyntaxError::new(start, "unterminated string")),
                        Some('"') => return Ok(Sexp::Str(text, start)),
                        Some('\\') => match self.bump() {
                            Some('n') => text.push('\n'),
                            Some('t') => text.push('\t'),
                            Some(c @ ('"' | '\\')) => text.push(c),
                            _ => {
                                return Err(SyntaxError::new(self.pos(), "bad escape in string"))
                            }
                        },
                        Some(c) => text.push(c),
                    }
                }
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(Sexp::Symbol(text, start))
            }
        }
    }
}

/// Reads exactly one top-level expression; trailing non-comment text is an error.
pub fn parse_one(text: &str) -> Result<Sexp, SyntaxError> {
    let mut reader = Reader::new(text);
    let expr = reader.read()?;
    reader.skip_trivia();
    if reader.chars.peek().is_some() {
        return Err(SyntaxError::new(reader.pos(), "trailing input after expression"));
    }
    Ok(expr)
}

/// Quotes a string for output, escaping `"` and `\`.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Keyword arguments and the remaining positional items.
pub type KeywordArgs<'a> = (Vec<(&'a str, &'a Sexp)>, Vec<&'a Sexp>);

/// Splits `:key value` pairs out of a list.
/// Items that are not part of a keyword pair are returned separately, in order.
pub fn keyword_args(items: &[Sexp]) -> Result<KeywordArgs<'_>, SyntaxError> {
    let mut pairs = Vec::new();
    let mut rest = Vec::new();
    let mut i = 0;
    while i < items.len() {
        match items[i].as_symbol() {
            Some(k) if k.starts_with(':') => {
                let value = items.get(i + 1).ok_or_else(|| {
                    SyntaxError::new(items[i].pos(), format!("missing value for {k}"))
                })?;
                pairs.push((k, value));
                i += 2;
            }
            _ => {
                rest.push(&items[i]);
                i += 1;
            }
        }
    }
    Ok((pairs, rest))
}
