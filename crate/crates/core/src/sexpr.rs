//! A small s-expression reader shared by the expression parser, the rule
//! compiler and the problem-file format. Supports `;` line comments.

use crate::error::{ParseError, Pos};

#[derive(Clone, Debug, PartialEq)]
pub enum Sexpr {
    Atom(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    pub fn pos(&self) -> Pos {
        match self {
            Sexpr::Atom(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

#[derive(Debug, PartialEq)]
enum Token {
    LParen(Pos),
    RParen(Pos),
    Atom(String, Pos),
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
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

    fn next_token(&mut self) -> Option<Token> {
        loop {
            let c = *self.chars.peek()?;
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                ';' => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                '(' => {
                    let p = self.pos();
                    self.bump();
                    return Some(Token::LParen(p));
                }
                ')' => {
                    let p = self.pos();
                    self.bump();
                    return Some(Token::RParen(p));
                }
                _ => {
                    let p = self.pos();
                    let mut atom = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                            break;
                        }
                        atom.push(c);
                        self.bump();
                    }
                    return Some(Token::Atom(atom, p));
                }
            }
        }
    }
}

/// Parses every top-level form in `text`.
pub fn parse_many(text: &str) -> Result<Vec<Sexpr>, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    while let Some(t) = lexer.next_token() {
        tokens.push(t);
    }
    let end = lexer.pos();

    let mut out = Vec::new();
    let mut stack: Vec<(Vec<Sexpr>, Pos)> = Vec::new();
    for tok in tokens {
        match tok {
            Token::LParen(p) => stack.push((Vec::new(), p)),
            Token::RParen(p) => {
                let (items, open) = stack
                    .pop()
                    .ok_or_else(|| ParseError::new(p, "unmatched `)`"))?;
                let list = Sexpr::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => out.push(list),
                }
            }
            Token::Atom(s, p) => {
                let atom = Sexpr::Atom(s, p);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(atom),
                    None => out.push(atom),
                }
            }
        }
    }
    if let Some((_, open)) = stack.last() {
        return Err(ParseError::new(*open, "unclosed `(`"));
    }
    let _ = end;
    Ok(out)
}

/// Parses exactly one form.
pub fn parse_one(text: &str) -> Result<Sexpr, ParseError> {
    let mut forms = parse_many(text)?;
    match forms.len() {
        0 => Err(ParseError::new(Pos { line: 1, col: 1 }, "empty input")),
        1 => Ok(forms.pop().unwrap()),
        _ => Err(ParseError::new(
            forms[1].pos(),
            "expected a single expression, found trailing input",
        )),
    }
}
