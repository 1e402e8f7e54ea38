//! Hand-rolled LL(1) lexer and parser for the clause syntax, plus `render`
//! as the inverse direction.
//!
//! Grammar (comments run from `%` to end of line):
//!   program  := clause*
//!   clause   := atom ( ":-" body )? "."
//!   body     := literal ( "," literal )*
//!   literal  := "\+"? atom
//!   atom     := name ( "(" term ("," term)* ")" )?     ordinary atom
//!             | term "is" expr | term "<" expr          infix builtins
//!   term     := VAR | INT | name ( "(" term ("," term)* ")" )?
//!   expr     := mul ( ("+"|"-") mul )*                  left-associative
//!   mul      := prim ( "*" prim )*
//!   prim     := term | "(" expr ")"
//!
//! Names start lowercase; variables start with an uppercase letter or `_`.

use crate::lang::{Atom, Clause, Literal, Program, Term};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("parse error at line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    If,    // :-
    Naf,   // \+
    Is,    // is
    Lt,    // <
    Plus,
    Minus,
    Star,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) => write!(f, "'{s}'"),
            Tok::Var(s) => write!(f, "'{s}'"),
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Dot => write!(f, "'.'"),
            Tok::If => write!(f, "':-'"),
            Tok::Naf => write!(f, "'\\+'"),
            Tok::Is => write!(f, "'is'"),
            Tok::Lt => write!(f, "'<'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src: src.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, msg: String) -> ParseError {
        ParseError { line: self.line, col: self.col, msg }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, u32, u32)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.src.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '%' {
                    while let Some(&c) = self.src.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(&c) = self.src.peek() else {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            };
            let tok = match c {
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                '<' => {
                    self.bump();
                    Tok::Lt
                }
                '+' => {
                    self.bump();
                    Tok::Plus
                }
                '-' => {
                    self.bump();
                    Tok::Minus
                }
                '*' => {
                    self.bump();
                    Tok::Star
                }
                ':' => {
                    self.bump();
                    if self.src.peek() == Some(&'-') {
                        self.bump();
                        Tok::If
                    } else {
                        return Err(self.err("expected '-' after ':'".to_string()));
                    }
                }
                '\\' => {
                    self.bump();
                    if self.src.peek() == Some(&'+') {
                        self.bump();
                        Tok::Naf
                    } else {
                        return Err(self.err("expected '+' after '\\'".to_string()));
                    }
                }
                c if c.is_ascii_digit() => {
                    let mut n = String::new();
                    while let Some(&c) = self.src.peek() {
                        if c.is_ascii_digit() {
                            n.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    match n.parse::<i64>() {
                        Ok(v) => Tok::Int(v),
                        Err(_) => return Err(self.err(format!("integer out of range: {n}"))),
                    }
                }
                c if c.is_ascii_lowercase() => {
                    let name = self.ident();
                    if name == "is" {
                        Tok::Is
                    } else {
                        Tok::Name(name)
                    }
                }
                c if c.is_ascii_uppercase() || c == '_' => Tok::Var(self.ident()),
                other => return Err(self.err(format!("unexpected character '{other}'"))),
            };
            out.push((tok, line, col));
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(&c) = self.src.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }
}

pub const BUILTIN_PREDS: [(&str, usize); 4] = [("is", 2), ("<", 2), ("odd", 1), ("even", 1)];

const ARITH_OP_NAMES: [&str; 3] = ["+", "-", "*"];

pub fn is_builtin(pred: &str, arity: usize) -> bool {
    BUILTIN_PREDS.contains(&(pred, arity))
}

struct Parser {
    toks: Vec<(Tok, u32, u32)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (u32, u32) {
        (self.toks[self.pos].1, self.toks[self.pos].2)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: String) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, msg }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {}, found {}", want, self.peek())))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Var(name) => {
                self.bump();
                Ok(Term::var(&name))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Term::Int(n))
            }
            Tok::Name(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let mut args = vec![self.term()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Term::App(name, args))
                } else {
                    Ok(Term::constant(&name))
                }
            }
            other => Err(self.err(format!("expected term, found {other}"))),
        }
    }

    fn prim(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let e = self.expr()?;
            self.expect(Tok::RParen)?;
            Ok(e)
        } else {
            self.term()
        }
    }

    fn mul(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.prim()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.prim()?;
            acc = Term::App("*".to_string(), vec![acc, rhs]);
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.mul()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => "+",
                Tok::Minus => "-",
                _ => break,
            };
            self.bump();
            let rhs = self.mul()?;
            acc = Term::App(op.to_string(), vec![acc, rhs]);
        }
        Ok(acc)
    }

    /// Ordinary atom, or an infix builtin when `is`/`<` follows the first
    /// expression. Arithmetic is legal only at this level, never inside
    /// argument lists.
    fn atom(&mut self) -> Result<Atom, ParseError> {
        let (line, col) = self.here();
        let lhs = self.expr()?;
        match self.peek() {
            Tok::Is => {
                self.bump();
                let rhs = self.expr()?;
                Ok(Atom::new("is", vec![lhs, rhs]))
            }
            Tok::Lt => {
                self.bump();
                let rhs = self.expr()?;
                Ok(Atom::new("<", vec![lhs, rhs]))
            }
            _ => match lhs {
                Term::App(name, args) if !ARITH_OP_NAMES.contains(&name.as_str()) => {
                    Ok(Atom { pred: name, args })
                }
                other => Err(ParseError {
                    line,
                    col,
                    msg: format!("expected a predicate, found term '{other}'"),
                }),
            },
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if *self.peek() == Tok::Naf {
            self.bump();
            Ok(Literal::Neg(self.atom()?))
        } else {
            Ok(Literal::Pos(self.atom()?))
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let (line, col) = self.here();
        let head = self.atom()?;
        if is_builtin(&head.pred, head.arity()) {
            return Err(ParseError {
                line,
                col,
                msg: format!("program defines builtin predicate {}/{}", head.pred, head.arity()),
            });
        }
        let mut body = Vec::new();
        if *self.peek() == Tok::If {
            self.bump();
            body.push(self.literal()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                body.push(self.literal()?);
            }
        }
        self.expect(Tok::Dot)?;
        Ok(Clause::new(head, body))
    }
}

fn check_arities(clauses: &[Clause]) -> Result<(), ParseError> {
    let mut seen: std::collections::BTreeMap<String, usize> = std::collections::BTreeMap::new();
    let mut check = |a: &Atom| -> Result<(), ParseError> {
        match seen.get(&a.pred) {
            Some(&n) if n != a.arity() => Err(ParseError {
                line: 0,
                col: 0,
                msg: format!("predicate {} used with arities {} and {}", a.pred, n, a.arity()),
            }),
            Some(_) => Ok(()),
            None => {
                if !is_builtin(&a.pred, a.arity()) {
                    seen.insert(a.pred.clone(), a.arity());
                }
                Ok(())
            }
        }
    };
    for c in clauses {
        check(&c.head)?;
        for l in &c.body {
            if let Some(a) = l.atom() {
                check(a)?;
            }
        }
    }
    Ok(())
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let mut clauses = Vec::new();
    while *p.peek() != Tok::Eof {
        clauses.push(p.clause()?);
    }
    check_arities(&clauses)?;
    Ok(Program::new(clauses))
}

/// Exactly one positive atom; a trailing '.' is allowed.
pub fn parse_query(text: &str) -> Result<Atom, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    if *p.peek() == Tok::Naf {
        return Err(p.err("query must be a single positive atom".to_string()));
    }
    let a = p.atom()?;
    if *p.peek() == Tok::Dot {
        p.bump();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.err(format!("query must be a single positive atom, found {}", p.peek())));
    }
    Ok(a)
}

pub fn render_term(t: &Term) -> String {
    t.to_string()
}

pub fn render_atom(a: &Atom) -> String {
    a.to_string()
}

pub fn render_literal(l: &Literal) -> String {
    l.to_string()
}

pub fn render_clause(c: &Clause) -> String {
    c.to_string()
}

pub fn render_program(p: &Program) -> String {
    p.to_string()
}
