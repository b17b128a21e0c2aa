//! Text form of equations.
//!
//! ```text
//! equation := side "=" side ;
//! side     := ["+"|"-"] term { ("+"|"-") term } | "0" ;
//! term     := [integer] variable ["^" integer] ;
//! variable := letter { letter | digit | "_" } ;
//! ```
//!
//! Whitespace is ignored. A missing coefficient or exponent means 1.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::model::{canonicalize, Equation, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParseErrorKind {
    UnexpectedToken,
    DuplicateVariable,
    ZeroCoefficient,
    ConstantTerm,
    MissingEquals,
    EmptySide,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{message} (at character {position})")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Caret,
    Equals,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::Ident(s) => format!("variable `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Equals => "`=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let chars: Vec<char> = text.chars().collect();
        let len = chars.len();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < len {
            let c = chars[i];
            let start = i;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let tok = if c.is_ascii_digit() {
                while i < len && chars[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Int(chars[start..i].iter().collect())
            } else if c.is_ascii_alphabetic() {
                while i < len && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            } else {
                i += 1;
                match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '^' => Tok::Caret,
                    '=' => Tok::Equals,
                    other => {
                        return Err(error(
                            start,
                            len,
                            ParseErrorKind::UnexpectedToken,
                            format!("unexpected character `{other}`"),
                        ))
                    }
                }
            };
            toks.push((tok, start));
        }
        toks.push((Tok::End, len));
        Ok(Parser { toks, at: 0, len })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        &self.toks[(self.at + offset).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let tok = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn fail(&self, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        error(self.pos(), self.len, kind, message.into())
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.fail(ParseErrorKind::UnexpectedToken, format!("expected {expected}, found {}", self.peek().describe()))
    }

    fn side(&mut self, positions: &mut HashMap<String, usize>) -> Result<Vec<Term>, ParseError> {
        if matches!(self.peek(), Tok::Equals | Tok::End) {
            return Err(self.fail(ParseErrorKind::EmptySide, "equation side is empty"));
        }
        if matches!(self.peek(), Tok::Int(s) if is_zero(s)) && matches!(self.peek_at(1), Tok::Equals | Tok::End) {
            self.bump();
            return Ok(Vec::new());
        }
        let mut terms = Vec::new();
        let mut negative = match self.peek() {
            Tok::Plus => {
                self.bump();
                false
            }
            Tok::Minus => {
                self.bump();
                true
            }
            _ => false,
        };
        loop {
            terms.push(self.term(negative, positions)?);
            negative = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
        }
        Ok(terms)
    }

    fn term(&mut self, negative: bool, positions: &mut HashMap<String, usize>) -> Result<Term, ParseError> {
        let start = self.pos();
        let magnitude = match self.peek().clone() {
            Tok::Int(digits) => {
                self.bump();
                let value: i128 = digits.parse().map_err(|_| {
                    error(
                        start,
                        self.len,
                        ParseErrorKind::UnexpectedToken,
                        format!("coefficient `{digits}` is too large"),
                    )
                })?;
                if value == 0 {
                    return Err(error(start, self.len, ParseErrorKind::ZeroCoefficient, "coefficient is zero".into()));
                }
                if !matches!(self.peek(), Tok::Ident(_)) {
                    return Err(error(
                        start,
                        self.len,
                        ParseErrorKind::ConstantTerm,
                        format!("constant term `{digits}` is not allowed"),
                    ));
                }
                value
            }
            Tok::Ident(_) => 1,
            _ => return Err(self.unexpected("a term")),
        };
        let var_pos = self.pos();
        let Tok::Ident(variable) = self.bump().0 else {
            unreachable!("checked above");
        };
        if positions.insert(variable.clone(), var_pos).is_some() {
            return Err(error(
                var_pos,
                self.len,
                ParseErrorKind::DuplicateVariable,
                format!("variable `{variable}` occurs more than once"),
            ));
        }
        let exponent = if matches!(self.peek(), Tok::Caret) {
            self.bump();
            let exp_pos = self.pos();
            match self.bump().0 {
                Tok::Int(digits) => match digits.parse::<u32>() {
                    Ok(0) => {
                        return Err(error(
                            exp_pos,
                            self.len,
                            ParseErrorKind::UnexpectedToken,
                            "exponent must be positive".into(),
                        ))
                    }
                    Ok(e) => e,
                    Err(_) => {
                        return Err(error(
                            exp_pos,
                            self.len,
                            ParseErrorKind::UnexpectedToken,
                            format!("exponent `{digits}` is too large"),
                        ))
                    }
                },
                other => {
                    return Err(error(
                        exp_pos,
                        self.len,
                        ParseErrorKind::UnexpectedToken,
                        format!("expected a positive integer exponent, found {}", other.describe()),
                    ))
                }
            }
        } else {
            1
        };
        let coefficient = if negative { -magnitude } else { magnitude };
        Ok(Term { coefficient, variable, exponent })
    }
}

fn is_zero(digits: &str) -> bool {
    digits.bytes().all(|b| b == b'0')
}

fn error(position: usize, len: usize, kind: ParseErrorKind, message: String) -> ParseError {
    // End-of-input errors point at the last character.
    let position = if len == 0 { 0 } else { position.min(len - 1) };
    ParseError { position, kind, message }
}

/// Parses `text` and canonicalizes the result.
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    let mut parser = Parser::new(text)?;
    let mut positions = HashMap::new();
    let lhs = parser.side(&mut positions)?;
    match parser.peek() {
        Tok::Equals => {
            parser.bump();
        }
        Tok::End => return Err(parser.fail(ParseErrorKind::MissingEquals, "missing `=`")),
        _ => return Err(parser.unexpected("`+`, `-` or `=`")),
    }
    let rhs = parser.side(&mut positions)?;
    if !matches!(parser.peek(), Tok::End) {
        return Err(parser.unexpected("`+`, `-` or end of input"));
    }
    let len = parser.len;
    match canonicalize(&lhs, &rhs) {
        Ok(eq) => Ok(eq.with_source_text(text)),
        Err(Error::EmptyEquation) => Err(error(0, len, ParseErrorKind::EmptySide, "both sides are 0".into())),
        Err(Error::DuplicateVariable(v)) => Err(error(
            positions[&v],
            len,
            ParseErrorKind::DuplicateVariable,
            format!("variable `{v}` occurs more than once"),
        )),
        Err(other) => Err(error(0, len, ParseErrorKind::UnexpectedToken, other.to_string())),
    }
}

/// Renders `eq` as `… = 0` with terms in canonical order.
///
/// `parse_equation(&format_equation(eq))` reproduces `eq` for every canonical
/// equation whose variable names are valid identifiers.
pub fn format_equation(eq: &Equation) -> String {
    let mut out = String::new();
    for (idx, term) in eq.terms().enumerate() {
        let negative = term.coefficient < 0;
        match (idx, negative) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        let magnitude = term.coefficient.unsigned_abs();
        if magnitude != 1 {
            write!(out, "{magnitude}").unwrap();
        }
        out.push_str(&term.variable);
        if term.exponent != 1 {
            write!(out, "^{}", term.exponent).unwrap();
        }
    }
    out.push_str(" = 0");
    out
}
