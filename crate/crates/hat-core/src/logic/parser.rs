//! Recursive-descent parser for the surface formula syntax.

use super::{Formula, SetVar, Var, Vocabulary};
use thiserror::Error;

/// Syntax or well-formedness error, with a byte offset into the input.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("parse error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

pub(super) fn is_keyword(s: &str) -> bool {
    matches!(s, "E" | "A" | "ES" | "TC" | "in")
}

/// Parses a first-order formula; set-variable syntax is rejected.
pub fn parse_formula(text: &str, voc: &Vocabulary) -> Result<Formula, ParseError> {
    Parser::new(text, voc, false)?.run()
}

/// Parses a formula in NP mode, allowing `v in $V` and `ES $V..: f`.
pub fn parse_formula_np(text: &str, voc: &Vocabulary) -> Result<Formula, ParseError> {
    Parser::new(text, voc, true)?.run()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    SetVar(String),
    Keyword(&'static str),
    Zero,
    One,
    LParen,
    RParen,
    Comma,
    Colon,
    Semi,
    Bang,
    Amp,
    Pipe,
    Plus,
    Star,
    Arrow,
    Iff,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::SetVar(s) => write!(f, "set variable `${s}`"),
            Tok::Keyword(k) => write!(f, "`{k}`"),
            Tok::Zero => write!(f, "`0`"),
            Tok::One => write!(f, "`1`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Iff => write!(f, "`<->`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '(' => push(&mut toks, Tok::LParen, &mut i),
            ')' => push(&mut toks, Tok::RParen, &mut i),
            ',' => push(&mut toks, Tok::Comma, &mut i),
            ':' => push(&mut toks, Tok::Colon, &mut i),
            ';' => push(&mut toks, Tok::Semi, &mut i),
            '!' => push(&mut toks, Tok::Bang, &mut i),
            '&' => push(&mut toks, Tok::Amp, &mut i),
            '|' => push(&mut toks, Tok::Pipe, &mut i),
            '+' => push(&mut toks, Tok::Plus, &mut i),
            '*' => push(&mut toks, Tok::Star, &mut i),
            '0' => push(&mut toks, Tok::Zero, &mut i),
            '1' => push(&mut toks, Tok::One, &mut i),
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(ParseError { pos: i, msg: "expected `->`".into() });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((Tok::Iff, i));
                    i += 3;
                } else {
                    return Err(ParseError { pos: i, msg: "expected `<->`".into() });
                }
            }
            '$' => {
                let start = i + 1;
                let end = ident_end(bytes, start);
                if end == start {
                    return Err(ParseError { pos: i, msg: "expected identifier after `$`".into() });
                }
                toks.push((Tok::SetVar(text[start..end].to_string()), i));
                i = end;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let end = ident_end(bytes, i);
                let word = &text[i..end];
                let tok = match word {
                    "E" => Tok::Keyword("E"),
                    "A" => Tok::Keyword("A"),
                    "ES" => Tok::Keyword("ES"),
                    "TC" => Tok::Keyword("TC"),
                    "in" => Tok::Keyword("in"),
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((tok, i));
                i = end;
            }
            _ => {
                return Err(ParseError { pos: i, msg: format!("unexpected character `{c}`") });
            }
        }
    }
    toks.push((Tok::Eof, bytes.len()));
    Ok(toks)
}

fn push(toks: &mut Vec<(Tok, usize)>, t: Tok, i: &mut usize) {
    toks.push((t, *i));
    *i += 1;
}

fn ident_end(bytes: &[u8], start: usize) -> usize {
    let mut j = start;
    if j < bytes.len() && ((bytes[j] as char).is_ascii_alphabetic() || bytes[j] == b'_') {
        j += 1;
        while j < bytes.len() && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_') {
            j += 1;
        }
    }
    j
}

struct Parser<'v> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    voc: &'v Vocabulary,
    np_mode: bool,
}

impl<'v> Parser<'v> {
    fn new(text: &str, voc: &'v Vocabulary, np_mode: bool) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0, voc, np_mode })
    }

    fn run(mut self) -> Result<Formula, ParseError> {
        let f = self.formula()?;
        self.expect(Tok::Eof)?;
        Ok(f)
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {t}, found {}", self.peek())))
        }
    }

    fn err(&self, msg: String) -> ParseError {
        ParseError { pos: self.here(), msg }
    }

    /// formula := quantified | impliff
    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Keyword("E") => {
                self.bump();
                let vars = self.var_list()?;
                self.expect(Tok::Colon)?;
                let body = self.formula()?;
                Ok(Formula::exists_all(vars, body))
            }
            Tok::Keyword("A") => {
                self.bump();
                let vars = self.var_list()?;
                self.expect(Tok::Colon)?;
                let body = self.formula()?;
                Ok(Formula::forall_all(vars, body))
            }
            Tok::Keyword("ES") => {
                let pos = self.here();
                self.bump();
                if !self.np_mode {
                    return Err(ParseError {
                        pos,
                        msg: "set quantifier `ES` is only allowed in NP mode".into(),
                    });
                }
                let svars = self.set_var_list()?;
                self.expect(Tok::Colon)?;
                let body = self.formula()?;
                Ok(Formula::ExistsSets(svars, Box::new(body)))
            }
            _ => self.impliff(),
        }
    }

    /// impliff := or [ ("->" | "<->") formula ]   (right associative)
    fn impliff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_expr()?;
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                let rhs = self.formula()?;
                Ok(Formula::implies(lhs, rhs))
            }
            Tok::Iff => {
                self.bump();
                let rhs = self.formula()?;
                Ok(Formula::iff(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.and_expr()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            Ok(Formula::not(self.unary()?))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Zero => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::One => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Keyword("TC") => self.tc_form(),
            Tok::Ident(name) => {
                let pos = self.here();
                self.bump();
                match self.peek() {
                    Tok::LParen => {
                        self.bump();
                        let args = if *self.peek() == Tok::RParen {
                            Vec::new()
                        } else {
                            self.var_list()?
                        };
                        self.expect(Tok::RParen)?;
                        self.atom(&name, args, pos)
                    }
                    Tok::Plus | Tok::Star => {
                        let reflexive = *self.peek() == Tok::Star;
                        self.bump();
                        self.expect(Tok::LParen)?;
                        let a = self.var()?;
                        self.expect(Tok::Comma)?;
                        let b = self.var()?;
                        self.expect(Tok::RParen)?;
                        self.check_binary(&name, pos)?;
                        Ok(if reflexive {
                            Formula::tc_star(&name, a, b)
                        } else {
                            Formula::tc_plus(&name, a, b)
                        })
                    }
                    Tok::Keyword("in") => {
                        let in_pos = self.here();
                        self.bump();
                        if !self.np_mode {
                            return Err(ParseError {
                                pos: in_pos,
                                msg: "set membership `in` is only allowed in NP mode".into(),
                            });
                        }
                        match self.bump() {
                            Tok::SetVar(sv) => Ok(Formula::SetMember(name, sv)),
                            other => Err(ParseError {
                                pos: in_pos,
                                msg: format!("expected set variable after `in`, found {other}"),
                            }),
                        }
                    }
                    other => Err(ParseError {
                        pos: self.here(),
                        msg: format!(
                            "expected `(`, `+(`, `*(` or `in` after identifier `{name}`, found {other}"
                        ),
                    }),
                }
            }
            other => Err(self.err(format!("expected a formula, found {other}"))),
        }
    }

    /// "TC" "(" var "," var ";" formula ")" "(" var "," var ")"
    fn tc_form(&mut self) -> Result<Formula, ParseError> {
        self.bump();
        self.expect(Tok::LParen)?;
        let b1 = self.var()?;
        self.expect(Tok::Comma)?;
        let b2 = self.var()?;
        self.expect(Tok::Semi)?;
        let body = self.formula()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::LParen)?;
        let a1 = self.var()?;
        self.expect(Tok::Comma)?;
        let a2 = self.var()?;
        self.expect(Tok::RParen)?;
        Ok(Formula::Tc { bound: (b1, b2), body: Box::new(body), args: (a1, a2) })
    }

    fn atom(&mut self, name: &str, args: Vec<Var>, pos: usize) -> Result<Formula, ParseError> {
        match self.voc.pred_index(name) {
            None => Err(ParseError { pos, msg: format!("unknown predicate `{name}`") }),
            Some(idx) => {
                let arity = self.voc.arity(idx);
                if arity != args.len() {
                    Err(ParseError {
                        pos,
                        msg: format!(
                            "predicate `{name}` has arity {arity}, got {} argument(s)",
                            args.len()
                        ),
                    })
                } else {
                    Ok(Formula::Atom(name.to_string(), args))
                }
            }
        }
    }

    fn check_binary(&self, name: &str, pos: usize) -> Result<(), ParseError> {
        match self.voc.pred_index(name) {
            None => Err(ParseError { pos, msg: format!("unknown predicate `{name}`") }),
            Some(idx) if self.voc.arity(idx) != 2 => Err(ParseError {
                pos,
                msg: format!("transitive closure shorthand requires a binary predicate, `{name}` has arity {}", self.voc.arity(idx)),
            }),
            Some(_) => Ok(()),
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        match self.bump() {
            Tok::Ident(v) => Ok(v),
            other => Err(ParseError { pos: self.toks[self.pos - 1].1, msg: format!("expected variable, found {other}") }),
        }
    }

    fn var_list(&mut self) -> Result<Vec<Var>, ParseError> {
        let mut vars = vec![self.var()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            vars.push(self.var()?);
        }
        Ok(vars)
    }

    fn set_var_list(&mut self) -> Result<Vec<SetVar>, ParseError> {
        let mut svars = Vec::new();
        loop {
            match self.bump() {
                Tok::SetVar(sv) => svars.push(sv),
                other => {
                    return Err(ParseError {
                        pos: self.toks[self.pos - 1].1,
                        msg: format!("expected set variable, found {other}"),
                    })
                }
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(svars)
    }
}
