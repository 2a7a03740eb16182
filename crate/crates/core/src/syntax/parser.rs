//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Precedence, loosest first: `<->`, `->` (right associative), `|`, `&`,
//! then the unary operators `!`, `E[n]`, `S[n]`, `C[n]`, `D[n]`,
//! `B[agent;n]`, which bind their immediate argument.

use std::fmt;

use thiserror::Error;

use super::{AgentId, Formula, Name, Prop};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("trailing input {0}")]
    Trailing(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "'{w}'"),
            Tok::Not => f.write_str("'!'"),
            Tok::And => f.write_str("'&'"),
            Tok::Or => f.write_str("'|'"),
            Tok::Implies => f.write_str("'->'"),
            Tok::Iff => f.write_str("'<->'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Semi => f.write_str("';'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        let tok = match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '!' => {
                bump(&mut chars);
                Tok::Not
            }
            '&' => {
                bump(&mut chars);
                Tok::And
            }
            '|' => {
                bump(&mut chars);
                Tok::Or
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '[' => {
                bump(&mut chars);
                Tok::LBracket
            }
            ']' => {
                bump(&mut chars);
                Tok::RBracket
            }
            ';' => {
                bump(&mut chars);
                Tok::Semi
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Implies
                } else {
                    return Err(unknown(tl, tc, "-"));
                }
            }
            '<' => {
                bump(&mut chars);
                let mut ok = false;
                if chars.peek() == Some(&'-') {
                    bump(&mut chars);
                    if chars.peek() == Some(&'>') {
                        bump(&mut chars);
                        ok = true;
                    }
                }
                if !ok {
                    return Err(unknown(tl, tc, "<"));
                }
                Tok::Iff
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                Tok::Word(word)
            }
            other => return Err(unknown(tl, tc, &other.to_string())),
        };
        out.push(Spanned {
            tok,
            line: tl,
            column: tc,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

fn unknown(line: usize, column: usize, s: &str) -> ParseError {
    ParseError {
        line,
        column,
        kind: ParseErrorKind::UnknownToken(s.to_owned()),
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_owned(),
                found: t.tok.to_string(),
            },
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(&tok.to_string()))
        }
    }

    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.next();
                Ok(w)
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.next();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.next();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.next();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.next();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Word(w)
                if matches!(w.as_str(), "E" | "S" | "C" | "D" | "B")
                    && *self.peek2() == Tok::LBracket =>
            {
                self.next();
                self.next();
                let modality = if w == "B" {
                    let agent = AgentId::new(self.word("agent")?);
                    self.expect(Tok::Semi)?;
                    let name = Name::new(self.word("name")?);
                    self.expect(Tok::RBracket)?;
                    let body = self.unary()?;
                    return Ok(Formula::b(agent, name, body));
                } else {
                    Name::new(self.word("name")?)
                };
                self.expect(Tok::RBracket)?;
                let body = self.unary()?;
                Ok(match w.as_str() {
                    "E" => Formula::e(modality, body),
                    "S" => Formula::s(modality, body),
                    "C" => Formula::c(modality, body),
                    _ => Formula::d(modality, body),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Word(w) if w == "true" => {
                self.next();
                Ok(Formula::True)
            }
            Tok::Word(w) if w == "false" => {
                self.next();
                Ok(Formula::False)
            }
            Tok::Word(w) if w.starts_with(|c: char| c.is_ascii_lowercase()) => {
                self.next();
                Ok(Formula::Atom(Prop::new(w)))
            }
            Tok::Word(w) => {
                let t = &self.toks[self.pos];
                Err(unknown(t.line, t.column, &w))
            }
            _ => Err(self.error_here("formula")),
        }
    }
}

/// Parses a formula from its ASCII surface syntax.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        let t = &p.toks[p.pos];
        return Err(ParseError {
            line: t.line,
            column: t.column,
            kind: ParseErrorKind::Trailing(t.tok.to_string()),
        });
    }
    Ok(f)
}
