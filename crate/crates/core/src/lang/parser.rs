//! Recursive-descent parser and canonical printer for the concrete syntax.
//!
//! ```text
//! sentence    := knows | understands | xor
//! knows       := "K[" ident "@" ident "]" sentence
//! understands := "U[" ident "@" ident "]" sentence
//! xor         := conj { "(+)" conj }
//! conj        := unary { "/\" unary }
//! unary       := "not" unary | "sqrtid" unary
//!              | "T(" sentence "," sentence "," sentence ")"
//!              | "t" | "f" | ident | "(" sentence ")"
//! ```

use super::ast::{EpistemicKind, Label, Sentence};
use crate::error::{HoloqError, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    At,
    XorOp,
    AndOp,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::At => "`@`".into(),
            Tok::XorOp => "`(+)`".into(),
            Tok::AndOp => "`/\\`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' if bytes[i..].starts_with(b"(+)") => {
                i += 3;
                Tok::XorOp
            }
            b'/' if bytes[i..].starts_with(b"/\\") => {
                i += 2;
                Tok::AndOp
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'[' => {
                i += 1;
                Tok::LBracket
            }
            b']' => {
                i += 1;
                Tok::RBracket
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'@' => {
                i += 1;
                Tok::At
            }
            c if is_ident_start(c) => {
                while i < bytes.len() && is_ident_char(bytes[i]) {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            _ => {
                let found = text[i..].chars().next().unwrap_or('?');
                return Err(HoloqError::Syntax {
                    offset: i,
                    expected: vec!["a sentence token".into()],
                    found: format!("`{found}`"),
                });
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

const KEYWORDS: [&str; 4] = ["t", "f", "not", "sqrtid"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> HoloqError {
        HoloqError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn sentence(&mut self) -> Result<Sentence> {
        if let (Tok::Ident(name), Tok::LBracket) = (self.peek().clone(), self.peek2().clone()) {
            let kind = match name.as_str() {
                "K" => EpistemicKind::Knows,
                "U" => EpistemicKind::Understands,
                _ => {
                    return Err(HoloqError::UnknownOperator {
                        name,
                        offset: self.offset(),
                    })
                }
            };
            self.bump();
            self.bump();
            let agent = self.ident()?;
            self.expect(Tok::At, "`@`")?;
            let time = self.ident()?;
            self.expect(Tok::RBracket, "`]`")?;
            let body = self.sentence()?;
            return Ok(Sentence::Epistemic(
                kind,
                Label { agent, time },
                Box::new(body),
            ));
        }
        self.xor()
    }

    fn xor(&mut self) -> Result<Sentence> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::XorOp {
            self.bump();
            let rhs = self.conj()?;
            lhs = Sentence::xor(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Sentence> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::AndOp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Sentence::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Sentence> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let s = self.sentence()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(s)
            }
            Tok::Ident(name) => {
                let next = self.peek2().clone();
                match (name.as_str(), next) {
                    ("T", Tok::LParen) => {
                        self.bump();
                        self.bump();
                        let a = self.sentence()?;
                        self.expect(Tok::Comma, "`,`")?;
                        let b = self.sentence()?;
                        self.expect(Tok::Comma, "`,`")?;
                        let c = self.sentence()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Sentence::toffoli(a, b, c))
                    }
                    ("not", _) => {
                        self.bump();
                        Ok(Sentence::not(self.unary()?))
                    }
                    ("sqrtid", _) => {
                        self.bump();
                        Ok(Sentence::sqrt_id(self.unary()?))
                    }
                    (_, Tok::LParen) | (_, Tok::LBracket) => {
                        Err(HoloqError::UnknownOperator { name, offset })
                    }
                    ("t", _) => {
                        self.bump();
                        Ok(Sentence::True)
                    }
                    ("f", _) => {
                        self.bump();
                        Ok(Sentence::False)
                    }
                    _ => {
                        self.bump();
                        Ok(Sentence::Atom(name))
                    }
                }
            }
            _ => Err(self.error(&[
                "`not`",
                "`sqrtid`",
                "`T(`",
                "`K[`",
                "`U[`",
                "`t`",
                "`f`",
                "identifier",
                "`(`",
            ])),
        }
    }
}

/// Parse a sentence. `a /\ b` is desugared to `T(a, b, f)`.
pub fn parse_sentence(text: &str) -> Result<Sentence> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let s = p.sentence()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["`(+)`", "`/\\`", "end of input"]));
    }
    Ok(s)
}

/// True if `name` can be printed as an atom and read back unchanged.
pub fn is_valid_atom_name(name: &str) -> bool {
    let b = name.as_bytes();
    !b.is_empty()
        && is_ident_start(b[0])
        && b.iter().all(|&c| is_ident_char(c))
        && !KEYWORDS.contains(&name)
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Top,
    XorLeft,
    Operand,
}

/// Canonical text. Conjunctions print in their desugared `T(a, b, f)` form.
pub fn print_sentence(s: &Sentence) -> String {
    let mut out = String::new();
    write_sentence(s, Slot::Top, &mut out);
    out
}

fn write_sentence(s: &Sentence, slot: Slot, out: &mut String) {
    match s {
        Sentence::Atom(name) => out.push_str(name),
        Sentence::True => out.push('t'),
        Sentence::False => out.push('f'),
        Sentence::Not(c) => {
            out.push_str("not ");
            write_sentence(c, Slot::Operand, out);
        }
        Sentence::SqrtId(c) => {
            out.push_str("sqrtid ");
            write_sentence(c, Slot::Operand, out);
        }
        Sentence::Toffoli(a, b, c) => {
            out.push_str("T(");
            write_sentence(a, Slot::Top, out);
            out.push_str(", ");
            write_sentence(b, Slot::Top, out);
            out.push_str(", ");
            write_sentence(c, Slot::Top, out);
            out.push(')');
        }
        Sentence::Xor(a, b) => {
            let wrap = slot == Slot::Operand;
            if wrap {
                out.push('(');
            }
            write_sentence(a, Slot::XorLeft, out);
            out.push_str(" (+) ");
            write_sentence(b, Slot::Operand, out);
            if wrap {
                out.push(')');
            }
        }
        Sentence::Epistemic(kind, label, c) => {
            let wrap = slot != Slot::Top;
            if wrap {
                out.push('(');
            }
            out.push(kind.letter());
            out.push('[');
            out.push_str(&label.agent);
            out.push('@');
            out.push_str(&label.time);
            out.push_str("] ");
            write_sentence(c, Slot::Top, out);
            if wrap {
                out.push(')');
            }
        }
    }
}
