//! Polynomial expressions in X, G (the deformation parameter) and t (the
//! field generator).

use std::sync::Arc;

use crate::ff2::{BiPoly, BinField};
use crate::poly::Poly;

/// Largest exponent accepted after '^'.
pub const MAX_EXPONENT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable {name} at position {pos}")]
    UnknownVariable { name: char, pos: usize },
    #[error("exponent overflow at position {pos}")]
    ExponentOverflow { pos: usize },
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    fq: &'a Arc<BinField>,
    vars: &'a str,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn zero(&self) -> BiPoly {
        Poly::zero(Poly::zero(self.fq.zero()))
    }

    fn constant(&self, c: crate::ff2::FqElem) -> BiPoly {
        Poly::new(vec![Poly::constant(c)], Poly::zero(self.fq.zero()))
    }

    fn expr(&mut self) -> Result<BiPoly, ParseError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            if c == b'+' || c == b'-' {
                self.pos += 1;
                acc = acc.plus(&self.term()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BiPoly, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.times(&self.factor()?);
        }
        Ok(acc)
    }

    fn uint(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut v: u64 = 0;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((self.s[self.pos] - b'0') as u64))
                .ok_or(ParseError::ExponentOverflow { pos: start })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected unsigned integer"));
        }
        Ok(v)
    }

    fn factor(&mut self) -> Result<BiPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let e = self.uint()?;
            if e > MAX_EXPONENT {
                return Err(ParseError::ExponentOverflow { pos: at });
            }
            return Ok(base.pow(e as usize));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BiPoly, ParseError> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        match c {
            b'(' => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            b'0'..=b'9' => {
                let v = self.uint()?;
                Ok(if v % 2 == 1 { self.constant(self.fq.one()) } else { self.zero() })
            }
            c if c.is_ascii_alphabetic() => {
                let pos = self.pos;
                self.pos += 1;
                let name = c as char;
                if !self.vars.contains(name) {
                    return Err(ParseError::UnknownVariable { name, pos });
                }
                Ok(match name {
                    'X' => Poly::monomial(Poly::constant(self.fq.one()), 1),
                    'G' => Poly::constant(Poly::monomial(self.fq.one(), 1)),
                    't' => self.constant(self.fq.gen()),
                    _ => return Err(ParseError::UnknownVariable { name, pos }),
                })
            }
            _ => Err(self.err("unexpected character")),
        }
    }
}

/// Parse `src` over F_q = `fq`; `vars` lists the admissible variables among "XGt".
pub fn parse_polynomial(src: &str, fq: &Arc<BinField>, vars: &str) -> Result<BiPoly, ParseError> {
    let mut p = Parser { s: src.as_bytes(), pos: 0, fq, vars };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Parse a field element written in t.
pub fn parse_element(src: &str, fq: &Arc<BinField>) -> Result<crate::ff2::FqElem, ParseError> {
    let p = parse_polynomial(src, fq, "t")?;
    Ok(p.coeff(0).coeff(0))
}
