//! Parser for state expressions and rational literals.
//!
//! Grammar:
//!
//! ```text
//! state  := term ('+' term)* | '0'
//! term   := [scalar '*'] factor* 'e' '(' rational (',' rational)* ')'
//! scalar := '(' sum ')' | atom
//! sum    := atom (('+'|'-') atom)*
//! atom   := rational ['*' 'u' '(' rational ')']
//! factor := NAME '[' '-' INT ']' ['^' INT]
//! ```
//!
//! `u(q)` denotes the unit `e^{i pi q}`. The names `u` and `e` are reserved
//! and never valid basis names. Parsing the printed form of any state
//! reproduces the state, and printing is canonical, so parse-print-parse is
//! a fixed point.

use gva_core::fock::{FockMonomial, FockState};
use gva_core::lattice::SpaceSpec;
use gva_core::{Error, Rat, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Name(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Num(text[start..i].to_string()),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && {
                let ch = bytes[i] as char;
                ch.is_ascii_alphanumeric() || ch == '_'
            } {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Name(text[start..i].to_string()),
                pos: start,
            });
        } else if "()[]^*+-/,".contains(c) {
            out.push(Token {
                tok: Tok::Punct(c),
                pos: i,
            });
            i += 1;
        } else {
            return Err(Error::SyntaxError {
                position: i,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    cursor: usize,
    end: usize,
    space: Option<&'a SpaceSpec>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, space: Option<&'a SpaceSpec>) -> Result<Self> {
        Ok(Parser {
            tokens: lex(text)?,
            cursor: 0,
            end: text.len(),
            space,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.cursor).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.tokens.get(self.cursor + 1).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.tokens
            .get(self.cursor)
            .map(|t| t.pos)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.cursor).map(|t| t.tok.clone());
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::SyntaxError {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.bump();
                Ok(())
            }
            _ => self.fail(format!("expected {c:?}")),
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(p)) if *p == c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Num(_)) => match self.bump() {
                Some(Tok::Num(s)) => Ok(s),
                _ => unreachable!(),
            },
            _ => self.fail("expected a number"),
        }
    }

    /// `['-'] INT ['/' INT]`
    fn rational(&mut self) -> Result<Rat> {
        let neg = self.eat_punct('-');
        let numer = self.integer()?;
        let mut text = String::new();
        if neg {
            text.push('-');
        }
        text.push_str(&numer);
        if self.eat_punct('/') {
            text.push('/');
            text.push_str(&self.integer()?);
        }
        text.parse::<Rat>().map_err(|m| Error::SyntaxError {
            position: self.pos(),
            message: m,
        })
    }

    /// `rational ['*' 'u' '(' rational ')']`. The trailing `*` is consumed
    /// only when a phase actually follows; in state context a bare `*`
    /// separates the scalar from the monomial and is left in place.
    fn scalar_atom(&mut self) -> Result<Scalar> {
        let magnitude = self.rational()?;
        let has_phase = matches!(self.peek(), Some(Tok::Punct('*')))
            && matches!(self.peek2(), Some(Tok::Name(n)) if n == "u");
        let mut value = Scalar::from_rational(magnitude);
        if has_phase {
            self.bump();
            self.bump();
            self.expect_punct('(')?;
            let turn = self.rational()?;
            self.expect_punct(')')?;
            value = &value * &Scalar::root_of_unity(&turn);
        }
        Ok(value)
    }

    /// `atom (('+'|'-') atom)*` — used inside parentheses.
    fn scalar_sum(&mut self) -> Result<Scalar> {
        let mut acc = self.scalar_atom()?;
        loop {
            if self.eat_punct('+') {
                acc = &acc + &self.scalar_atom()?;
            } else if matches!(self.peek(), Some(Tok::Punct('-'))) {
                // Leave the sign for the atom itself.
                acc = &acc + &self.scalar_atom()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn space(&self) -> Result<&'a SpaceSpec> {
        match self.space {
            Some(s) => Ok(s),
            None => self.fail("state expressions need an ambient space"),
        }
    }

    /// `'e' '(' rational (',' rational)* ')'`
    fn charge(&mut self) -> Result<Vec<Rat>> {
        match self.bump() {
            Some(Tok::Name(n)) if n == "e" => {}
            _ => return self.fail("expected a charge symbol e(...)"),
        }
        self.expect_punct('(')?;
        let mut coords = vec![self.rational()?];
        while self.eat_punct(',') {
            coords.push(self.rational()?);
        }
        self.expect_punct(')')?;
        let dim = self.space()?.dim;
        if coords.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "charge has {} coordinates in dimension {}",
                coords.len(),
                dim
            )));
        }
        Ok(coords)
    }

    /// `NAME '[' '-' INT ']' ['^' INT]` → (axis index, level, multiplicity)
    fn factor(&mut self) -> Result<(usize, u64, u32)> {
        let pos = self.pos();
        let name = match self.bump() {
            Some(Tok::Name(n)) => n,
            _ => return self.fail("expected a basis name"),
        };
        if name == "u" {
            return Err(Error::SyntaxError {
                position: pos,
                message: "the name u is reserved for scalar phases".into(),
            });
        }
        let space = self.space()?;
        let idx = match space.names.iter().position(|n| *n == name) {
            Some(i) => i,
            None => return Err(Error::UnknownBasisName(name)),
        };
        self.expect_punct('[')?;
        self.expect_punct('-')?;
        let level: u64 = self
            .integer()?
            .parse()
            .map_err(|_| Error::SyntaxError {
                position: self.pos(),
                message: "creation level out of range".into(),
            })?;
        if level == 0 {
            return self.fail("creation levels start at 1");
        }
        self.expect_punct(']')?;
        let mut power = 1u32;
        if self.eat_punct('^') {
            power = self
                .integer()?
                .parse()
                .map_err(|_| Error::SyntaxError {
                    position: self.pos(),
                    message: "exponent out of range".into(),
                })?;
            if power == 0 {
                return self.fail("exponents start at 1");
            }
        }
        Ok((idx, level, power))
    }

    /// One summand: optional scalar, creation factors, charge symbol.
    fn term(&mut self) -> Result<(FockMonomial, Scalar)> {
        let coeff = match self.peek() {
            Some(Tok::Punct('(')) => {
                self.bump();
                let s = self.scalar_sum()?;
                self.expect_punct(')')?;
                self.expect_punct('*')?;
                s
            }
            Some(Tok::Punct('-')) | Some(Tok::Num(_)) => {
                let s = self.scalar_atom()?;
                self.expect_punct('*')?;
                s
            }
            _ => Scalar::one(),
        };
        let mut factors = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Name(n)) if n == "e" => break,
                Some(Tok::Name(_)) => factors.push(self.factor()?),
                _ => return self.fail("expected a creation factor or e(...)"),
            }
        }
        let mut monomial = FockMonomial::charge_only(self.charge()?);
        for (idx, level, power) in factors {
            for _ in 0..power {
                monomial = monomial.with_creation(idx, level);
            }
        }
        Ok((monomial, coeff))
    }

    fn state(&mut self) -> Result<FockState> {
        // The zero state prints as a bare `0`.
        if self.tokens.len() == 1 {
            if let Some(Tok::Num(n)) = self.peek() {
                if n == "0" {
                    self.bump();
                    return Ok(FockState::zero());
                }
            }
        }
        let mut out = FockState::zero();
        loop {
            let (m, c) = self.term()?;
            out.add_term(m, c);
            if !self.eat_punct('+') {
                break;
            }
        }
        if self.cursor != self.tokens.len() {
            return self.fail("trailing input after the state expression");
        }
        Ok(out)
    }
}

/// Parses a state expression against the given ambient space.
pub fn parse_state(text: &str, space: &SpaceSpec) -> Result<FockState> {
    Parser::new(text, Some(space))?.state()
}

/// Parses a rational literal such as `-3/2`; the whole input must be used.
pub fn parse_rational(text: &str) -> Result<Rat> {
    let mut p = Parser::new(text, None)?;
    let r = p.rational()?;
    if p.cursor != p.tokens.len() {
        return p.fail("trailing input after the rational");
    }
    Ok(r)
}
