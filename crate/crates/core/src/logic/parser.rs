//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! impl  := or ('->' impl)?
//! or    := and ('|' and)*
//! and   := unary ('&' unary)*
//! unary := '!' unary | '<>' '[' budget ']' unary | 'B' '{' tag '}' unary
//!        | ident | '(' impl ')'
//! ```

use thiserror::Error;

use super::formula::{self, Budget, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |c| format!("`{c}`"));
            self.err(self.pos, format!("expected `{token}`, found {found}"))
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        let len = self
            .rest()
            .char_indices()
            .find(|(_, c)| !pred(*c))
            .map_or(self.rest().len(), |(i, _)| i);
        self.pos += len;
        &self.src[start..start + len]
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.eat("->") {
            let right = self.implication()?;
            return Ok(formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while self.eat("|") {
            left = formula::or(left, self.conjunction()?);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.eat("&") {
            left = formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        if self.eat("!") {
            return Ok(formula::not(self.unary()?));
        }
        if self.eat("<>") {
            self.expect("[")?;
            let budget = self.budget()?;
            self.expect("]")?;
            return Ok(formula::possibly(budget, self.unary()?));
        }
        if self.eat("(") {
            let inner = self.implication()?;
            self.expect(")")?;
            return Ok(inner);
        }
        match self.peek() {
            Some(c) if is_ident_start(c) => {
                let name = self.take_while(is_ident_char);
                if name == "B" && self.peek() == Some('{') {
                    self.expect("{")?;
                    self.skip_ws();
                    let tag_start = self.pos;
                    let tag = self.take_while(|c| is_ident_char(c) || c == '*');
                    if tag.is_empty() {
                        return self.err(tag_start, "expected a reasoner tag");
                    }
                    self.expect("}")?;
                    return Ok(formula::believes(tag, self.unary()?));
                }
                Ok(formula::atom(name))
            }
            Some(c) => self.err(start, format!("unexpected `{c}`")),
            None => self.err(start, "unexpected end of input"),
        }
    }

    fn budget(&mut self) -> Result<Budget, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.rest().starts_with('-') || self.rest().starts_with('\u{2212}') {
            return self.err(start, "budget must be nonnegative");
        }
        let whole = self.take_while(|c| c.is_ascii_digit());
        if whole.is_empty() {
            return self.err(start, "expected a budget");
        }
        let overflow = |p: &Self| p.err::<Budget>(start, "budget too large");
        let Ok(mut numer) = whole.parse::<u64>() else {
            return overflow(self);
        };
        let mut denom = 1u64;
        if self.rest().starts_with('.') {
            self.pos += 1;
            let frac = self.take_while(|c| c.is_ascii_digit());
            if frac.is_empty() {
                return self.err(self.pos, "expected digits after `.`");
            }
            for d in frac.bytes() {
                match (
                    numer
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(u64::from(d - b'0'))),
                    denom.checked_mul(10),
                ) {
                    (Some(n), Some(m)) => (numer, denom) = (n, m),
                    _ => return overflow(self),
                }
            }
        } else if self.rest().starts_with('/') {
            self.pos += 1;
            let at = self.pos;
            let d = self.take_while(|c| c.is_ascii_digit());
            denom = match d.parse::<u64>() {
                Ok(0) => return self.err(at, "zero denominator"),
                Ok(v) => v,
                Err(_) => return self.err(at, "expected a denominator"),
            };
        }
        Ok(Budget::new(numer, denom))
    }
}

/// Parse a formula from its concrete syntax.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let f = p.implication()?;
    p.skip_ws();
    if p.pos < text.len() {
        let c = p.rest().chars().next().unwrap_or(' ');
        return p.err(p.pos, format!("unexpected `{c}` after formula"));
    }
    Ok(f)
}
