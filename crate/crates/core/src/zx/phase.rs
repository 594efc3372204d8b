//! Affine phase expressions `c0 + sum_k c_k * p_k`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;

use super::ZxError;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Phase {
    pub constant: f64,
    pub terms: BTreeMap<String, f64>,
}

pub type Binding = HashMap<String, f64>;

impl Phase {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, terms: BTreeMap::new() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `coeff * name`.
    pub fn param(name: impl Into<String>, coeff: f64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.into(), coeff);
        Self { constant: 0.0, terms }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    /// Folds bound parameters into the constant; unbound names stay symbolic.
    pub fn substitute(&self, binding: &Binding) -> Self {
        let mut out = Self::constant(self.constant);
        for (name, &coeff) in &self.terms {
            match binding.get(name) {
                Some(&v) => out.constant += coeff * v,
                None => {
                    out.terms.insert(name.clone(), coeff);
                }
            }
        }
        out
    }

    /// Value in radians, or the first unbound parameter.
    pub fn value(&self) -> Result<f64, ZxError> {
        match self.terms.keys().next() {
            Some(name) => Err(ZxError::Unbound(name.clone())),
            None => Ok(self.constant),
        }
    }

    fn add(mut self, other: Phase, sign: f64) -> Self {
        self.constant += sign * other.constant;
        for (k, v) in other.terms {
            *self.terms.entry(k).or_insert(0.0) += sign * v;
        }
        self
    }

    fn scaled(mut self, s: f64) -> Self {
        self.constant *= s;
        self.terms.values_mut().for_each(|v| *v *= s);
        self
    }

    /// Parses expressions such as `pi*x0`, `-pi/2 + 0.5*theta`, `2*(a - pi)`.
    pub fn parse(text: &str) -> Result<Self, ZxError> {
        let mut p = ExprParser { src: text, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (k, v) in &self.terms {
            write!(f, " + {v}*{k}")?;
        }
        Ok(())
    }
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl ExprParser<'_> {
    fn error(&self, msg: &str) -> ZxError {
        ZxError::Phase { expr: self.src.to_string(), offset: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn expr(&mut self) -> Result<Phase, ZxError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(self.term()?, 1.0);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.add(self.term()?, -1.0);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Phase, ZxError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = match (acc.is_constant(), rhs.is_constant()) {
                        (true, _) => rhs.scaled(acc.constant),
                        (_, true) => acc.scaled(rhs.constant),
                        _ => return Err(self.error("product of two parameters is not affine")),
                    };
                }
                Some('/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    if !rhs.is_constant() {
                        return Err(self.error("division by a parameter is not affine"));
                    }
                    acc = acc.scaled(1.0 / rhs.constant);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Phase, ZxError> {
        self.skip_ws();
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.factor()?.scaled(-1.0))
            }
            Some('+') => {
                self.pos += 1;
                self.factor()
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                // exponent
                if matches!(self.peek(), Some('e' | 'E')) {
                    let save = self.pos;
                    self.pos += 1;
                    if matches!(self.peek(), Some('+' | '-')) {
                        self.pos += 1;
                    }
                    if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                            self.pos += 1;
                        }
                    } else {
                        self.pos = save;
                    }
                }
                self.src[start..self.pos]
                    .parse::<f64>()
                    .map(Phase::constant)
                    .map_err(|_| self.error("malformed number"))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let ident = &self.src[start..self.pos];
                Ok(if ident == "pi" { Phase::constant(PI) } else { Phase::param(ident, 1.0) })
            }
            _ => Err(self.error("expected a number, 'pi' or a parameter name")),
        }
    }
}
