//! Concrete syntax for differential functions and operators.
//!
//! ```text
//! expr   := ["+" | "-"] term {("+" | "-") term}
//! term   := factor {"*" factor}
//! factor := atom ["^" nat]
//! atom   := nat ["/" nat] | indep | jet | "D" | "D" nat | "(" expr ")"
//! jet    := dep ["_" letters | "[" nat {"," nat} "]"]
//! matrix := "[" row {"," row} "]",  row := "[" expr {"," expr} "]"
//! ```
//!
//! Letter subscripts (`u_xxy`) need single-letter independent names and
//! `m ≤ 3`; the bracketed form (`u[2,1,0]`) always works and is what the
//! printer emits.

use std::fmt;

use jetcalc_core::diffops::DiffOperator;
use jetcalc_core::{DiffFunction, JetVar, MultiIndex, Rational, Signature};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    UnexpectedToken,
    UnexpectedEnd,
    UnknownIdentifier,
    MalformedJet,
    BadExponent,
    BadNumber,
    OperatorInExpression,
    Dimension,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message} at byte {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, position: usize, message: impl Into<String>) -> Self {
        ParseError { kind, position, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Underscore,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number {n}"),
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::Underscore => f.write_str("'_'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Comma => f.write_str("','"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '_' => Some(Tok::Underscore),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            chars.next();
        } else if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut end = pos;
            while let Some(&(p, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = p + d.len_utf8();
                chars.next();
            }
            let n: BigInt = text[pos..end].parse().map_err(|_| ParseError::new(ParseErrorKind::BadNumber, pos, "bad number"))?;
            out.push((pos, Tok::Num(n)));
        } else if c.is_alphabetic() {
            let mut end = pos;
            while let Some(&(p, d)) = chars.peek() {
                if !d.is_alphanumeric() {
                    break;
                }
                end = p + d.len_utf8();
                chars.next();
            }
            out.push((pos, Tok::Ident(text[pos..end].to_string())));
        } else {
            return Err(ParseError::new(ParseErrorKind::Lexical, pos, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

/// `D` or `D1`, `D2`, …: the names reserved for total derivatives.
pub fn is_reserved(name: &str) -> bool {
    name == "D" || (name.len() > 1 && name.starts_with('D') && name[1..].bytes().all(|b| b.is_ascii_digit()))
}

/// A parsed value: operators appear as soon as a `D` does.
#[derive(Clone, Debug)]
enum Value {
    Function(DiffFunction),
    Operator(DiffOperator),
}

impl Value {
    fn into_operator(self) -> DiffOperator {
        match self {
            Value::Function(f) => DiffOperator::multiplication(f),
            Value::Operator(op) => op,
        }
    }

    fn add(self, other: Value) -> Value {
        match (self, other) {
            (Value::Function(a), Value::Function(b)) => Value::Function(a + b),
            (a, b) => Value::Operator(&a.into_operator() + &b.into_operator()),
        }
    }

    fn neg(self) -> Value {
        match self {
            Value::Function(a) => Value::Function(-a),
            Value::Operator(a) => Value::Operator(-&a),
        }
    }

    fn mul(self, other: Value) -> Value {
        match (self, other) {
            (Value::Function(a), Value::Function(b)) => Value::Function(a * b),
            (a, b) => Value::Operator(a.into_operator().compose(&b.into_operator()).expect("scalar operators")),
        }
    }

    fn pow(self, n: u32) -> Value {
        match self {
            Value::Function(a) => Value::Function(a.pow(n)),
            Value::Operator(a) => {
                let mut out = DiffOperator::identity(1);
                for _ in 0..n {
                    out = out.compose(&a).expect("scalar operators");
                }
                Value::Operator(out)
            }
        }
    }
}

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature) -> Result<Self, ParseError> {
        Ok(Parser { sig, toks: lex(text)?, pos: 0, end: text.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.pos) {
            Some((p, t)) => ParseError::new(ParseErrorKind::UnexpectedToken, *p, format!("unexpected {t}")),
            None => ParseError::new(ParseErrorKind::UnexpectedEnd, self.end, "unexpected end of input"),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<usize, ParseError> {
        match self.toks.get(self.pos) {
            Some((p, t)) if *t == want => {
                let p = *p;
                self.pos += 1;
                Ok(p)
            }
            Some((p, t)) => Err(ParseError::new(ParseErrorKind::UnexpectedToken, *p, format!("expected {want}, found {t}"))),
            None => Err(ParseError::new(ParseErrorKind::UnexpectedEnd, self.end, format!("expected {want}"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            return Err(self.unexpected());
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Value, ParseError> {
        if self.pos >= self.toks.len() {
            return Err(self.unexpected());
        }
        let negate = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.add(self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = acc.mul(self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Value, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.offset();
        match self.next() {
            Some((_, Tok::Num(n))) => match n.to_u32() {
                Some(k) if k <= 64 => Ok(base.pow(k)),
                _ => Err(ParseError::new(ParseErrorKind::BadExponent, at, "exponent too large")),
            },
            Some((_, t)) => Err(ParseError::new(ParseErrorKind::BadExponent, at, format!("exponent must be a natural number, found {t}"))),
            None => Err(ParseError::new(ParseErrorKind::BadExponent, at, "missing exponent")),
        }
    }

    fn atom(&mut self) -> Result<Value, ParseError> {
        let Some((at, tok)) = self.next() else {
            return Err(ParseError::new(ParseErrorKind::UnexpectedEnd, self.end, "unexpected end of input"));
        };
        match tok {
            Tok::Num(p) => {
                if self.peek() != Some(&Tok::Slash) {
                    return Ok(Value::Function(DiffFunction::constant(Rational::from_integer(p))));
                }
                self.pos += 1;
                let q_at = self.offset();
                match self.next() {
                    Some((_, Tok::Num(q))) if !q.is_zero() => Ok(Value::Function(DiffFunction::constant(Rational::new(p, q)))),
                    Some((_, Tok::Num(_))) => Err(ParseError::new(ParseErrorKind::BadNumber, q_at, "zero denominator")),
                    _ => Err(ParseError::new(ParseErrorKind::BadNumber, q_at, "expected a denominator")),
                }
            }
            Tok::LParen => {
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            Tok::Ident(name) => self.identifier(at, &name),
            _ => {
                self.pos -= 1;
                Err(self.unexpected())
            }
        }
    }

    fn identifier(&mut self, at: usize, name: &str) -> Result<Value, ParseError> {
        if is_reserved(name) {
            return self.derivative(at, name).map(Value::Operator);
        }
        if let Some(mu) = self.sig.independent_id(name) {
            return Ok(Value::Function(DiffFunction::x(mu)));
        }
        let Some(alpha) = self.sig.dependent_id(name).filter(|&a| a < self.sig.base_dep_count()) else {
            return Err(ParseError::new(ParseErrorKind::UnknownIdentifier, at, format!("unknown identifier '{name}'")));
        };
        let index = match self.peek() {
            Some(Tok::Underscore) => {
                self.pos += 1;
                self.letter_subscript()?
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                self.bracket_subscript(at)?
            }
            _ => MultiIndex::zero(),
        };
        Ok(Value::Function(DiffFunction::jet(JetVar::new(alpha, index))))
    }

    fn derivative(&mut self, at: usize, name: &str) -> Result<DiffOperator, ParseError> {
        let m = self.sig.m();
        let mu = if name == "D" {
            if m != 1 {
                return Err(ParseError::new(ParseErrorKind::UnknownIdentifier, at, format!("'D' is ambiguous with {m} independent variables; use D1..D{m}")));
            }
            0
        } else {
            match name[1..].parse::<usize>() {
                Ok(k) if (1..=m).contains(&k) && !name[1..].starts_with('0') => k - 1,
                _ => return Err(ParseError::new(ParseErrorKind::UnknownIdentifier, at, format!("no total derivative '{name}' (have D1..D{m})"))),
            }
        };
        Ok(DiffOperator::total_d(mu))
    }

    fn letter_subscript(&mut self) -> Result<MultiIndex, ParseError> {
        let at = self.offset();
        let letters = match self.next() {
            Some((_, Tok::Ident(s))) => s,
            _ => return Err(ParseError::new(ParseErrorKind::MalformedJet, at, "expected subscript letters after '_'")),
        };
        let single = self.sig.independent().iter().all(|n| n.chars().count() == 1);
        if self.sig.m() > 3 || !single {
            return Err(ParseError::new(ParseErrorKind::MalformedJet, at, "letter subscripts need at most three single-letter independent variables; use u[i,…]"));
        }
        let mut exps = vec![0u32; self.sig.m()];
        for (k, c) in letters.char_indices() {
            let mut buf = [0u8; 4];
            match self.sig.independent_id(c.encode_utf8(&mut buf)) {
                Some(mu) => exps[mu] += 1,
                None => {
                    return Err(ParseError::new(ParseErrorKind::MalformedJet, at + k, format!("'{c}' is not an independent variable")));
                }
            }
        }
        Ok(MultiIndex::from_exponents(&exps))
    }

    fn bracket_subscript(&mut self, name_at: usize) -> Result<MultiIndex, ParseError> {
        let mut exps = Vec::new();
        loop {
            let at = self.offset();
            match self.next() {
                Some((_, Tok::Num(n))) => match n.to_u32() {
                    Some(k) if k <= 1024 => exps.push(k),
                    _ => return Err(ParseError::new(ParseErrorKind::MalformedJet, at, "derivative order too large")),
                },
                _ => return Err(ParseError::new(ParseErrorKind::MalformedJet, at, "expected a derivative order")),
            }
            let at = self.offset();
            match self.next() {
                Some((_, Tok::Comma)) => continue,
                Some((_, Tok::RBracket)) => break,
                _ => return Err(ParseError::new(ParseErrorKind::MalformedJet, at, "expected ',' or ']' in multi-index")),
            }
        }
        if exps.len() != self.sig.m() {
            return Err(ParseError::new(
                ParseErrorKind::MalformedJet,
                name_at,
                format!("multi-index has {} entries, expected {}", exps.len(), self.sig.m()),
            ));
        }
        Ok(MultiIndex::from_exponents(&exps))
    }

    fn matrix(&mut self) -> Result<DiffOperator, ParseError> {
        self.expect(Tok::LBracket)?;
        let mut rows: Vec<Vec<DiffOperator>> = Vec::new();
        loop {
            let row_at = self.expect(Tok::LBracket)?;
            let mut row = Vec::new();
            loop {
                row.push(self.expr()?.into_operator());
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::RBracket) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.unexpected()),
                }
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(ParseError::new(
                        ParseErrorKind::Dimension,
                        row_at,
                        format!("row has {} entries, expected {}", row.len(), first.len()),
                    ));
                }
            }
            rows.push(row);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RBracket) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.unexpected()),
            }
        }
        let cols = rows[0].len();
        let mut out = DiffOperator::zero(rows.len(), cols);
        for (a, row) in rows.into_iter().enumerate() {
            for (b, entry) in row.into_iter().enumerate() {
                if let Some(e) = entry.entry(0, 0) {
                    out.set_entry(a, b, e.clone());
                }
            }
        }
        Ok(out)
    }
}

/// Parses a differential function; `D` is rejected.
pub fn parse_expression(text: &str, sig: &Signature) -> Result<DiffFunction, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let v = p.expr()?;
    p.finish()?;
    match v {
        Value::Function(f) => Ok(f),
        Value::Operator(_) => {
            let at = p.toks.iter().find(|(_, t)| matches!(t, Tok::Ident(n) if is_reserved(n))).map_or(0, |(p, _)| *p);
            Err(ParseError::new(ParseErrorKind::OperatorInExpression, at, "total derivative in a function expression"))
        }
    }
}

/// Parses a scalar operator expression or a `[[…], …]` matrix into normal form.
pub fn parse_operator(text: &str, sig: &Signature) -> Result<DiffOperator, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let op = if p.peek() == Some(&Tok::LBracket) { p.matrix()? } else { p.expr()?.into_operator() };
    p.finish()?;
    Ok(op)
}

/// A tuple of functions, written `[e1, e2, …]`, or a single expression.
pub fn parse_tuple(text: &str, sig: &Signature) -> Result<Vec<DiffFunction>, ParseError> {
    let mut p = Parser::new(text, sig)?;
    if p.peek() != Some(&Tok::LBracket) {
        let v = parse_expression(text, sig)?;
        return Ok(vec![v]);
    }
    p.pos += 1;
    let mut out = Vec::new();
    loop {
        let at = p.offset();
        match p.expr()? {
            Value::Function(f) => out.push(f),
            Value::Operator(_) => {
                return Err(ParseError::new(ParseErrorKind::OperatorInExpression, at, "total derivative in a function expression"));
            }
        }
        match p.next() {
            Some((_, Tok::Comma)) => continue,
            Some((_, Tok::RBracket)) => break,
            Some((at, t)) => return Err(ParseError::new(ParseErrorKind::UnexpectedToken, at, format!("unexpected {t}"))),
            None => return Err(ParseError::new(ParseErrorKind::UnexpectedEnd, p.end, "expected ']'")),
        }
    }
    p.finish()?;
    Ok(out)
}
