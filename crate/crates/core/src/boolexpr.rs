//! Boolean restrictions whose literals compare two entries of a sequence.
//!
//! Grammar (whitespace insignificant, precedence `!` > `&` > `|`):
//!
//! ```text
//! expr    := term { "|" term }
//! term    := factor { "&" factor }
//! factor  := "!" factor | "(" expr ")" | literal
//! literal := ident op ident
//! ident   := <prefix> digits          -- `a1..an` for entries, `d1..dn` for parts
//! op      := "<=" | ">=" | "<" | ">" | "=" | "!="
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Le,
    Ge,
    Lt,
    Gt,
    Eq,
    Ne,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Le, CmpOp::Ge, CmpOp::Lt, CmpOp::Gt, CmpOp::Eq, CmpOp::Ne];

    #[inline]
    pub fn apply(self, x: u32, y: u32) -> bool {
        match self {
            CmpOp::Le => x <= y,
            CmpOp::Ge => x >= y,
            CmpOp::Lt => x < y,
            CmpOp::Gt => x > y,
            CmpOp::Eq => x == y,
            CmpOp::Ne => x != y,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

/// `(x_i op x_j)` with 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub i: usize,
    pub op: CmpOp,
    pub j: usize,
}

impl Literal {
    pub fn new(i: usize, op: CmpOp, j: usize) -> Self {
        assert!(i >= 1 && j >= 1, "literal indices are 1-based");
        Literal { i, op, j }
    }

    #[inline]
    fn eval(&self, seq: &[u32]) -> bool {
        self.op.apply(seq[self.i - 1], seq[self.j - 1])
    }
}

/// Three-valued truth for partially assigned sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    /// No restriction; always true.
    Empty,
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Not(Box<BoolExpr>),
    Leaf(Literal),
}

impl BoolExpr {
    pub fn leaf(i: usize, op: CmpOp, j: usize) -> Self {
        BoolExpr::Leaf(Literal::new(i, op, j))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, BoolExpr::Empty)
    }

    /// Largest entry index referenced by any literal (0 if none).
    pub fn max_index(&self) -> usize {
        match self {
            BoolExpr::Empty => 0,
            BoolExpr::And(cs) | BoolExpr::Or(cs) => cs.iter().map(BoolExpr::max_index).max().unwrap_or(0),
            BoolExpr::Not(c) => c.max_index(),
            BoolExpr::Leaf(l) => l.i.max(l.j),
        }
    }

    fn first_literal_beyond(&self, dim: usize) -> Option<Literal> {
        match self {
            BoolExpr::Empty => None,
            BoolExpr::And(cs) | BoolExpr::Or(cs) => cs.iter().find_map(|c| c.first_literal_beyond(dim)),
            BoolExpr::Not(c) => c.first_literal_beyond(dim),
            BoolExpr::Leaf(l) => (l.i > dim || l.j > dim).then_some(*l),
        }
    }

    pub(crate) fn check_dim(&self, dim: usize, prefix: char) -> Result<()> {
        match self.first_literal_beyond(dim) {
            None => Ok(()),
            Some(l) => Err(Error::IndexOutOfRange {
                literal: fmt_literal(&l, prefix),
                index: l.i.max(l.j),
                dim,
            }),
        }
    }

    pub fn eval(&self, seq: &[u32]) -> Result<bool> {
        self.check_dim(seq.len(), 'a')?;
        Ok(self.eval_unchecked(seq))
    }

    /// Evaluation without the index check; panics if a literal exceeds `seq`.
    pub fn eval_unchecked(&self, seq: &[u32]) -> bool {
        match self {
            BoolExpr::Empty => true,
            BoolExpr::And(cs) => cs.iter().all(|c| c.eval_unchecked(seq)),
            BoolExpr::Or(cs) => cs.iter().any(|c| c.eval_unchecked(seq)),
            BoolExpr::Not(c) => !c.eval_unchecked(seq),
            BoolExpr::Leaf(l) => l.eval(seq),
        }
    }

    /// Evaluation where a literal naming a missing entry is false.
    pub fn eval_lenient(&self, seq: &[u32]) -> bool {
        match self {
            BoolExpr::Empty => true,
            BoolExpr::And(cs) => cs.iter().all(|c| c.eval_lenient(seq)),
            BoolExpr::Or(cs) => cs.iter().any(|c| c.eval_lenient(seq)),
            BoolExpr::Not(c) => !c.eval_lenient(seq),
            BoolExpr::Leaf(l) => l.i <= seq.len() && l.j <= seq.len() && l.eval(seq),
        }
    }

    /// Kleene evaluation over a partial assignment. `False` and `True` are
    /// only returned when every completion agrees.
    pub fn eval_partial(&self, partial: &[Option<u32>]) -> Result<Tri> {
        self.check_dim(partial.len(), 'a')?;
        Ok(self.eval_partial_unchecked(partial))
    }

    pub fn eval_partial_unchecked(&self, partial: &[Option<u32>]) -> Tri {
        match self {
            BoolExpr::Empty => Tri::True,
            BoolExpr::And(cs) => {
                let mut acc = Tri::True;
                for c in cs {
                    match c.eval_partial_unchecked(partial) {
                        Tri::False => return Tri::False,
                        Tri::Unknown => acc = Tri::Unknown,
                        Tri::True => {}
                    }
                }
                acc
            }
            BoolExpr::Or(cs) => {
                let mut acc = Tri::False;
                for c in cs {
                    match c.eval_partial_unchecked(partial) {
                        Tri::True => return Tri::True,
                        Tri::Unknown => acc = Tri::Unknown,
                        Tri::False => {}
                    }
                }
                acc
            }
            BoolExpr::Not(c) => c.eval_partial_unchecked(partial).not(),
            BoolExpr::Leaf(l) => match (partial[l.i - 1], partial[l.j - 1]) {
                (Some(x), Some(y)) => l.op.apply(x, y).into(),
                _ => Tri::Unknown,
            },
        }
    }

    /// Prints with the given identifier prefix (`a` for entries, `d` for parts).
    pub fn display_with(&self, prefix: char) -> impl fmt::Display + '_ {
        Printer { expr: self, prefix }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer { expr: self, prefix: 'a' }.fmt(f)
    }
}

fn fmt_literal(l: &Literal, prefix: char) -> String {
    format!("{prefix}{} {} {prefix}{}", l.i, l.op.symbol(), l.j)
}

struct Printer<'a> {
    expr: &'a BoolExpr,
    prefix: char,
}

impl Printer<'_> {
    fn write(&self, e: &BoolExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match e {
            BoolExpr::Empty => Ok(()),
            BoolExpr::Leaf(l) => f.write_str(&fmt_literal(l, self.prefix)),
            BoolExpr::Not(c) => {
                f.write_str("!")?;
                match **c {
                    BoolExpr::And(_) | BoolExpr::Or(_) | BoolExpr::Leaf(_) => self.paren(c, f),
                    _ => self.write(c, f),
                }
            }
            BoolExpr::And(cs) => self.join(cs, " & ", |c| matches!(c, BoolExpr::And(_) | BoolExpr::Or(_)), f),
            BoolExpr::Or(cs) => self.join(cs, " | ", |c| matches!(c, BoolExpr::Or(_)), f),
        }
    }

    fn paren(&self, e: &BoolExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        self.write(e, f)?;
        f.write_str(")")
    }

    fn join(
        &self,
        cs: &[BoolExpr],
        sep: &str,
        needs_paren: impl Fn(&BoolExpr) -> bool,
        f: &mut fmt::Formatter<'_>,
    ) -> fmt::Result {
        for (k, c) in cs.iter().enumerate() {
            if k > 0 {
                f.write_str(sep)?;
            }
            if needs_paren(c) || matches!(c, BoolExpr::Leaf(_)) {
                self.paren(c, f)?;
            } else {
                self.write(c, f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f)
    }
}

/// Parses an entry restriction over `a1..a{dim}`.
pub fn parse_bool(text: &str, dim: usize) -> Result<BoolExpr> {
    parse_with_prefix(text, dim, 'a')
}

/// Parses with identifiers `<prefix>1..<prefix>{dim}`.
pub fn parse_with_prefix(text: &str, dim: usize, prefix: char) -> Result<BoolExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        prefix: prefix as u8,
        dim,
    };
    p.skip_ws();
    if p.at_end() {
        return Ok(BoolExpr::Empty);
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    prefix: u8,
    dim: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        // columns are 1-based character positions
        let column = String::from_utf8_lossy(&self.src[..self.pos.min(self.src.len())])
            .chars()
            .count()
            + 1;
        Error::Syntax {
            line: 1,
            column,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<BoolExpr> {
        let mut terms = vec![self.term()?];
        loop {
            self.skip_ws();
            if self.peek() == Some(b'|') {
                self.pos += 1;
                terms.push(self.term()?);
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { BoolExpr::Or(terms) })
    }

    fn term(&mut self) -> Result<BoolExpr> {
        let mut factors = vec![self.factor()?];
        loop {
            self.skip_ws();
            if self.peek() == Some(b'&') {
                self.pos += 1;
                factors.push(self.factor()?);
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { BoolExpr::And(factors) })
    }

    fn factor(&mut self) -> Result<BoolExpr> {
        self.skip_ws();
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                self.skip_ws();
                if self.at_end() || matches!(self.peek(), Some(b')' | b'&' | b'|')) {
                    return Err(self.error("negation without operand"));
                }
                Ok(BoolExpr::Not(Box::new(self.factor()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => self.literal(),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn literal(&mut self) -> Result<BoolExpr> {
        let start = self.pos;
        let i = self.ident()?;
        self.skip_ws();
        let op = self.op()?;
        self.skip_ws();
        let j = self.ident()?;
        if i > self.dim || j > self.dim {
            let text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            return Err(Error::IndexOutOfRange {
                literal: text,
                index: i.max(j),
                dim: self.dim,
            });
        }
        Ok(BoolExpr::leaf(i, op, j))
    }

    fn ident(&mut self) -> Result<usize> {
        if self.peek() != Some(self.prefix) {
            return Err(self.error(&format!("expected identifier `{}<k>`", self.prefix as char)));
        }
        self.pos += 1;
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits after identifier prefix"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match digits.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => {
                self.pos = start;
                Err(self.error("identifier index must be a positive integer"))
            }
        }
    }

    fn op(&mut self) -> Result<CmpOp> {
        let rest = &self.src[self.pos..];
        let (op, len) = if rest.starts_with(b"<=") {
            (CmpOp::Le, 2)
        } else if rest.starts_with(b">=") {
            (CmpOp::Ge, 2)
        } else if rest.starts_with(b"!=") {
            (CmpOp::Ne, 2)
        } else if rest.starts_with(b"<") {
            (CmpOp::Lt, 1)
        } else if rest.starts_with(b">") {
            (CmpOp::Gt, 1)
        } else if rest.starts_with(b"=") {
            (CmpOp::Eq, 1)
        } else {
            return Err(self.error("expected comparison operator"));
        };
        self.pos += len;
        Ok(op)
    }
}
