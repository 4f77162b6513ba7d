//! Model-space expressions: products and powers of spheres and complex
//! projective spaces.
//!
//! Grammar (whitespace-insensitive, atom names case-insensitive):
//!
//! ```text
//! expr := term ('x' term)*
//! term := atom ['^' INT]
//! atom := 'S' INT | 'CP' INT | '(' expr ')'
//! ```
//!
//! `×` and `*` are accepted as synonyms for `x`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceExpr {
    /// `S^n`, `n >= 2`.
    Sphere(u32),
    /// `CP^m`, `m >= 1` (complex dimension).
    Projective(u32),
    Product(Vec<SpaceExpr>),
    Power(Box<SpaceExpr>, u32),
}

impl SpaceExpr {
    pub fn sphere(n: u32) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::Domain(format!("S{n} is not simply connected")));
        }
        Ok(SpaceExpr::Sphere(n))
    }

    pub fn projective(m: u32) -> Result<Self, Error> {
        if m < 1 {
            return Err(Error::Domain("CP0 is a point".into()));
        }
        Ok(SpaceExpr::Projective(m))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, SpaceExpr::Sphere(_) | SpaceExpr::Projective(_))
    }

    fn push_leaves(&self, out: &mut Vec<SpaceExpr>) {
        match self {
            SpaceExpr::Sphere(_) | SpaceExpr::Projective(_) => out.push(self.clone()),
            SpaceExpr::Product(children) => children.iter().for_each(|c| c.push_leaves(out)),
            SpaceExpr::Power(child, k) => {
                for _ in 0..*k {
                    child.push_leaves(out);
                }
            }
        }
    }

    /// Leaves in order, with powers expanded and products flattened.
    pub fn leaves(&self) -> Vec<SpaceExpr> {
        let mut out = Vec::new();
        self.push_leaves(&mut out);
        out
    }

    /// Canonical form: a single leaf, or a flat product of at least two leaves.
    pub fn normalize(&self) -> SpaceExpr {
        let mut leaves = self.leaves();
        if leaves.len() == 1 {
            leaves.pop().expect("one leaf")
        } else {
            SpaceExpr::Product(leaves)
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self {
            SpaceExpr::Sphere(n) => Self::sphere(*n).map(drop),
            SpaceExpr::Projective(m) => Self::projective(*m).map(drop),
            SpaceExpr::Product(children) if children.is_empty() => {
                Err(Error::Domain("empty product".into()))
            }
            SpaceExpr::Product(children) => children.iter().try_for_each(Self::validate),
            SpaceExpr::Power(_, 0) => Err(Error::Domain("zeroth power".into())),
            SpaceExpr::Power(child, _) => child.validate(),
        }
    }

    /// Complex dimension when every leaf is projective.
    pub fn projective_dimension(&self) -> Option<u32> {
        self.leaves()
            .iter()
            .map(|l| match l {
                SpaceExpr::Projective(m) => Some(*m),
                _ => None,
            })
            .sum()
    }
}

fn fmt_leaf(leaf: &SpaceExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match leaf {
        SpaceExpr::Sphere(n) => write!(f, "S{n}"),
        SpaceExpr::Projective(m) => write!(f, "CP{m}"),
        _ => unreachable!("leaves only"),
    }
}

/// Canonical rendering: runs of equal adjacent leaves become powers,
/// e.g. `S4 x CP2^3`.
impl fmt::Display for SpaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let leaves = self.leaves();
        let mut i = 0;
        while i < leaves.len() {
            let mut run = 1;
            while i + run < leaves.len() && leaves[i + run] == leaves[i] {
                run += 1;
            }
            if i > 0 {
                f.write_str(" x ")?;
            }
            fmt_leaf(&leaves[i], f)?;
            if run > 1 {
                write!(f, "^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok {
    Sphere(u32),
    Projective(u32),
    Times,
    Caret,
    Int(u32),
    Open,
    Close,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: &str| Error::Parse {
        position: pos,
        message: message.to_string(),
    };
    let read_int = |i: &mut usize| -> Result<Option<u32>, Error> {
        while *i < chars.len() && chars[*i].1.is_whitespace() {
            *i += 1;
        }
        let start = *i;
        while *i < chars.len() && chars[*i].1.is_ascii_digit() {
            *i += 1;
        }
        if start == *i {
            return Ok(None);
        }
        let s: String = chars[start..*i].iter().map(|&(_, c)| c).collect();
        s.parse::<u32>()
            .map(Some)
            .map_err(|_| err(chars[start].0, "integer too large"))
    };
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            'x' | 'X' | '×' | '*' => {
                out.push((pos, Tok::Times));
                i += 1;
            }
            '^' => {
                out.push((pos, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::Open));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::Close));
                i += 1;
            }
            's' | 'S' => {
                i += 1;
                let n = read_int(&mut i)?
                    .ok_or_else(|| err(pos, "expected sphere dimension after 'S'"))?;
                out.push((pos, Tok::Sphere(n)));
            }
            'c' | 'C' if i + 1 < chars.len() && matches!(chars[i + 1].1, 'p' | 'P') => {
                i += 2;
                let m =
                    read_int(&mut i)?.ok_or_else(|| err(pos, "expected dimension after 'CP'"))?;
                out.push((pos, Tok::Projective(m)));
            }
            d if d.is_ascii_digit() => {
                let n = read_int(&mut i)?.expect("at least one digit");
                out.push((pos, Tok::Int(n)));
            }
            _ => return Err(err(pos, &format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|&(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(p, _)| p)
    }

    fn err(&self, message: &str) -> Error {
        Error::Parse {
            position: self.here(),
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<SpaceExpr, Error> {
        let mut factors = vec![self.term()?];
        while self.peek() == Some(Tok::Times) {
            self.pos += 1;
            factors.push(self.term()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            SpaceExpr::Product(factors)
        })
    }

    fn term(&mut self) -> Result<SpaceExpr, Error> {
        let atom = self.atom()?;
        if self.peek() == Some(Tok::Caret) {
            self.pos += 1;
            let at = self.here();
            match self.peek() {
                Some(Tok::Int(0)) => {
                    return Err(Error::Domain(format!("zeroth power at position {at}")))
                }
                Some(Tok::Int(k)) => {
                    self.pos += 1;
                    return Ok(SpaceExpr::Power(Box::new(atom), k));
                }
                _ => return Err(self.err("expected integer exponent after '^'")),
            }
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<SpaceExpr, Error> {
        match self.peek() {
            Some(Tok::Sphere(n)) => {
                self.pos += 1;
                SpaceExpr::sphere(n)
            }
            Some(Tok::Projective(m)) => {
                self.pos += 1;
                SpaceExpr::projective(m)
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(Tok::Close) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.err("expected 'S<n>', 'CP<n>' or '('")),
        }
    }
}

/// Parses and normalizes a space expression.
pub fn parse_space(text: &str) -> Result<SpaceExpr, Error> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e.normalize())
}

impl FromStr for SpaceExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        parse_space(s)
    }
}

impl Serialize for SpaceExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SpaceExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_space(&text).map_err(serde::de::Error::custom)
    }
}
