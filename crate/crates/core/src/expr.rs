//! Tiny expression language for intersection-number queries.
//!
//! Grammar:
//!   expr  := "int(" wedge ")" | wedge
//!   wedge := atom { "." atom }
//!   atom  := map "^" atom | class | "(" wedge ")"
//!   map   := s | s3 | iota | p1 | p2 | p3 | p12 | p13 | p23
//!   class := H | HM | pt | Delta(i,j)
//!
//! An expression is evaluated against a product ring with a fixed number
//! of factors; map symbols that need more factors than the ring has are
//! reported as unknown in that context. Pretty-printing is canonical so
//! that parse and print are mutually inverse on printed output.

use crate::rat::Rat;
use crate::torus::{Map, OracleError, RingElement, TorusRing};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("SYNTAX_ERROR at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
    #[error("UNKNOWN_SYMBOL at byte {pos}: `{symbol}` {detail}")]
    Unknown {
        pos: usize,
        symbol: String,
        detail: String,
    },
    #[error("DEGREE_MISMATCH: mixed-degree class cannot be integrated")]
    Degree,
}

// ---- Abstract syntax ----

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expr {
    Integrate(Wedge),
    Class(Wedge),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Wedge(pub Vec<Atom>);

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Atom {
    Pull(MapName, Box<Atom>),
    Named(ClassName),
    Paren(Box<Wedge>),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MapName {
    S,
    S3,
    Iota,
    P1,
    P2,
    P3,
    P12,
    P13,
    P23,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClassName {
    H,
    Hm,
    Pt,
    Delta(usize, usize),
}

/// Result of evaluating an expression.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Evaluated {
    /// An integrated number; `not_top` marks a homogeneous class below
    /// top degree whose integral is reported as 0.
    Number { value: Rat, not_top: bool },
    Class(RingElement),
}

// ---- Lexer ----

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Number(usize),
    Caret,
    Dot,
    Comma,
    Open,
    Close,
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Spanned {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'^' | b'.' | b',' | b'(' | b')' => {
                let tok = match b {
                    b'^' => Tok::Caret,
                    b'.' => Tok::Dot,
                    b',' => Tok::Comma,
                    b'(' => Tok::Open,
                    _ => Tok::Close,
                };
                out.push(Spanned { tok, pos: i });
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n = text.parse().map_err(|_| ExprError::Syntax {
                    pos: start,
                    expected: "a small factor index".into(),
                })?;
                out.push(Spanned {
                    tok: Tok::Number(n),
                    pos: start,
                });
            }
            b'A'..=b'Z' | b'a'..=b'z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(src[start..i].to_string()),
                    pos: start,
                });
            }
            _ => {
                return Err(ExprError::Syntax {
                    pos: i,
                    expected: "a name, `^`, `.`, `(` or `)`".into(),
                })
            }
        }
    }
    Ok(out)
}

// ---- Parser ----

struct Parser<'a> {
    toks: &'a [Spanned],
    at: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.at)
    }

    fn pos(&self) -> usize {
        self.peek().map(|s| s.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        match self.peek() {
            Some(s) if s.tok == tok => {
                self.at += 1;
                Ok(())
            }
            _ => Err(ExprError::Syntax {
                pos: self.pos(),
                expected: what.into(),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ExprError> {
        if let Some(Spanned {
            tok: Tok::Ident(name),
            ..
        }) = self.peek()
        {
            if name == "int" && matches!(self.toks.get(self.at + 1).map(|s| &s.tok), Some(Tok::Open))
            {
                self.at += 2;
                let w = self.parse_wedge()?;
                self.expect(Tok::Close, "`)` closing int(...)")?;
                return Ok(Expr::Integrate(w));
            }
        }
        Ok(Expr::Class(self.parse_wedge()?))
    }

    fn parse_wedge(&mut self) -> Result<Wedge, ExprError> {
        let mut atoms = vec![self.parse_atom()?];
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Dot)) {
            self.at += 1;
            atoms.push(self.parse_atom()?);
        }
        Ok(Wedge(atoms))
    }

    fn parse_atom(&mut self) -> Result<Atom, ExprError> {
        let pos = self.pos();
        match self.bump() {
            Some(Spanned {
                tok: Tok::Open, ..
            }) => {
                let w = self.parse_wedge()?;
                self.expect(Tok::Close, "`)` closing a group")?;
                Ok(Atom::Paren(Box::new(w)))
            }
            Some(Spanned {
                tok: Tok::Ident(name),
                ..
            }) => self.finish_ident(&name, pos),
            _ => Err(ExprError::Syntax {
                pos,
                expected: "a class, a map, or `(`".into(),
            }),
        }
    }

    fn finish_ident(&mut self, name: &str, pos: usize) -> Result<Atom, ExprError> {
        if let Some(map) = map_name(name) {
            self.expect(Tok::Caret, "`^` after a map name")?;
            let inner = self.parse_atom()?;
            return Ok(Atom::Pull(map, Box::new(inner)));
        }
        match name {
            "H" => Ok(Atom::Named(ClassName::H)),
            "HM" => Ok(Atom::Named(ClassName::Hm)),
            "pt" => Ok(Atom::Named(ClassName::Pt)),
            "Delta" => {
                self.expect(Tok::Open, "`(` after Delta")?;
                let i = self.expect_number()?;
                self.expect(Tok::Comma, "`,` between Delta indices")?;
                let j = self.expect_number()?;
                self.expect(Tok::Close, "`)` closing Delta(i,j)")?;
                Ok(Atom::Named(ClassName::Delta(i, j)))
            }
            _ => Err(ExprError::Unknown {
                pos,
                symbol: name.to_string(),
                detail: "is not a class or map name".into(),
            }),
        }
    }

    fn expect_number(&mut self) -> Result<usize, ExprError> {
        let pos = self.pos();
        match self.bump() {
            Some(Spanned {
                tok: Tok::Number(n),
                ..
            }) => Ok(n),
            _ => Err(ExprError::Syntax {
                pos,
                expected: "a factor index".into(),
            }),
        }
    }
}

fn map_name(s: &str) -> Option<MapName> {
    Some(match s {
        "s" => MapName::S,
        "s3" => MapName::S3,
        "iota" => MapName::Iota,
        "p1" => MapName::P1,
        "p2" => MapName::P2,
        "p3" => MapName::P3,
        "p12" => MapName::P12,
        "p13" => MapName::P13,
        "p23" => MapName::P23,
        _ => return None,
    })
}

/// Parses an expression without evaluating it.
pub fn parse_class_expr(src: &str) -> Result<Expr, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        at: 0,
        end: src.len(),
    };
    let e = p.parse_expr()?;
    if let Some(s) = p.peek() {
        return Err(ExprError::Syntax {
            pos: s.pos,
            expected: "end of expression".into(),
        });
    }
    Ok(e)
}

// ---- Evaluation ----

/// Parses and evaluates against a product of `factors` abelian surfaces.
pub fn eval_class_expr(src: &str, factors: usize) -> Result<Evaluated, ExprError> {
    let expr = parse_class_expr(src)?;
    eval_parsed(&expr, factors)
}

/// Evaluates an already-parsed expression.
pub fn eval_parsed(expr: &Expr, factors: usize) -> Result<Evaluated, ExprError> {
    let ring = TorusRing::new(factors);
    match expr {
        Expr::Integrate(w) => {
            let x = eval_wedge(&ring, w)?;
            match ring.integrate(&x) {
                Ok(done) => Ok(Evaluated::Number {
                    value: done.value,
                    not_top: done.not_top,
                }),
                Err(OracleError::DegreeMismatch) => Err(ExprError::Degree),
                Err(e) => unreachable!("integration only fails on degree: {e}"),
            }
        }
        Expr::Class(w) => Ok(Evaluated::Class(eval_wedge(&ring, w)?)),
    }
}

fn eval_wedge(ring: &TorusRing, w: &Wedge) -> Result<RingElement, ExprError> {
    let mut acc = ring.one();
    for atom in &w.0 {
        let x = eval_atom(ring, atom)?;
        acc = ring.wedge(&acc, &x);
    }
    Ok(acc)
}

fn eval_atom(ring: &TorusRing, atom: &Atom) -> Result<RingElement, ExprError> {
    match atom {
        Atom::Paren(w) => eval_wedge(ring, w),
        Atom::Named(c) => eval_named(ring, *c),
        Atom::Pull(m, inner) => {
            let (map, codomain) = resolve_map(*m, ring.factors())?;
            let cod_ring = TorusRing::new(codomain);
            let x = eval_atom(&cod_ring, inner)?;
            Ok(ring.pullback(map, &x))
        }
    }
}

fn eval_named(ring: &TorusRing, c: ClassName) -> Result<RingElement, ExprError> {
    match c {
        ClassName::H => Ok(ring.h_sum()),
        ClassName::Pt => Ok(ring.point_full()),
        ClassName::Hm => {
            if !(2..=3).contains(&ring.factors()) {
                return Err(ExprError::Unknown {
                    pos: 0,
                    symbol: "HM".into(),
                    detail: format!(
                        "needs 2 or 3 factors (ring has {})",
                        ring.factors()
                    ),
                });
            }
            Ok(ring.mumford_class())
        }
        ClassName::Delta(i, j) => {
            if i < 1 || j < 1 || i == j || i > ring.factors() || j > ring.factors() {
                return Err(ExprError::Unknown {
                    pos: 0,
                    symbol: format!("Delta({i},{j})"),
                    detail: format!(
                        "needs two distinct factors in 1..={}",
                        ring.factors()
                    ),
                });
            }
            Ok(ring
                .diagonal_class(i - 1, j - 1)
                .expect("indices were checked"))
        }
    }
}

/// Resolves a map symbol in a ring with the given factor count; the second
/// component is the codomain factor count the pulled-back atom lives on.
fn resolve_map(m: MapName, factors: usize) -> Result<(Map, usize), ExprError> {
    let unknown = |symbol: &str, need: usize| ExprError::Unknown {
        pos: 0,
        symbol: symbol.into(),
        detail: format!("needs {need} factors (ring has {factors})"),
    };
    let proj = |i: usize, symbol: &str| {
        if i < factors {
            Ok((Map::Proj { i }, 1))
        } else {
            Err(ExprError::Unknown {
                pos: 0,
                symbol: symbol.into(),
                detail: format!("needs at least {} factors (ring has {factors})", i + 1),
            })
        }
    };
    let pair = |j: usize, k: usize, symbol: &str| {
        if k < factors {
            Ok((Map::PairProj { j, k }, 2))
        } else {
            Err(ExprError::Unknown {
                pos: 0,
                symbol: symbol.into(),
                detail: format!("needs at least {} factors (ring has {factors})", k + 1),
            })
        }
    };
    match m {
        MapName::S => {
            if factors == 2 {
                Ok((Map::Sum2, 1))
            } else {
                Err(unknown("s", 2))
            }
        }
        MapName::S3 => {
            if factors == 3 {
                Ok((Map::Sum3, 1))
            } else {
                Err(unknown("s3", 3))
            }
        }
        MapName::Iota => {
            if factors == 1 {
                Ok((Map::Iota, 1))
            } else {
                Err(unknown("iota", 1))
            }
        }
        MapName::P1 => proj(0, "p1"),
        MapName::P2 => proj(1, "p2"),
        MapName::P3 => proj(2, "p3"),
        MapName::P12 => pair(0, 1, "p12"),
        MapName::P13 => pair(0, 2, "p13"),
        MapName::P23 => pair(1, 2, "p23"),
    }
}

// ---- Pretty printer ----

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Integrate(w) => write!(f, "int( {w} )"),
            Expr::Class(w) => write!(f, "{w}"),
        }
    }
}

impl fmt::Display for Wedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in &self.0 {
            if !first {
                write!(f, " . ")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pull(m, inner) => write!(f, "{m}^{inner}"),
            Atom::Named(c) => write!(f, "{c}"),
            Atom::Paren(w) => write!(f, "({w})"),
        }
    }
}

impl fmt::Display for MapName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MapName::S => "s",
            MapName::S3 => "s3",
            MapName::Iota => "iota",
            MapName::P1 => "p1",
            MapName::P2 => "p2",
            MapName::P3 => "p3",
            MapName::P12 => "p12",
            MapName::P13 => "p13",
            MapName::P23 => "p23",
        };
        f.write_str(s)
    }
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassName::H => f.write_str("H"),
            ClassName::Hm => f.write_str("HM"),
            ClassName::Pt => f.write_str("pt"),
            ClassName::Delta(i, j) => write!(f, "Delta({i},{j})"),
        }
    }
}
