//! Recursive-descent parser for the expression grammar.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary `-`, `^`. The exponent of
//! `^` must be an integer literal, optionally negative (`z^-2` or `z^(-2)`),
//! and `^` does not chain. Implicit multiplication is rejected.

use std::fmt;

use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    /// Byte offset into the source.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Unexpected {
        found: String,
        expected: Vec<&'static str>,
    },
    UnknownIdentifier(String),
    BadExponent(String),
    BadNumber(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Unexpected { found, expected } => {
                write!(
                    f,
                    "syntax error: found {found}, expected one of: {}",
                    expected.join(", ")
                )
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::BadExponent(text) => {
                write!(f, "exponent must be an integer literal, found `{text}`")
            }
            ParseErrorKind::BadNumber(text) => write!(f, "malformed number `{text}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, text) => format!("number `{text}`"),
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const OPERAND: &[&str] = &[
    "number",
    "`i`",
    "`z`",
    "`pi`",
    "function name",
    "`(`",
    "`-`",
];
const AFTER_OPERAND: &[&str] = &["`+`", "`-`", "`*`", "`/`", "`^`", "`)`", "end of input"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                pos = scan_number(bytes, pos);
                let text = &src[start..pos];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::BadNumber(text.to_string()),
                })?;
                out.push((Tok::Num(value, text.to_string()), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                out.push((Tok::Ident(src[start..pos].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::Unexpected {
                        found: format!("character `{ch}`"),
                        expected: OPERAND.to_vec(),
                    },
                });
            }
        };
        out.push((tok, start));
        pos += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

fn scan_number(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos < bytes.len() && bytes[pos] == b'.' {
        pos += 1;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
    }
    if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        let mut look = pos + 1;
        if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
            look += 1;
        }
        if look < bytes.len() && bytes[look].is_ascii_digit() {
            pos = look;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
        }
    }
    pos
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
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

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Unexpected {
                found: self.peek().describe(),
                expected: expected.to_vec(),
            },
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return self.after_operand(base);
        }
        self.bump();
        let n = self.exponent()?;
        self.after_operand(Expr::pow(base, n))
    }

    // Rejects juxtaposition such as `2z` or `z(1)` and chained `^`, which
    // would otherwise surface later as a less helpful error.
    fn after_operand(&self, e: Expr) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Num(..) | Tok::Ident(_) | Tok::LParen | Tok::Caret => {
                let expected: Vec<_> = AFTER_OPERAND
                    .iter()
                    .copied()
                    .filter(|t| *t != "`^`" || *self.peek() != Tok::Caret)
                    .collect();
                Err(self.unexpected(&expected))
            }
            _ => Ok(e),
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesized = *self.peek() == Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let offset = self.offset();
        let text = match self.peek() {
            Tok::Num(_, text) => text.clone(),
            _ => return Err(self.unexpected(&["integer exponent"])),
        };
        self.bump();
        let magnitude: i32 = text.parse().map_err(|_| ParseError {
            offset,
            kind: ParseErrorKind::BadExponent(text.clone()),
        })?;
        let n = if negative { -magnitude } else { magnitude };
        if parenthesized {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(n)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(value, _) => {
                self.bump();
                Ok(Expr::real(value))
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "z" => Ok(Expr::Var),
                    "i" => Ok(Expr::imag_unit()),
                    "pi" => Ok(Expr::real(std::f64::consts::PI)),
                    _ => match Func::from_name(&name) {
                        Some(func) => {
                            self.expect(Tok::LParen, "`(`")?;
                            let arg = self.expr()?;
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(Expr::call(func, arg))
                        }
                        None => Err(ParseError {
                            offset,
                            kind: ParseErrorKind::UnknownIdentifier(name),
                        }),
                    },
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.unexpected(OPERAND)),
        }
    }
}

/// Parses an expression in `z`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::RParen => Err(p.unexpected(&["`+`", "`-`", "`*`", "`/`", "end of input"])),
        _ => Err(p.unexpected(AFTER_OPERAND)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn lit(re: f64, im: f64) -> Expr {
        Expr::Lit(Complex64::new(re, im))
    }

    #[test]
    fn parses_polynomial() {
        let e = parse("1 - z^2").unwrap();
        assert_eq!(e, Expr::sub(Expr::real(1.0), Expr::pow(Expr::Var, 2)));
    }

    #[test]
    fn parses_imaginary_unit_and_call() {
        let e = parse("i*exp(-z)").unwrap();
        assert_eq!(
            e,
            Expr::mul(lit(0.0, 1.0), Expr::call(Func::Exp, Expr::neg(Expr::Var)))
        );
    }

    #[test]
    fn incomplete_input_reports_end_offset() {
        let err = parse("z +").unwrap_err();
        assert_eq!(err.offset, 3);
        match err.kind {
            ParseErrorKind::Unexpected { found, expected } => {
                assert_eq!(found, "end of input");
                assert!(expected.contains(&"`z`"));
            }
            other => panic!("unexpected error kind {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("1 + w").unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("w".into()));
    }

    #[test]
    fn implicit_multiplication_rejected() {
        for src in ["2z", "2 z", "z(1)", "(z)(z)", "2i"] {
            assert!(parse(src).is_err(), "{src} should not parse");
        }
    }

    #[test]
    fn integer_exponents_only() {
        assert_eq!(parse("z^-2").unwrap(), Expr::pow(Expr::Var, -2));
        assert_eq!(parse("z^(-2)").unwrap(), Expr::pow(Expr::Var, -2));
        let err = parse("z^2.5").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BadExponent("2.5".into()));
        assert!(parse("z^z").is_err());
        assert!(parse("z^2^3").is_err());
        assert!(parse("z^").is_err());
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(parse("-z^2").unwrap(), Expr::neg(Expr::pow(Expr::Var, 2)));
    }

    #[test]
    fn function_requires_parentheses() {
        let err = parse("exp z").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(parse("exp").is_err());
        assert!(parse("sin(z").is_err());
    }

    #[test]
    fn stray_characters() {
        let err = parse("z $ 1").unwrap_err();
        assert_eq!(err.offset, 2);
        assert!(parse("").is_err());
        assert!(parse("z)").is_err());
    }

    #[test]
    fn numbers_with_exponents() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::real(1.5e-3));
        assert_eq!(parse(".25").unwrap(), Expr::real(0.25));
        assert!(parse("1.2.3").is_err());
    }
}
