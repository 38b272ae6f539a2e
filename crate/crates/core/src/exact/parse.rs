//! Text syntax for homogeneous polynomials over the rationals.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! poly   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := coefficient | variable ('^' natural)? | '(' poly ')'
//! coefficient := integer ('/' positive-integer)?
//! variable := 'x' | 'y' | 'z'
//! ```
//!
//! The printer emits the subset without parentheses; `parse` round-trips
//! everything the printer produces. All terms must share one total degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::field::Rat;
use super::poly::{HomPoly3, Var};
use super::ExactError;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Var(Var),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Token>, ExactError> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Num(digits.parse().expect("digit string")));
            }
            'x' => {
                chars.next();
                out.push(Token::Var(Var::X));
            }
            'y' => {
                chars.next();
                out.push(Token::Var(Var::Y));
            }
            'z' => {
                chars.next();
                out.push(Token::Var(Var::Z));
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '/' => {
                chars.next();
                out.push(Token::Slash);
            }
            '^' => {
                chars.next();
                out.push(Token::Caret);
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            other => {
                return Err(ExactError::Parse(format!(
                    "unexpected character '{other}'"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_nat(&mut self) -> Result<u32, ExactError> {
        match self.next() {
            Some(Token::Num(n)) => u32::try_from(&n)
                .map_err(|_| ExactError::Parse("exponent too large".into())),
            other => Err(ExactError::Parse(format!(
                "expected exponent, found {other:?}"
            ))),
        }
    }

    fn poly(&mut self) -> Result<HomPoly3<Rat>, ExactError> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.next();
                self.term()?.neg()
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    let t = self.term()?;
                    acc = add_hom(acc, t)?;
                }
                Some(Token::Minus) => {
                    self.next();
                    let t = self.term()?;
                    acc = add_hom(acc, t.neg())?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<HomPoly3<Rat>, ExactError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                // Explicit multiplication, or implicit by juxtaposition with
                // a variable or parenthesis (e.g. `2x`, `x(y+z)`).
                Some(Token::Star) => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Token::Var(_)) | Some(Token::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<HomPoly3<Rat>, ExactError> {
        match self.next() {
            Some(Token::Num(n)) => {
                let mut value = BigRational::from_integer(n);
                if self.peek() == Some(&Token::Slash) {
                    self.next();
                    match self.next() {
                        Some(Token::Num(d)) => {
                            if d == BigInt::from(0) {
                                return Err(ExactError::Parse("zero denominator".into()));
                            }
                            value /= BigRational::from_integer(d);
                        }
                        other => {
                            return Err(ExactError::Parse(format!(
                                "expected denominator, found {other:?}"
                            )))
                        }
                    }
                }
                Ok(HomPoly3::monomial(value, (0, 0, 0)))
            }
            Some(Token::Var(v)) => {
                let exp = if self.peek() == Some(&Token::Caret) {
                    self.next();
                    self.expect_nat()?
                } else {
                    1
                };
                let e = match v {
                    Var::X => (exp, 0, 0),
                    Var::Y => (0, exp, 0),
                    Var::Z => (0, 0, exp),
                };
                Ok(HomPoly3::monomial(BigRational::one(), e))
            }
            Some(Token::LParen) => {
                let p = self.poly()?;
                match self.next() {
                    Some(Token::RParen) => Ok(p),
                    other => Err(ExactError::Parse(format!(
                        "expected ')', found {other:?}"
                    ))),
                }
            }
            other => Err(ExactError::Parse(format!(
                "expected coefficient or variable, found {other:?}"
            ))),
        }
    }
}

/// Sum that tolerates mixing with zero but rejects inhomogeneous sums.
fn add_hom(a: HomPoly3<Rat>, b: HomPoly3<Rat>) -> Result<HomPoly3<Rat>, ExactError> {
    a.add(&b).map_err(|_| ExactError::NotHomogeneous)
}

/// Parses a homogeneous polynomial over the rationals.
pub fn parse_poly(s: &str) -> Result<HomPoly3<Rat>, ExactError> {
    let tokens = tokenize(s)?;
    if tokens.is_empty() {
        return Err(ExactError::Parse("empty input".into()));
    }
    let mut parser = Parser { tokens, pos: 0 };
    let p = parser.poly()?;
    if parser.pos != parser.tokens.len() {
        return Err(ExactError::Parse(format!(
            "trailing input at token {}",
            parser.pos
        )));
    }
    Ok(p)
}

/// Parses a map in the `[f0 : f1 : f2]` format.
pub fn parse_map(s: &str) -> Result<[HomPoly3<Rat>; 3], ExactError> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| ExactError::Parse("map must be bracketed: [f0 : f1 : f2]".into()))?;
    let parts = split_top_level(inner, ':');
    if parts.len() != 3 {
        return Err(ExactError::Parse(format!(
            "map needs exactly 3 components, found {}",
            parts.len()
        )));
    }
    Ok([
        parse_poly(&parts[0])?,
        parse_poly(&parts[1])?,
        parse_poly(&parts[2])?,
    ])
}

/// Splits on a separator, ignoring separators inside parentheses.
fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            c if c == sep && depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(c),
        }
    }
    parts.push(cur);
    parts
}
