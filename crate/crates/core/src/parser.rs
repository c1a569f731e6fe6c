//! Text syntax for binary forms.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { "*" unary } ;
//! unary   = ("+" | "-") unary | power ;
//! power   = atom [ "^" integer ] ;
//! atom    = rational | "x" | "y" | "(" expr ")" ;
//! rational = integer [ "/" integer ] ;
//! integer = digit { digit } ;
//! ```
//!
//! Whitespace is ignored between tokens. Products need an explicit `*`,
//! decimals are rejected, and the expanded result must be a nonzero
//! homogeneous polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::poly::Q;

const MAX_EXPONENT: u32 = 256;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '^' => Token::Caret,
            '/' => Token::Slash,
            '(' => Token::LParen,
            ')' => Token::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'.' || bytes[i] == b'e' || bytes[i] == b'E') {
                    return Err(Error::Parse {
                        position: i,
                        message: "decimal literals are not supported; write rationals as a/b".into(),
                    });
                }
                out.push((start, Token::Int(BigInt::from_str(&text[start..i]).unwrap())));
                continue;
            }
            '.' => {
                return Err(Error::Parse {
                    position: i,
                    message: "decimal literals are not supported; write rationals as a/b".into(),
                })
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(Error::Parse {
                    position: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// Sparse bivariate polynomial keyed by `(deg_x, deg_y)`.
#[derive(Clone, Debug, Default, PartialEq)]
struct Poly2(BTreeMap<(u32, u32), Q>);

impl Poly2 {
    fn constant(c: Q) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((0, 0), c);
        }
        Poly2(m)
    }

    fn var(x: bool) -> Self {
        let mut m = BTreeMap::new();
        m.insert(if x { (1, 0) } else { (0, 1) }, Q::one());
        Poly2(m)
    }

    fn add(mut self, other: &Poly2, sign: i32) -> Self {
        for (k, v) in &other.0 {
            let e = self.0.entry(*k).or_insert_with(Q::zero);
            if sign > 0 {
                *e += v;
            } else {
                *e -= v;
            }
        }
        self.0.retain(|_, v| !v.is_zero());
        self
    }

    fn mul(&self, other: &Poly2) -> Self {
        let mut out: BTreeMap<(u32, u32), Q> = BTreeMap::new();
        for ((a1, b1), v1) in &self.0 {
            for ((a2, b2), v2) in &other.0 {
                *out.entry((a1 + a2, b1 + b2)).or_insert_with(Q::zero) += v1 * v2;
            }
        }
        out.retain(|_, v| !v.is_zero());
        Poly2(out)
    }

    fn neg(&self) -> Self {
        Poly2(self.0.iter().map(|(k, v)| (*k, -v)).collect())
    }

    fn max_degree(&self) -> u32 {
        self.0.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Poly2> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t, 1);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t, -1);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly2> {
        let mut acc = self.unary()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            let f = self.unary()?;
            acc = acc.mul(&f);
            if acc.max_degree() > MAX_EXPONENT {
                return self.err(format!("degree exceeds {MAX_EXPONENT}"));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly2> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly2> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            let e = match self.peek() {
                Some(Token::Int(n)) => n.clone(),
                _ => return self.err("exponent must be a nonnegative integer literal"),
            };
            let e: u32 = match u32::try_from(&e) {
                Ok(e) if e <= MAX_EXPONENT => e,
                _ => return self.err(format!("exponent exceeds {MAX_EXPONENT}")),
            };
            self.pos += 1;
            if base.max_degree() * e > MAX_EXPONENT {
                return self.err(format!("degree exceeds {MAX_EXPONENT}"));
            }
            let mut out = Poly2::constant(Q::one());
            for _ in 0..e {
                out = out.mul(&base);
            }
            if let Some(Token::Caret) = self.peek() {
                return self.err("chained exponents are ambiguous; add parentheses");
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly2> {
        let here = self.offset();
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                let mut value = Q::from_integer(n);
                if let Some(Token::Slash) = self.peek() {
                    self.pos += 1;
                    match self.peek() {
                        Some(Token::Int(d)) if !d.is_zero() => {
                            value /= Q::from_integer(d.clone());
                            self.pos += 1;
                        }
                        Some(Token::Int(_)) => return self.err("division by zero"),
                        _ => return self.err("`/` is only allowed inside a rational literal a/b"),
                    }
                }
                self.no_implicit_product()?;
                Ok(Poly2::constant(value))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let v = match name.as_str() {
                    "x" => Poly2::var(true),
                    "y" => Poly2::var(false),
                    _ => {
                        return Err(Error::UnknownIdentifier {
                            name,
                            position: here,
                        })
                    }
                };
                self.no_implicit_product()?;
                Ok(v)
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::RParen) => self.pos += 1,
                    _ => return self.err("expected `)`"),
                }
                self.no_implicit_product()?;
                Ok(inner)
            }
            Some(Token::Slash) => self.err("`/` is only allowed inside a rational literal a/b"),
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }

    fn no_implicit_product(&self) -> Result<()> {
        match self.peek() {
            Some(Token::Int(_)) | Some(Token::Ident(_)) | Some(Token::LParen) => {
                self.err("implicit multiplication is not allowed; write an explicit `*` (e.g. x*y)")
            }
            _ => Ok(()),
        }
    }
}

/// Parses and fully expands a binary-form expression.
pub fn parse_form(text: &str) -> Result<BinaryForm> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        end: text.len(),
    };
    let poly = p.expr()?;
    if p.pos != tokens.len() {
        if let Some((_, Token::Slash)) = tokens.get(p.pos) {
            return p.err("`/` is only allowed inside a rational literal a/b");
        }
        return p.err("unexpected trailing input");
    }
    if poly.0.is_empty() {
        return Err(Error::ZeroExpression);
    }
    let mut degrees = poly.0.keys().map(|(a, b)| (a + b) as usize);
    let n = degrees.next().unwrap();
    if let Some(other) = degrees.find(|&d| d != n) {
        return Err(Error::NonHomogeneous(n.min(other), n.max(other)));
    }
    let mut coeffs = vec![Q::zero(); n + 1];
    for ((_, b), v) in poly.0 {
        coeffs[b as usize] = v;
    }
    BinaryForm::with_degree(n, coeffs)
}

/// Canonical text: descending powers of `x`, rationals as `a/b`, explicit `*`.
pub fn format_form(f: &BinaryForm) -> String {
    let n = f.degree();
    let mut out = String::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (px, py) = (n - i, i);
        let mut factors = Vec::new();
        match px {
            0 => {}
            1 => factors.push("x".to_string()),
            k => factors.push(format!("x^{k}")),
        }
        match py {
            0 => {}
            1 => factors.push("y".to_string()),
            k => factors.push(format!("y^{k}")),
        }
        let mag = c.abs();
        let mut body = Vec::new();
        if !mag.is_one() || factors.is_empty() {
            body.push(mag.to_string());
        }
        body.extend(factors);
        let body = body.join("*");
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.write_str(&format_form(self))
    }
}

impl FromStr for BinaryForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_form(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qf};

    #[test]
    fn parse_examples() {
        assert_eq!(parse_form("x^3 + y^3").unwrap(), BinaryForm::from_ints(&[1, 0, 0, 1]));
        assert_eq!(parse_form("(x - 2*y)^3").unwrap(), BinaryForm::from_ints(&[1, -6, 12, -8]));
        assert_eq!(parse_form("x^2 + y^3"), Err(Error::NonHomogeneous(2, 3)));
    }

    #[test]
    fn format_examples() {
        assert_eq!(format_form(&BinaryForm::from_ints(&[1, 0, 0, 1])), "x^3 + y^3");
        assert_eq!(format_form(&BinaryForm::from_ints(&[0, 1, 1, 0])), "x^2*y + x*y^2");
        assert_eq!(format_form(&BinaryForm::zero(4)), "0");
        let g = BinaryForm::new(vec![qf(-1, 2), q(0), q(3)]).unwrap();
        assert_eq!(format_form(&g), "-1/2*x^2 + 3*y^2");
        assert_eq!(format_form(&BinaryForm::from_ints(&[-7])), "-7");
    }

    #[test]
    fn precedence() {
        // -x^2 is -(x^2), and ^ binds tighter than *
        assert_eq!(parse_form("-x^2").unwrap(), BinaryForm::from_ints(&[-1, 0, 0]));
        assert_eq!(parse_form("2*x^2").unwrap(), BinaryForm::from_ints(&[2, 0, 0]));
        assert_eq!(
            parse_form("1/2*x*y - 3/4 * y^2").unwrap(),
            BinaryForm::new(vec![q(0), qf(1, 2), qf(-3, 4)]).unwrap()
        );
        assert_eq!(parse_form("(x+y)*(x-y) + y^2").unwrap(), BinaryForm::from_ints(&[1, 0, 0]));
    }

    #[test]
    fn rejections() {
        assert!(matches!(parse_form("xy"), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse_form("z^2"), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse_form("2x"), Err(Error::Parse { position: 1, .. })));
        assert!(matches!(parse_form("x (y)"), Err(Error::Parse { .. })));
        assert!(matches!(parse_form("0.5*x"), Err(Error::Parse { position: 1, .. })));
        assert!(matches!(parse_form("x/2"), Err(Error::Parse { position: 1, .. })));
        assert!(matches!(parse_form("x^-1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_form("(x + y"), Err(Error::Parse { position: 6, .. })));
        assert!(matches!(parse_form("x^2^2"), Err(Error::Parse { .. })));
        assert_eq!(parse_form("x - x"), Err(Error::ZeroExpression));
        assert!(matches!(parse_form(""), Err(Error::Parse { position: 0, .. })));
    }
}
