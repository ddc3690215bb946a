//! Text grammar for Weyl algebra elements.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' INT)?
//! primary := 't' | 'd' | INT ('/' INT)? | '(' expr ')'
//! ```
//!
//! `d` stands for the derivation. Products are noncommutative and there is no
//! implicit multiplication: `2t` and `t d` are rejected.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::weyl::WeylElement;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    T,
    D,
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            't' => Tok::T,
            'd' => Tok::D,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                out.push((pos, Tok::Int(digits.parse().expect("ascii digits"))));
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    position: pos,
                    message: format!("unknown symbol `{other}`"),
                })
            }
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.here(),
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let tok = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        tok
    }

    fn expr(&mut self) -> Result<WeylElement> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<WeylElement> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::T | Tok::D | Tok::Int(_) | Tok::LParen) => {
                    return self.err("implicit multiplication is not allowed; use `*`")
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<WeylElement> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<WeylElement> {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Some(Tok::Int(n)) => match n.to_u32() {
                Some(e) => Ok(base.pow(e)),
                None => {
                    self.pos -= 1;
                    self.err("exponent too large")
                }
            },
            _ => {
                self.pos -= 1;
                self.err("expected a nonnegative integer exponent")
            }
        }
    }

    fn primary(&mut self) -> Result<WeylElement> {
        match self.peek().cloned() {
            Some(Tok::T) => {
                self.bump();
                Ok(WeylElement::t())
            }
            Some(Tok::D) => {
                self.bump();
                Ok(WeylElement::d())
            }
            Some(Tok::Int(num)) => {
                self.bump();
                if self.peek() != Some(&Tok::Slash) {
                    return Ok(WeylElement::constant(BigRational::from_integer(num)));
                }
                self.bump();
                match self.peek().cloned() {
                    Some(Tok::Int(den)) if !den.is_zero() => {
                        self.bump();
                        Ok(WeylElement::constant(BigRational::new(num, den)))
                    }
                    Some(Tok::Int(_)) => self.err("zero denominator"),
                    _ => self.err("expected an integer denominator"),
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Some(Tok::Slash) => self.err("`/` only appears inside rational literals"),
            Some(_) => self.err("expected `t`, `d`, a number or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an element and returns its normal form.
pub fn parse_weyl(text: &str) -> Result<WeylElement> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.len(),
    };
    let value = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return parser.err("unexpected trailing input");
    }
    Ok(value)
}

/// Canonical text; `parse_weyl(&print_weyl(p)) == p`.
pub fn print_weyl(p: &WeylElement) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_is_one() {
        assert_eq!(parse_weyl("d*t - t*d").unwrap(), WeylElement::one());
    }

    #[test]
    fn already_normal() {
        assert_eq!(print_weyl(&parse_weyl("t^2*d + 3").unwrap()), "t^2*d + 3");
    }

    #[test]
    fn square_of_sum() {
        let p = parse_weyl("(t+d)^2").unwrap();
        assert_eq!(print_weyl(&p), "d^2 + 2*t*d + t^2 + 1");
    }

    #[test]
    fn rationals_and_unary_minus() {
        let p = parse_weyl("-3/2*t + -(d)").unwrap();
        assert_eq!(print_weyl(&p), "-d - 3/2*t");
        assert_eq!(parse_weyl(" t * d - 1 / 2 ").unwrap().to_string(), "t*d - 1/2");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_weyl("2t") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 1),
            other => panic!("{other:?}"),
        }
        match parse_weyl("t + x") {
            Err(Error::Syntax { position, message }) => {
                assert_eq!(position, 4);
                assert!(message.contains("unknown symbol"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_weyl("t d").is_err());
        assert!(parse_weyl("t^-1").is_err());
        assert!(parse_weyl("1/0").is_err());
        assert!(parse_weyl("(t").is_err());
        assert!(parse_weyl("").is_err());
        assert!(parse_weyl("t)").is_err());
    }
}
