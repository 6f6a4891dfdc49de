//! Text grammar: terms joined by + or -, each a product of an optional
//! rational coefficient and powers of x and y.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::BivariatePoly;
use crate::error::ParseError;

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let e = self.integer()?;
            u32::try_from(e).map_err(|_| ParseError { pos: at, msg: "exponent too large".into() })
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self, coeff: &mut BigRational, a: &mut u32, b: &mut u32) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut q = BigRational::from_integer(n);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    q = q / BigRational::from_integer(d);
                }
                if self.peek() == Some(b'.') {
                    return self.err("non-rational coefficient: decimals are not accepted, write p/q");
                }
                *coeff *= q;
            }
            Some(b'x') => {
                self.pos += 1;
                *a += self.exponent()?;
            }
            Some(b'y') => {
                self.pos += 1;
                *b += self.exponent()?;
            }
            Some(c) => return self.err(format!("unexpected character '{}'", c as char)),
            None => return self.err("unexpected end of input"),
        }
        Ok(())
    }
}

pub fn parse_poly(text: &str) -> Result<BivariatePoly, ParseError> {
    let mut lx = Lexer { s: text.as_bytes(), pos: 0 };
    let mut out = BivariatePoly::zero();
    let mut first = true;
    loop {
        let mut sign = BigRational::one();
        match lx.peek() {
            None if first => return lx.err("empty input"),
            None => break,
            Some(b'+') => lx.pos += 1,
            Some(b'-') => {
                lx.pos += 1;
                sign = -sign;
            }
            Some(_) if first => {}
            Some(c) => return lx.err(format!("expected '+' or '-', found '{}'", c as char)),
        }
        first = false;
        let mut coeff = sign;
        let (mut a, mut b) = (0u32, 0u32);
        lx.factor(&mut coeff, &mut a, &mut b)?;
        while lx.peek() == Some(b'*') {
            lx.pos += 1;
            lx.factor(&mut coeff, &mut a, &mut b)?;
        }
        out.add_term(a, b, coeff);
    }
    Ok(out)
}

impl std::str::FromStr for BivariatePoly {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_poly(s)
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms().iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let abs = c.abs();
            let mut parts: Vec<String> = Vec::new();
            if !abs.is_one() || (a == 0 && b == 0) {
                parts.push(abs.to_string());
            }
            match a {
                0 => {}
                1 => parts.push("x".into()),
                _ => parts.push(format!("x^{}", a)),
            }
            match b {
                0 => {}
                1 => parts.push("y".into()),
                _ => parts.push(format!("y^{}", b)),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
