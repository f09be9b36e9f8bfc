//! Tiny expression language for sphere polynomials: `u`, `v`, `w`, `i`,
//! decimal or rational constants, `+ - *`, division by constants, `^n`, and
//! parentheses. Example: `u*v + w/2`, `(1 - u)^2`, `3/4 u` is rejected (use `*`).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sphere::SpherePolynomial;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src)))
    }

    fn expr(&mut self) -> Result<SpherePolynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SpherePolynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some('/') => {
                    self.bump();
                    let d = self.unary()?;
                    if d.degree() > 0 {
                        return self.fail("division by a non-constant");
                    }
                    let c = d.coefficient([0, 0, 0]);
                    if c == Complex64::new(0.0, 0.0) {
                        return self.fail("division by zero");
                    }
                    acc = acc.scale(c.inv());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SpherePolynomial> {
        if self.peek() == Some('-') {
            self.bump();
            return Ok(-&self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.bump();
            self.skip_ws();
            let start = self.pos;
            while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: u32 = match self.src[start..self.pos].parse() {
                Ok(e) => e,
                Err(_) => return self.fail("expected a non-negative integer exponent"),
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SpherePolynomial> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                if self.bump() != Some(')') {
                    return self.fail("expected ')'");
                }
                Ok(e)
            }
            Some('u') => {
                self.bump();
                Ok(SpherePolynomial::u())
            }
            Some('v') => {
                self.bump();
                Ok(SpherePolynomial::v())
            }
            Some('w') => {
                self.bump();
                Ok(SpherePolynomial::w())
            }
            Some('i') => {
                self.bump();
                Ok(SpherePolynomial::constant(Complex64::new(0.0, 1.0)))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E') {
                    self.pos += 1;
                }
                match self.src[start..self.pos].parse::<f64>() {
                    Ok(x) => Ok(SpherePolynomial::constant(x)),
                    Err(_) => self.fail("malformed number"),
                }
            }
            Some(_) => self.fail("unexpected character"),
            None => self.fail("unexpected end of input"),
        }
    }
}

/// Parses an expression into a canonical sphere polynomial.
pub fn parse_polynomial(src: &str) -> Result<SpherePolynomial> {
    let mut p = Parser { src, pos: 0 };
    let out = p.expr()?;
    if p.peek().is_some() {
        return p.fail("trailing input");
    }
    Ok(out)
}
