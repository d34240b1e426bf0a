//! Small expression language for series: integers, `X`, `t`, `+ - * /`,
//! integer powers `^n` and parentheses, e.g. `(1+X)^3 - 2/X`.

use super::LaurentSeries;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::padic::Padic;

const MAX_DEPTH: usize = 64;
const MAX_POWER: i64 = 1024;

/// An algebra the expression grammar can evaluate into.
pub trait ExprAlgebra {
    type Value;
    fn integer(&self, n: i64) -> Self::Value;
    /// A named generator (`X`, `t`); `pos` locates it for error messages.
    fn variable(&self, name: char, pos: usize) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn pow(&self, a: &Self::Value, e: i64) -> Result<Self::Value>;
}

struct SeriesAlgebra<'a>(&'a Context);

impl ExprAlgebra for SeriesAlgebra<'_> {
    type Value = LaurentSeries;

    fn integer(&self, n: i64) -> LaurentSeries {
        LaurentSeries::constant(Padic::from_i64(self.0.p, n, self.0.prec))
    }

    fn variable(&self, name: char, pos: usize) -> Result<LaurentSeries> {
        match name {
            'X' => Ok(LaurentSeries::x(self.0.p, self.0.prec)),
            't' => Ok(LaurentSeries::t(self.0)),
            _ => Err(Error::parse(pos, format!("unknown variable '{name}'"))),
        }
    }

    fn add(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.add(b)
    }

    fn sub(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.sub(b)
    }

    fn mul(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.mul(b)
    }

    fn div(&self, a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries> {
        a.div(b, self.0)
    }

    fn neg(&self, a: &LaurentSeries) -> LaurentSeries {
        a.neg()
    }

    fn pow(&self, a: &LaurentSeries, e: i64) -> Result<LaurentSeries> {
        a.pow(e, self.0)
    }
}

struct Parser<'a, A: ExprAlgebra> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
    alg: &'a A,
}

/// Parses and evaluates an expression. Integer constants carry the context
/// precision; `t` is log(1+X) at the context truncation.
pub fn parse_expr(src: &str, ctx: &Context) -> Result<LaurentSeries> {
    parse_with(src, &SeriesAlgebra(ctx))
}

/// Parses `src` and evaluates it in `alg`.
pub fn parse_with<A: ExprAlgebra>(src: &str, alg: &A) -> Result<A::Value> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, depth: 0, alg };
    let v = p.sum()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(Error::parse(p.pos, "unexpected trailing input"));
    }
    Ok(v)
}

impl<A: ExprAlgebra> Parser<'_, A> {
    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Error::parse(self.pos, "expression nested too deeply"));
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<A::Value> {
        self.enter()?;
        let mut acc = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if op == b'+' { self.alg.add(&acc, &rhs) } else { self.alg.sub(&acc, &rhs) };
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn product(&mut self) -> Result<A::Value> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' { self.alg.mul(&acc, &rhs) } else { self.alg.div(&acc, &rhs)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<A::Value> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            self.enter()?;
            let v = self.alg.neg(&self.unary()?);
            self.depth -= 1;
            return Ok(v);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let start = self.pos;
            let e = if self.peek() == Some(b'(') {
                self.pos += 1;
                let e = self.signed_int()?;
                self.close()?;
                e
            } else {
                self.signed_int()?
            };
            if e.abs() > MAX_POWER {
                return Err(Error::parse(start, "exponent too large"));
            }
            return self.alg.pow(&base, e);
        }
        Ok(base)
    }

    fn close(&mut self) -> Result<()> {
        if self.peek() != Some(b')') {
            return Err(Error::parse(self.pos, "expected ')'"));
        }
        self.pos += 1;
        Ok(())
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        let v = self.uint()?;
        Ok(if neg { -v } else { v })
    }

    fn uint(&mut self) -> Result<i64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse().map_err(|_| Error::parse(start, "expected an integer"))
    }

    fn atom(&mut self) -> Result<A::Value> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                self.close()?;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let pos = self.pos;
                self.pos += 1;
                self.alg.variable(c as char, pos)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                Ok(self.alg.integer(n))
            }
            _ => Err(Error::parse(self.pos, "expected a number, a variable or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_cube() {
        let ctx = Context::default();
        let f = parse_expr("(1+X)^3", &ctx).unwrap();
        assert!(f.is_exact());
        let g = LaurentSeries::from_i64_coeffs(3, 0, &[1, 3, 3, 1], 24, None);
        assert!(f.residual(&g) >= 24);
    }

    #[test]
    fn reciprocal_is_exact() {
        let ctx = Context::default();
        let f = parse_expr("(1+X)/X", &ctx).unwrap();
        assert!(f.is_exact());
        assert_eq!(f.lo(), -1);
        assert!(parse_expr("X^-2 * X^(2)", &ctx).unwrap().residual(&parse_expr("1", &ctx).unwrap()) >= 24);
    }

    #[test]
    fn errors_are_positioned() {
        let ctx = Context::default();
        assert!(matches!(parse_expr("1 + ", &ctx), Err(Error::Parse { pos: 4, .. })));
        assert!(parse_expr("((X)", &ctx).is_err());
        assert!(parse_expr("X^99999", &ctx).is_err());
        assert!(parse_expr("1/0", &ctx).is_err());
        assert!(parse_expr(&"(".repeat(200), &ctx).is_err());
    }
}
