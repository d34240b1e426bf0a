//! Text form `c*X^e + ... + O(X^M)` with coefficients written as p-adic JSON.

use std::collections::BTreeMap;
use std::fmt;

use super::LaurentSeries;
use crate::error::{Error, Result};
use crate::padic::Padic;

const MAX_EXPONENT: i64 = 1 << 20;
const MAX_SPAN: i64 = 1 << 16;

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let json = serde_json::to_string(c).map_err(|_| fmt::Error)?;
            match self.lo + i as i64 {
                0 => write!(f, "{json}")?,
                1 => write!(f, "{json}*X")?,
                e => write!(f, "{json}*X^{e}")?,
            }
        }
        match self.order {
            Some(m) if first => write!(f, "O(X^{m})"),
            Some(m) => write!(f, " + O(X^{m})"),
            None if first => f.write_str("0"),
            None => Ok(()),
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected {s:?}")))
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.ws();
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let mut len = rest.starts_with('-') as usize;
        len += rest[len..].bytes().take_while(u8::is_ascii_digit).count();
        let v: i64 = rest[..len].parse().map_err(|_| Error::parse(start, "expected an integer"))?;
        if v.abs() > MAX_EXPONENT {
            return Err(Error::parse(start, "exponent out of range"));
        }
        self.pos += len;
        Ok(v)
    }

    fn padic(&mut self) -> Result<Padic> {
        self.ws();
        let start = self.pos;
        let close = self.src[start..].find('}').ok_or_else(|| Error::parse(start, "unterminated coefficient"))?;
        let body = &self.src[start..start + close + 1];
        self.pos = start + close + 1;
        serde_json::from_str(body).map_err(|e| Error::parse(start, format!("bad coefficient: {e}")))
    }
}

/// Parses the text form produced by `Display`. `p` fixes the prime of the
/// exact zero series `0`; every coefficient must use the same prime.
pub fn parse_series(src: &str, p: u32) -> Result<LaurentSeries> {
    if !crate::is_supported_prime(p) {
        return Err(Error::domain(format!("unsupported prime {p}")));
    }
    let mut cur = Cursor { src, pos: 0 };
    let mut terms: BTreeMap<i64, Padic> = BTreeMap::new();
    let mut order = None;
    if cur.eat("0") {
        cur.ws();
        if cur.pos != src.len() {
            return Err(Error::parse(cur.pos, "trailing input after 0"));
        }
        return Ok(LaurentSeries::zero(p));
    }
    loop {
        if cur.eat("O(X^") {
            let m = cur.int()?;
            cur.expect(")")?;
            order = Some(m);
            break;
        }
        if !cur.eat("{") {
            return Err(Error::parse(cur.pos, "expected a coefficient or O(X^M)"));
        }
        cur.pos -= 1;
        let c = cur.padic()?;
        if c.prime() != p {
            return Err(Error::PrimeMismatch(p, c.prime()));
        }
        let e = if cur.eat("*") {
            cur.expect("X")?;
            if cur.eat("^") {
                cur.int()?
            } else {
                1
            }
        } else {
            0
        };
        let slot = terms.entry(e).or_insert_with(|| Padic::zero(p));
        *slot = slot.add(&c);
        if !cur.eat("+") {
            break;
        }
    }
    cur.ws();
    if cur.pos != src.len() {
        return Err(Error::parse(cur.pos, "trailing input"));
    }
    let (Some(&lo), Some(&hi)) = (terms.keys().next(), terms.keys().next_back()) else {
        return Ok(LaurentSeries::truncated_zero(p, order.expect("loop ends with a term or order")));
    };
    if hi - lo >= MAX_SPAN {
        return Err(Error::parse(0, "exponent span too large"));
    }
    let coeffs = (lo..=hi).map(|e| terms.get(&e).copied().unwrap_or(Padic::zero(p))).collect();
    Ok(LaurentSeries::from_coeffs(p, lo, coeffs, order))
}
