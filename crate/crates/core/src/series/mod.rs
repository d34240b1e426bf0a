//! Truncated Laurent series in X over Q_p.
//!
//! A series is either an exact Laurent polynomial (`order == None`) or is
//! known modulo `O(X^order)`. Every operation derives the order of its result
//! from the orders and X-adic valuations of its operands; nothing is padded.

mod calculus;
mod expr;
mod subst;
mod text;
mod tsum;

use std::cmp::min;

use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::padic::Padic;

pub use calculus::TDivision;
pub use expr::{parse_expr, parse_with, ExprAlgebra};
pub use subst::{binomial_row, Exponent};
pub use text::parse_series;
pub use tsum::{parse_tsum, TSum};

/// Exact polynomial substitutions larger than this fall back to truncation.
pub const EXACT_DEGREE_LIMIT: i64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct LaurentSeries {
    p: u32,
    lo: i64,
    coeffs: Vec<Padic>,
    order: Option<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesJson {
    p: u32,
    lo: i64,
    order: Option<i64>,
    coeffs: Vec<Padic>,
}

impl From<LaurentSeries> for SeriesJson {
    fn from(s: LaurentSeries) -> Self {
        SeriesJson { p: s.p, lo: s.lo, order: s.order, coeffs: s.coeffs }
    }
}

impl TryFrom<SeriesJson> for LaurentSeries {
    type Error = Error;
    fn try_from(j: SeriesJson) -> Result<Self> {
        if !crate::is_supported_prime(j.p) {
            return Err(Error::domain(format!("unsupported prime {}", j.p)));
        }
        if let Some(c) = j.coeffs.iter().find(|c| c.prime() != j.p) {
            return Err(Error::PrimeMismatch(j.p, c.prime()));
        }
        let bound = 1i64 << 20;
        if j.lo.abs() > bound || j.order.is_some_and(|m| m.abs() > bound) || j.coeffs.len() as i64 > bound {
            return Err(Error::domain("series window out of range"));
        }
        Ok(LaurentSeries::from_coeffs(j.p, j.lo, j.coeffs, j.order))
    }
}

impl LaurentSeries {
    /// The exact zero series.
    pub fn zero(p: u32) -> Self {
        LaurentSeries { p, lo: 0, coeffs: Vec::new(), order: None }
    }

    /// `O(X^order)`.
    pub fn truncated_zero(p: u32, order: i64) -> Self {
        LaurentSeries { p, lo: order, coeffs: Vec::new(), order: Some(order) }
    }

    pub fn constant(c: Padic) -> Self {
        LaurentSeries::monomial(c, 0)
    }

    pub fn monomial(c: Padic, e: i64) -> Self {
        LaurentSeries::from_coeffs(c.prime(), e, vec![c], None)
    }

    pub fn from_i64(p: u32, x: i64, prec: u32) -> Self {
        LaurentSeries::constant(Padic::from_i64(p, x, prec))
    }

    /// The variable X with a coefficient of precision `prec`.
    pub fn x(p: u32, prec: u32) -> Self {
        LaurentSeries::monomial(Padic::one(p, prec), 1)
    }

    pub fn from_coeffs(p: u32, lo: i64, coeffs: Vec<Padic>, order: Option<i64>) -> Self {
        LaurentSeries { p, lo, coeffs, order }.normalized()
    }

    pub fn from_i64_coeffs(p: u32, lo: i64, xs: &[i64], prec: u32, order: Option<i64>) -> Self {
        let coeffs = xs.iter().map(|&x| Padic::from_i64(p, x, prec)).collect();
        LaurentSeries::from_coeffs(p, lo, coeffs, order)
    }

    /// The exact polynomial (1+X)^j.
    pub fn one_plus_x_pow(p: u32, j: u64, prec: u32) -> Self {
        let row = binomial_row(p, j as i128, j as usize + 1);
        LaurentSeries::from_coeffs(p, 0, row.into_iter().map(|c| c.cap_rel(prec)).collect(), None)
    }

    /// φ(X) = (1+X)^p − 1, exactly.
    pub fn phi_x(p: u32) -> Self {
        let row = binomial_row(p, p as i128, p as usize + 1);
        LaurentSeries::from_coeffs(p, 1, row[1..].to_vec(), None)
    }

    fn normalized(mut self) -> Self {
        if let Some(m) = self.order {
            let keep = (m - self.lo).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(Padic::is_exact_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_exact_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = self.order.unwrap_or(0);
        }
        self
    }

    #[inline]
    pub fn prime(&self) -> u32 {
        self.p
    }

    /// Exponent of the first stored coefficient.
    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// One past the exponent of the last stored coefficient.
    #[inline]
    pub fn end(&self) -> i64 {
        self.lo + self.coeffs.len() as i64
    }

    #[inline]
    pub fn coeffs(&self) -> &[Padic] {
        &self.coeffs
    }

    /// Truncation order, `None` for an exact Laurent polynomial.
    #[inline]
    pub fn order(&self) -> Option<i64> {
        self.order
    }

    #[inline]
    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    pub fn coeff(&self, e: i64) -> Padic {
        if e >= self.lo && e < self.end() {
            self.coeffs[(e - self.lo) as usize]
        } else {
            Padic::zero(self.p)
        }
    }

    /// Lower bound for the X-adic valuation of the represented series.
    pub fn low(&self) -> i64 {
        if self.coeffs.is_empty() {
            self.order.unwrap_or(i64::MAX)
        } else {
            self.lo
        }
    }

    pub fn pole_order(&self) -> u32 {
        if self.coeffs.is_empty() || self.lo >= 0 {
            0
        } else {
            (-self.lo) as u32
        }
    }

    /// Degree of an exact polynomial part (`None` for the zero series).
    pub fn degree(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.end() - 1)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.order.is_none()
    }

    /// Every stored coefficient is zero at its precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Padic::is_zero)
    }

    /// Smallest coefficient valuation; `i64::MAX` when all are exact zeros.
    pub fn min_coeff_val(&self) -> i64 {
        self.coeffs.iter().map(Padic::val).min().unwrap_or(i64::MAX)
    }

    /// `min_coeff_val` of `self − other` on their common window.
    pub fn residual(&self, other: &LaurentSeries) -> i64 {
        self.sub(other).min_coeff_val()
    }

    /// Lowers the order to at most `m`.
    pub fn truncate(&self, m: i64) -> LaurentSeries {
        let order = Some(self.order.map_or(m, |o| min(o, m)));
        LaurentSeries { order, ..self.clone() }.normalized()
    }

    /// Lowers every coefficient's relative precision to at most `n`.
    pub fn cap_rel(&self, n: u32) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|c| c.cap_rel(n)).collect();
        LaurentSeries { coeffs, ..self.clone() }.normalized()
    }

    fn check(&self, other: &LaurentSeries) {
        assert_eq!(self.p, other.p, "series prime mismatch");
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        self.check(other);
        let order = match (self.order, other.order) {
            (Some(a), Some(b)) => Some(min(a, b)),
            (a, b) => a.or(b),
        };
        if self.coeffs.is_empty() {
            return LaurentSeries { order, ..other.clone() }.normalized();
        }
        if other.coeffs.is_empty() {
            return LaurentSeries { order, ..self.clone() }.normalized();
        }
        let lo = min(self.lo, other.lo);
        let hi = self.end().max(other.end());
        let coeffs = (lo..hi).map(|e| self.coeff(e).add(&other.coeff(e))).collect();
        LaurentSeries::from_coeffs(self.p, lo, coeffs, order)
    }

    pub fn neg(&self) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(Padic::neg).collect();
        LaurentSeries { coeffs, ..self.clone() }
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Padic) -> LaurentSeries {
        if c.is_exact_zero() {
            return match self.order {
                None => LaurentSeries::zero(self.p),
                Some(m) => LaurentSeries::truncated_zero(self.p, m),
            };
        }
        let coeffs = self.coeffs.iter().map(|x| x.mul(c)).collect();
        LaurentSeries { coeffs, ..self.clone() }.normalized()
    }

    /// Multiplication by X^k.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        LaurentSeries {
            p: self.p,
            lo: self.lo + k,
            coeffs: self.coeffs.clone(),
            order: self.order.map(|m| m + k),
        }
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        self.check(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return LaurentSeries::zero(self.p);
        }
        let order = match (self.order, other.order) {
            (None, None) => None,
            (Some(a), None) => Some(a.saturating_add(other.low())),
            (None, Some(b)) => Some(b.saturating_add(self.low())),
            (Some(a), Some(b)) => Some(min(a.saturating_add(other.low()), b.saturating_add(self.low()))),
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            let m = order.expect("an empty non-zero series is truncated");
            return LaurentSeries::truncated_zero(self.p, m);
        }
        let lo = self.lo + other.lo;
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(m) = order {
            len = len.min((m - lo).max(0) as usize);
        }
        let mut out = vec![Padic::zero(self.p); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_exact_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        LaurentSeries::from_coeffs(self.p, lo, out, order)
    }

    /// Inverse, expanded X-adically around the lowest exponent.
    ///
    /// Writes f = c·X^d·(1 + h) with h a power series without constant term
    /// and solves the coefficient recurrence. An exact monomial has an exact
    /// inverse; any other exact input is expanded to the context truncation.
    pub fn invert(&self, ctx: &Context) -> Result<LaurentSeries> {
        // Leading coefficients that vanish at their precision are dropped;
        // to first order they perturb the inverse by O(p^(k − 2v(c0))).
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if skip == self.coeffs.len() {
            return Err(Error::domain(match self.coeffs.first() {
                Some(c) => format!(
                    "series vanishes at working precision (coefficient at X^{} is O({}^{}))",
                    self.lo,
                    self.p,
                    c.val()
                ),
                None => "inversion of a zero series".to_string(),
            }));
        }
        let dropped = self.coeffs[..skip].iter().map(Padic::val).min();
        let d = self.lo + skip as i64;
        let u = &self.coeffs[skip..];
        let c0 = u[0];
        let c0inv = c0.inv()?;
        if self.is_exact() && u.len() == 1 && skip == 0 {
            return Ok(LaurentSeries::monomial(c0inv, -d));
        }
        let out_order = match self.order {
            None => ctx.trunc,
            Some(m) => m - 2 * d,
        };
        let n = out_order + d;
        if n <= 0 {
            return Ok(LaurentSeries::truncated_zero(self.p, out_order));
        }
        let n = n as usize;
        let mut inv: Vec<Padic> = Vec::with_capacity(n);
        inv.push(c0inv);
        let neg_c0inv = c0inv.neg();
        for k in 1..n {
            let mut acc = Padic::zero(self.p);
            for i in 1..=k.min(u.len() - 1) {
                if !u[i].is_exact_zero() {
                    acc = acc.add(&u[i].mul(&inv[k - i]));
                }
            }
            inv.push(acc.mul(&neg_c0inv));
        }
        if let Some(k) = dropped {
            let cap = k - 2 * c0.val();
            for c in inv.iter_mut() {
                *c = c.cap_abs(cap);
            }
        }
        Ok(LaurentSeries::from_coeffs(self.p, -d, inv, Some(out_order)))
    }

    pub fn div(&self, other: &LaurentSeries, ctx: &Context) -> Result<LaurentSeries> {
        Ok(self.mul(&other.invert(ctx)?))
    }

    pub fn pow(&self, e: i64, ctx: &Context) -> Result<LaurentSeries> {
        if e < 0 {
            return self.invert(ctx)?.pow(-e, ctx);
        }
        let prec = self.coeffs.iter().map(Padic::rel_prec).max().unwrap_or(ctx.prec).max(1);
        let mut acc = LaurentSeries::from_i64(self.p, 1, prec);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(3, 24, 16).unwrap()
    }

    fn s(xs: &[i64], lo: i64) -> LaurentSeries {
        LaurentSeries::from_i64_coeffs(3, lo, xs, 24, None)
    }

    #[test]
    fn x_times_inverse_x() {
        let c = ctx();
        let x = LaurentSeries::x(3, 24);
        let xi = x.invert(&c).unwrap();
        assert!(xi.is_exact());
        assert_eq!(xi.lo(), -1);
        assert!(x.mul(&xi).residual(&s(&[1], 0)) >= 24);
    }

    #[test]
    fn difference_of_squares() {
        let f = s(&[1, 1], 0).mul(&s(&[1, -1], 0));
        assert!(f.residual(&s(&[1, 0, -1], 0)) >= 24);
        assert!(f.is_exact());
    }

    #[test]
    fn geometric_series() {
        let m = 16;
        let f = LaurentSeries::from_i64_coeffs(3, 0, &[1; 16], 24, Some(m));
        let g = f.mul(&s(&[1, -1], 0));
        assert_eq!(g.order(), Some(m));
        assert!(g.residual(&s(&[1], 0)) >= 24);
    }

    #[test]
    fn invert_one_plus_x() {
        let g = s(&[1, 1], 0).invert(&ctx()).unwrap();
        for k in 0..16 {
            let expect = if k % 2 == 0 { 1 } else { -1 };
            assert!(g.coeff(k).sub(&Padic::from_i64(3, expect, 24)).is_zero());
        }
        assert_eq!(g.order(), Some(16));
    }

    #[test]
    fn invert_phi_x() {
        let c = ctx();
        let phi = LaurentSeries::phi_x(3).cap_rel(24);
        let g = phi.invert(&c).unwrap();
        assert_eq!(g.lo(), -1);
        assert_eq!(g.coeff(-1).val(), -1);
        let back = phi.mul(&g);
        assert!(back.residual(&s(&[1], 0)) >= 24 - 16);
    }

    #[test]
    fn truncated_products_track_order() {
        let f = LaurentSeries::from_i64_coeffs(3, -2, &[1, 2, 3], 24, Some(5));
        let g = LaurentSeries::from_i64_coeffs(3, 1, &[1, 1], 24, Some(8));
        assert_eq!(f.mul(&g).order(), Some(6));
        assert_eq!(f.add(&g).order(), Some(5));
    }

    #[test]
    fn json_roundtrip() {
        let f = LaurentSeries::from_i64_coeffs(5, -1, &[3, 0, 7], 10, Some(6));
        let j = serde_json::to_string(&f).unwrap();
        let g: LaurentSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(f, g);
    }
}
