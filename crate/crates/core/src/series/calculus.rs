use std::cmp::max;

use super::LaurentSeries;
use crate::context::Context;
use crate::error::Result;
use crate::padic::{max_precision, Padic};

/// Outcome of an exact division by t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TDivision {
    Divisible(LaurentSeries),
    /// t does not divide: the first coefficient that should have vanished.
    Obstruction { exponent: i64, coeff: Padic },
}

impl TDivision {
    pub fn is_divisible(&self) -> bool {
        matches!(self, TDivision::Divisible(_))
    }

    pub fn quotient(self) -> Option<LaurentSeries> {
        match self {
            TDivision::Divisible(g) => Some(g),
            TDivision::Obstruction { .. } => None,
        }
    }
}

impl LaurentSeries {
    /// t = log(1+X) = Σ_{k<order} (−1)^(k+1) X^k / k. The division by k
    /// shows up as a lower valuation, so the absolute precision of the
    /// X^k coefficient is `prec − v_p(k)`.
    pub fn log_oneplus(p: u32, order: i64, prec: u32) -> LaurentSeries {
        let coeffs = (1..order.max(1))
            .map(|k| {
                let sign = if k % 2 == 1 { 1 } else { -1 };
                Padic::from_ratio(p, sign, k, prec).expect("k is nonzero")
            })
            .collect();
        LaurentSeries::from_coeffs(p, 1, coeffs, Some(order))
    }

    /// t at the context truncation.
    pub fn t(ctx: &Context) -> LaurentSeries {
        LaurentSeries::log_oneplus(ctx.p, ctx.trunc, ctx.prec)
    }

    /// d/dX.
    pub fn ddx(&self) -> LaurentSeries {
        let cap = max_precision(self.p);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.mul(&Padic::from_i64(self.p, self.lo + i as i64, cap)))
            .collect();
        LaurentSeries::from_coeffs(self.p, self.lo - 1, coeffs, self.order.map(|m| m - 1))
    }

    /// ∂ = (1+X) d/dX.
    pub fn partial(&self) -> LaurentSeries {
        let one_plus_x = LaurentSeries::one_plus_x_pow(self.p, 1, max_precision(self.p));
        self.ddx().mul(&one_plus_x)
    }

    /// ∇ = t ∂.
    pub fn nabla(&self, ctx: &Context) -> LaurentSeries {
        let d = self.partial();
        if d.is_exact_zero() {
            return d;
        }
        let t_order = match d.order {
            Some(m) => max(ctx.trunc, m + 1 - d.low().min(m)),
            None => ctx.trunc,
        };
        LaurentSeries::log_oneplus(self.p, t_order, ctx.prec).mul(&d)
    }

    /// Exact division by t in Q_p[[X]] (X-adic). A series with a significant
    /// coefficient at a non-positive exponent is not divisible; otherwise
    /// f = t·g with g = (f/X)·(t/X)^(−1).
    pub fn tdivide(&self, ctx: &Context) -> Result<TDivision> {
        if let Some((i, c)) = self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero()) {
            let e = self.lo + i as i64;
            if e <= 0 {
                return Ok(TDivision::Obstruction { exponent: e, coeff: *c });
            }
        }
        let start = max(self.lo, 1);
        let kept: Vec<Padic> = self.dense_from(start, self.end());
        let f_over_x = LaurentSeries::from_coeffs(self.p, start - 1, kept, self.order.map(|m| m - 1));
        if f_over_x.coeffs.is_empty() {
            return Ok(TDivision::Divisible(f_over_x));
        }
        let u_order = self.order.map_or(ctx.trunc, |m| m - 1);
        let u = LaurentSeries::log_oneplus(self.p, u_order + 1, ctx.prec).shift(-1);
        Ok(TDivision::Divisible(f_over_x.mul(&u.invert(ctx)?)))
    }
}
