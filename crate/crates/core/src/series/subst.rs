use std::cmp::max;

use super::{LaurentSeries, EXACT_DEGREE_LIMIT};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::padic::{max_precision, Padic};

/// Exponent `a` of a substitution X ↦ (1+X)^a − 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    /// An exact integer (φ uses `Int(p)`).
    Int(i64),
    /// An element of Z_p known to finite precision.
    Padic(Padic),
}

impl Exponent {
    /// Integer lift of `a` and the absolute precision it is known to.
    fn lift(&self, p: u32) -> Result<(i128, Option<i64>)> {
        match *self {
            Exponent::Int(0) => Err(Error::domain("substitution exponent must be nonzero")),
            Exponent::Int(a) => Ok((a as i128, None)),
            Exponent::Padic(a) => {
                if a.prime() != p {
                    return Err(Error::PrimeMismatch(p, a.prime()));
                }
                if a.is_exact_zero() {
                    return Err(Error::domain("substitution exponent must be nonzero"));
                }
                if a.is_zero() {
                    return Err(Error::precision("substitution exponent has no significant digits"));
                }
                if a.val() < 0 {
                    return Err(Error::domain("substitution exponent must lie in Z_p"));
                }
                let lift = a.lift_i128().ok_or_else(|| Error::domain("exponent lift overflows"))?;
                Ok((lift, Some(a.abs_prec())))
            }
        }
    }
}

fn floor_log(p: u32, m: usize) -> i64 {
    let mut e = 0;
    let mut pk = p as usize;
    while pk <= m {
        e += 1;
        pk *= p as usize;
    }
    e
}

/// `C(n, m)` for `m < len`, exact to the full capacity precision.
pub fn binomial_row(p: u32, n: i128, len: usize) -> Vec<Padic> {
    binomial_row_with(p, n, len, &inverse_table(p, len))
}

/// 1/(m+1) for `m < len`, shared by the rows of one substitution.
fn inverse_table(p: u32, len: usize) -> Vec<Padic> {
    let cap = max_precision(p);
    (0..len).map(|m| Padic::from_i128(p, m as i128 + 1, cap).inv().expect("nonzero integer")).collect()
}

fn binomial_row_with(p: u32, n: i128, len: usize, inv: &[Padic]) -> Vec<Padic> {
    let cap = max_precision(p);
    let mut out = Vec::with_capacity(len);
    let mut c = Padic::one(p, cap);
    for m in 0..len {
        out.push(c);
        if c.is_exact_zero() {
            continue;
        }
        let num = n - m as i128;
        c = if num == 0 { Padic::zero(p) } else { c.mul(&Padic::from_i128(p, num, cap)).mul(&inv[m]) };
    }
    out
}

/// Coefficients `m < out_len` of P((1+X)^a − 1), P given by its coefficients
/// from X^0. When `a` is only known to absolute precision `abs`, C(ak, m) is
/// known modulo p^(abs + v(k) − ⌊log_p m⌋) and is capped there.
fn poly_subst(p: u32, poly: &[Padic], lift: i128, abs: Option<i64>, out_len: usize) -> Vec<Padic> {
    // Taylor shift: coefficients of P in powers of Z = 1+X.
    let mut c = poly.to_vec();
    let n = c.len();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            c[j] = c[j].sub(&c[j + 1]);
        }
    }
    let mut out = vec![Padic::zero(p); out_len];
    let inv = inverse_table(p, out_len);
    for (k, ck) in c.iter().enumerate() {
        if ck.is_exact_zero() {
            continue;
        }
        if k == 0 {
            if out_len > 0 {
                out[0] = out[0].add(ck);
            }
            continue;
        }
        let row = binomial_row_with(p, lift * k as i128, out_len, &inv);
        let base = abs.map(|b| b + crate::padic::vp_i128(k as i128, p).0 as i64);
        for (m, b) in row.iter().enumerate() {
            if b.is_exact_zero() && base.is_none() {
                continue;
            }
            let b = match base {
                Some(bk) => b.cap_abs(bk - floor_log(p, m)),
                None => *b,
            };
            out[m] = out[m].add(&ck.mul(&b));
        }
    }
    out
}

impl LaurentSeries {
    /// f((1+X)^a − 1): the Γ-action for a unit `a`, φ for `a = p`.
    ///
    /// An exact polynomial substituted with a non-negative integer `a` stays
    /// exact. Otherwise the result is known modulo X^M where M is the order
    /// of `f`, or the context truncation for exact `f` (raised for exact
    /// integer substitutions into poles so that ψ can undo φ exactly).
    pub fn subst_oneplus(&self, a: &Exponent, ctx: &Context) -> Result<LaurentSeries> {
        let p = self.p;
        let (lift, abs) = a.lift(p)?;
        if self.coeffs.is_empty() {
            return Ok(self.clone());
        }
        let lo = self.lo;
        let deg = self.end() - 1;
        if let (None, Exponent::Int(ai)) = (self.order, a) {
            if lo >= 0 && *ai > 0 && deg.saturating_mul(*ai) <= EXACT_DEGREE_LIMIT {
                let poly = self.dense_from(0, self.end());
                let out = poly_subst(p, &poly, lift, None, (ai * deg + 1) as usize);
                return Ok(LaurentSeries::from_coeffs(p, 0, out, None));
            }
        }
        let target = match (self.order, a) {
            (Some(m), _) => m,
            (None, Exponent::Int(ai)) if *ai > 0 && lo < 0 => {
                let d = -lo;
                max(ctx.trunc, ai.saturating_mul(deg + d + 1) - d)
            }
            (None, _) => ctx.trunc,
        };
        if target > 1 << 20 {
            return Err(Error::domain("substitution window too large"));
        }
        if lo >= 0 {
            if target <= 0 {
                return Ok(LaurentSeries::truncated_zero(p, target));
            }
            let poly = self.dense_from(0, target.min(self.end()));
            let out = poly_subst(p, &poly, lift, abs, target as usize);
            return Ok(LaurentSeries::from_coeffs(p, 0, out, Some(target)));
        }
        let d = -lo;
        if d as u32 > ctx.neg_depth {
            return Err(Error::domain(format!(
                "pole of order {d} exceeds the configured depth {}",
                ctx.neg_depth
            )));
        }
        // f = X^lo P(X), (1+X)^a − 1 = X w(X): f(Y) = X^lo w^lo P(Y).
        let n = target + d;
        if n <= 0 {
            return Ok(LaurentSeries::truncated_zero(p, target));
        }
        let poly = self.dense_from(lo, lo + n.min(self.end() - lo));
        let py = LaurentSeries::from_coeffs(p, 0, poly_subst(p, &poly, lift, abs, n as usize), Some(n));
        let row = binomial_row(p, lift, n as usize + 1);
        let w_coeffs = row[1..]
            .iter()
            .enumerate()
            .map(|(m, b)| match abs {
                Some(bk) => b.cap_abs(bk - floor_log(p, m + 1)),
                None => *b,
            })
            .collect();
        let w = LaurentSeries::from_coeffs(p, 0, w_coeffs, Some(n));
        let wd = w.invert(ctx)?.pow(d, ctx)?;
        Ok(py.mul(&wd).shift(lo).truncate(target))
    }

    /// Dense coefficients for exponents in `from..to` (zeros outside storage).
    pub(crate) fn dense_from(&self, from: i64, to: i64) -> Vec<Padic> {
        (from..to).map(|e| self.coeff(e)).collect()
    }
}
