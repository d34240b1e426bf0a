use std::collections::BTreeMap;

use serde::Serialize;

use super::expr::{parse_with, ExprAlgebra};
use super::{LaurentSeries, TDivision};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::operators::{op_gamma, op_phi, psi_with, GammaElement, PsiAlgorithm};
use crate::padic::{max_precision, Padic};

/// A finite sum Σ t^j f_j, t = log(1+X) kept as a symbol.
///
/// The operators have closed forms on powers of t (∂t = 1, φ(t) = pt,
/// γ_a(t) = at, ψ(t^j f) = p^(−j) t^j ψ(f)), so t-multiples stay exact
/// instead of going through the truncated logarithm series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TSum {
    p: u32,
    terms: BTreeMap<i64, LaurentSeries>,
}

impl TSum {
    pub fn zero(p: u32) -> Self {
        TSum { p, terms: BTreeMap::new() }
    }

    /// t^j f.
    pub fn monomial(j: i64, f: LaurentSeries) -> Self {
        let mut s = TSum::zero(f.prime());
        s.push(j, f);
        s
    }

    pub fn from_series(f: LaurentSeries) -> Self {
        TSum::monomial(0, f)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &LaurentSeries)> {
        self.terms.iter().map(|(j, f)| (*j, f))
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, j: i64, f: LaurentSeries) {
        assert_eq!(f.prime(), self.p, "prime mismatch");
        let merged = match self.terms.remove(&j) {
            Some(g) => g.add(&f),
            None => f,
        };
        if !merged.is_exact_zero() {
            self.terms.insert(j, merged);
        }
    }

    fn map_terms(&self, mut op: impl FnMut(i64, &LaurentSeries) -> Result<(i64, LaurentSeries)>) -> Result<TSum> {
        let mut out = TSum::zero(self.p);
        for (j, f) in self.terms() {
            let (k, g) = op(j, f)?;
            out.push(k, g);
        }
        Ok(out)
    }

    pub fn add(&self, other: &TSum) -> TSum {
        let mut out = self.clone();
        for (j, f) in other.terms() {
            out.push(j, f.clone());
        }
        out
    }

    pub fn neg(&self) -> TSum {
        self.map_terms(|j, f| Ok((j, f.neg()))).expect("infallible")
    }

    pub fn sub(&self, other: &TSum) -> TSum {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Padic) -> TSum {
        self.map_terms(|j, f| Ok((j, f.scale(c)))).expect("infallible")
    }

    /// Multiplication by t^k.
    pub fn shift_t(&self, k: i64) -> TSum {
        self.map_terms(|j, f| Ok((j + k, f.clone()))).expect("infallible")
    }

    pub fn mul(&self, other: &TSum) -> TSum {
        let mut out = TSum::zero(self.p);
        for (i, f) in self.terms() {
            for (j, g) in other.terms() {
                out.push(i + j, f.mul(g));
            }
        }
        out
    }

    /// Lowest power of t present, if any.
    pub fn min_t_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// ∂(t^j f) = j t^(j−1) f + t^j ∂f.
    pub fn partial(&self) -> TSum {
        let cap = max_precision(self.p);
        let mut out = TSum::zero(self.p);
        for (j, f) in self.terms() {
            if j != 0 {
                out.push(j - 1, f.scale(&Padic::from_i64(self.p, j, cap)));
            }
            out.push(j, f.partial());
        }
        out
    }

    /// ∇ = t∂.
    pub fn nabla(&self) -> TSum {
        self.partial().shift_t(1)
    }

    pub fn phi(&self, ctx: &Context) -> Result<TSum> {
        let p = Padic::from_i64(self.p, self.p as i64, max_precision(self.p));
        self.map_terms(|j, f| Ok((j, op_phi(f, ctx)?.scale(&p.pow(j)?))))
    }

    pub fn gamma(&self, g: &GammaElement, ctx: &Context) -> Result<TSum> {
        let a = g.character(max_precision(self.p));
        self.map_terms(|j, f| Ok((j, op_gamma(g, f, ctx)?.scale(&a.pow(j)?))))
    }

    pub fn psi(&self, alg: PsiAlgorithm, ctx: &Context) -> Result<TSum> {
        let p = Padic::from_i64(self.p, self.p as i64, max_precision(self.p));
        self.map_terms(|j, f| Ok((j, psi_with(f, alg, ctx)?.scale(&p.pow(-j)?))))
    }

    /// Smallest coefficient valuation over all terms.
    pub fn min_coeff_val(&self) -> i64 {
        self.terms.values().map(LaurentSeries::min_coeff_val).min().unwrap_or(i64::MAX)
    }

    pub fn residual(&self, other: &TSum) -> i64 {
        self.sub(other).min_coeff_val()
    }

    /// Σ t^(j − j0) f_j as one X-series, j0 the lowest t-exponent, with t
    /// expanded at the context truncation. Returns (j0, series).
    pub fn expand_from_lowest(&self, ctx: &Context) -> (i64, LaurentSeries) {
        let Some(j0) = self.min_t_exp() else {
            return (0, LaurentSeries::zero(self.p));
        };
        let t = LaurentSeries::t(ctx);
        let mut acc = LaurentSeries::zero(self.p);
        let mut tk = LaurentSeries::from_i64(self.p, 1, max_precision(self.p));
        let mut k = j0;
        for (j, f) in self.terms() {
            while k < j {
                tk = tk.mul(&t);
                k += 1;
            }
            acc = acc.add(&tk.mul(f));
        }
        (j0, acc)
    }

    /// Largest m ≤ `cap` with t^m dividing the sum X-adically (negative
    /// when the sum has a t-pole), with the obstruction that stopped it.
    pub fn t_divisibility(&self, cap: i64, ctx: &Context) -> Result<(i64, Option<TDivision>)> {
        let (j0, mut f) = self.expand_from_lowest(ctx);
        if f.is_zero() {
            return Ok((cap, None));
        }
        let mut m = j0;
        while m < cap {
            match f.tdivide(ctx)? {
                TDivision::Divisible(g) => {
                    f = g;
                    m += 1;
                }
                obstruction => return Ok((m, Some(obstruction))),
            }
        }
        Ok((m, None))
    }

    /// The whole sum as one Laurent series (negative powers of t through
    /// the X-adic inverse of t).
    pub fn to_series(&self, ctx: &Context) -> Result<LaurentSeries> {
        let (j0, f) = self.expand_from_lowest(ctx);
        if j0 == 0 || f.is_exact_zero() {
            return Ok(f);
        }
        Ok(LaurentSeries::t(ctx).pow(j0, ctx)?.mul(&f))
    }

    /// The single term t^j f, when there is exactly one.
    fn single(&self) -> Option<(i64, &LaurentSeries)> {
        let mut it = self.terms();
        match (it.next(), it.next()) {
            (Some(term), None) => Some(term),
            _ => None,
        }
    }
}

struct TSumAlgebra<'a>(&'a Context);

impl ExprAlgebra for TSumAlgebra<'_> {
    type Value = TSum;

    fn integer(&self, n: i64) -> TSum {
        TSum::from_series(LaurentSeries::constant(Padic::from_i64(self.0.p, n, self.0.prec)))
    }

    fn variable(&self, name: char, pos: usize) -> Result<TSum> {
        let (p, prec) = (self.0.p, self.0.prec);
        match name {
            'X' => Ok(TSum::from_series(LaurentSeries::x(p, prec))),
            't' => Ok(TSum::monomial(1, LaurentSeries::from_i64(p, 1, max_precision(p)))),
            _ => Err(Error::parse(pos, format!("unknown variable '{name}'"))),
        }
    }

    fn add(&self, a: &TSum, b: &TSum) -> TSum {
        a.add(b)
    }

    fn sub(&self, a: &TSum, b: &TSum) -> TSum {
        a.sub(b)
    }

    fn mul(&self, a: &TSum, b: &TSum) -> TSum {
        a.mul(b)
    }

    fn div(&self, a: &TSum, b: &TSum) -> Result<TSum> {
        let Some((j, g)) = b.single() else {
            return Err(Error::domain("division by a sum of several powers of t"));
        };
        let inv = g.invert(self.0)?;
        Ok(a.mul(&TSum::monomial(-j, inv)))
    }

    fn neg(&self, a: &TSum) -> TSum {
        a.neg()
    }

    fn pow(&self, a: &TSum, e: i64) -> Result<TSum> {
        if let Some((j, f)) = a.single() {
            return Ok(TSum::monomial(j * e, f.pow(e, self.0)?));
        }
        if e < 0 {
            return Err(Error::domain("negative power of a sum of several powers of t"));
        }
        let one = self.integer(1);
        Ok((0..e).fold(one, |acc, _| acc.mul(a)))
    }
}

/// Parses an expression in X and a symbolic t, e.g. `t^(-1)*X + 1/X`.
pub fn parse_tsum(src: &str, ctx: &Context) -> Result<TSum> {
    parse_with(src, &TSumAlgebra(ctx))
}
