//! Differential fields the solver runs over.

use std::fmt;

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use super::ratfunc::{Poly, RationalFunction};
use crate::context::Context;
use crate::error::Result;
use crate::padic::{max_precision, Padic};
use crate::series::LaurentSeries;

/// Answer of a zero test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    Zero,
    NonZero,
    /// The value sits in the band where precision cannot separate the cases.
    Unknown,
}

/// A constant of the derivation (∂c = 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constant {
    Rational(BigRational),
    Padic(Padic),
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Rational(q) => write!(f, "{q}"),
            Constant::Padic(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Constant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Constant::Rational(q) => s.serialize_str(&q.to_string()),
            Constant::Padic(x) => x.serialize(s),
        }
    }
}

/// Field operations, the derivation and the decision procedures the
/// elimination needs.
pub trait DiffField {
    type Elem: Clone + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn derive(&self, a: &Self::Elem) -> Self::Elem;
    fn zero_test(&self, a: &Self::Elem) -> ZeroTest;
    /// Preference among nonzero pivots; smaller is better.
    fn pivot_weight(&self, a: &Self::Elem) -> i64;
    /// The value of a derivation constant, None when `a` is not constant.
    fn constant_value(&self, a: &Self::Elem) -> Option<Constant>;
    fn from_constant(&self, c: &Constant) -> Self::Elem;
    /// Valuation-style size of a residual; i64::MAX for an exact zero.
    fn residual_val(&self, a: &Self::Elem) -> i64;
    /// Short name recorded in certificates.
    fn backend(&self) -> &'static str;
    /// The zero threshold τ, when the backend has one.
    fn threshold(&self) -> Option<i64>;

    /// Rank of a matrix given by rows.
    fn rank(&self, rows: &[Vec<Self::Elem>]) -> RankVerdict {
        super::linalg::gauss_rank(self, rows)
    }
}

/// A rank, or bounds on it when some pivots could not be decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankVerdict {
    Exact(usize),
    Bounds { lower: usize, upper: usize },
}

/// Q(X) with d/dX; all decisions are exact.
#[derive(Clone, Copy, Debug, Default)]
pub struct RationalField;

impl DiffField for RationalField {
    type Elem = RationalFunction;

    fn zero(&self) -> RationalFunction {
        RationalFunction::zero()
    }

    fn one(&self) -> RationalFunction {
        RationalFunction::one()
    }

    fn add(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        a.add(b)
    }

    fn sub(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        a.sub(b)
    }

    fn mul(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        a.mul(b)
    }

    fn neg(&self, a: &RationalFunction) -> RationalFunction {
        a.neg()
    }

    fn div(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        a.div(b)
    }

    fn derive(&self, a: &RationalFunction) -> RationalFunction {
        a.derivative()
    }

    fn zero_test(&self, a: &RationalFunction) -> ZeroTest {
        if a.is_zero() {
            ZeroTest::Zero
        } else {
            ZeroTest::NonZero
        }
    }

    fn pivot_weight(&self, a: &RationalFunction) -> i64 {
        let d = |p: &Poly| p.degree().map_or(0, |d| d as i64);
        d(a.numerator()) + d(a.denominator())
    }

    fn constant_value(&self, a: &RationalFunction) -> Option<Constant> {
        a.as_constant().map(Constant::Rational)
    }

    fn from_constant(&self, c: &Constant) -> RationalFunction {
        match c {
            Constant::Rational(q) => RationalFunction::constant(q.clone()),
            Constant::Padic(x) => RationalFunction::constant(x.to_bigrational()),
        }
    }

    fn residual_val(&self, a: &RationalFunction) -> i64 {
        if a.is_zero() {
            i64::MAX
        } else {
            i64::MIN
        }
    }

    fn backend(&self) -> &'static str {
        "rational"
    }

    fn threshold(&self) -> Option<i64> {
        None
    }

    fn rank(&self, rows: &[Vec<RationalFunction>]) -> RankVerdict {
        RankVerdict::Exact(super::linalg::bareiss_rank(rows))
    }
}

/// Truncated Laurent series over Q_p with ∂ = (1+X) d/dX. A value counts as
/// zero when every coefficient has valuation ≥ τ through X^`min_order`, and
/// as nonzero when some coefficient is below τ − `band`; in between the
/// answer is unknown.
#[derive(Clone, Debug)]
pub struct SeriesField {
    pub ctx: Context,
    pub tau: i64,
    pub band: i64,
    pub min_order: i64,
}

impl SeriesField {
    pub fn new(ctx: &Context) -> Self {
        SeriesField { ctx: ctx.clone(), tau: ctx.rank_threshold, band: 4, min_order: ctx.trunc / 2 }
    }

    /// Coefficients that vanish at a precision ≥ τ are indistinguishable from
    /// zero here; making them exact keeps spurious leading terms from
    /// shrinking the X-adic window of later products and quotients.
    pub fn clean(&self, a: &LaurentSeries) -> LaurentSeries {
        if !a.coeffs().iter().any(|c| c.is_zero() && !c.is_exact_zero() && c.val() >= self.tau) {
            return a.clone();
        }
        let p = self.ctx.p;
        let coeffs = a
            .coeffs()
            .iter()
            .map(|c| if c.is_zero() && c.val() >= self.tau { Padic::zero(p) } else { *c })
            .collect();
        LaurentSeries::from_coeffs(p, a.lo(), coeffs, a.order())
    }

    /// Smallest valuation among coefficients that are nonzero at precision.
    fn significant_val(a: &LaurentSeries) -> Option<i64> {
        a.coeffs().iter().filter(|c| !c.is_zero()).map(Padic::val).min()
    }
}

impl DiffField for SeriesField {
    type Elem = LaurentSeries;

    fn zero(&self) -> LaurentSeries {
        LaurentSeries::zero(self.ctx.p)
    }

    fn one(&self) -> LaurentSeries {
        LaurentSeries::from_i64(self.ctx.p, 1, max_precision(self.ctx.p))
    }

    fn add(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        self.clean(&a.add(b))
    }

    fn sub(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        self.clean(&a.sub(b))
    }

    fn mul(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        self.clean(&self.clean(a).mul(&self.clean(b)))
    }

    fn neg(&self, a: &LaurentSeries) -> LaurentSeries {
        a.neg()
    }

    fn div(&self, a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries> {
        Ok(self.clean(&self.clean(a).div(&self.clean(b), &self.ctx)?))
    }

    fn derive(&self, a: &LaurentSeries) -> LaurentSeries {
        self.clean(&self.clean(a).partial())
    }

    fn zero_test(&self, a: &LaurentSeries) -> ZeroTest {
        match SeriesField::significant_val(a) {
            Some(v) if v < self.tau - self.band => ZeroTest::NonZero,
            Some(v) if v < self.tau => ZeroTest::Unknown,
            // a coefficient lost to cancellation below τ could hide anything,
            // and so could a window that ends too early
            _ if a.min_coeff_val() < self.tau => ZeroTest::Unknown,
            _ if a.order().is_some_and(|m| m < self.min_order) => ZeroTest::Unknown,
            _ => ZeroTest::Zero,
        }
    }

    fn pivot_weight(&self, a: &LaurentSeries) -> i64 {
        // prefer the clearest pivot, then the one with the mildest pole
        let v = SeriesField::significant_val(a).unwrap_or(i64::MAX / 2);
        v * 1024 + a.low().clamp(-512, 511)
    }

    fn constant_value(&self, a: &LaurentSeries) -> Option<Constant> {
        let non_constant = a
            .coeffs()
            .iter()
            .enumerate()
            .any(|(i, c)| a.lo() + i as i64 != 0 && !c.is_zero() && c.val() < self.tau);
        (!non_constant).then(|| Constant::Padic(a.coeff(0)))
    }

    fn from_constant(&self, c: &Constant) -> LaurentSeries {
        let p = self.ctx.p;
        match c {
            Constant::Padic(x) => LaurentSeries::constant(*x),
            Constant::Rational(q) => LaurentSeries::constant(
                Padic::from_bigrational(p, q, max_precision(p)).unwrap_or_else(|_| Padic::zero(p)),
            ),
        }
    }

    fn residual_val(&self, a: &LaurentSeries) -> i64 {
        SeriesField::significant_val(a).unwrap_or_else(|| a.min_coeff_val())
    }

    fn backend(&self) -> &'static str {
        "series"
    }

    fn threshold(&self) -> Option<i64> {
        Some(self.tau)
    }
}
