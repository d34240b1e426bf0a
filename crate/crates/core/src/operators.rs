//! φ, the Γ-action and the left inverse ψ of φ on scalar series.

use serde::Serialize;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::padic::{max_precision, CycloElement, Padic, VAL_INF};
use crate::series::{Exponent, LaurentSeries};

/// γ ∈ Γ through its cyclotomic character a = χ(γ) ∈ Z_p^*.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaElement {
    p: u32,
    a: Exponent,
}

impl GammaElement {
    /// `a` must be a unit; for p = 2 it must also be ≡ 1 mod 4.
    pub fn from_int(p: u32, a: i64) -> Result<Self> {
        let x = Padic::from_i64(p, a, max_precision(p));
        Self::validate(p, &x)?;
        Ok(GammaElement { p, a: Exponent::Int(a) })
    }

    pub fn from_padic(a: Padic) -> Result<Self> {
        Self::validate(a.prime(), &a)?;
        Ok(GammaElement { p: a.prime(), a: Exponent::Padic(a) })
    }

    fn validate(p: u32, a: &Padic) -> Result<()> {
        if a.is_zero() || a.val() != 0 {
            return Err(Error::domain(format!("χ(γ) must be a {p}-adic unit, got {a}")));
        }
        if p == 2 {
            let r = a.to_symmetric_i128().unwrap_or(0).rem_euclid(4);
            if a.abs_prec() < 2 || r != 1 {
                return Err(Error::domain("for p = 2, χ(γ) must be ≡ 1 mod 4"));
            }
        }
        Ok(())
    }

    /// The generator used by default: 1 + p for odd p, 5 for p = 2.
    pub fn default_generator(p: u32) -> Self {
        let a = if p == 2 { 5 } else { 1 + p as i64 };
        GammaElement::from_int(p, a).expect("1 + p is a unit")
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn exponent(&self) -> Exponent {
        self.a
    }

    /// χ(γ) as a p-adic number (exact integers at precision `prec`).
    pub fn character(&self, prec: u32) -> Padic {
        match self.a {
            Exponent::Int(a) => Padic::from_i64(self.p, a, prec),
            Exponent::Padic(a) => a,
        }
    }

    /// The element with character a·b (the composite γ_a ∘ γ_b).
    pub fn compose(&self, other: &GammaElement) -> Result<GammaElement> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if let (Exponent::Int(a), Exponent::Int(b)) = (self.a, other.a) {
            if let Some(ab) = a.checked_mul(b) {
                return GammaElement::from_int(self.p, ab);
            }
        }
        let cap = max_precision(self.p);
        GammaElement::from_padic(self.character(cap).mul(&other.character(cap)))
    }

    /// γ^k (k ≥ 0).
    pub fn pow(&self, k: u32) -> Result<GammaElement> {
        let mut acc = GammaElement::from_int(self.p, 1)?;
        for _ in 0..k {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }
}

pub fn op_phi(f: &LaurentSeries, ctx: &Context) -> Result<LaurentSeries> {
    f.subst_oneplus(&Exponent::Int(f.prime() as i64), ctx)
}

pub fn op_gamma(g: &GammaElement, f: &LaurentSeries, ctx: &Context) -> Result<LaurentSeries> {
    if g.prime() != f.prime() {
        return Err(Error::PrimeMismatch(g.prime(), f.prime()));
    }
    f.subst_oneplus(&g.exponent(), ctx)
}

/// (γ_a(f) − f)/log(a) with a = 1 + p^m (m ≥ 2 for p = 2): a finite
/// difference for ∇ whose first-order error is O(p^m).
pub fn nabla_estimate(f: &LaurentSeries, m: u32, ctx: &Context) -> Result<LaurentSeries> {
    let p = f.prime();
    let cap = max_precision(p);
    if m == 0 || m >= cap {
        return Err(Error::domain(format!("estimator step p^{m} outside 1..{cap}")));
    }
    let h = Padic::from_i64(p, 1, cap).shift(m as i64);
    let g = GammaElement::from_padic(Padic::one(p, cap).add(&h))?;
    let log_a = crate::padic::log_oneplus(&h)?;
    let diff = op_gamma(&g, f, ctx)?.sub(f);
    Ok(diff.scale(&log_a.inv()?))
}

/// Which independent algorithm computes ψ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiAlgorithm {
    /// Solve x = Σ_{i<p} (1+X)^i φ(x_i) for the coefficients of the x_i.
    Decomposition,
    /// φψ(x) = p^(−1) Σ_{ζ^p = 1} x(ζ(1+X) − 1), then undo φ.
    Trace,
}

/// ψ(f) with the default algorithm.
pub fn op_psi(f: &LaurentSeries, ctx: &Context) -> Result<LaurentSeries> {
    psi_with(f, PsiAlgorithm::Decomposition, ctx)
}

/// The polynomial ψ actually operates on.
///
/// Poles of order d are cleared with g = φ(X)^d f, and ψ(f) = X^(−d) ψ(g)
/// by the projection formula. For an exact g all of it is used; for g known
/// mod X^L only the coefficients below pK, K = ⌊L/p⌋, enter and ψ(g) is
/// reported mod X^K.
struct PsiInput {
    poly: Vec<Padic>,
    k: usize,
    d: i64,
    exact: bool,
}

fn psi_input(f: &LaurentSeries, ctx: &Context) -> Result<Option<PsiInput>> {
    let p = f.prime();
    let d = f.pole_order();
    if d > ctx.neg_depth {
        return Err(Error::domain(format!(
            "pole of order {d} exceeds the configured depth {}",
            ctx.neg_depth
        )));
    }
    let g = LaurentSeries::phi_x(p).pow(d as i64, ctx)?.mul(f);
    let (k, exact) = match g.order() {
        None => match g.degree() {
            None => return Ok(None),
            Some(deg) => (deg / p as i64 + 1, true),
        },
        Some(l) => (l.div_euclid(p as i64), false),
    };
    if k <= 0 {
        return Ok(None);
    }
    let poly = g.dense_from(0, k * p as i64);
    Ok(Some(PsiInput { poly, k: k as usize, d: d as i64, exact }))
}

pub fn psi_with(f: &LaurentSeries, alg: PsiAlgorithm, ctx: &Context) -> Result<LaurentSeries> {
    let p = f.prime();
    let Some(input) = psi_input(f, ctx)? else {
        return Ok(match f.order() {
            None => LaurentSeries::zero(p),
            Some(l) => {
                let d = f.pole_order() as i64;
                LaurentSeries::truncated_zero(p, (l + d).div_euclid(p as i64) - d)
            }
        });
    };
    let x0 = match alg {
        PsiAlgorithm::Decomposition => psi_decomposition(p, &input.poly, input.k),
        PsiAlgorithm::Trace => psi_trace(p, &input.poly, input.k)?,
    };
    let order = (!input.exact).then_some(input.k as i64 - input.d);
    Ok(LaurentSeries::from_coeffs(p, -input.d, x0, order))
}

fn poly_mul(a: &[Padic], b: &[Padic], p: u32) -> Vec<Padic> {
    let mut out = vec![Padic::zero(p); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Powers φ(X)^j, j < k, as dense exact polynomials.
fn phi_powers(p: u32, k: usize) -> Vec<Vec<Padic>> {
    let phi = LaurentSeries::phi_x(p).dense_from(0, p as i64 + 1);
    let mut out: Vec<Vec<Padic>> = Vec::with_capacity(k);
    out.push(vec![Padic::one(p, max_precision(p))]);
    for j in 1..k {
        let next = poly_mul(&out[j - 1], &phi, p);
        out.push(next);
    }
    out
}

/// Algorithm (A). The unknowns are the coefficients x_{i,j} of the x_i.
/// Column (i, j) of the matching system is (1+X)^i φ(X)^j, a monic
/// polynomial of degree pj + i, so the system is unitriangular in degree
/// order and back substitution from the top degree solves it without
/// dividing by anything.
fn psi_decomposition(p: u32, poly: &[Padic], k: usize) -> Vec<Padic> {
    let pu = p as usize;
    let phis = phi_powers(p, k);
    let binoms: Vec<LaurentSeries> =
        (0..pu).map(|i| LaurentSeries::one_plus_x_pow(p, i as u64, max_precision(p))).collect();
    let mut rem = poly.to_vec();
    let mut x0 = vec![Padic::zero(p); k];
    for m in (0..pu * k).rev() {
        let c = rem[m];
        if c.is_exact_zero() {
            continue;
        }
        let (j, i) = (m / pu, m % pu);
        if i == 0 {
            x0[j] = c;
        }
        let column = poly_mul(binoms[i].coeffs(), &phis[j], p);
        for (e, b) in column.iter().enumerate() {
            rem[e] = rem[e].sub(&c.mul(b));
        }
    }
    x0
}

/// Algorithm (B). Sums g over the translates X ↦ ζ(1+X) − 1, ζ ∈ μ_p:
/// the ζ = 1 term is g itself and the others form the trace from K_1 of
/// g(ζ(1+X) − 1). The quotient by p is φψ(g); undoing φ is a top-down
/// division by the monic φ(X)^j, and every coefficient left at a degree
/// not divisible by p must vanish.
fn psi_trace(p: u32, poly: &[Padic], k: usize) -> Result<Vec<Padic>> {
    // The division by p costs a digit. ψ maps Z_p((X)) into itself, so the
    // result modulo the input precision does not depend on the extra digit
    // appended to each coefficient here; the output is capped back to it.
    let floor = poly.iter().map(Padic::abs_prec).min().unwrap_or(VAL_INF);
    let poly: Vec<Padic> = poly.iter().map(with_guard_digit).collect();
    let x0 = psi_trace_raw(p, &poly, k)?;
    Ok(x0.iter().map(|c| if floor < VAL_INF { c.cap_abs(floor) } else { *c }).collect())
}

fn with_guard_digit(c: &Padic) -> Padic {
    let p = c.prime();
    if c.is_exact_zero() {
        *c
    } else if c.is_zero() {
        Padic::inexact_zero(p, c.abs_prec() + 1)
    } else if c.rel_prec() < max_precision(p) {
        Padic::new(p, c.val(), c.unit(), c.rel_prec() + 1)
    } else {
        *c
    }
}

fn psi_trace_raw(p: u32, poly: &[Padic], k: usize) -> Result<Vec<Padic>> {
    let zeta = CycloElement::zeta(p, 1);
    let zeta_minus_one = zeta.sub(&CycloElement::one(p, 1))?;
    let mut h: Vec<CycloElement> = Vec::with_capacity(poly.len());
    for c in poly.iter().rev() {
        // h ← h·((ζ − 1) + ζX) + c
        let mut next = Vec::with_capacity(h.len() + 1);
        for m in 0..=h.len() {
            let mut acc = CycloElement::zero(p, 1);
            if m < h.len() {
                acc = acc.add(&h[m].mul(&zeta_minus_one)?)?;
            }
            if m > 0 {
                acc = acc.add(&h[m - 1].mul(&zeta)?)?;
            }
            next.push(acc);
        }
        if next.is_empty() {
            next.push(CycloElement::zero(p, 1));
        }
        next[0] = next[0].add(&CycloElement::from_padic(1, *c))?;
        h = next;
    }
    let inv_p = Padic::from_i64(p, p as i64, max_precision(p)).inv()?;
    let mut rem: Vec<Padic> =
        poly.iter().enumerate().map(|(m, g)| g.add(&h[m].trace()).mul(&inv_p)).collect();
    let phis = phi_powers(p, k);
    let mut x0 = vec![Padic::zero(p); k];
    for m in (0..rem.len()).rev() {
        let c = rem[m];
        if m % p as usize != 0 {
            if !c.is_zero() {
                return Err(Error::precision(format!(
                    "trace is not in the image of φ: coefficient {c} at X^{m}"
                )));
            }
            continue;
        }
        let j = m / p as usize;
        x0[j] = c;
        for (e, b) in phis[j].iter().enumerate() {
            rem[e] = rem[e].sub(&c.mul(b));
        }
    }
    Ok(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse_expr;

    fn ctx(p: u32) -> Context {
        Context::new(p, 24, 12).unwrap()
    }

    fn ex(s: &str, c: &Context) -> LaurentSeries {
        parse_expr(s, c).unwrap()
    }

    #[test]
    fn phi_examples() {
        let c = ctx(3);
        assert!(op_phi(&ex("1", &c), &c).unwrap().residual(&ex("1", &c)) >= 24);
        assert!(op_phi(&ex("X", &c), &c).unwrap().residual(&ex("3*X+3*X^2+X^3", &c)) >= 24);
        let t = LaurentSeries::t(&c.with_trunc(10));
        let lhs = op_phi(&t, &c).unwrap();
        let rhs = t.scale(&Padic::from_i64(3, 3, 24));
        assert!(lhs.residual(&rhs) >= 24 - 3);
    }

    #[test]
    fn gamma_examples() {
        let c = ctx(3);
        let g2 = GammaElement::from_int(3, 2).unwrap();
        assert!(op_gamma(&g2, &ex("X", &c), &c).unwrap().residual(&ex("2*X+X^2", &c)) >= 24);
        let g1 = GammaElement::from_int(3, 1).unwrap();
        let f = ex("1 + 2*X - X^3", &c);
        assert!(op_gamma(&g1, &f, &c).unwrap().residual(&f) >= 24);
        let t = LaurentSeries::t(&c.with_trunc(8));
        let g4 = GammaElement::from_int(3, 4).unwrap();
        let lhs = op_gamma(&g4, &t, &c).unwrap();
        assert!(lhs.residual(&t.scale(&Padic::from_i64(3, 4, 24))) >= 24 - 2);
    }

    #[test]
    fn gamma_validation() {
        assert!(GammaElement::from_int(3, 3).is_err());
        assert!(GammaElement::from_int(2, 3).is_err());
        assert!(GammaElement::from_int(2, 5).is_ok());
        assert!(GammaElement::from_int(2, -3).is_ok());
    }

    #[test]
    fn psi_of_binomial_powers() {
        for p in [2u32, 3, 5] {
            let c = ctx(p);
            for j in 0..=2 * p as u64 {
                let f = LaurentSeries::one_plus_x_pow(p, j, 24);
                let expect = if j % p as u64 == 0 {
                    LaurentSeries::one_plus_x_pow(p, j / p as u64, 24)
                } else {
                    LaurentSeries::zero(p)
                };
                for alg in [PsiAlgorithm::Decomposition, PsiAlgorithm::Trace] {
                    let got = psi_with(&f, alg, &c).unwrap();
                    assert!(got.is_exact());
                    assert!(got.residual(&expect) >= 24 - 1, "p={p} j={j} {alg:?}: {got}");
                }
            }
        }
    }

    #[test]
    fn psi_fixed_points() {
        let c = Context { neg_depth: 2, ..ctx(3) };
        for s in ["1", "1/X", "(1+X)/X"] {
            let f = ex(s, &c);
            for alg in [PsiAlgorithm::Decomposition, PsiAlgorithm::Trace] {
                let got = psi_with(&f, alg, &c).unwrap();
                assert!(got.residual(&f) >= 24 - 1, "{s} {alg:?}: {got}");
            }
        }
    }

    #[test]
    fn brute_force_decomposition() {
        // (1+X)^3 = φ(1 + X) with x_1 = x_2 = 0; solve the coefficient system
        // by enumerating small integer candidates for x_0 = a + bX.
        let c = ctx(3);
        let f = ex("(1+X)^3", &c);
        let mut found = None;
        for a in -3..=3 {
            for b in -3..=3 {
                let cand = LaurentSeries::from_i64_coeffs(3, 0, &[a, b], 24, None);
                if op_phi(&cand, &c).unwrap().residual(&f) >= 24 {
                    found = Some((a, b));
                }
            }
        }
        assert_eq!(found, Some((1, 1)));
        let got = op_psi(&f, &c).unwrap();
        assert!(got.residual(&ex("1+X", &c)) >= 24);
    }

    #[test]
    fn psi_left_inverse_with_pole() {
        let c = Context { neg_depth: 2, ..ctx(5) };
        let f = ex("3/X^2 + 2/X + 7 + X^3", &c);
        let back = op_psi(&op_phi(&f, &c).unwrap(), &c).unwrap();
        // φ(X)^(−2) expanded in X has coefficients of valuation ≈ −2 − j/4,
        // so φ(f) itself is only known to about 17 digits near X^3.
        assert!(back.residual(&f) >= 24 - 8, "{back}");
    }
}
