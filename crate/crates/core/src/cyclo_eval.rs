//! The localization maps ι_n : series → K_n[[t]], X ↦ ζ·exp(t/p^n) − 1.

use serde::Serialize;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::padic::{max_precision, vp_i128, CycloElement, Padic};
use crate::report::CheckReport;
use crate::series::{LaurentSeries, TSum};

/// Σ_{j ≥ lo} c_j t^j + O(t^order) with c_j ∈ K_n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TatePowerSeries {
    p: u32,
    n: u32,
    lo: i64,
    coeffs: Vec<CycloElement>,
    order: i64,
}

fn factorial_val(p: u32, k: i64) -> i64 {
    (1..=k).map(|i| vp_i128(i as i128, p).0 as i64).sum()
}

/// Smallest relative precision N for which the t^(m_t − 1) coefficient of
/// ι_n still carries a digit: exp(t/p^n) has denominators k!·p^(nk).
pub fn required_precision(p: u32, n: u32, m_t: usize) -> i64 {
    let top = m_t as i64 - 1;
    n as i64 * top + factorial_val(p, top) + 1
}

impl TatePowerSeries {
    pub fn new(p: u32, n: u32, lo: i64, mut coeffs: Vec<CycloElement>, order: i64) -> Self {
        let keep = (order - lo).clamp(0, coeffs.len() as i64) as usize;
        coeffs.truncate(keep);
        for c in &coeffs {
            assert!(c.prime() == p && c.level() == n, "coefficient outside K_{n}");
        }
        TatePowerSeries { p, n, lo, coeffs, order }
    }

    pub fn zero(p: u32, n: u32, order: i64) -> Self {
        TatePowerSeries::new(p, n, 0, Vec::new(), order)
    }

    pub fn constant(c: CycloElement, order: i64) -> Self {
        TatePowerSeries::new(c.prime(), c.level(), 0, vec![c], order)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeffs(&self) -> &[CycloElement] {
        &self.coeffs
    }

    fn get(&self, k: i64) -> CycloElement {
        let i = k - self.lo;
        if i >= 0 && (i as usize) < self.coeffs.len() {
            self.coeffs[i as usize].clone()
        } else {
            CycloElement::zero(self.p, self.n)
        }
    }

    /// Coefficient of t^k; below the stored window it is zero, at or past the
    /// truncation order it is unknown.
    pub fn coeff(&self, k: i64) -> Result<CycloElement> {
        if k >= self.order {
            return Err(Error::domain(format!("t^{k} is beyond the truncation order {}", self.order)));
        }
        Ok(self.get(k))
    }

    fn check(&self, other: &TatePowerSeries) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.n != other.n {
            return Err(Error::domain(format!("level mismatch: {} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn truncate(&self, order: i64) -> TatePowerSeries {
        TatePowerSeries::new(self.p, self.n, self.lo, self.coeffs.clone(), order.min(self.order))
    }

    pub fn add(&self, other: &TatePowerSeries) -> Result<TatePowerSeries> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let lo = self.lo.min(other.lo);
        let coeffs = (lo..order.max(lo)).map(|k| self.get(k).add(&other.get(k))).collect::<Result<_>>()?;
        Ok(TatePowerSeries::new(self.p, self.n, lo, coeffs, order))
    }

    pub fn neg(&self) -> TatePowerSeries {
        TatePowerSeries { coeffs: self.coeffs.iter().map(CycloElement::neg).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &TatePowerSeries) -> Result<TatePowerSeries> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Padic) -> TatePowerSeries {
        TatePowerSeries { coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(), ..self.clone() }
    }

    pub fn scale_cyclo(&self, c: &CycloElement) -> Result<TatePowerSeries> {
        let coeffs = self.coeffs.iter().map(|x| x.mul(c)).collect::<Result<_>>()?;
        Ok(TatePowerSeries { coeffs, ..self.clone() })
    }

    /// Multiplication by t^j.
    pub fn shift_t(&self, j: i64) -> TatePowerSeries {
        TatePowerSeries { lo: self.lo + j, order: self.order + j, ..self.clone() }
    }

    pub fn mul(&self, other: &TatePowerSeries) -> Result<TatePowerSeries> {
        self.check(other)?;
        let lo = self.lo + other.lo;
        let order = (self.order + other.lo).min(other.order + self.lo);
        let len = (order - lo).max(0) as usize;
        let mut out = vec![CycloElement::zero(self.p, self.n); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len.saturating_sub(i)) {
                if !b.is_exact_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b)?)?;
                }
            }
        }
        Ok(TatePowerSeries::new(self.p, self.n, lo, out, order))
    }

    /// d/dt.
    pub fn ddt(&self) -> TatePowerSeries {
        let cap = max_precision(self.p);
        let coeffs: Vec<CycloElement> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&Padic::from_i64(self.p, self.lo + i as i64, cap)))
            .collect();
        TatePowerSeries::new(self.p, self.n, self.lo - 1, coeffs, self.order - 1)
    }

    /// The lowest coefficient that is not zero at its precision.
    fn leading(&self) -> Option<(i64, &CycloElement)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero()).map(|(i, c)| (self.lo + i as i64, c))
    }

    /// t-adic inverse: F = t^v (c + …) gives F^(−1) = t^(−v) (c^(−1) + …),
    /// known modulo t^(order − 2v).
    pub fn invert(&self) -> Result<TatePowerSeries> {
        let Some((v, c0)) = self.leading() else {
            return Err(Error::precision("Tate series vanishes at working precision"));
        };
        let c0_inv = c0.inv()?;
        let len = (self.order - v).max(0) as usize;
        let f: Vec<CycloElement> = (0..len as i64).map(|k| self.get(v + k)).collect();
        let mut g: Vec<CycloElement> = Vec::with_capacity(len);
        for k in 0..len {
            if k == 0 {
                g.push(c0_inv.clone());
                continue;
            }
            let mut s = CycloElement::zero(self.p, self.n);
            for i in 1..=k {
                if !f[i].is_exact_zero() {
                    s = s.add(&f[i].mul(&g[k - i])?)?;
                }
            }
            g.push(s.mul(&c0_inv)?.neg());
        }
        Ok(TatePowerSeries::new(self.p, self.n, -v, g, self.order - 2 * v))
    }

    pub fn pow(&self, e: i64) -> Result<TatePowerSeries> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let one = TatePowerSeries::constant(CycloElement::one(self.p, self.n), i64::MAX / 4);
        let mut acc = one;
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b)?;
            }
        }
        Ok(acc)
    }

    /// (ζ ↦ ζ^a, t ↦ a·t), the action of γ_a transported through ι_n.
    pub fn galois(&self, a: &Padic) -> Result<TatePowerSeries> {
        let modulus = (self.p as i128).pow(self.n);
        let Some(lift) = a.lift_i128() else {
            return Err(Error::domain("character has too little precision"));
        };
        if a.abs_prec() < self.n as i64 || a.val() != 0 {
            return Err(Error::domain("character must be a unit known modulo p^n"));
        }
        let r = lift.rem_euclid(modulus) as i64;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.galois(r).scale(&a.pow(self.lo + i as i64)?));
        }
        Ok(TatePowerSeries { coeffs, ..self.clone() })
    }

    /// min_j (v(c_j) + n·j): coefficient valuations in the variable t/p^n,
    /// the scale in which ι_n has bounded coefficients.
    pub fn scaled_min_val(&self) -> i64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.min_coeff_val().saturating_add(self.n as i64 * (self.lo + i as i64)))
            .min()
            .unwrap_or(i64::MAX)
    }

    /// Scaled valuation of the difference on the common window.
    pub fn residual(&self, other: &TatePowerSeries) -> Result<i64> {
        Ok(self.sub(other)?.scaled_min_val())
    }
}

fn check_level(n: u32, m_t: usize, ctx: &Context) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("ι_n needs n ≥ 1"));
    }
    if m_t == 0 || m_t > 64 {
        return Err(Error::domain(format!("t-truncation {m_t} outside 1..=64")));
    }
    let need = required_precision(ctx.p, n, m_t);
    if (ctx.prec as i64) < need {
        return Err(Error::precision(format!(
            "ι_{n} modulo t^{m_t} needs N ≥ {need} (have {})",
            ctx.prec
        )));
    }
    Ok(())
}

/// ι_n(X) = ζ·exp(t/p^n) − 1 modulo t^m_t.
pub fn iota_x(p: u32, n: u32, m_t: usize) -> TatePowerSeries {
    let cap = max_precision(p);
    let zeta = CycloElement::zeta(p, n);
    let mut coeffs = vec![zeta.sub(&CycloElement::one(p, n)).expect("same field")];
    let mut fact = Padic::one(p, cap);
    for k in 1..m_t as i64 {
        fact = fact.mul(&Padic::from_i64(p, k, cap));
        let c = fact.inv().expect("k! is nonzero").shift(-(n as i64) * k);
        coeffs.push(zeta.scale(&c));
    }
    TatePowerSeries::new(p, n, 0, coeffs, m_t as i64)
}

/// ι_n(f) modulo t^m_t. A truncated input is evaluated on its stored
/// coefficients: the tail beyond the truncation order has no growth bound,
/// so its image is not defined.
pub fn iota(f: &LaurentSeries, n: u32, m_t: usize, ctx: &Context) -> Result<TatePowerSeries> {
    if f.prime() != ctx.p {
        return Err(Error::PrimeMismatch(f.prime(), ctx.p));
    }
    check_level(n, m_t, ctx)?;
    let p = ctx.p;
    let order = m_t as i64;
    if f.is_exact_zero() {
        return Ok(TatePowerSeries::zero(p, n, order));
    }
    let e = iota_x(p, n, m_t);
    let mut acc = TatePowerSeries::zero(p, n, order);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(&e)?;
        let k = TatePowerSeries::constant(CycloElement::from_padic(n, *c), order);
        acc = acc.add(&k)?;
    }
    if f.lo() != 0 {
        acc = acc.mul(&e.pow(f.lo())?)?;
    }
    Ok(acc.truncate(order))
}

/// ι_n(Σ t^j f_j) = Σ (t/p^n)^j ι_n(f_j), t/p^n being ι_n(t).
pub fn iota_tsum(y: &TSum, n: u32, m_t: usize, ctx: &Context) -> Result<TatePowerSeries> {
    let p = ctx.p;
    let mut acc = TatePowerSeries::zero(p, n, m_t as i64);
    let p_n = Padic::from_i64(p, p as i64, max_precision(p)).pow(n as i64)?;
    for (j, f) in y.terms() {
        // f at order m_t − j so that t^j·ι(f) lands at order m_t
        let width = (m_t as i64 - j).clamp(1, 64) as usize;
        let img = iota(f, n, width, ctx)?.shift_t(j).scale(&p_n.pow(-j)?);
        acc = acc.add(&img)?;
    }
    Ok(acc.truncate(m_t as i64))
}

/// ι_n(t) computed from its definition as log(1 + ι_n(X)), summing the
/// logarithm series until the tail is below `target` in the scaled
/// valuation. The constant term is log(ζ), which only vanishes in the limit.
pub fn iota_t_via_log(p: u32, n: u32, m_t: usize, target: i64) -> Result<TatePowerSeries> {
    let e = iota_x(p, n, m_t);
    let deg = crate::padic::CycloElement::zeta(p, n).coeffs().len() as i64;
    let top = m_t as i64 - 1;
    let loss = factorial_val(p, top);
    // tail term k: scaled valuation ≥ (k − top)/deg − v(top!) − log_p k
    let enough = |k: i64| {
        let log_k = (k as f64).ln() / (p as f64).ln();
        (k - top) as f64 / deg as f64 - loss as f64 - log_k.ceil() >= target as f64
    };
    let mut last = 1;
    while !(enough(last + 1) && last > 2 * deg) {
        last += 1;
        if last > 1 << 16 {
            return Err(Error::precision("log series needs too many terms"));
        }
    }
    let cap = max_precision(p);
    let mut acc = TatePowerSeries::zero(p, n, m_t as i64);
    let mut ek = TatePowerSeries::constant(CycloElement::one(p, n), m_t as i64);
    for k in 1..=last {
        ek = ek.mul(&e)?;
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&ek.scale(&Padic::from_ratio(p, sign, k, cap)?))?;
    }
    Ok(acc)
}

/// The t^k coefficient of F.
pub fn delta_coeff(f: &TatePowerSeries, k: i64) -> Result<CycloElement> {
    f.coeff(k)
}

/// ι_n ∘ ∂ against p^n · d/dt ∘ ι_n on the window modulo t^(m_t − 1).
pub fn check_intertwine(y: &TSum, n: u32, m_t: usize, threshold: i64, ctx: &Context) -> Result<CheckReport> {
    intertwine_with_exponent(y, n, m_t, n as i64, threshold, ctx)
}

/// Same comparison with p^e in front of d/dt, for probing the sign of e.
pub fn intertwine_with_exponent(
    y: &TSum,
    n: u32,
    m_t: usize,
    e: i64,
    threshold: i64,
    ctx: &Context,
) -> Result<CheckReport> {
    let lhs = iota_tsum(&y.partial(), n, m_t, ctx)?.truncate(m_t as i64 - 1);
    let pe = Padic::from_i64(ctx.p, ctx.p as i64, max_precision(ctx.p)).pow(e)?;
    let rhs = iota_tsum(y, n, m_t, ctx)?.ddt().scale(&pe);
    Ok(CheckReport::new(format!("iota_{n} intertwines partial"), lhs.residual(&rhs)?, threshold))
}

/// Coefficient of t^k against (1/k!) · (d/dt)^k F at t = 0.
pub fn factorial_identity_check(f: &TatePowerSeries, k: u32, threshold: i64) -> Result<CheckReport> {
    let direct = f.coeff(k as i64)?;
    let mut d = f.clone();
    let cap = max_precision(f.p);
    let mut fact = Padic::one(f.p, cap);
    for i in 1..=k as i64 {
        d = d.ddt();
        fact = fact.mul(&Padic::from_i64(f.p, i, cap));
    }
    let via = d.coeff(0)?.scale(&fact.inv()?);
    let r = direct.sub(&via)?.min_coeff_val();
    Ok(CheckReport::new(format!("factorial identity k={k}"), r, threshold))
}

/// Verdicts on t-divisibility of y: (via ι_n at every listed level, X-adic).
/// ι_n says yes when no coefficient at t^j, j ≤ 0, survives `threshold`.
pub fn tdivisibility_verdicts(
    y: &TSum,
    levels: &[u32],
    m_t: usize,
    threshold: i64,
    ctx: &Context,
) -> Result<(bool, bool)> {
    let mut by_iota = true;
    for &n in levels {
        let img = iota_tsum(y, n, m_t, ctx)?;
        for (i, c) in img.coeffs().iter().enumerate() {
            let j = img.lo() + i as i64;
            if j <= 0 && c.min_coeff_val() + n as i64 * j < threshold {
                by_iota = false;
            }
        }
    }
    let (m, _) = y.t_divisibility(1, ctx)?;
    Ok((by_iota, m >= 1))
}

#[cfg(test)]
mod tests {
    use num_rational::Rational64;

    use super::*;
    use crate::operators::GammaElement;
    use crate::series::parse_expr;

    fn ctx(p: u32) -> Context {
        Context::new(p, 24.min(max_precision(p)), 32).unwrap()
    }

    fn zeta(p: u32, n: u32) -> CycloElement {
        CycloElement::zeta(p, n)
    }

    #[test]
    fn iota_of_x_low_terms() {
        for p in [2, 3, 5] {
            let c = ctx(p);
            let f = iota(&LaurentSeries::x(p, 24), 1, 8, &c).unwrap();
            let pi = zeta(p, 1).sub(&CycloElement::one(p, 1)).unwrap();
            assert!(f.coeff(0).unwrap().sub(&pi).unwrap().is_zero());
            let z_over_p = zeta(p, 1).scale(&Padic::from_ratio(p, 1, p as i64, 24).unwrap());
            assert!(f.coeff(1).unwrap().sub(&z_over_p).unwrap().is_zero());
        }
    }

    #[test]
    fn iota_t_from_log_is_t_over_pn() {
        for (p, n) in [(3, 1), (3, 2), (2, 2), (5, 1)] {
            let target = 16;
            let lt = iota_t_via_log(p, n, 8, target).unwrap();
            let symbolic = iota_tsum(&TSum::monomial(1, LaurentSeries::from_i64(p, 1, 24)), n, 8, &ctx(p)).unwrap();
            let r = lt.residual(&symbolic).unwrap();
            assert!(r >= target, "p={p} n={n}: residual {r}");
            // log ζ = 0 to working precision
            assert!(lt.coeff(0).unwrap().min_coeff_val() >= target);
        }
    }

    #[test]
    fn iota_of_phi_drops_a_level() {
        let c = ctx(3);
        let x = LaurentSeries::x(3, 24);
        let lhs = iota(&crate::operators::op_phi(&x, &c).unwrap(), 2, 8, &c).unwrap();
        let low = iota(&x, 1, 8, &c).unwrap();
        let embedded: Vec<CycloElement> = low.coeffs().iter().map(|z| z.embed(2).unwrap()).collect();
        let rhs = TatePowerSeries::new(3, 2, 0, embedded, 8);
        assert!(lhs.residual(&rhs).unwrap() >= 24 - 4);
    }

    #[test]
    fn delta_of_inverse_x() {
        for p in [2, 3, 5, 7] {
            let c = ctx(p);
            let f = iota(&parse_expr("1/X", &c).unwrap(), 1, 8, &c).unwrap();
            let d0 = delta_coeff(&f, 0).unwrap();
            let pi = zeta(p, 1).sub(&CycloElement::one(p, 1)).unwrap();
            assert!(d0.mul(&pi).unwrap().sub(&CycloElement::one(p, 1)).unwrap().min_coeff_val() >= 20);
            let v = Rational64::new(-1, p as i64 - 1);
            assert_eq!(d0.valuation_by_norm().unwrap(), v);
            assert_eq!(d0.valuation().unwrap(), v);
        }
    }

    #[test]
    fn precision_budget_fails_fast() {
        let c = Context::new(3, 10, 32).unwrap();
        let e = iota(&LaurentSeries::x(3, 10), 2, 8, &c).unwrap_err();
        assert!(matches!(e, Error::Precision(_)));
        assert_eq!(required_precision(3, 2, 8), 17);
    }

    #[test]
    fn intertwine_examples() {
        let c = ctx(3);
        let one = LaurentSeries::from_i64(3, 1, 24);
        let t = TSum::monomial(1, one);
        assert!(check_intertwine(&t, 1, 8, 16, &c).unwrap().passed);
        // the factor p^(−n) in front of d/dt does not match
        assert!(!intertwine_with_exponent(&t, 1, 8, -1, 16, &c).unwrap().passed);
        let x = TSum::from_series(LaurentSeries::x(3, 24));
        let r = check_intertwine(&x, 1, 7, 8, &c).unwrap();
        assert!(r.passed, "{r:?}");
        let inv = TSum::from_series(parse_expr("1/X", &c).unwrap());
        let r = check_intertwine(&inv, 1, 8, 24 - 8, &c).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn factorial_identity_examples() {
        let c = ctx(3);
        let f = iota(&LaurentSeries::x(3, 24), 1, 8, &c).unwrap();
        assert!(factorial_identity_check(&f, 0, 20).unwrap().passed);
        assert!(factorial_identity_check(&f, 2, 20).unwrap().passed);
        let t = iota_tsum(&TSum::monomial(1, LaurentSeries::from_i64(3, 1, 24)), 1, 8, &c).unwrap();
        let c1 = t.coeff(1).unwrap();
        assert!(c1.sub(&CycloElement::from_padic(1, Padic::from_ratio(3, 1, 3, 24).unwrap())).unwrap().is_zero());
        assert!(factorial_identity_check(&t, 1, 20).unwrap().passed);
    }

    #[test]
    fn galois_matches_gamma() {
        let c = ctx(3);
        let f = parse_expr("2 + X - 5*X^3", &c).unwrap();
        let g = GammaElement::from_int(3, 4).unwrap();
        let lhs = iota(&crate::operators::op_gamma(&g, &f, &c).unwrap(), 2, 8, &c).unwrap();
        let rhs = iota(&f, 2, 8, &c).unwrap().galois(&g.character(24)).unwrap();
        assert!(lhs.residual(&rhs).unwrap() >= 24 - 8);
    }

    #[test]
    fn divisibility_verdicts_agree() {
        let c = ctx(3);
        let h = parse_expr("1 + 2*X + X^2", &c).unwrap();
        let multiple = TSum::monomial(1, h.clone());
        assert_eq!(tdivisibility_verdicts(&multiple, &[1, 2], 8, 16, &c).unwrap(), (true, true));
        let plain = TSum::from_series(h);
        assert_eq!(tdivisibility_verdicts(&plain, &[1, 2], 8, 16, &c).unwrap(), (false, false));
        // X = t·(unit) in Q_p[[X]], but X does not vanish at ζ − 1
        let x = TSum::from_series(LaurentSeries::x(3, 24));
        assert_eq!(tdivisibility_verdicts(&x, &[1], 8, 16, &c).unwrap(), (false, true));
    }
}
