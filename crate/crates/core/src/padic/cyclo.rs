use num_rational::Rational64;
use serde::Serialize;

use super::number::{max_precision, Padic};
use crate::error::{Error, Result};

/// Element of K_n = Q_p(ζ), ζ a primitive p^n-th root of unity, stored as a
/// polynomial in ζ of degree < e = p^(n-1)(p-1) (reduced modulo Φ_{p^n}).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycloElement {
    p: u32,
    n: u32,
    coeffs: Vec<Padic>,
}

/// Degree [K_n : Q_p].
pub fn degree(p: u32, n: u32) -> usize {
    (p as usize).pow(n - 1) * (p as usize - 1)
}

impl CycloElement {
    pub fn zero(p: u32, n: u32) -> Self {
        assert!(n >= 1, "cyclotomic level must be at least 1");
        CycloElement { p, n, coeffs: vec![Padic::zero(p); degree(p, n)] }
    }

    pub fn from_padic(n: u32, c: Padic) -> Self {
        let mut z = CycloElement::zero(c.prime(), n);
        z.coeffs[0] = c;
        z
    }

    pub fn from_i64(p: u32, n: u32, x: i64) -> Self {
        CycloElement::from_padic(n, Padic::from_i64(p, x, max_precision(p)))
    }

    pub fn one(p: u32, n: u32) -> Self {
        CycloElement::from_i64(p, n, 1)
    }

    /// ζ^k, reduced.
    pub fn zeta_pow(p: u32, n: u32, k: i64) -> Self {
        let order = (p as i64).pow(n);
        let mut raw = vec![Padic::zero(p); order as usize];
        raw[k.rem_euclid(order) as usize] = Padic::one(p, max_precision(p));
        CycloElement::reduce(p, n, raw)
    }

    /// The generator ζ (the class of ε^(n)).
    pub fn zeta(p: u32, n: u32) -> Self {
        CycloElement::zeta_pow(p, n, 1)
    }

    /// Builds from an arbitrary coefficient list in powers of ζ.
    pub fn from_coeffs(p: u32, n: u32, coeffs: Vec<Padic>) -> Self {
        CycloElement::reduce(p, n, coeffs)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Padic] {
        &self.coeffs
    }

    /// Reduces Σ c_i ζ^i: first modulo ζ^(p^n) − 1, then modulo Φ_{p^n}
    /// via ζ^((p-1)m + r) = −Σ_{i<p-1} ζ^(im + r), m = p^(n-1).
    fn reduce(p: u32, n: u32, raw: Vec<Padic>) -> Self {
        let order = (p as usize).pow(n);
        let m = order / p as usize;
        let e = degree(p, n);
        let mut folded = vec![Padic::zero(p); order];
        for (i, c) in raw.into_iter().enumerate() {
            if !c.is_exact_zero() {
                let j = i % order;
                folded[j] = folded[j].add(&c);
            }
        }
        let mut out: Vec<Padic> = folded[..e].to_vec();
        for r in 0..m {
            let c = folded[e + r];
            if c.is_exact_zero() {
                continue;
            }
            for i in 0..p as usize - 1 {
                out[i * m + r] = out[i * m + r].sub(&c);
            }
        }
        CycloElement { p, n, coeffs: out }
    }

    fn check(&self, other: &CycloElement) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.n != other.n {
            return Err(Error::domain(format!("level mismatch: {} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &CycloElement) -> Result<CycloElement> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(CycloElement { coeffs, ..*self })
    }

    pub fn sub(&self, other: &CycloElement) -> Result<CycloElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycloElement {
        CycloElement { coeffs: self.coeffs.iter().map(Padic::neg).collect(), ..*self }
    }

    pub fn scale(&self, c: &Padic) -> CycloElement {
        CycloElement { coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(), ..*self }
    }

    pub fn mul(&self, other: &CycloElement) -> Result<CycloElement> {
        self.check(other)?;
        let e = self.coeffs.len();
        let mut raw = vec![Padic::zero(self.p); 2 * e];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_exact_zero() {
                    raw[i + j] = raw[i + j].add(&a.mul(b));
                }
            }
        }
        Ok(CycloElement::reduce(self.p, self.n, raw))
    }

    pub fn pow(&self, mut k: u64) -> CycloElement {
        let mut acc = CycloElement::one(self.p, self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            k >>= 1;
        }
        acc
    }

    /// Galois action σ_a: ζ ↦ ζ^a, for a coprime to p.
    pub fn galois(&self, a: i64) -> CycloElement {
        let order = (self.p as i64).pow(self.n);
        let mut raw = vec![Padic::zero(self.p); order as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = (a.rem_euclid(order) * i as i64).rem_euclid(order) as usize;
            raw[j] = raw[j].add(c);
        }
        CycloElement::reduce(self.p, self.n, raw)
    }

    /// Units of (Z/p^n)^* other than 1, i.e. the non-trivial Galois elements.
    fn conjugate_exponents(&self) -> impl Iterator<Item = i64> {
        let order = (self.p as i64).pow(self.n);
        let p = self.p as i64;
        (2..order).filter(move |a| a % p != 0)
    }

    /// Product of the non-trivial conjugates; x times it is the norm.
    fn conjugate_product(&self) -> CycloElement {
        let mut y = CycloElement::one(self.p, self.n);
        for a in self.conjugate_exponents() {
            y = y.mul(&self.galois(a)).expect("same field");
        }
        y
    }

    /// N_{K_n/Q_p}(x), the product of all Galois conjugates.
    pub fn norm(&self) -> Padic {
        self.mul(&self.conjugate_product()).expect("same field").coeffs[0]
    }

    /// Tr_{K_n/Q_p}(x) from the traces of powers of ζ (Ramanujan sums).
    pub fn trace(&self) -> Padic {
        let e = self.coeffs.len() as i64;
        let m = e / (self.p as i64 - 1);
        let mut acc = Padic::zero(self.p);
        for (i, c) in self.coeffs.iter().enumerate() {
            let i = i as i64;
            let tr = if i == 0 {
                e
            } else if i % m == 0 {
                -m
            } else {
                0
            };
            if tr != 0 {
                acc = acc.add(&c.mul(&Padic::from_i64(self.p, tr, max_precision(self.p))));
            }
        }
        acc
    }

    pub fn inv(&self) -> Result<CycloElement> {
        if self.coeffs.iter().all(Padic::is_exact_zero) {
            return Err(Error::domain("inversion of zero in K_n"));
        }
        let y = self.conjugate_product();
        let nm = self.mul(&y)?.coeffs[0];
        if nm.is_zero() {
            return Err(Error::domain(format!(
                "element is not a unit at working precision (norm is O({}^{}))",
                self.p,
                nm.val()
            )));
        }
        Ok(y.scale(&nm.inv()?))
    }

    /// Image in K_m, m ≥ n, under ζ_n = ζ_m^(p^(m-n)).
    pub fn embed(&self, m: u32) -> Result<CycloElement> {
        if m < self.n {
            return Err(Error::domain(format!("cannot embed level {} into level {m}", self.n)));
        }
        let step = (self.p as usize).pow(m - self.n);
        let mut raw = vec![Padic::zero(self.p); (self.p as usize).pow(m)];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step] = *c;
        }
        Ok(CycloElement::reduce(self.p, m, raw))
    }

    /// Smallest coefficient valuation (a lower bound for v(x) on the ζ-basis).
    pub fn min_coeff_val(&self) -> i64 {
        self.coeffs.iter().map(Padic::val).min().unwrap_or(i64::MAX)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.iter().all(Padic::is_exact_zero)
    }

    /// True when every coefficient is zero at its precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Padic::is_zero)
    }

    /// Coordinates in the basis π^j, π = ζ − 1 (degree < e, so no reduction).
    pub fn pi_coordinates(&self) -> Vec<Padic> {
        let e = self.coeffs.len();
        let mut out = vec![Padic::zero(self.p); e];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
                let b = super::binom_int(self.p, i as i128, j as u64, max_precision(self.p));
                *slot = slot.add(&c.mul(&b));
            }
        }
        out
    }

    /// Valuation normalized by v(p) = 1, read off the π-adic expansion:
    /// v(Σ b_j π^j) = min_j (v(b_j) + j/e), the minimum being attained once.
    pub fn valuation(&self) -> Result<Rational64> {
        let e = self.coeffs.len() as i64;
        let mut best: Option<(Rational64, bool)> = None;
        for (j, b) in self.pi_coordinates().iter().enumerate() {
            if b.is_exact_zero() {
                continue;
            }
            let v = Rational64::new(b.val() * e + j as i64, e);
            if best.map_or(true, |(bv, _)| v < bv) {
                best = Some((v, b.is_zero()));
            }
        }
        match best {
            None => Err(Error::domain("valuation of exact zero")),
            Some((_, true)) => Err(Error::precision("valuation not determined at working precision")),
            Some((v, false)) => Ok(v),
        }
    }

    /// Valuation computed from the norm: v(x) = v(N(x)) / e.
    pub fn valuation_by_norm(&self) -> Result<Rational64> {
        let nm = self.norm();
        if nm.is_exact_zero() {
            return Err(Error::domain("valuation of exact zero"));
        }
        if nm.is_zero() {
            return Err(Error::precision("norm vanishes at working precision"));
        }
        Ok(Rational64::new(nm.val(), self.coeffs.len() as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u32, n: u32) -> CycloElement {
        CycloElement::zeta(p, n)
    }

    #[test]
    fn cube_of_zeta_is_one() {
        let x = z(3, 1);
        let c = x.mul(&x).unwrap().mul(&x).unwrap();
        assert!(c.sub(&CycloElement::one(3, 1)).unwrap().is_zero());
    }

    #[test]
    fn zeta_plus_zeta_squared() {
        let x = z(3, 1);
        let s = x.add(&x.pow(2)).unwrap();
        assert!(s.add(&CycloElement::one(3, 1)).unwrap().is_zero());
    }

    #[test]
    fn norm_of_zeta_minus_one() {
        // N(ζ − 1) = ±Φ_{p^n}(1) = p up to sign
        for (p, n) in [(3, 1), (5, 1), (2, 2), (3, 2), (2, 1)] {
            let pi = z(p, n).sub(&CycloElement::one(p, n)).unwrap();
            let nm = pi.norm();
            let sign = if degree(p, n) % 2 == 0 { 1 } else { -1 };
            assert_eq!(nm.to_symmetric_i128(), Some(sign * p as i128), "p={p} n={n}");
        }
    }

    #[test]
    fn inverse_multiplies_back() {
        let p = 5;
        let x = z(p, 2).pow(3).add(&CycloElement::from_i64(p, 2, 7)).unwrap();
        let y = x.inv().unwrap();
        let one = x.mul(&y).unwrap().sub(&CycloElement::one(p, 2)).unwrap();
        assert!(one.min_coeff_val() >= 20);
    }

    #[test]
    fn valuation_two_ways() {
        for (p, n) in [(3, 1), (5, 1), (3, 2), (2, 3)] {
            let pi = z(p, n).sub(&CycloElement::one(p, n)).unwrap();
            let e = degree(p, n) as i64;
            assert_eq!(pi.valuation().unwrap(), Rational64::new(1, e));
            assert_eq!(pi.valuation_by_norm().unwrap(), Rational64::new(1, e));
            let q = pi.inv().unwrap();
            assert_eq!(q.valuation().unwrap(), Rational64::new(-1, e));
            assert_eq!(q.valuation_by_norm().unwrap(), Rational64::new(-1, e));
        }
    }

    #[test]
    fn trace_matches_conjugate_sum() {
        let p = 3;
        let x = z(p, 2).pow(4).add(&z(p, 2).pow(3).scale(&Padic::from_i64(p, 5, 20))).unwrap();
        let mut s = x.clone();
        for a in [2, 4, 5, 7, 8] {
            s = s.add(&x.galois(a)).unwrap();
        }
        assert_eq!(s.coeffs()[1..].iter().filter(|c| !c.is_zero()).count(), 0);
        assert!(s.coeffs()[0].sub(&x.trace()).is_zero());
    }

    #[test]
    fn unit_quotient_in_level_one() {
        // (ζ − 1)^(p−1) / p is a unit
        for p in [2u32, 3, 5, 7] {
            let pi = z(p, 1).sub(&CycloElement::one(p, 1)).unwrap();
            let q = pi.pow(p as u64 - 1).scale(&Padic::from_i64(p, p as i64, 20).inv().unwrap());
            assert_eq!(q.valuation().unwrap(), Rational64::from_integer(0));
        }
    }
}
