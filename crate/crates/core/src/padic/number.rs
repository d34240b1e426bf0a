use std::cmp::{max, min};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Valuation used for exact zeros.
pub const VAL_INF: i64 = i64::MAX;

/// Largest relative precision representable for `p`: `p^N < 2^63`.
pub fn max_precision(p: u32) -> u32 {
    let mut n = 0u32;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 63) {
        acc *= p as u128;
        n += 1;
    }
    n
}

pub(crate) fn pow_u64(p: u32, n: u32) -> u64 {
    (p as u64).pow(n)
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of a unit `u` modulo `p^n`.
pub(crate) fn inv_mod(u: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, u as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "inv_mod of a non-unit");
    s0.rem_euclid(m as i128) as u64
}

pub(crate) fn vp_u64(mut x: u64, p: u32) -> (u32, u64) {
    let mut v = 0;
    while x != 0 && x % p as u64 == 0 {
        x /= p as u64;
        v += 1;
    }
    (v, x)
}

pub(crate) fn vp_i128(mut x: i128, p: u32) -> (u32, i128) {
    let mut v = 0;
    while x != 0 && x % p as i128 == 0 {
        x /= p as i128;
        v += 1;
    }
    (v, x)
}

/// `p^v * u` with `u` known modulo `p^prec` (relative precision).
///
/// Three states share the representation: an exact zero (`val == VAL_INF`),
/// an inexact zero `O(p^val)` (`prec == 0`), and a nonzero value with
/// `prec >= 1` significant digits and `unit` coprime to `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Padic {
    p: u32,
    val: i64,
    unit: u64,
    prec: u32,
}

impl Padic {
    pub fn zero(p: u32) -> Self {
        Padic { p, val: VAL_INF, unit: 0, prec: 0 }
    }

    /// `O(p^abs)`: zero to absolute precision `abs`.
    pub fn inexact_zero(p: u32, abs: i64) -> Self {
        Padic { p, val: abs, unit: 0, prec: 0 }
    }

    /// Builds `p^val * unit` and normalizes (strips factors of `p`, reduces the unit).
    pub fn new(p: u32, val: i64, unit: u64, prec: u32) -> Self {
        assert!(prec <= max_precision(p), "precision {prec} exceeds capacity for p={p}");
        if prec == 0 {
            return Padic::inexact_zero(p, val);
        }
        let m = pow_u64(p, prec);
        let u = unit % m;
        if u == 0 {
            return Padic::inexact_zero(p, val.saturating_add(prec as i64));
        }
        let (k, u) = vp_u64(u, p);
        let prec = prec - k;
        Padic { p, val: val + k as i64, unit: u % pow_u64(p, prec), prec }
    }

    pub fn one(p: u32, prec: u32) -> Self {
        Padic::new(p, 0, 1, prec)
    }

    pub fn from_i64(p: u32, x: i64, prec: u32) -> Self {
        Padic::from_i128(p, x as i128, prec)
    }

    pub fn from_i128(p: u32, x: i128, prec: u32) -> Self {
        if x == 0 {
            return Padic::zero(p);
        }
        let (v, u) = vp_i128(x, p);
        let m = pow_u64(p, prec) as i128;
        Padic::new(p, v as i64, u.rem_euclid(m) as u64, prec)
    }

    pub fn from_bigint(p: u32, x: &BigInt, prec: u32) -> Self {
        if x.is_zero() {
            return Padic::zero(p);
        }
        let pb = BigInt::from(p);
        let mut v = 0i64;
        let mut x = x.clone();
        while (&x % &pb).is_zero() {
            x /= &pb;
            v += 1;
        }
        let m = BigInt::from(pow_u64(p, prec));
        let u = ((x % &m) + &m) % &m;
        Padic::new(p, v, u.to_u64().expect("reduced unit fits"), prec)
    }

    pub fn from_ratio(p: u32, num: i64, den: i64, prec: u32) -> Result<Self> {
        let d = Padic::from_i64(p, den, prec);
        Padic::from_i64(p, num, prec).div(&d)
    }

    pub fn from_bigrational(p: u32, q: &BigRational, prec: u32) -> Result<Self> {
        let n = Padic::from_bigint(p, q.numer(), prec);
        let d = Padic::from_bigint(p, q.denom(), prec);
        n.div(&d)
    }

    #[inline]
    pub fn prime(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn is_exact_zero(&self) -> bool {
        self.val == VAL_INF
    }

    /// True when no significant digit is known (exact or inexact zero).
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.prec == 0
    }

    /// Valuation for nonzero values, the known lower bound for inexact
    /// zeros, `VAL_INF` for exact zero. The value always lies in `p^val Z_p`.
    #[inline]
    pub fn val(&self) -> i64 {
        self.val
    }

    /// Absolute precision: the value is known modulo `p^abs_prec`.
    #[inline]
    pub fn abs_prec(&self) -> i64 {
        if self.is_exact_zero() {
            VAL_INF
        } else {
            self.val + self.prec as i64
        }
    }

    #[inline]
    pub fn rel_prec(&self) -> u32 {
        self.prec
    }

    #[inline]
    pub fn unit(&self) -> u64 {
        self.unit
    }

    fn check_prime(&self, other: &Padic) {
        assert_eq!(self.p, other.p, "p-adic prime mismatch");
    }

    /// Lowers the absolute precision to at most `abs`.
    pub fn cap_abs(&self, abs: i64) -> Padic {
        if abs >= self.abs_prec() {
            return *self;
        }
        if self.is_zero() || abs <= self.val {
            return Padic::inexact_zero(self.p, min(abs, self.val));
        }
        Padic::new(self.p, self.val, self.unit, (abs - self.val) as u32)
    }

    /// Lowers the relative precision to at most `n`.
    pub fn cap_rel(&self, n: u32) -> Padic {
        if self.is_zero() || n >= self.prec {
            return *self;
        }
        Padic::new(self.p, self.val, self.unit, n)
    }

    pub fn neg(&self) -> Padic {
        if self.is_zero() {
            return *self;
        }
        let m = pow_u64(self.p, self.prec);
        Padic { unit: m - self.unit, ..*self }
    }

    pub fn add(&self, other: &Padic) -> Padic {
        self.check_prime(other);
        if self.is_exact_zero() {
            return *other;
        }
        if other.is_exact_zero() {
            return *self;
        }
        let abs = min(self.abs_prec(), other.abs_prec());
        let (lo, hi) = if self.val <= other.val { (self, other) } else { (other, self) };
        if lo.val >= abs {
            return Padic::inexact_zero(self.p, abs);
        }
        // lo is nonzero here: its val < abs <= its abs_prec.
        let m_exp = (abs - lo.val) as u32;
        let m = pow_u64(self.p, m_exp);
        let mut s = lo.unit % m;
        if !hi.is_zero() {
            let shift = hi.val - lo.val;
            if shift < m_exp as i64 {
                let t = mulmod(hi.unit % m, pow_u64(self.p, shift as u32), m);
                s = (s + t) % m;
            }
        }
        Padic::new(self.p, lo.val, s, m_exp)
    }

    pub fn sub(&self, other: &Padic) -> Padic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Padic) -> Padic {
        self.check_prime(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Padic::zero(self.p);
        }
        let val = self.val + other.val;
        if self.is_zero() || other.is_zero() {
            return Padic::inexact_zero(self.p, val);
        }
        let prec = min(self.prec, other.prec);
        let m = pow_u64(self.p, prec);
        Padic { p: self.p, val, unit: mulmod(self.unit % m, other.unit % m, m), prec }
    }

    /// Multiplies by `p^k`.
    pub fn shift(&self, k: i64) -> Padic {
        if self.is_exact_zero() {
            return *self;
        }
        Padic { val: self.val + k, ..*self }
    }

    pub fn inv(&self) -> Result<Padic> {
        if self.is_exact_zero() {
            return Err(Error::domain("inversion of exact zero"));
        }
        if self.is_zero() {
            return Err(Error::precision(format!(
                "inversion of O({}^{}): no significant digits",
                self.p, self.val
            )));
        }
        let m = pow_u64(self.p, self.prec);
        Ok(Padic { p: self.p, val: -self.val, unit: inv_mod(self.unit, m), prec: self.prec })
    }

    pub fn div(&self, other: &Padic) -> Result<Padic> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Padic> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = *self;
        let mut acc = Padic::one(self.p, max(self.prec, 1).min(max_precision(self.p)));
        if self.is_exact_zero() {
            return Ok(if e == 0 { acc } else { *self });
        }
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Exact rational value of the stored representative `p^val * unit`.
    pub fn to_bigrational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let pb = BigInt::from(self.p);
        let u = BigInt::from(self.unit);
        if self.val >= 0 {
            BigRational::from_integer(u * num_traits::pow(pb, self.val as usize))
        } else {
            BigRational::new(u, num_traits::pow(pb, (-self.val) as usize))
        }
    }

    /// Representative as a signed integer in `(-p^abs/2, p^abs/2]`, for
    /// integral values with small absolute precision.
    pub fn to_symmetric_i128(&self) -> Option<i128> {
        if self.is_zero() {
            return Some(0);
        }
        if self.val < 0 {
            return None;
        }
        let abs = self.abs_prec();
        if abs > 120 {
            return None;
        }
        let modulus = (self.p as i128).checked_pow(abs as u32)?;
        let x = (self.unit as i128).checked_mul((self.p as i128).checked_pow(self.val as u32)?)?;
        Some(if 2 * x > modulus { x - modulus } else { x })
    }

    /// Integer representative `p^val * unit` for `val >= 0`, lifted modulo
    /// `p^abs` (non-negative). `None` when the value is not integral.
    pub fn lift_i128(&self) -> Option<i128> {
        if self.is_zero() {
            return Some(0);
        }
        if self.val < 0 {
            return None;
        }
        let pv = (self.p as i128).checked_pow(self.val as u32)?;
        (self.unit as i128).checked_mul(pv)
    }
}

impl fmt::Debug for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        write!(f, "{}*{}^{} + O({}^{})", self.unit, self.p, self.val, self.p, self.abs_prec())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonVal {
    Finite(i64),
    Tag(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PadicJson {
    p: u32,
    v: JsonVal,
    u: String,
    #[serde(rename = "N")]
    n: u32,
}

impl Serialize for Padic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = if self.is_exact_zero() { JsonVal::Tag("inf".into()) } else { JsonVal::Finite(self.val) };
        PadicJson { p: self.p, v, u: self.unit.to_string(), n: self.prec }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Padic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = PadicJson::deserialize(d)?;
        Padic::try_from_parts(j.p, j.v, &j.u, j.n).map_err(D::Error::custom)
    }
}

impl Padic {
    fn try_from_parts(p: u32, v: JsonVal, u: &str, n: u32) -> Result<Padic> {
        if !crate::is_supported_prime(p) {
            return Err(Error::domain(format!("unsupported prime {p}")));
        }
        match v {
            JsonVal::Tag(t) if t == "inf" => Ok(Padic::zero(p)),
            JsonVal::Tag(t) => Err(Error::domain(format!("bad valuation {t:?}"))),
            JsonVal::Finite(v) => {
                if n > max_precision(p) {
                    return Err(Error::domain(format!("precision {n} exceeds capacity for p={p}")));
                }
                if v.unsigned_abs() > (1u64 << 40) {
                    return Err(Error::domain("valuation out of range"));
                }
                let big: BigInt = u.parse().map_err(|_| Error::domain(format!("bad unit {u:?}")))?;
                if big.is_negative() {
                    return Err(Error::domain("unit must be non-negative"));
                }
                if n == 0 {
                    if !big.is_zero() {
                        return Err(Error::domain("N=0 requires u=0"));
                    }
                    return Ok(Padic::inexact_zero(p, v));
                }
                let m = BigInt::from(pow_u64(p, n));
                if big >= m || (&big % BigInt::from(p)).is_zero() {
                    return Err(Error::domain(format!("unit {u} must be in [1, p^N) and coprime to p")));
                }
                Ok(Padic::new(p, v, big.to_u64().unwrap_or(0), n))
            }
        }
    }
}

/// Binomial coefficient `C(a, k)` for `a` in `Z_p`, by the product formula.
///
/// Precision: the result carries whatever the product and the division by
/// `k!` leave (at most `v_p(k!)` digits are lost).
pub fn binom_zp(a: &Padic, k: u64) -> Result<Padic> {
    let p = a.prime();
    if a.val() < 0 {
        return Err(Error::domain("binom_zp requires v(a) >= 0"));
    }
    let exact_prec = max_precision(p);
    let mut num = Padic::one(p, exact_prec);
    let mut den = Padic::one(p, exact_prec);
    for i in 0..k {
        num = num.mul(&a.sub(&Padic::from_i64(p, i as i64, exact_prec)));
        den = den.mul(&Padic::from_i64(p, i as i64 + 1, exact_prec));
    }
    if num.is_exact_zero() {
        return Ok(num);
    }
    if num.is_zero() {
        let abs = num.val() - den.val();
        if abs < 0 {
            return Err(Error::precision(format!(
                "C(a,{k}) undetermined: input known to p^{} only",
                a.abs_prec()
            )));
        }
        return Ok(Padic::inexact_zero(p, abs));
    }
    let r = num.div(&den)?;
    if r.val() < 0 {
        return Err(Error::precision(format!("C(a,{k}) lost integrality")));
    }
    Ok(r)
}

/// `C(a, k) mod p^prec` for an exact integer `a`, computed exactly.
pub fn binom_int(p: u32, a: i128, k: u64, prec: u32) -> Padic {
    let exact = max_precision(p);
    let m = pow_u64(p, exact);
    let mut v: i64 = 0;
    let mut u: u64 = 1;
    for i in 0..k as i128 {
        let f = a - i;
        if f == 0 {
            return Padic::zero(p);
        }
        let (vf, uf) = vp_i128(f, p);
        v += vf as i64;
        u = mulmod(u, uf.rem_euclid(m as i128) as u64, m);
        let (vd, ud) = vp_i128(i + 1, p);
        v -= vd as i64;
        u = mulmod(u, inv_mod(ud as u64 % m, m), m);
    }
    Padic::new(p, v, u, exact).cap_rel(prec)
}

/// log(1 + x) for v(x) ≥ 1 (v(x) ≥ 2 when p = 2), summed until the tail
/// k·v(x) − ⌊log_p k⌋ clears the absolute precision of x.
pub fn log_oneplus(x: &Padic) -> Result<Padic> {
    let p = x.prime();
    if x.is_exact_zero() {
        return Ok(*x);
    }
    let min_val = if p == 2 { 2 } else { 1 };
    if x.val() < min_val {
        return Err(Error::domain(format!("log(1+x) needs v(x) >= {min_val}")));
    }
    let target = x.abs_prec();
    let cap = max_precision(p);
    let mut acc = Padic::zero(p);
    let mut xk = Padic::one(p, cap);
    let mut k: i64 = 0;
    loop {
        k += 1;
        xk = xk.mul(x);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&xk.mul(&Padic::from_ratio(p, sign, k, cap)?));
        let next = k + 1;
        if next * x.val() - binomial_lift_loss(p, next as usize + 1) >= target {
            return Ok(acc.cap_abs(target));
        }
    }
}

/// Number of base-p digits lost when `(1+X)^a` is expanded up to `X^(len-1)`
/// from an `a` known modulo `p^A`: `floor(log_p(len-1))`.
pub fn binomial_lift_loss(p: u32, len: usize) -> i64 {
    let mut loss = 0;
    let mut pk = p as usize;
    while pk < len {
        loss += 1;
        pk *= p as usize;
    }
    loss
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity() {
        assert_eq!(max_precision(2), 62);
        assert_eq!(max_precision(3), 39);
        assert_eq!(max_precision(5), 27);
    }

    #[test]
    fn sum_carries_into_valuation() {
        let a = Padic::new(3, 0, 1, 24);
        let b = Padic::new(3, 0, 2, 24);
        let c = a.add(&b);
        assert_eq!((c.val(), c.unit()), (1, 1));
        assert_eq!(c.abs_prec(), 24);
    }

    #[test]
    fn product_adds_valuations() {
        let a = Padic::new(5, 1, 2, 10);
        let b = Padic::new(5, -1, 3, 10);
        let c = a.mul(&b);
        assert_eq!((c.val(), c.unit(), c.rel_prec()), (0, 6, 10));
    }

    #[test]
    fn inverse_of_two_mod_81() {
        let a = Padic::new(3, 0, 2, 4);
        let i = a.inv().unwrap();
        assert_eq!(i.unit(), 41);
        assert_eq!((2 * i.unit()) % 81, 1);
    }

    #[test]
    fn cancellation_gives_inexact_zero() {
        let a = Padic::from_i64(3, 7, 10);
        let z = a.sub(&a);
        assert!(z.is_zero() && !z.is_exact_zero());
        assert_eq!(z.val(), 10);
        assert!(matches!(z.inv(), Err(Error::Precision(_))));
        assert!(matches!(Padic::zero(3).inv(), Err(Error::Domain(_))));
    }

    #[test]
    fn mixed_precision_addition() {
        // 1 + O(3^2) plus 3^5 stays 1 + O(3^2)
        let a = Padic::new(3, 0, 1, 2);
        let b = Padic::new(3, 5, 1, 10);
        let c = a.add(&b);
        assert_eq!((c.val(), c.unit(), c.abs_prec()), (0, 1, 2));
    }

    #[test]
    fn binomials() {
        let p3 = Padic::from_i64(3, 3, 20);
        assert_eq!(binom_zp(&p3, 2).unwrap(), Padic::from_i64(3, 3, 20).cap_rel(binom_zp(&p3, 2).unwrap().rel_prec()));
        assert_eq!(binom_zp(&Padic::from_i64(3, 11, 20), 0).unwrap().unit(), 1);
        // C(1/2, 2) = -1/8
        let half = Padic::from_ratio(3, 1, 2, 20).unwrap();
        let c = binom_zp(&half, 2).unwrap();
        let expect = Padic::from_ratio(3, -1, 8, 20).unwrap();
        assert!(c.sub(&expect).val() >= 20);
    }

    #[test]
    fn integer_binomials_match_product_formula() {
        for a in [0i128, 1, 2, 7, 9, 27, 100, -1, -5] {
            for k in 0..12u64 {
                let x = binom_int(3, a, k, 20);
                let y = binom_zp(&Padic::from_i128(3, a, 39), k).unwrap();
                assert!(x.sub(&y).val() >= 20, "a={a} k={k}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let a = Padic::new(5, -2, 17, 6);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"p":5,"v":-2,"u":"17","N":6}"#);
        let b: Padic = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        let z: Padic = serde_json::from_str(r#"{"p":3,"v":"inf","u":"0","N":0}"#).unwrap();
        assert!(z.is_exact_zero());
        assert!(serde_json::from_str::<Padic>(r#"{"p":3,"v":0,"u":"3","N":4}"#).is_err());
        assert!(serde_json::from_str::<Padic>(r#"{"p":4,"v":0,"u":"1","N":4}"#).is_err());
        assert!(serde_json::from_str::<Padic>(r#"{"p":3,"v":0,"u":"1","N":400}"#).is_err());
    }
}
