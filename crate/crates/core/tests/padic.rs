use num_rational::Rational64;
use pglab_core::padic::{binom_zp, max_precision, CycloElement, Padic};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 7])
}

/// p^v·u with u a unit below p^prec, or an exact zero.
fn padic(p: u32) -> impl Strategy<Value = Padic> {
    let prec = 20.min(max_precision(p));
    let bound = (p as i128).pow(prec);
    (-6i64..6, 1i128..bound, 0u8..16).prop_map(move |(v, u, z)| {
        if z == 0 {
            Padic::zero(p)
        } else {
            Padic::from_i128(p, u, prec).shift(v)
        }
    })
}

fn pair() -> impl Strategy<Value = (Padic, Padic)> {
    prime().prop_flat_map(|p| (padic(p), padic(p)))
}

fn cyclo(p: u32, n: u32) -> impl Strategy<Value = CycloElement> {
    let e = (p as usize - 1) * (p as usize).pow(n - 1);
    prop::collection::vec(-50i64..50, e)
        .prop_map(move |xs| CycloElement::from_coeffs(p, n, xs.iter().map(|&x| Padic::from_i64(p, x, 16)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn valuation_is_additive((a, b) in pair()) {
        let ab = a.mul(&b);
        if a.is_exact_zero() || b.is_exact_zero() {
            prop_assert!(ab.is_exact_zero());
        } else {
            prop_assert_eq!(ab.val(), a.val() + b.val());
        }
    }

    #[test]
    fn ultrametric_inequality((a, b) in pair()) {
        prop_assume!(!a.is_exact_zero() && !b.is_exact_zero());
        let s = a.add(&b);
        prop_assert!(s.val() >= a.val().min(b.val()));
        if a.val() != b.val() {
            prop_assert_eq!(s.val(), a.val().min(b.val()));
        }
    }

    #[test]
    fn binomials_of_integers_are_integral(p in prime(), u in 0i64..1_000_000, k in 0u64..=30) {
        let prec = 24.min(max_precision(p));
        let a = Padic::from_i64(p, u, prec);
        let c = binom_zp(&a, k).unwrap();
        prop_assert!(c.is_exact_zero() || c.val() >= 0);
    }

    #[test]
    fn embedding_is_a_ring_map(a in cyclo(3, 1), b in cyclo(3, 1)) {
        let (ea, eb) = (a.embed(2).unwrap(), b.embed(2).unwrap());
        let sum = a.add(&b).unwrap().embed(2).unwrap();
        prop_assert!(sum.sub(&ea.add(&eb).unwrap()).unwrap().min_coeff_val() >= 16);
        let prod = a.mul(&b).unwrap().embed(2).unwrap();
        prop_assert!(prod.sub(&ea.mul(&eb).unwrap()).unwrap().min_coeff_val() >= 16);
    }
}

#[test]
fn uniformizer_power_over_p_is_a_unit() {
    for p in [2u32, 3, 5, 7] {
        let pi = CycloElement::zeta(p, 1).sub(&CycloElement::one(p, 1)).unwrap();
        let q = pi.pow(p as u64 - 1).scale(&Padic::from_ratio(p, 1, p as i64, 16).unwrap());
        assert_eq!(q.valuation_by_norm().unwrap(), Rational64::from_integer(0), "p={p}");
    }
}

#[test]
fn norm_of_uniformizer_matches_resultant() {
    // Φ_p(1) = p is the resultant of Φ_p and T − 1
    for p in [2u32, 3, 5, 7] {
        let pi = CycloElement::zeta(p, 1).sub(&CycloElement::one(p, 1)).unwrap();
        let n = pi.norm().to_symmetric_i128().unwrap();
        assert_eq!(n.abs(), p as i128);
    }
}
