use num_bigint::BigInt;
use pglab_core::operators::{op_gamma, op_phi, GammaElement};
use pglab_core::series::binomial_row;
use pglab_core::suites::{random_series, random_unit};
use pglab_core::{Context, LaurentSeries, Padic};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const M: i64 = 32;
const N: u32 = 24;

fn setup() -> impl Strategy<Value = (Context, ChaCha8Rng)> {
    (prop::sample::select(vec![2u32, 3, 5]), any::<u64>())
        .prop_map(|(p, seed)| (Context::new(p, N, M).unwrap(), ChaCha8Rng::seed_from_u64(seed)))
}

fn close(a: &LaurentSeries, b: &LaurentSeries) -> bool {
    a.truncate(M).residual(&b.truncate(M)) >= N as i64
}

fn int(p: u32, k: i64) -> Padic {
    Padic::from_i64(p, k, N)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_axioms((ctx, mut rng) in setup()) {
        let [a, b, c] = [0, 1, 2].map(|k| random_series(&mut rng, &ctx, M as usize, k));
        prop_assert!(close(&a.add(&b), &b.add(&a)));
        prop_assert!(close(&a.mul(&b), &b.mul(&a)));
        prop_assert!(close(&a.add(&b).add(&c), &a.add(&b.add(&c))));
        prop_assert!(close(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        prop_assert!(close(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.sub(&a).truncate(M).min_coeff_val() >= N as i64);
        let one = LaurentSeries::from_i64(ctx.p, 1, N);
        prop_assert!(close(&a.mul(&one), &a));
    }

    #[test]
    fn gamma_substitutions_compose((ctx, mut rng) in setup()) {
        let f = random_series(&mut rng, &ctx, 12, 0);
        let (a, b) = (random_unit(&mut rng, ctx.p), random_unit(&mut rng, ctx.p));
        let (ga, gb) = (GammaElement::from_int(ctx.p, a).unwrap(), GammaElement::from_int(ctx.p, b).unwrap());
        let lhs = op_gamma(&ga, &op_gamma(&gb, &f, &ctx).unwrap(), &ctx).unwrap();
        let rhs = op_gamma(&ga.compose(&gb).unwrap(), &f, &ctx).unwrap();
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn partial_is_a_derivation((ctx, mut rng) in setup()) {
        let pole = rng.gen_range(0..3);
        let f = random_series(&mut rng, &ctx, 16, pole);
        let g = random_series(&mut rng, &ctx, 16, 0);
        let lhs = f.mul(&g).partial();
        let rhs = f.partial().mul(&g).add(&f.mul(&g.partial()));
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn partial_commutes_with_phi_up_to_p((ctx, mut rng) in setup()) {
        let f = random_series(&mut rng, &ctx, 10, 0);
        let lhs = op_phi(&f, &ctx).unwrap().partial();
        let rhs = op_phi(&f.partial(), &ctx).unwrap().scale(&int(ctx.p, ctx.p as i64));
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn partial_commutes_with_gamma_up_to_a((ctx, mut rng) in setup()) {
        let f = random_series(&mut rng, &ctx, 10, 0);
        let a = random_unit(&mut rng, ctx.p);
        let g = GammaElement::from_int(ctx.p, a).unwrap();
        let lhs = op_gamma(&g, &f, &ctx).unwrap().partial();
        let rhs = op_gamma(&g, &f.partial(), &ctx).unwrap().scale(&int(ctx.p, a));
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn partial_kills_only_constants((ctx, mut rng) in setup()) {
        let pole = rng.gen_range(0..3);
        let f = random_series(&mut rng, &ctx, 16, pole);
        let nonconstant = f.coeffs().iter().enumerate().any(|(i, c)| f.lo() + i as i64 != 0 && !c.is_zero());
        prop_assert_eq!(f.partial().is_zero(), !nonconstant);
        let c = LaurentSeries::constant(f.coeff(0));
        prop_assert!(c.partial().is_zero());
    }

    #[test]
    fn binomial_rows_match_integers(p in prop::sample::select(vec![2u32, 3, 5]), n in -40i128..200) {
        // C(n, m) through the falling factorial in big integers
        let row = binomial_row(p, n, 24);
        let mut c = BigInt::from(1);
        for (m, b) in row.iter().enumerate() {
            let expect = Padic::from_bigint(p, &c, N);
            prop_assert!(b.sub(&expect).is_zero() || b.sub(&expect).val() >= N as i64);
            c = c * BigInt::from(n - m as i128) / BigInt::from(m as i128 + 1);
        }
    }
}

#[test]
fn phi_of_x_is_oneplus_x_to_the_p_minus_one() {
    for p in [2u32, 3, 5] {
        let ctx = Context::new(p, N, M).unwrap();
        let got = op_phi(&LaurentSeries::x(p, N), &ctx).unwrap();
        let mut c = 1i64;
        for k in 1..=p as i64 {
            c = c * (p as i64 - k + 1) / k;
            assert!(got.coeff(k).sub(&int(p, c)).is_zero(), "p={p} k={k}");
        }
        assert!(got.coeff(0).is_zero());
    }
}
