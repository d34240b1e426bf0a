use pglab_core::operators::{nabla_estimate, GammaElement};
use pglab_core::padic::{log_oneplus, max_precision};
use pglab_core::pgmod::{find_gamma_relation, g_criterion, mod_gamma, mod_nabla, GammaRelation, ModuleElement, RelationBounds, TwistModule};
use pglab_core::series::TSum;
use pglab_core::suites::{filtration_identity, membership_consistency, module_identities, random_series, random_weights, Faults};
use pglab_core::wronskian::Constant;
use pglab_core::{Context, LaurentSeries, Padic};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: u32 = 24;

fn setup() -> impl Strategy<Value = (Context, ChaCha8Rng)> {
    (prop::sample::select(vec![2u32, 3, 5]), any::<u64>())
        .prop_map(|(p, seed)| (Context::new(p, N, 16).unwrap(), ChaCha8Rng::seed_from_u64(seed)))
}

fn window(y: &ModuleElement, ctx: &Context, m: i64) -> Vec<LaurentSeries> {
    y.coords.iter().map(|c| c.to_series(ctx).unwrap().truncate(m)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn nabla_matches_its_finite_difference((ctx, mut rng) in setup()) {
        // (γ_a − 1)/log a = ∇_D + O(p^m) with a = 1 + p^m
        let p = ctx.p;
        let m = TwistModule::new(p, random_weights(&mut rng, 2, -1, 2)).unwrap();
        let y = ModuleElement::from_series((0..m.rank()).map(|_| random_series(&mut rng, &ctx, 6, 0)).collect());
        let step = if p == 2 { 8 } else { 5 };
        let h = Padic::from_i64(p, 1, max_precision(p)).shift(step);
        let g = GammaElement::from_padic(Padic::one(p, max_precision(p)).add(&h)).unwrap();
        let log_a = log_oneplus(&h).unwrap();
        let est = mod_gamma(&m, &y, &g, &ctx).unwrap().sub(&y).scale(&log_a.inv().unwrap());
        let exact = mod_nabla(&m, &y).unwrap();
        for (a, b) in window(&est, &ctx, 6).iter().zip(window(&exact, &ctx, 6)) {
            prop_assert!(a.residual(&b) >= 4, "{} < 4", a.residual(&b));
        }
    }

    #[test]
    fn weight_basis_vectors_satisfy_gamma_minus_one((ctx, mut rng) in setup()) {
        // t^(−k)·c·e is Γ-invariant on a weight-k summand
        use rand::Rng;
        let p = ctx.p;
        let ctx = Context::new(p, N, 24).unwrap();
        let k = rng.gen_range(-2i64..=2);
        let m = TwistModule::new(p, vec![k]).unwrap();
        let c = rng.gen_range(1i64..50);
        let y = ModuleElement::new(vec![TSum::monomial(-k, LaurentSeries::from_i64(p, c, N))]);
        let g = GammaElement::default_generator(p);
        let r = find_gamma_relation(&m, &y, &g, RelationBounds { v_max: 3, s_max: 4 }, &ctx).unwrap();
        prop_assert_eq!(relation_coeffs(&r), Some(vec![-1, 1]), "{:?}", r);
        if let GammaRelation::Found { residual, .. } = r {
            prop_assert!(residual >= N as i64 - 6);
        }
    }
}

fn relation_coeffs(r: &GammaRelation) -> Option<Vec<i128>> {
    let GammaRelation::Found { coeffs, .. } = r else { return None };
    // normalize so the leading coefficient is 1
    let raw: Vec<Padic> = coeffs
        .iter()
        .map(|c| match c {
            Constant::Padic(x) => *x,
            Constant::Rational(_) => unreachable!("series backend"),
        })
        .collect();
    let lead = raw.last()?.inv().ok()?;
    raw.iter().map(|x| x.mul(&lead).to_symmetric_i128()).collect()
}

#[test]
fn estimator_on_x_agrees_with_closed_form() {
    let ctx = Context::new(3, N, 16).unwrap();
    let x = LaurentSeries::x(3, N);
    let est = nabla_estimate(&x, 5, &ctx).unwrap().truncate(6);
    let exact = x.nabla(&ctx).truncate(6);
    assert!(est.residual(&exact) >= 4, "{}", est.residual(&exact));
}

#[test]
fn log_of_oneplus_p_matches_the_rational_series() {
    // log(1 + 3^5) against the first terms of Σ (−1)^(k+1) 3^(5k)/k in i128
    let cap = max_precision(3);
    let h = Padic::from_i64(3, 243, cap);
    let got = log_oneplus(&h).unwrap();
    let mut expect = Padic::zero(3);
    let mut pk: i128 = 1;
    for k in 1..=12i64 {
        pk *= 243;
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let term = Padic::from_i128(3, sign * pk, cap).mul(&Padic::from_ratio(3, 1, k, cap).unwrap());
        expect = expect.add(&term);
    }
    assert!(got.sub(&expect).is_zero());
    assert!(log_oneplus(&Padic::from_i64(3, 1, cap)).is_err());
}

#[test]
fn x_has_no_gamma_relation() {
    for p in [2u32, 3, 5] {
        let ctx = Context::new(p, N, 24).unwrap();
        let m = TwistModule::new(p, vec![0]).unwrap();
        let y = ModuleElement::from_series(vec![LaurentSeries::x(p, N)]);
        let g = GammaElement::default_generator(p);
        let r = find_gamma_relation(&m, &y, &g, RelationBounds { v_max: 3, s_max: 4 }, &ctx).unwrap();
        assert!(!r.is_found(), "p={p}: {r:?}");
    }
}

#[test]
fn g_criterion_rejects_one_over_x_and_accepts_t_multiples() {
    for p in [2u32, 3, 5] {
        let ctx = Context::new(p, N, 16).unwrap();
        let m0 = TwistModule::new(p, vec![0]).unwrap();
        let y = ModuleElement::parse(&["1/X"], &ctx).unwrap();
        assert!(!g_criterion(&m0, &y, 0, &[1], 8, 16, &ctx).unwrap().vanishes);
        let m1 = TwistModule::new(p, vec![1]).unwrap();
        let y = ModuleElement::parse(&["1"], &ctx).unwrap();
        assert!(g_criterion(&m1, &y, 0, &[1, 2], 8, 16, &ctx).unwrap().vanishes);
    }
}

#[test]
fn suites_pass_at_small_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in [2u32, 3, 5] {
        let ctx = Context::new(p, N, 16).unwrap();
        for r in module_identities(&mut rng, &ctx, 4, Faults::default()) {
            assert!(r.passed, "{r:?}");
        }
        assert!(membership_consistency(&mut rng, &ctx, 8).passed);
        assert!(filtration_identity(&mut rng, p, 8).passed);
    }
}
