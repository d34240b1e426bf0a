use pglab_core::operators::{op_gamma, op_phi, op_psi, psi_with, GammaElement, PsiAlgorithm};
use pglab_core::suites::{operator_identities, psi_cross_validation, psi_fixed_points, random_series, random_unit, Faults};
use pglab_core::{Context, LaurentSeries, Padic};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: u32 = 24;

fn setup() -> impl Strategy<Value = (Context, ChaCha8Rng)> {
    (prop::sample::select(vec![2u32, 3, 5]), any::<u64>())
        .prop_map(|(p, seed)| (Context::new(p, N, 32).unwrap(), ChaCha8Rng::seed_from_u64(seed)))
}

fn tau() -> i64 {
    N as i64 - 4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn psi_inverts_phi((ctx, mut rng) in setup()) {
        let f = random_series(&mut rng, &ctx, 20, 0);
        prop_assert!(op_psi(&op_phi(&f, &ctx).unwrap(), &ctx).unwrap().residual(&f) >= tau());
    }

    #[test]
    fn projection_formula((ctx, mut rng) in setup()) {
        let f = random_series(&mut rng, &ctx, 12, 0);
        let g = random_series(&mut rng, &ctx, 20, 0);
        let lhs = op_psi(&op_phi(&f, &ctx).unwrap().mul(&g), &ctx).unwrap();
        let rhs = f.mul(&op_psi(&g, &ctx).unwrap());
        prop_assert!(lhs.residual(&rhs) >= tau());
    }

    #[test]
    fn psi_commutes_with_gamma((ctx, mut rng) in setup()) {
        let f = random_series(&mut rng, &ctx, 20, 0);
        let g = GammaElement::from_int(ctx.p, random_unit(&mut rng, ctx.p)).unwrap();
        let lhs = op_psi(&op_gamma(&g, &f, &ctx).unwrap(), &ctx).unwrap();
        let rhs = op_gamma(&g, &op_psi(&f, &ctx).unwrap(), &ctx).unwrap();
        prop_assert!(lhs.residual(&rhs) >= tau());
    }

    #[test]
    fn phi_psi_is_a_projector((ctx, mut rng) in setup()) {
        let f = random_series(&mut rng, &ctx, 20, 0);
        let e = op_phi(&op_psi(&f, &ctx).unwrap(), &ctx).unwrap();
        let ee = op_phi(&op_psi(&e, &ctx).unwrap(), &ctx).unwrap();
        prop_assert!(ee.residual(&e) >= tau());
        let rest = f.sub(&e);
        prop_assert!(op_psi(&rest, &ctx).unwrap().min_coeff_val() >= tau());
    }

    #[test]
    fn algorithms_agree_on_poles((ctx, mut rng) in setup()) {
        let ctx = Context { neg_depth: 2, ..ctx };
        let pole = rng.gen_range(0..=2);
        let f = random_series(&mut rng, &ctx, 16, pole);
        let a = psi_with(&f, PsiAlgorithm::Decomposition, &ctx).unwrap();
        let b = psi_with(&f, PsiAlgorithm::Trace, &ctx).unwrap();
        prop_assert!(a.residual(&b) >= N as i64 - 6);
    }

    #[test]
    fn psi_on_the_power_basis((ctx, mut rng) in setup()) {
        // f = Σ c_k (1+X)^k has ψ(f) = Σ_{p | k} c_k (1+X)^(k/p)
        let p = ctx.p;
        let mut f = LaurentSeries::zero(p);
        let mut expect = LaurentSeries::zero(p);
        for k in 0..4 * p as u64 {
            let c = Padic::from_i64(p, rng.gen_range(-1000..1000), N);
            f = f.add(&LaurentSeries::one_plus_x_pow(p, k, N).scale(&c));
            if k % p as u64 == 0 {
                expect = expect.add(&LaurentSeries::one_plus_x_pow(p, k / p as u64, N).scale(&c));
            }
        }
        for alg in [PsiAlgorithm::Decomposition, PsiAlgorithm::Trace] {
            prop_assert!(psi_with(&f, alg, &ctx).unwrap().residual(&expect) >= N as i64 - 1);
        }
    }
}

#[test]
fn suites_pass_at_small_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [2u32, 3, 5] {
        let ctx = Context::new(p, N, 16).unwrap();
        for r in operator_identities(&mut rng, &ctx, 5, Faults::default()) {
            assert!(r.passed, "{r:?}");
        }
        assert!(psi_cross_validation(&mut rng, &ctx, 6).passed);
        for r in psi_fixed_points(&ctx) {
            assert!(r.passed, "{r:?}");
        }
    }
}

#[test]
fn corrupted_psi_is_caught() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ctx = Context::new(3, N, 16).unwrap();
    let reports = operator_identities(&mut rng, &ctx, 3, Faults { corrupt_psi: true });
    let psi_phi = reports.iter().find(|r| r.name == "psi_phi_identity").unwrap();
    assert!(!psi_phi.passed);
    assert_eq!(psi_phi.failures, 3);
}

#[test]
fn gamma_rejects_non_units() {
    assert!(GammaElement::from_int(3, 6).is_err());
    assert!(GammaElement::from_int(2, 3).is_err());
    assert!(GammaElement::from_int(2, 5).is_ok());
}
