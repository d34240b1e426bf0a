//! Randomized identity suites shared by the command line runner and the
//! tests. Every suite draws its inputs from the caller's generator, so a
//! seeded generator makes a run reproducible.

use rand::Rng;

use crate::context::Context;
use crate::cyclo_eval::{check_intertwine, factorial_identity_check, iota, iota_t_via_log, iota_tsum, tdivisibility_verdicts};
use crate::error::Result;
use crate::operators::{op_gamma, op_phi, psi_with, GammaElement, PsiAlgorithm};
use crate::padic::{max_precision, Padic};
use crate::pgmod::{mod_gamma, mod_partial, mod_phi, mod_psi, ndr_membership, Membership, ModuleElement, TwistModule};
use crate::report::{CheckReport, Tally};
use crate::series::{LaurentSeries, TSum};

/// Deliberate faults for exercising the failure path of a runner.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    /// Adds X to every ψ value used by the suites.
    pub corrupt_psi: bool,
}

/// A uniformly random element of Z_p / p^prec, at relative precision prec.
pub fn random_padic<R: Rng + ?Sized>(rng: &mut R, p: u32, prec: u32) -> Padic {
    let bound = (p as i128).pow(prec);
    Padic::from_i128(p, rng.gen_range(0..bound), prec)
}

/// A random unit of Z_p^* below 8 (≡ 1 mod 4 when p = 2), small enough
/// that γ_a keeps polynomials exact.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, p: u32) -> i64 {
    loop {
        let a = rng.gen_range(1i64..8);
        if (p == 2 && a % 4 == 1) || (p != 2 && a % p as i64 != 0) {
            return a;
        }
    }
}

/// An exact Laurent polynomial Σ_{−pole ≤ e < len} c_e X^e with random
/// p-adic integer coefficients.
pub fn random_series<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, len: usize, pole: u32) -> LaurentSeries {
    let coeffs = (0..len + pole as usize).map(|_| random_padic(rng, ctx.p, ctx.prec)).collect();
    LaurentSeries::from_coeffs(ctx.p, -(pole as i64), coeffs, None)
}

/// A power series with constant term a unit.
pub fn random_unit_series<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, len: usize) -> LaurentSeries {
    let mut coeffs: Vec<Padic> = (0..len).map(|_| random_padic(rng, ctx.p, ctx.prec)).collect();
    let mut c0 = 0;
    while c0 % ctx.p as i64 == 0 {
        c0 = rng.gen_range(1..1000);
    }
    coeffs[0] = Padic::from_i64(ctx.p, c0, ctx.prec);
    LaurentSeries::from_coeffs(ctx.p, 0, coeffs, None)
}

/// Σ_{j ≤ t_max} t^j f_j with random power series f_j.
pub fn random_tsum<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, len: usize, t_max: i64) -> TSum {
    (0..=t_max).fold(TSum::zero(ctx.p), |acc, j| acc.add(&TSum::monomial(j, random_series(rng, ctx, len, 0))))
}

/// Between 1 and `max_rank` weights drawn from `lo..=hi`.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, max_rank: usize, lo: i64, hi: i64) -> Vec<i64> {
    let r = rng.gen_range(1..=max_rank);
    (0..r).map(|_| rng.gen_range(lo..=hi)).collect()
}

fn psi(f: &LaurentSeries, ctx: &Context, faults: Faults) -> Result<LaurentSeries> {
    let r = psi_with(f, PsiAlgorithm::Decomposition, ctx)?;
    Ok(if faults.corrupt_psi { r.add(&LaurentSeries::x(ctx.p, ctx.prec)) } else { r })
}

fn int(p: u32, k: i64) -> Padic {
    Padic::from_i64(p, k, max_precision(p))
}

/// The scalar operator identities on `cases` random polynomials with
/// ctx.trunc coefficients each, at threshold N − 4.
pub fn operator_identities<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, cases: usize, faults: Faults) -> Vec<CheckReport> {
    let p = ctx.p;
    let len = ctx.trunc.max(1) as usize;
    let tau = ctx.prec as i64 - 4;
    let names = [
        "psi_phi_identity",
        "projection_formula",
        "psi_gamma_commute",
        "gamma_composition",
        "phi_gamma_commute",
        "partial_phi",
        "partial_gamma",
        "leibniz",
    ];
    let mut tallies: Vec<Tally> = names.iter().map(|n| Tally::new(*n, tau)).collect();
    for _ in 0..cases {
        let f = random_series(rng, ctx, len, 0);
        let g = random_series(rng, ctx, len, 0);
        let (a, b) = (random_unit(rng, p), random_unit(rng, p));
        let ga = GammaElement::from_int(p, a).expect("unit");
        let gb = GammaElement::from_int(p, b).expect("unit");
        let gab = GammaElement::from_int(p, a * b).expect("unit");
        let pp = int(p, p as i64);
        let aa = int(p, a);
        let checks: [Result<i64>; 8] = [
            (|| Ok(psi(&op_phi(&f, ctx)?, ctx, faults)?.residual(&f)))(),
            (|| {
                let lhs = psi(&op_phi(&f, ctx)?.mul(&g), ctx, faults)?;
                Ok(lhs.residual(&f.mul(&psi(&g, ctx, faults)?)))
            })(),
            (|| {
                let lhs = psi(&op_gamma(&ga, &f, ctx)?, ctx, faults)?;
                Ok(lhs.residual(&op_gamma(&ga, &psi(&f, ctx, faults)?, ctx)?))
            })(),
            (|| Ok(op_gamma(&ga, &op_gamma(&gb, &f, ctx)?, ctx)?.residual(&op_gamma(&gab, &f, ctx)?)))(),
            (|| Ok(op_phi(&op_gamma(&ga, &f, ctx)?, ctx)?.residual(&op_gamma(&ga, &op_phi(&f, ctx)?, ctx)?)))(),
            (|| Ok(op_phi(&f, ctx)?.partial().residual(&op_phi(&f.partial(), ctx)?.scale(&pp))))(),
            (|| Ok(op_gamma(&ga, &f, ctx)?.partial().residual(&op_gamma(&ga, &f.partial(), ctx)?.scale(&aa))))(),
            Ok(f.mul(&g).partial().residual(&f.partial().mul(&g).add(&f.mul(&g.partial())))),
        ];
        for (t, r) in tallies.iter_mut().zip(checks) {
            t.residual(r);
        }
    }
    tallies.into_iter().map(Tally::finish).collect()
}

/// ψ by decomposition against ψ by trace on inputs with poles of order
/// ≤ 2, at threshold N − 6.
pub fn psi_cross_validation<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, cases: usize) -> CheckReport {
    let ctx = Context { neg_depth: ctx.neg_depth.max(2), ..ctx.clone() };
    let mut tally = Tally::new("psi_cross_validation", ctx.prec as i64 - 6);
    for i in 0..cases {
        let pole = (i % 3) as u32;
        let f = random_series(rng, &ctx, 16, pole);
        tally.residual((|| {
            let a = psi_with(&f, PsiAlgorithm::Decomposition, &ctx)?;
            let b = psi_with(&f, PsiAlgorithm::Trace, &ctx)?;
            Ok(a.residual(&b))
        })());
    }
    tally.finish()
}

/// ψ(1) = 1, ψ(1/X) = 1/X, ψ((1+X)/X) = (1+X)/X, and ψ((1+X)^j) equal to
/// (1+X)^(j/p) or 0 for j ≤ 2p, with both algorithms, at threshold N.
pub fn psi_fixed_points(ctx: &Context) -> Vec<CheckReport> {
    let p = ctx.p;
    let ctx = Context { neg_depth: ctx.neg_depth.max(1), ..ctx.clone() };
    let n = ctx.prec as i64;
    let one = LaurentSeries::from_i64(p, 1, ctx.prec);
    let inv_x = LaurentSeries::monomial(Padic::one(p, ctx.prec), -1);
    let ratio = inv_x.add(&one);
    let mut fixed = Tally::new("psi_fixed_points", n);
    let mut powers = Tally::new("psi_binomial_powers", n);
    for alg in [PsiAlgorithm::Decomposition, PsiAlgorithm::Trace] {
        for f in [&one, &inv_x, &ratio] {
            fixed.residual(psi_with(f, alg, &ctx).map(|g| g.residual(f)));
        }
        for j in 0..=2 * p as u64 {
            let f = LaurentSeries::one_plus_x_pow(p, j, ctx.prec);
            let expect = if j % p as u64 == 0 {
                LaurentSeries::one_plus_x_pow(p, j / p as u64, ctx.prec)
            } else {
                LaurentSeries::zero(p)
            };
            powers.residual(psi_with(&f, alg, &ctx).map(|g| g.residual(&expect)));
        }
    }
    vec![fixed.finish(), powers.finish()]
}

/// The ι_n identities at levels 1 and 2 with M_t = ctx.t_trunc, at
/// threshold N − 8 in the variable t/p^n. `cases` inputs per level.
pub fn iota_identities<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, cases: usize) -> Vec<CheckReport> {
    let p = ctx.p;
    let m_t = ctx.t_trunc;
    let tau = ctx.prec as i64 - 8;
    let mut mult = Tally::new("iota_multiplicative", tau);
    let mut t_log = Tally::new("iota_t_is_t_over_pn", tau);
    let mut inter = Tally::new("iota_intertwines_partial", tau);
    let mut fact = Tally::new("delta_factorial_cross_route", tau);
    let mut galois = Tally::new("iota_galois_equivariance", tau);
    for n in [1u32, 2] {
        t_log.residual((|| {
            let via_log = iota_t_via_log(p, n, m_t, tau)?;
            let t = iota_tsum(&TSum::monomial(1, LaurentSeries::from_i64(p, 1, max_precision(p))), n, m_t, ctx)?;
            via_log.residual(&t)
        })());
        for _ in 0..cases {
            let f = random_series(rng, ctx, 6, 0);
            let g = random_series(rng, ctx, 6, 0);
            let a = GammaElement::from_int(p, random_unit(rng, p)).expect("unit");
            mult.residual((|| {
                let lhs = iota(&f.mul(&g), n, m_t, ctx)?;
                lhs.residual(&iota(&f, n, m_t, ctx)?.mul(&iota(&g, n, m_t, ctx)?)?)
            })());
            inter.residual(check_intertwine(&TSum::from_series(f.clone()), n, m_t, tau, ctx).map(|r| r.residual));
            let img = iota(&f, n, m_t, ctx);
            for k in 0..=3 {
                fact.residual(img.as_ref().map_err(Clone::clone).and_then(|img| factorial_identity_check(img, k, tau)).map(|r| r.residual));
            }
            galois.residual((|| {
                let lhs = iota(&op_gamma(&a, &f, ctx)?, n, m_t, ctx)?;
                lhs.residual(&iota(&f, n, m_t, ctx)?.galois(&a.character(ctx.prec))?)
            })());
        }
    }
    vec![mult.finish(), t_log.finish(), inter.finish(), fact.finish(), galois.finish()]
}

/// t-divisibility read off ι_1, ι_2 against X-adic division, on `cases`
/// multiples t·h and `cases` non-multiples h with h(0) a unit.
pub fn tdivisibility_transfer<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, cases: usize) -> CheckReport {
    let tau = ctx.prec as i64 - 8;
    let mut tally = Tally::new("tdivisibility_transfer", tau);
    for i in 0..2 * cases {
        let h = random_unit_series(rng, ctx, 6);
        let multiple = i % 2 == 0;
        let y = if multiple { TSum::monomial(1, h) } else { TSum::from_series(h) };
        tally.holds(tdivisibility_verdicts(&y, &[1, 2], ctx.t_trunc, tau, ctx).map(|v| v == (multiple, multiple)));
    }
    tally.finish()
}

fn random_element<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, m: &TwistModule, len: usize) -> ModuleElement {
    ModuleElement::new((0..m.rank()).map(|_| random_tsum(rng, ctx, len, 2)).collect())
}

/// Module-level ψ/φ/Γ identities, the twist relation of ∂_D with γ, and
/// ∂_D(N) ⊂ N, on random modules with weights in [−2, 2].
pub fn module_identities<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, cases: usize, faults: Faults) -> Vec<CheckReport> {
    let p = ctx.p;
    let tau = ctx.prec as i64 - 4;
    let mut psi_phi = Tally::new("module_psi_phi", tau);
    let mut proj = Tally::new("module_projection_formula", tau);
    let mut psi_gamma = Tally::new("module_psi_gamma_commute", tau);
    let mut phi_gamma = Tally::new("module_phi_gamma_commute", tau);
    let mut twist = Tally::new("module_partial_gamma_twist", tau);
    let mut keeps_n = Tally::new("module_partial_preserves_n", tau);
    let alg = PsiAlgorithm::Decomposition;
    let mpsi = |m: &TwistModule, y: &ModuleElement| -> Result<ModuleElement> {
        let r = mod_psi(m, y, alg, ctx)?;
        Ok(if faults.corrupt_psi {
            r.add(&ModuleElement::from_series(vec![LaurentSeries::x(p, ctx.prec); m.rank()]))
        } else {
            r
        })
    };
    for _ in 0..cases {
        let m = TwistModule::new(p, random_weights(rng, 3, -2, 2)).expect("valid weights");
        let y = random_element(rng, ctx, &m, 8);
        let x = TSum::from_series(random_series(rng, ctx, 8, 0));
        let a = random_unit(rng, p);
        let g = GammaElement::from_int(p, a).expect("unit");
        psi_phi.residual((|| Ok(mpsi(&m, &mod_phi(&m, &y, ctx)?)?.residual(&y)))());
        proj.residual((|| {
            let lhs = mpsi(&m, &y.mul_scalar(&x.phi(ctx)?))?;
            Ok(lhs.residual(&mpsi(&m, &y)?.mul_scalar(&x)))
        })());
        psi_gamma.residual((|| {
            let lhs = mpsi(&m, &mod_gamma(&m, &y, &g, ctx)?)?;
            Ok(lhs.residual(&mod_gamma(&m, &mpsi(&m, &y)?, &g, ctx)?))
        })());
        phi_gamma.residual((|| {
            let lhs = mod_phi(&m, &mod_gamma(&m, &y, &g, ctx)?, ctx)?;
            Ok(lhs.residual(&mod_gamma(&m, &mod_phi(&m, &y, ctx)?, &g, ctx)?))
        })());
        // ∂_D^k γ^w = a^(kw) γ^w ∂_D^k for k, w ∈ {1, 2}
        for k in 1..=2u32 {
            for w in 1..=2u32 {
                twist.residual((|| {
                    let gw = g.pow(w)?;
                    let mut lhs = mod_gamma(&m, &y, &gw, ctx)?;
                    let mut rhs = y.clone();
                    for _ in 0..k {
                        lhs = mod_partial(&m, &lhs, ctx)?.value;
                        rhs = mod_partial(&m, &rhs, ctx)?.value;
                    }
                    let rhs = mod_gamma(&m, &rhs, &gw, ctx)?.scale(&int(p, a).pow((k * w) as i64)?);
                    Ok(lhs.residual(&rhs))
                })());
            }
        }
        // t^(−k) f e ↦ t^(−k) ∂f e on each summand
        keeps_n.residual((|| {
            let fs: Vec<LaurentSeries> = (0..m.rank()).map(|_| random_series(rng, ctx, 8, 0)).collect();
            let y = ModuleElement::new(fs.iter().zip(m.weights()).map(|(f, &k)| TSum::monomial(-k, f.clone())).collect());
            let expect =
                ModuleElement::new(fs.iter().zip(m.weights()).map(|(f, &k)| TSum::monomial(-k, f.partial())).collect());
            let got = mod_partial(&m, &y, ctx)?.value;
            let inside = ndr_membership(&m, &got, Membership::InN, ctx)?.iter().all(|v| v.member);
            Ok(if inside { got.residual(&expect) } else { i64::MIN })
        })());
    }
    vec![psi_phi.finish(), proj.finish(), psi_gamma.finish(), phi_gamma.finish(), twist.finish(), keeps_n.finish()]
}

/// ndr_membership: in tN ⇒ in N; weight ≥ 0 ⇒ in N; on weight 0, in tN
/// exactly for the planted t-multiples.
pub fn membership_consistency<R: Rng + ?Sized>(rng: &mut R, ctx: &Context, cases: usize) -> CheckReport {
    let p = ctx.p;
    let mut tally = Tally::new("ndr_membership_consistency", 0);
    for _ in 0..cases {
        let m = TwistModule::new(p, random_weights(rng, 3, -2, 2)).expect("valid weights");
        let mut planted = Vec::new();
        let coords = m
            .weights()
            .iter()
            .map(|_| {
                let multiple = rng.gen_bool(0.5);
                planted.push(multiple);
                let h = random_unit_series(rng, ctx, 8);
                if multiple {
                    TSum::monomial(1, h)
                } else {
                    TSum::from_series(h)
                }
            })
            .collect();
        let y = ModuleElement::new(coords);
        tally.holds((|| {
            let in_n = ndr_membership(&m, &y, Membership::InN, ctx)?;
            let in_tn = ndr_membership(&m, &y, Membership::InTN, ctx)?;
            let mut ok = true;
            for (i, &k) in m.weights().iter().enumerate() {
                ok &= !in_tn[i].member || in_n[i].member;
                if k >= 0 {
                    ok &= in_n[i].member;
                }
                if k == 0 {
                    ok &= in_tn[i].member == planted[i];
                }
            }
            Ok(ok)
        })());
    }
    tally.finish()
}

/// Fil^j(W / Fil^j W) = 0 for every j over random weight multisets.
pub fn filtration_identity<R: Rng + ?Sized>(rng: &mut R, p: u32, cases: usize) -> CheckReport {
    let mut tally = Tally::new("fil_of_quotient_vanishes", 0);
    for _ in 0..cases {
        let m = TwistModule::new(p, random_weights(rng, 6, -4, 4)).expect("valid weights");
        for j in -5..=5 {
            tally.holds(Ok(m.quotient_fil(j).and_then(|q| q.fil(j)).is_none()));
        }
    }
    tally.finish()
}
