//! Regenerates the derived example values by running their oracles.

use std::collections::BTreeMap;

use pglab_core::operators::{nabla_estimate, psi_with, GammaElement, PsiAlgorithm};
use pglab_core::pgmod::{find_gamma_relation, g_criterion, GammaRelation, ModuleElement, RelationBounds, TwistModule};
use pglab_core::series::parse_expr;
use pglab_core::wronskian::{parse_rational_function, search_relation, Constant, RationalField, Search};
use pglab_core::{Context, Error, LaurentSeries, Result};
use serde_json::{json, Value};

use crate::commands::{coeff_text, series_text};

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
fn inverse_mod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1, mut s0, mut s1) = (m, a.rem_euclid(m), 0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

fn psi_fixture(p: u32, expr: &str, alg: PsiAlgorithm, trunc: i64, depth: u32) -> Result<Value> {
    let ctx = Context { neg_depth: depth, ..Context::new(p, 24, trunc)? };
    let f = parse_expr(expr, &ctx)?;
    Ok(json!(series_text(&psi_with(&f, alg, &ctx)?)))
}

fn wronskian_fixture() -> Result<Value> {
    let xs = ["1", "X", "3+5*X"].iter().map(|e| Ok(vec![parse_rational_function(e)?])).collect::<Result<Vec<_>>>()?;
    match search_relation(&RationalField, &xs, 3)? {
        Search::Found { certificate } => Ok(json!(certificate.lambdas.iter().map(|c| c.to_string()).collect::<Vec<_>>())),
        other => Err(Error::domain(format!("no relation: {other:?}"))),
    }
}

fn g_criterion_fixture(p: u32) -> Result<Value> {
    let ctx = Context::new(p, 24, 16)?;
    let m = TwistModule::new(p, vec![0])?;
    let y = ModuleElement::parse(&["1/X"], &ctx)?;
    let r = g_criterion(&m, &y, 0, &[1], 8, 16, &ctx)?;
    let v = &r.levels[0].values[0];
    Ok(json!({
        "by_expansion": v.valuation()?.to_string(),
        "by_norm": v.valuation_by_norm()?.to_string(),
    }))
}

fn nabla_fixture() -> Result<Value> {
    let ctx = Context::new(3, 24, 16)?;
    let x = LaurentSeries::x(3, 24);
    let est = nabla_estimate(&x, 5, &ctx)?.truncate(6);
    Ok(json!(est.residual(&x.nabla(&ctx).truncate(6))))
}

fn gamma_relation_fixture(weight: i64, expr: &str) -> Result<Value> {
    let ctx = Context::new(3, 24, 24)?;
    let m = TwistModule::new(3, vec![weight])?;
    let y = ModuleElement::parse(&[expr], &ctx)?;
    let g = GammaElement::default_generator(3);
    match find_gamma_relation(&m, &y, &g, RelationBounds { v_max: 3, s_max: 4 }, &ctx)? {
        GammaRelation::Found { coeffs, .. } => Ok(json!(coeffs
            .iter()
            .map(|c| match c {
                Constant::Padic(x) => coeff_text(x),
                Constant::Rational(q) => q.to_string(),
            })
            .collect::<Vec<_>>())),
        other => Ok(json!(format!("{other:?}"))),
    }
}

/// Every derived fixture, keyed by a stable name.
pub fn derived_fixtures() -> Result<BTreeMap<String, Value>> {
    let mut out = BTreeMap::new();
    out.insert("inverse_of_2_mod_3^4".into(), json!(inverse_mod(2, 81)));
    out.insert("psi_p3_oneplusx_cubed".into(), psi_fixture(3, "(1+X)^3", PsiAlgorithm::Decomposition, 16, 0)?);
    out.insert("psi_p3_oneplusx".into(), psi_fixture(3, "1+X", PsiAlgorithm::Decomposition, 16, 0)?);
    out.insert("psi_p3_inverse_x".into(), psi_fixture(3, "1/X", PsiAlgorithm::Trace, 6, 2)?);
    out.insert("wronskian_1_x_3plus5x".into(), wronskian_fixture()?);
    for p in [2u32, 3, 5] {
        out.insert(format!("g_criterion_inverse_x_valuation_p{p}"), g_criterion_fixture(p)?);
    }
    out.insert("nabla_estimate_agreement_p3_m5".into(), nabla_fixture()?);
    out.insert("gamma_relation_constant".into(), gamma_relation_fixture(0, "5")?);
    out.insert("gamma_relation_t_weight_minus_1".into(), gamma_relation_fixture(-1, "t")?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclid_oracle() {
        assert_eq!(inverse_mod(2, 81), Some(41));
        assert_eq!(inverse_mod(3, 81), None);
    }
}
