//! Direct sums of rank-one cyclotomic twists with identity φ-matrix.
//!
//! Convention: on a summand of weight k, γ_a acts as a^k·γ_a on the
//! coordinate, the de Rham basis vector is t^(−k)·e and
//! N = t^(−k)·(series)·e.

use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::cyclo_eval::{factorial_identity_check, iota_tsum};
use crate::error::{Error, Result};
use crate::operators::{GammaElement, PsiAlgorithm};
use crate::padic::{max_precision, CycloElement, Padic};
use crate::series::{parse_tsum, LaurentSeries, TDivision, TSum};
use crate::wronskian::{rank_verdict_is, search_relation, solve_in_h, Constant, Search, SeriesField};

const MAX_WEIGHT: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistModule {
    p: u32,
    weights: Vec<i64>,
    labels: Vec<String>,
}

/// JSON form {p, weights, truncation, precision}, optionally with labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDescriptor {
    pub p: u32,
    pub weights: Vec<i64>,
    pub truncation: i64,
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Parses and validates a module descriptor, returning the module and the
/// working context it names.
pub fn parse_module_descriptor(json: &str) -> Result<(TwistModule, Context)> {
    let d: ModuleDescriptor =
        serde_json::from_str(json).map_err(|e| Error::parse(e.column().saturating_sub(1), e.to_string()))?;
    let ctx = Context::new(d.p, d.precision, d.truncation)?;
    let mut m = TwistModule::new(d.p, d.weights)?;
    if let Some(labels) = d.labels {
        if labels.len() != m.weights.len() {
            return Err(Error::domain("one label per summand is required"));
        }
        m.labels = labels;
    }
    Ok((m, ctx))
}

impl TwistModule {
    pub fn new(p: u32, weights: Vec<i64>) -> Result<Self> {
        if !crate::is_supported_prime(p) {
            return Err(Error::domain(format!("unsupported prime {p}")));
        }
        if weights.is_empty() {
            return Err(Error::domain("a module needs at least one summand"));
        }
        if weights.iter().any(|k| k.abs() > MAX_WEIGHT) {
            return Err(Error::domain(format!("weights must lie in −{MAX_WEIGHT}..={MAX_WEIGHT}")));
        }
        let labels = weights.iter().enumerate().map(|(i, k)| format!("e{i}({k})")).collect();
        Ok(TwistModule { p, weights, labels })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    fn pick(&self, keep: impl Fn(i64) -> bool) -> Option<TwistModule> {
        let idx: Vec<usize> = (0..self.rank()).filter(|&i| keep(self.weights[i])).collect();
        if idx.is_empty() {
            return None;
        }
        Some(TwistModule {
            p: self.p,
            weights: idx.iter().map(|&i| self.weights[i]).collect(),
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
        })
    }

    /// Fil^j: the summands of weight ≥ j (None when there are none).
    pub fn fil(&self, j: i64) -> Option<TwistModule> {
        self.pick(|k| k >= j)
    }

    /// M / Fil^j: the summands of weight < j.
    pub fn quotient_fil(&self, j: i64) -> Option<TwistModule> {
        self.pick(|k| k < j)
    }

    fn check(&self, y: &ModuleElement) -> Result<()> {
        if y.coords.len() != self.rank() {
            return Err(Error::domain(format!("element has {} coordinates, module rank is {}", y.coords.len(), self.rank())));
        }
        if let Some(c) = y.coords.iter().find(|c| c.prime() != self.p) {
            return Err(Error::PrimeMismatch(c.prime(), self.p));
        }
        Ok(())
    }
}

/// Coordinates in the basis e_1..e_d, each a sum of powers of t times series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleElement {
    pub coords: Vec<TSum>,
}

impl ModuleElement {
    pub fn new(coords: Vec<TSum>) -> Self {
        ModuleElement { coords }
    }

    pub fn from_series(coords: Vec<LaurentSeries>) -> Self {
        ModuleElement { coords: coords.into_iter().map(TSum::from_series).collect() }
    }

    /// One expression per coordinate, in X and a symbolic t.
    pub fn parse(exprs: &[&str], ctx: &Context) -> Result<Self> {
        Ok(ModuleElement { coords: exprs.iter().map(|s| parse_tsum(s, ctx)).collect::<Result<_>>()? })
    }

    pub fn add(&self, other: &ModuleElement) -> ModuleElement {
        ModuleElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &ModuleElement) -> ModuleElement {
        ModuleElement { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &Padic) -> ModuleElement {
        ModuleElement { coords: self.coords.iter().map(|a| a.scale(c)).collect() }
    }

    /// Multiplies every coordinate by a scalar t-sum.
    pub fn mul_scalar(&self, x: &TSum) -> ModuleElement {
        ModuleElement { coords: self.coords.iter().map(|a| a.mul(x)).collect() }
    }

    pub fn min_coeff_val(&self) -> i64 {
        self.coords.iter().map(TSum::min_coeff_val).min().unwrap_or(i64::MAX)
    }

    pub fn residual(&self, other: &ModuleElement) -> i64 {
        self.sub(other).min_coeff_val()
    }
}

fn int(p: u32, k: i64) -> Padic {
    Padic::from_i64(p, k, max_precision(p))
}

pub fn mod_phi(m: &TwistModule, y: &ModuleElement, ctx: &Context) -> Result<ModuleElement> {
    m.check(y)?;
    Ok(ModuleElement { coords: y.coords.iter().map(|c| c.phi(ctx)).collect::<Result<_>>()? })
}

pub fn mod_gamma(m: &TwistModule, y: &ModuleElement, g: &GammaElement, ctx: &Context) -> Result<ModuleElement> {
    m.check(y)?;
    let a = g.character(max_precision(m.p));
    let coords = y
        .coords
        .iter()
        .zip(&m.weights)
        .map(|(c, &k)| Ok(c.gamma(g, ctx)?.scale(&a.pow(k)?)))
        .collect::<Result<_>>()?;
    Ok(ModuleElement { coords })
}

pub fn mod_psi(m: &TwistModule, y: &ModuleElement, alg: PsiAlgorithm, ctx: &Context) -> Result<ModuleElement> {
    m.check(y)?;
    Ok(ModuleElement { coords: y.coords.iter().map(|c| c.psi(alg, ctx)).collect::<Result<_>>()? })
}

/// ∇_D(f·e) = (∇f + k·f)·e on a weight-k summand (∇_D e = k·e).
pub fn mod_nabla(m: &TwistModule, y: &ModuleElement) -> Result<ModuleElement> {
    m.check(y)?;
    let coords = y.coords.iter().zip(&m.weights).map(|(c, &k)| c.nabla().add(&c.scale(&int(m.p, k)))).collect();
    Ok(ModuleElement { coords })
}

/// ∂_D = t^(−1)·∇_D with, per coordinate, the order of the t-pole left by
/// the division (0 when the coordinate stays in the series ring).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialResult {
    pub value: ModuleElement,
    pub pole_orders: Vec<u32>,
}

pub fn mod_partial(m: &TwistModule, y: &ModuleElement, ctx: &Context) -> Result<PartialResult> {
    let value = ModuleElement { coords: mod_nabla(m, y)?.coords.iter().map(|c| c.shift_t(-1)).collect() };
    let pole_orders = value
        .coords
        .iter()
        .map(|c| Ok((-c.t_divisibility(0, ctx)?.0).max(0) as u32))
        .collect::<Result<_>>()?;
    Ok(PartialResult { value, pole_orders })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// y ∈ N
    InN,
    /// y ∈ t·N
    InTN,
}

/// Per-summand verdict, with the coefficient that blocked t-divisibility.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipVerdict {
    pub summand: String,
    pub member: bool,
    /// (exponent of X, coefficient) of the first obstruction.
    pub obstruction: Option<(i64, Padic)>,
}

/// On a weight-k summand, f·e ∈ t^m·N ⇔ t^(m−k) divides f.
pub fn ndr_membership(m: &TwistModule, y: &ModuleElement, mode: Membership, ctx: &Context) -> Result<Vec<MembershipVerdict>> {
    m.check(y)?;
    let shift = match mode {
        Membership::InN => 0,
        Membership::InTN => 1,
    };
    y.coords
        .iter()
        .zip(&m.weights)
        .zip(&m.labels)
        .map(|((c, &k), label)| {
            let need = shift - k;
            let (got, obstruction) = c.t_divisibility(need, ctx)?;
            let obstruction = match obstruction {
                Some(TDivision::Obstruction { exponent, coeff }) => Some((exponent, coeff)),
                _ => None,
            };
            Ok(MembershipVerdict { summand: label.clone(), member: got >= need, obstruction })
        })
        .collect()
}

/// δ∘∂^k∘ι_n(y) at one level, per summand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelValues {
    pub level: u32,
    pub values: Vec<CycloElement>,
    /// Scaled valuations of the values (i64::MAX for exact zero).
    #[serde(serialize_with = "crate::report::exact_as_null_vec")]
    pub valuations: Vec<i64>,
    /// Agreement of k!·[t^k] with (d/dt)^k then t = 0.
    #[serde(serialize_with = "crate::report::exact_as_null")]
    pub cross_check: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GCriterionReport {
    pub k: u32,
    pub levels: Vec<LevelValues>,
    pub threshold: i64,
    /// All values vanish to the threshold.
    pub vanishes: bool,
}

/// Evaluates δ∘∂^k∘ι_n(y). The weight-k_i coordinate f contributes
/// t^(k_i)·ι_n(f) in the de Rham basis, so the value is k!·[t^(k−k_i)] ι_n(f).
pub fn g_criterion(
    m: &TwistModule,
    y: &ModuleElement,
    k: u32,
    levels: &[u32],
    m_t: usize,
    threshold: i64,
    ctx: &Context,
) -> Result<GCriterionReport> {
    m.check(y)?;
    if levels.is_empty() || levels.contains(&0) {
        return Err(Error::domain("levels must be a nonempty list of n ≥ 1"));
    }
    let kk = k as i64;
    let mut fact = Padic::one(m.p, max_precision(m.p));
    for i in 1..=kk {
        fact = fact.mul(&int(m.p, i));
    }
    let mut out = Vec::new();
    let mut vanishes = true;
    for &n in levels {
        let mut values = Vec::new();
        let mut valuations = Vec::new();
        let mut cross = i64::MAX;
        for (c, &w) in y.coords.iter().zip(&m.weights) {
            let img = iota_tsum(&c.shift_t(w), n, m_t, ctx)?;
            let v = img.coeff(kk)?.scale(&fact);
            let check = factorial_identity_check(&img, k, threshold)?;
            cross = cross.min(check.residual);
            let val = v.min_coeff_val().saturating_add(n as i64 * kk);
            vanishes &= val >= threshold;
            values.push(v);
            valuations.push(val);
        }
        out.push(LevelValues { level: n, values, valuations, cross_check: cross });
    }
    Ok(GCriterionReport { k, levels: out, threshold, vanishes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationBounds {
    pub v_max: usize,
    pub s_max: usize,
}

/// Result of the γ-relation search. Every outcome records the zero
/// threshold τ and the truncation it was decided at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum GammaRelation {
    /// P(γ)y = 0 with P(γ) = Σ coeffs[i]·γ^i.
    Found {
        v: usize,
        s: usize,
        k: usize,
        coeffs: Vec<Constant>,
        #[serde(serialize_with = "crate::report::exact_as_null")]
        residual: i64,
        tau: i64,
        truncation: i64,
    },
    NoRelation { v: Option<usize>, bounds: RelationBounds, tau: i64, truncation: i64 },
    Indeterminate { reason: String, tau: i64, truncation: i64 },
}

impl GammaRelation {
    pub fn is_found(&self) -> bool {
        matches!(self, GammaRelation::Found { .. })
    }
}

/// Replays the argument: find the least v with γ^v(y) in the H-span of
/// y, γy, …, γ^(v−1)y, take the coordinates x_w of γ^(w+v−1)(y) in that
/// span, and ask the Wronskian solver for a constant relation among them.
pub fn find_gamma_relation(
    m: &TwistModule,
    y: &ModuleElement,
    g: &GammaElement,
    bounds: RelationBounds,
    ctx: &Context,
) -> Result<GammaRelation> {
    m.check(y)?;
    let field = SeriesField::new(ctx);
    let (tau, truncation) = (field.tau, ctx.trunc);
    let indeterminate = |reason: String| Ok(GammaRelation::Indeterminate { reason, tau, truncation });

    let depth = bounds.v_max + bounds.s_max + 1;
    let mut orbit = vec![y.clone()];
    for _ in 1..depth {
        let next = mod_gamma(m, orbit.last().expect("nonempty"), g, ctx)?;
        orbit.push(next);
    }
    // dividing every vector by a common t^j0 keeps the constant relations
    // and spares the expansion of t where possible
    let j0 = orbit.iter().flat_map(|e| e.coords.iter().filter_map(TSum::min_t_exp)).min().unwrap_or(0);
    let vectors: Vec<Vec<LaurentSeries>> = orbit
        .iter()
        .map(|e| {
            e.coords.iter().map(|c| Ok(c.shift_t(-j0).to_series(ctx)?.truncate(ctx.trunc))).collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;

    let mut v = None;
    for cand in 1..=bounds.v_max {
        match rank_verdict_is(&field, &vectors[..cand], cand) {
            Some(true) => {}
            Some(false) => break,
            None => return indeterminate(format!("rank of the first {cand} orbit vectors")),
        }
        match rank_verdict_is(&field, &vectors[..=cand], cand) {
            Some(true) => {
                v = Some(cand);
                break;
            }
            Some(false) => {}
            None => return indeterminate(format!("rank of the first {} orbit vectors", cand + 1)),
        }
    }
    let Some(v) = v else {
        return Ok(GammaRelation::NoRelation { v: None, bounds, tau, truncation });
    };

    let basis: Vec<Vec<LaurentSeries>> = vectors[..v].to_vec();
    let mut xs = Vec::new();
    for target in &vectors[v..v + bounds.s_max + 1] {
        match solve_in_h(&field, &basis, target) {
            Ok(a) => xs.push(a),
            Err(Error::Indeterminate(r)) => return indeterminate(r),
            Err(e) => return Err(e),
        }
    }
    let mut undecided = false;
    for s in 1..=bounds.s_max {
        match search_relation(&field, &xs[..=s], bounds.s_max)? {
            Search::Found { certificate } => {
                // Σ λ_w γ^(w+v−1) y = 0; dividing by γ^v leaves Σ λ_w γ^(w−1)
                let coeffs = certificate.lambdas.clone();
                let mut acc = ModuleElement::new(vec![TSum::zero(m.p); m.rank()]);
                for (w, c) in coeffs.iter().enumerate() {
                    let Constant::Padic(l) = c else { unreachable!("series backend") };
                    acc = acc.add(&orbit[w].scale(l));
                }
                let residual = acc
                    .coords
                    .iter()
                    .map(|c| Ok(c.shift_t(-j0).to_series(ctx)?.truncate(ctx.trunc).min_coeff_val()))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .min()
                    .unwrap_or(i64::MAX);
                if residual < tau {
                    // the hypotheses held at precision but the relation does not
                    return indeterminate(format!("certificate at s = {s} leaves residual {residual} < {tau}"));
                }
                return Ok(GammaRelation::Found { v, s, k: certificate.k, coeffs, residual, tau, truncation });
            }
            Search::NotFound { indeterminate, .. } => undecided |= indeterminate,
        }
    }
    if undecided {
        return indeterminate("some rank decisions fell in the precision band".into());
    }
    Ok(GammaRelation::NoRelation { v: Some(v), bounds, tau, truncation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse_expr;

    fn ctx() -> Context {
        Context::new(3, 24, 12).unwrap()
    }

    fn elem(exprs: &[&str]) -> ModuleElement {
        ModuleElement::parse(exprs, &ctx()).unwrap()
    }

    fn module(weights: &[i64]) -> TwistModule {
        TwistModule::new(3, weights.to_vec()).unwrap()
    }

    #[test]
    fn operator_examples() {
        let c = ctx();
        let m0 = module(&[0]);
        let y = elem(&["1/X"]);
        assert!(mod_psi(&m0, &y, PsiAlgorithm::Decomposition, &c).unwrap().residual(&y) >= 24 - 2);
        let m1 = module(&[1]);
        let g = GammaElement::from_int(3, 4).unwrap();
        let r = mod_gamma(&m1, &elem(&["7"]), &g, &c).unwrap();
        assert!(r.residual(&elem(&["28"])) >= 24);
        let m01 = module(&[0, 1]);
        let phi_x = crate::operators::op_phi(&LaurentSeries::x(3, 24), &c).unwrap();
        let r = mod_phi(&m01, &elem(&["X", "X"]), &c).unwrap();
        assert!(r.residual(&ModuleElement::from_series(vec![phi_x.clone(), phi_x])) >= 24);
    }

    #[test]
    fn partial_on_twists() {
        let c = ctx();
        // ∂_D(t^(−1) X e) = t^(−1) ∂(X) e on weight 1
        let m1 = module(&[1]);
        let r = mod_partial(&m1, &elem(&["X/t"]), &c).unwrap();
        assert!(r.value.residual(&elem(&["(1+X)/t"])) >= 24);
        // weight 0 is the scalar ∂
        let m0 = module(&[0]);
        let r = mod_partial(&m0, &elem(&["X^2 + 1/X"]), &c).unwrap();
        let d = parse_expr("X^2 + 1/X", &c).unwrap().partial();
        assert!(r.value.residual(&ModuleElement::from_series(vec![d])) >= 24);
        assert_eq!(r.pole_orders, vec![0]);
        // ∂_D(e) = t^(−1) e on weight 1
        let r = mod_partial(&m1, &elem(&["1"]), &c).unwrap();
        assert_eq!(r.pole_orders, vec![1]);
    }

    #[test]
    fn membership_examples() {
        let c = ctx();
        let m0 = module(&[0]);
        let v = ndr_membership(&m0, &elem(&["1"]), Membership::InTN, &c).unwrap();
        assert!(!v[0].member);
        assert_eq!(v[0].obstruction.map(|o| o.0), Some(0));
        let m1 = module(&[1]);
        assert!(ndr_membership(&m1, &elem(&["1"]), Membership::InN, &c).unwrap()[0].member);
        assert!(ndr_membership(&m1, &elem(&["1"]), Membership::InTN, &c).unwrap()[0].member);
        assert!(ndr_membership(&m0, &elem(&["t*X"]), Membership::InTN, &c).unwrap()[0].member);
        // weight −1: N = t·(series)·e
        let mm = module(&[-1]);
        assert!(!ndr_membership(&mm, &elem(&["1"]), Membership::InN, &c).unwrap()[0].member);
        assert!(ndr_membership(&mm, &elem(&["t"]), Membership::InN, &c).unwrap()[0].member);
    }

    #[test]
    fn filtration_examples() {
        let m = module(&[2, 0, -1]);
        assert_eq!(m.fil(1).unwrap().weights(), &[2]);
        assert_eq!(m.fil(-1).unwrap(), m);
        let q = m.quotient_fil(0).unwrap();
        assert_eq!(q.weights(), &[-1]);
        assert!(q.fil(0).is_none());
    }

    #[test]
    fn basis_vector_is_gamma_invariant() {
        let c = ctx();
        let g = GammaElement::default_generator(3);
        for k in -2..=2 {
            let m = module(&[k]);
            let y = ModuleElement::new(vec![TSum::monomial(-k, LaurentSeries::from_i64(3, 1, 24))]);
            assert!(mod_gamma(&m, &y, &g, &c).unwrap().residual(&y) >= 24, "weight {k}");
        }
    }

    #[test]
    fn g_criterion_examples() {
        let c = ctx();
        let m0 = module(&[0]);
        let r = g_criterion(&m0, &elem(&["1/X"]), 0, &[1], 8, 16, &c).unwrap();
        assert!(!r.vanishes);
        let pi = CycloElement::zeta(3, 1).sub(&CycloElement::one(3, 1)).unwrap();
        let v = &r.levels[0].values[0];
        assert!(v.mul(&pi).unwrap().sub(&CycloElement::one(3, 1)).unwrap().min_coeff_val() >= 20);
        let r = g_criterion(&m0, &elem(&["t*(1 + X^2)"]), 0, &[1, 2], 8, 16, &c).unwrap();
        assert!(r.vanishes);
        let r = g_criterion(&m0, &elem(&["1/X"]), 1, &[1], 8, 16, &c).unwrap();
        assert!(r.levels[0].cross_check >= 16);
        assert!(!r.vanishes);
    }

    #[test]
    fn gamma_relation_examples() {
        let c = Context::new(3, 24, 24).unwrap();
        let g = GammaElement::default_generator(3);
        let b = RelationBounds { v_max: 3, s_max: 4 };
        let coeffs = |r: GammaRelation| match r {
            GammaRelation::Found { coeffs, .. } => coeffs
                .iter()
                .map(|x| match x {
                    Constant::Padic(x) => x.to_symmetric_i128().unwrap(),
                    Constant::Rational(_) => unreachable!(),
                })
                .collect::<Vec<_>>(),
            other => panic!("{other:?}"),
        };
        let m0 = module(&[0]);
        let y = ModuleElement::parse(&["5"], &c).unwrap();
        assert_eq!(coeffs(find_gamma_relation(&m0, &y, &g, b, &c).unwrap()), vec![-1, 1]);
        let mm = module(&[-1]);
        let y = ModuleElement::parse(&["t"], &c).unwrap();
        assert_eq!(coeffs(find_gamma_relation(&mm, &y, &g, b, &c).unwrap()), vec![-1, 1]);
        let y = ModuleElement::parse(&["X"], &c).unwrap();
        let r = find_gamma_relation(&m0, &y, &g, b, &c).unwrap();
        assert!(matches!(r, GammaRelation::NoRelation { .. }), "{r:?}");
    }

    #[test]
    fn descriptor_parsing() {
        let (m, c) = parse_module_descriptor(r#"{"p":5,"weights":[1,0],"truncation":16,"precision":20}"#).unwrap();
        assert_eq!(m.weights(), &[1, 0]);
        assert_eq!(c.trunc, 16);
        assert!(parse_module_descriptor(r#"{"p":4,"weights":[1],"truncation":16,"precision":20}"#).is_err());
        assert!(parse_module_descriptor(r#"{"p":5,"weights":[],"truncation":16,"precision":20}"#).is_err());
        assert!(parse_module_descriptor(r#"{"p":5,"weights":[1],"truncation":16,"precision":20,"x":1}"#).is_err());
    }
}
