//! JSON inputs of the subcommands. Unknown fields are rejected.

use pglab_core::operators::GammaElement;
use pglab_core::pgmod::{ModuleElement, RelationBounds, TwistModule};
use pglab_core::series::parse_tsum;
use pglab_core::wronskian::{parse_rational_function, RationalFunction};
use pglab_core::{Context, Error, LaurentSeries, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

fn from_json<T: DeserializeOwned>(json: &str) -> Result<T> {
    serde_json::from_str(json).map_err(|e| Error::parse(e.column().saturating_sub(1), e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiInput {
    /// Expression in X and t, e.g. "(1+X)^3" or "1/X".
    pub f: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IotaInput {
    pub f: String,
    #[serde(default = "default_levels")]
    pub levels: Vec<u32>,
}

fn default_levels() -> Vec<u32> {
    vec![1]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Q(X) with exact rational arithmetic.
    #[default]
    Exact,
    /// Truncated p-adic series with the zero threshold τ.
    Series,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WronskianInput {
    /// x_1..x_(s+1), each a vector of v entries.
    pub vectors: Vec<Vec<String>>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default)]
    pub backend: Backend,
}

fn default_k_max() -> usize {
    3
}

/// A module and an element of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementInput {
    pub weights: Vec<i64>,
    /// One coordinate per summand, as expressions in X and t.
    pub y: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GCriterionInput {
    pub weights: Vec<i64>,
    pub y: Vec<String>,
    #[serde(default)]
    pub k: u32,
    #[serde(default = "default_levels")]
    pub levels: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaRelationInput {
    pub weights: Vec<i64>,
    pub y: Vec<String>,
    /// χ(γ); the default generator when absent.
    #[serde(default)]
    pub gamma: Option<i64>,
    #[serde(default = "default_v_max")]
    pub v_max: usize,
    #[serde(default = "default_s_max")]
    pub s_max: usize,
}

fn default_v_max() -> usize {
    3
}

fn default_s_max() -> usize {
    4
}

const MAX_RANK: usize = 16;
const MAX_VECTORS: usize = 16;
const MAX_LEN: usize = 4096;

fn check_len(s: &str) -> Result<()> {
    if s.len() > MAX_LEN {
        return Err(Error::domain(format!("expression longer than {MAX_LEN} bytes")));
    }
    Ok(())
}

pub fn parse_psi_input(json: &str, ctx: &Context) -> Result<(PsiInput, LaurentSeries)> {
    let i: PsiInput = from_json(json)?;
    check_len(&i.f)?;
    let f = pglab_core::series::parse_expr(&i.f, ctx)?;
    Ok((i, f))
}

pub fn parse_iota_input(json: &str, ctx: &Context) -> Result<(IotaInput, pglab_core::series::TSum)> {
    let i: IotaInput = from_json(json)?;
    check_len(&i.f)?;
    if i.levels.is_empty() || i.levels.iter().any(|&n| n == 0 || n > 4) {
        return Err(Error::domain("levels must be a nonempty list drawn from 1..=4"));
    }
    let y = parse_tsum(&i.f, ctx)?;
    Ok((i, y))
}

/// A Wronskian request with its shape checked.
pub fn parse_wronskian_request(json: &str) -> Result<WronskianInput> {
    let i: WronskianInput = from_json(json)?;
    check_wronskian_shape(&i)?;
    Ok(i)
}

/// The vectors of a Wronskian input over Q(X).
pub fn rational_vectors(i: &WronskianInput) -> Result<Vec<Vec<RationalFunction>>> {
    check_wronskian_shape(i)?;
    i.vectors
        .iter()
        .map(|x| x.iter().map(|e| check_len(e).and_then(|_| parse_rational_function(e))).collect())
        .collect()
}

/// A Wronskian request over Q(X), parsed all the way.
pub fn parse_wronskian_input(json: &str) -> Result<(WronskianInput, Vec<Vec<RationalFunction>>)> {
    let i = parse_wronskian_request(json)?;
    let xs = rational_vectors(&i)?;
    Ok((i, xs))
}

/// The vectors of a Wronskian input as p-adic series.
pub fn parse_wronskian_series(i: &WronskianInput, ctx: &Context) -> Result<Vec<Vec<LaurentSeries>>> {
    check_wronskian_shape(i)?;
    i.vectors
        .iter()
        .map(|x| x.iter().map(|e| check_len(e).and_then(|_| pglab_core::series::parse_expr(e, ctx))).collect())
        .collect()
}

fn check_wronskian_shape(i: &WronskianInput) -> Result<()> {
    if i.vectors.len() < 2 || i.vectors.len() > MAX_VECTORS {
        return Err(Error::domain(format!("need between 2 and {MAX_VECTORS} vectors")));
    }
    let v = i.vectors[0].len();
    if v == 0 || v > MAX_RANK || i.vectors.iter().any(|x| x.len() != v) {
        return Err(Error::domain(format!("vectors must share a length in 1..={MAX_RANK}")));
    }
    if i.k_max == 0 || i.k_max > 8 {
        return Err(Error::domain("k_max must lie in 1..=8"));
    }
    Ok(())
}

/// Builds the module and the element named by an input.
pub fn element(weights: &[i64], coords: &[String], ctx: &Context) -> Result<(TwistModule, ModuleElement)> {
    if weights.len() > MAX_RANK {
        return Err(Error::domain(format!("rank above {MAX_RANK}")));
    }
    let m = TwistModule::new(ctx.p, weights.to_vec())?;
    if coords.len() != m.rank() {
        return Err(Error::domain(format!("{} coordinates for a module of rank {}", coords.len(), m.rank())));
    }
    for s in coords {
        check_len(s)?;
    }
    let exprs: Vec<&str> = coords.iter().map(String::as_str).collect();
    let y = ModuleElement::parse(&exprs, ctx)?;
    Ok((m, y))
}

pub fn parse_element_input(json: &str, ctx: &Context) -> Result<(ElementInput, TwistModule, ModuleElement)> {
    let i: ElementInput = from_json(json)?;
    let (m, y) = element(&i.weights, &i.y, ctx)?;
    Ok((i, m, y))
}

pub fn parse_g_criterion_input(json: &str, ctx: &Context) -> Result<(GCriterionInput, TwistModule, ModuleElement)> {
    let i: GCriterionInput = from_json(json)?;
    if i.levels.is_empty() || i.levels.iter().any(|&n| n == 0 || n > 4) {
        return Err(Error::domain("levels must be a nonempty list drawn from 1..=4"));
    }
    if i.k as usize >= ctx.t_trunc {
        return Err(Error::domain(format!("k = {} needs t_truncation above it", i.k)));
    }
    let (m, y) = element(&i.weights, &i.y, ctx)?;
    Ok((i, m, y))
}

pub fn parse_gamma_relation_input(
    json: &str,
    ctx: &Context,
) -> Result<(GammaRelationInput, TwistModule, ModuleElement, GammaElement, RelationBounds)> {
    let i: GammaRelationInput = from_json(json)?;
    if i.v_max == 0 || i.v_max > 6 || i.s_max == 0 || i.s_max > 6 {
        return Err(Error::domain("v_max and s_max must lie in 1..=6"));
    }
    let g = match i.gamma {
        Some(a) => GammaElement::from_int(ctx.p, a)?,
        None => GammaElement::default_generator(ctx.p),
    };
    let (m, y) = element(&i.weights, &i.y, ctx)?;
    let bounds = RelationBounds { v_max: i.v_max, s_max: i.s_max };
    Ok((i, m, y, g, bounds))
}
