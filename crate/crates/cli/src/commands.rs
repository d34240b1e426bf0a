//! The subcommands. Each returns a serializable result and a status; the
//! caller wraps them into a report with a provenance block.

use std::collections::BTreeMap;

use num_rational::Rational64;
use pglab_core::cyclo_eval::iota_tsum;
use pglab_core::operators::{psi_with, PsiAlgorithm};
use pglab_core::pgmod::{find_gamma_relation, g_criterion, mod_partial, ndr_membership, GammaRelation, Membership, MembershipVerdict};
use pglab_core::suites::{self, Faults};
use pglab_core::wronskian::{search_relation, RationalField, Search, SeriesField};
use pglab_core::{CheckReport, Context, CycloElement, Error, LaurentSeries, Padic, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::input::{self, Backend};

/// Tri-state outcome, mapped to the exit codes 0, 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Indeterminate => 2,
        }
    }

    fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
            _ => Status::Pass,
        }
    }
}

/// What a command hands back: the verdict, the precision floor its
/// decisions were taken against, the precision it achieved, and the body.
pub struct Computed {
    pub status: Status,
    pub floor: i64,
    /// Smallest valuation a deciding quantity was known to (None when every
    /// deciding quantity was exact).
    pub achieved: Option<i64>,
    pub result: serde_json::Value,
}

fn exact_or(v: i64) -> Option<i64> {
    (v != i64::MAX).then_some(v)
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// Coefficient as an integer, or as u/p^k for negative valuation.
pub fn coeff_text(c: &Padic) -> String {
    if c.val() >= 0 {
        return c.to_symmetric_i128().map_or_else(|| c.to_string(), |n| n.to_string());
    }
    let k = -c.val();
    match c.shift(k).to_symmetric_i128() {
        Some(n) => format!("{n}/{}^{k}", c.prime()),
        None => c.to_string(),
    }
}

/// A readable form such as "1 + X" or "X^-1 + O(X^5)".
pub fn series_text(f: &LaurentSeries) -> String {
    let mut terms = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = f.lo() + i as i64;
        let text = coeff_text(c);
        let mono = match e {
            0 => String::new(),
            1 => "X".to_string(),
            e => format!("X^{e}"),
        };
        terms.push(match (text.as_str(), mono.is_empty()) {
            (t, true) => t.to_string(),
            ("1", false) => mono,
            ("-1", false) => format!("-{mono}"),
            (t, false) => format!("{t}*{mono}"),
        });
    }
    if let Some(m) = f.order() {
        terms.push(format!("O(X^{m})"));
    }
    if terms.is_empty() {
        return "0".into();
    }
    terms.join(" + ").replace("+ -", "- ")
}

fn rational_text(q: Rational64) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Serialize)]
struct IdentitiesResult {
    identities: Vec<CheckReport>,
    failing: Vec<String>,
    notes: Vec<String>,
}

/// Every randomized suite on one prime, in a fixed order of generator use;
/// the reports are sorted by name.
pub fn identities(cfg: &RunConfig, faults: Faults) -> Result<Computed> {
    let ctx = cfg.context()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.cases;
    let mut reports = suites::operator_identities(&mut rng, &ctx, n, faults);
    reports.push(suites::psi_cross_validation(&mut rng, &ctx, (n / 4).max(1)));
    reports.extend(suites::psi_fixed_points(&ctx));
    reports.extend(suites::iota_identities(&mut rng, &ctx, (n / 2).max(1)));
    reports.push(suites::tdivisibility_transfer(&mut rng, &ctx, (n / 2).max(1)));
    reports.extend(suites::module_identities(&mut rng, &ctx, (n / 2).max(1), faults));
    reports.push(suites::membership_consistency(&mut rng, &ctx, n));
    reports.push(suites::filtration_identity(&mut rng, ctx.p, (n / 2).max(1)));
    reports.sort_by(|a, b| a.name.cmp(&b.name));

    let failing: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect();
    let mut notes = Vec::new();
    if ctx.p == 2 {
        notes.push("p = 2: every gamma_a is drawn with a = 1 mod 4, since Gamma acts through 1 + 4Z_2".to_string());
    }
    let floor = reports.iter().filter(|r| r.threshold > 0).map(|r| r.threshold).min().unwrap_or(0);
    let achieved = reports.iter().filter(|r| r.threshold > 0).map(|r| r.residual).min().and_then(exact_or);
    let status = if failing.is_empty() { Status::Pass } else { Status::Fail };
    Ok(Computed { status, floor, achieved, result: to_value(&IdentitiesResult { identities: reports, failing, notes }) })
}

#[derive(Serialize)]
struct PsiResult {
    input: String,
    psi: LaurentSeries,
    text: String,
    /// Valuation of the difference between the two algorithms.
    #[serde(serialize_with = "exact_as_null")]
    agreement: i64,
}

fn exact_as_null<S: serde::Serializer>(v: &i64, s: S) -> std::result::Result<S::Ok, S::Error> {
    exact_or(*v).serialize(s)
}

/// ψ by decomposition, cross-checked by the trace algorithm at N − 6.
pub fn psi(cfg: &RunConfig, json: &str) -> Result<Computed> {
    let ctx = cfg.context()?;
    let (inp, f) = input::parse_psi_input(json, &ctx)?;
    let a = psi_with(&f, PsiAlgorithm::Decomposition, &ctx)?;
    let b = psi_with(&f, PsiAlgorithm::Trace, &ctx)?;
    let agreement = a.residual(&b);
    let floor = ctx.prec as i64 - 6;
    let status = if agreement >= floor { Status::Pass } else { Status::Fail };
    let achieved = a.coeffs().iter().map(Padic::abs_prec).min().and_then(exact_or);
    let text = series_text(&a);
    Ok(Computed { status, floor, achieved, result: to_value(&PsiResult { input: inp.f, psi: a, text, agreement }) })
}

#[derive(Serialize)]
struct IotaCoefficient {
    power: i64,
    value: CycloElement,
    /// v(c_j) + n·j, the valuation in the variable t/p^n.
    scaled_valuation: Option<i64>,
}

#[derive(Serialize)]
struct IotaLevel {
    level: u32,
    t_truncation: i64,
    coefficients: Vec<IotaCoefficient>,
}

pub fn iota(cfg: &RunConfig, json: &str) -> Result<Computed> {
    let ctx = cfg.context()?;
    let (inp, y) = input::parse_iota_input(json, &ctx)?;
    let mut levels = Vec::new();
    let mut achieved = i64::MAX;
    for &n in &inp.levels {
        let img = iota_tsum(&y, n, ctx.t_trunc, &ctx)?;
        let coefficients = img
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let power = img.lo() + i as i64;
                let abs = c.coeffs().iter().map(Padic::abs_prec).min().unwrap_or(i64::MAX);
                achieved = achieved.min(abs.saturating_add(n as i64 * power));
                let v = c.min_coeff_val();
                IotaCoefficient { power, value: c.clone(), scaled_valuation: exact_or(v).map(|v| v + n as i64 * power) }
            })
            .collect();
        levels.push(IotaLevel { level: n, t_truncation: img.order(), coefficients });
    }
    let floor = ctx.prec as i64 - 8;
    Ok(Computed { status: Status::Pass, floor, achieved: exact_or(achieved), result: to_value(&levels) })
}

pub fn wronskian(cfg: &RunConfig, json: &str) -> Result<Computed> {
    let inp = input::parse_wronskian_request(json)?;
    let (search, floor) = match inp.backend {
        Backend::Exact => (search_relation(&RationalField, &input::rational_vectors(&inp)?, inp.k_max)?, 0),
        Backend::Series => {
            let ctx = cfg.context()?;
            let field = SeriesField::new(&ctx);
            let vectors = input::parse_wronskian_series(&inp, &ctx)?;
            (search_relation(&field, &vectors, inp.k_max)?, field.tau)
        }
    };
    let (status, achieved) = match &search {
        Search::Found { certificate } => (Status::Pass, exact_or(certificate.residual.min(certificate.derivative_residual))),
        Search::NotFound { indeterminate: true, .. } => (Status::Indeterminate, None),
        Search::NotFound { .. } => (Status::Fail, None),
    };
    Ok(Computed { status, floor, achieved, result: to_value(&search) })
}

#[derive(Serialize)]
struct ValueValuation {
    level: u32,
    summand: usize,
    /// Read off the π-adic expansion.
    by_expansion: Option<String>,
    /// v(N(x))/e.
    by_norm: Option<String>,
}

#[derive(Serialize)]
struct GCriterionResult {
    report: pglab_core::pgmod::GCriterionReport,
    valuations: Vec<ValueValuation>,
}

pub fn g_criterion_cmd(cfg: &RunConfig, json: &str) -> Result<Computed> {
    let ctx = cfg.context()?;
    let (inp, m, y) = input::parse_g_criterion_input(json, &ctx)?;
    let floor = ctx.prec as i64 - 8;
    let report = g_criterion(&m, &y, inp.k, &inp.levels, ctx.t_trunc, floor, &ctx)?;
    let mut valuations = Vec::new();
    let mut status = if report.vanishes { Status::Pass } else { Status::Fail };
    let mut achieved = i64::MAX;
    for lv in &report.levels {
        achieved = achieved.min(lv.cross_check);
        for (i, v) in lv.values.iter().enumerate() {
            let show = |r: Result<Rational64>| r.ok().map(rational_text);
            let (a, b) = if v.is_exact_zero() { (None, None) } else { (show(v.valuation()), show(v.valuation_by_norm())) };
            valuations.push(ValueValuation { level: lv.level, summand: i, by_expansion: a, by_norm: b });
        }
        if lv.cross_check < floor {
            status = status.and(Status::Indeterminate);
        }
    }
    Ok(Computed { status, floor, achieved: exact_or(achieved), result: to_value(&GCriterionResult { report, valuations }) })
}

#[derive(Serialize)]
struct GammaRelationResult {
    relation: GammaRelation,
    /// P(γ) written out, when a relation was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    polynomial: Option<String>,
}

fn gamma_polynomial(coeffs: &[pglab_core::wronskian::Constant]) -> String {
    let mut terms = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        let text = match c {
            pglab_core::wronskian::Constant::Padic(x) if x.is_zero() => continue,
            pglab_core::wronskian::Constant::Padic(x) => coeff_text(x),
            pglab_core::wronskian::Constant::Rational(q) => q.to_string(),
        };
        let mono = match i {
            0 => String::new(),
            1 => "γ".to_string(),
            i => format!("γ^{i}"),
        };
        terms.push(match (text.as_str(), mono.is_empty()) {
            (t, true) => t.to_string(),
            ("1", false) => mono,
            ("-1", false) => format!("-{mono}"),
            (t, false) => format!("{t}*{mono}"),
        });
    }
    if terms.is_empty() {
        return "0".into();
    }
    terms.join(" + ").replace("+ -", "- ")
}

pub fn gamma_relation(cfg: &RunConfig, json: &str) -> Result<Computed> {
    let ctx = cfg.context()?;
    let (_, m, y, g, bounds) = input::parse_gamma_relation_input(json, &ctx)?;
    let r = find_gamma_relation(&m, &y, &g, bounds, &ctx)?;
    let (status, floor, achieved) = match &r {
        GammaRelation::Found { residual, tau, .. } => (Status::Pass, *tau, exact_or(*residual)),
        GammaRelation::NoRelation { tau, .. } => (Status::Fail, *tau, None),
        GammaRelation::Indeterminate { tau, .. } => (Status::Indeterminate, *tau, None),
    };
    let polynomial = match &r {
        GammaRelation::Found { coeffs, .. } => Some(gamma_polynomial(coeffs)),
        _ => None,
    };
    Ok(Computed { status, floor, achieved, result: to_value(&GammaRelationResult { relation: r, polynomial }) })
}

#[derive(Serialize)]
struct ModuleCheckResult {
    weights: Vec<i64>,
    in_n: Vec<MembershipVerdict>,
    in_tn: Vec<MembershipVerdict>,
    /// Order of the t-pole of ∂_D y per summand.
    partial_pole_orders: Vec<u32>,
    /// Weights of Fil^j for j from min weight to max weight + 1.
    filtration: BTreeMap<i64, Vec<i64>>,
}

pub fn module_check(cfg: &RunConfig, json: &str) -> Result<Computed> {
    let ctx = cfg.context()?;
    let (inp, m, y) = input::parse_element_input(json, &ctx)?;
    let in_n = ndr_membership(&m, &y, Membership::InN, &ctx)?;
    let in_tn = ndr_membership(&m, &y, Membership::InTN, &ctx)?;
    let partial_pole_orders = mod_partial(&m, &y, &ctx)?.pole_orders;
    let lo = *inp.weights.iter().min().expect("nonempty");
    let hi = *inp.weights.iter().max().expect("nonempty");
    let filtration = (lo..=hi + 1).map(|j| (j, m.fil(j).map(|f| f.weights().to_vec()).unwrap_or_default())).collect();
    let result = ModuleCheckResult { weights: inp.weights, in_n, in_tn, partial_pole_orders, filtration };
    Ok(Computed { status: Status::Pass, floor: ctx.prec as i64, achieved: None, result: to_value(&result) })
}

#[derive(Serialize)]
struct DemoRow {
    element: String,
    weight: i64,
    expected: Status,
    /// Verdict per level n.
    verdicts: BTreeMap<u32, Status>,
    #[serde(skip_serializing_if = "Option::is_none")]
    valuation_at_level_1: Option<String>,
}

#[derive(Serialize)]
struct DemoResult {
    rows: Vec<DemoRow>,
    consistent: bool,
}

const DEMO: [(&str, i64, Status); 3] = [("1/X", 0, Status::Fail), ("1", 1, Status::Pass), ("t*X", 0, Status::Pass)];

/// The g-criterion on the canonical elements of the trivial and the
/// weight-1 summand at n = 1, 2. Returns the result and a plain table.
pub fn norms_demo(cfg: &RunConfig) -> Result<(Computed, String)> {
    let ctx = Context { t_trunc: cfg.t_truncation.max(2), ..cfg.context()? };
    let floor = ctx.prec as i64 - 8;
    let mut rows = Vec::new();
    let mut status = Status::Pass;
    for (expr, weight, expected) in DEMO {
        let (m, y) = input::element(&[weight], &[expr.to_string()], &ctx)?;
        let mut verdicts = BTreeMap::new();
        let mut valuation = None;
        for n in [1u32, 2] {
            let v = match g_criterion(&m, &y, 0, &[n], ctx.t_trunc, floor, &ctx) {
                Ok(r) => {
                    if n == 1 && !r.vanishes {
                        valuation = r.levels[0].values[0].valuation().ok().map(rational_text);
                    }
                    if r.vanishes {
                        Status::Pass
                    } else {
                        Status::Fail
                    }
                }
                Err(Error::Precision(_) | Error::Indeterminate(_)) => Status::Indeterminate,
                Err(e) => return Err(e),
            };
            if v == Status::Indeterminate {
                status = status.and(Status::Indeterminate);
            } else if v != expected {
                status = Status::Fail;
            }
            verdicts.insert(n, v);
        }
        rows.push(DemoRow { element: expr.to_string(), weight, expected, verdicts, valuation_at_level_1: valuation });
    }
    let mut table = format!("{:<24} {}\n", "element", "verdict (n=1, n=2)");
    for r in &rows {
        let cells: Vec<String> = r.verdicts.values().map(|v| format!("{v:?}").to_lowercase()).collect();
        table.push_str(&format!("{:<24} {}\n", format!("{} (weight {})", r.element, r.weight), cells.join(", ")));
    }
    let result = DemoResult { rows, consistent: status == Status::Pass };
    Ok((Computed { status, floor, achieved: None, result: to_value(&result) }, table))
}
