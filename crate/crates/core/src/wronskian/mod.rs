//! Constant-coefficient relations from Wronskian-type rank conditions.
//!
//! If the prolongations X^(k−1)_w = (x_w, ∂x_w, …, ∂^(k−1)x_w) of
//! x_1..x_s are independent over H while X^k_1..X^k_(s+1) are dependent,
//! the dependence can be taken with coefficients in H^(∂=0).

mod field;
mod linalg;
pub mod planted;
mod ratfunc;

use serde::Serialize;

pub use field::{Constant, DiffField, RankVerdict, RationalField, SeriesField, ZeroTest};
pub use linalg::{bareiss_rank, constant_rank, gauss_rank, solve_in_h};
pub use ratfunc::{parse_rational_function, Poly, RationalAlgebra, RationalFunction};

use crate::error::{Error, Result};

/// Tri-state answer for rank conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Indeterminate,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

/// x_1..x_(s+1) ∈ H^v with derivatives cached up to order k.
#[derive(Clone, Debug)]
pub struct ProlongationSystem<E> {
    k: usize,
    /// derivs[w][j] = ∂^j x_w
    derivs: Vec<Vec<Vec<E>>>,
}

impl<E: Clone> ProlongationSystem<E> {
    pub fn new<F: DiffField<Elem = E> + ?Sized>(f: &F, vectors: Vec<Vec<E>>, k: usize) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(Error::domain("need s + 1 ≥ 2 vectors"));
        }
        if k < 1 {
            return Err(Error::domain("derivation order k must be at least 1"));
        }
        let v = vectors[0].len();
        if v == 0 || vectors.iter().any(|x| x.len() != v) {
            return Err(Error::domain("vectors must share a positive length v"));
        }
        let derivs = vectors
            .into_iter()
            .map(|x| {
                let mut chain = vec![x];
                for _ in 0..k {
                    let next = chain.last().expect("nonempty").iter().map(|e| f.derive(e)).collect();
                    chain.push(next);
                }
                chain
            })
            .collect();
        Ok(ProlongationSystem { k, derivs })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// s, one less than the number of vectors.
    pub fn s(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn v(&self) -> usize {
        self.derivs[0][0].len()
    }

    pub fn vector(&self, w: usize) -> &[E] {
        &self.derivs[w][0]
    }

    /// X^j_w as one vector of length v(j+1).
    pub fn prolongation(&self, w: usize, j: usize) -> Vec<E> {
        self.derivs[w][..=j].iter().flatten().cloned().collect()
    }
}

/// The two rank hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    /// X^(k−1)_1..X^(k−1)_s independent over H.
    pub h1: Verdict,
    /// X^k_1..X^k_(s+1) dependent over H.
    pub h2: Verdict,
}

fn rank_at_least(r: RankVerdict, n: usize) -> Verdict {
    match r {
        RankVerdict::Exact(r) => {
            if r >= n {
                Verdict::Yes
            } else {
                Verdict::No
            }
        }
        RankVerdict::Bounds { lower, upper } => {
            if lower >= n {
                Verdict::Yes
            } else if upper < n {
                Verdict::No
            } else {
                Verdict::Indeterminate
            }
        }
    }
}

/// Whether the rank of `rows` equals `n`, None when precision leaves both
/// answers open.
pub fn rank_verdict_is<F: DiffField + ?Sized>(f: &F, rows: &[Vec<F::Elem>], n: usize) -> Option<bool> {
    match f.rank(rows) {
        RankVerdict::Exact(r) => Some(r == n),
        RankVerdict::Bounds { lower, upper } => (n < lower || n > upper).then_some(false),
    }
}

fn not(v: Verdict) -> Verdict {
    match v {
        Verdict::Yes => Verdict::No,
        Verdict::No => Verdict::Yes,
        Verdict::Indeterminate => Verdict::Indeterminate,
    }
}

pub fn check_hypotheses<F: DiffField + ?Sized>(f: &F, sys: &ProlongationSystem<F::Elem>) -> Hypotheses {
    let s = sys.s();
    let low: Vec<_> = (0..s).map(|w| sys.prolongation(w, sys.k - 1)).collect();
    let high: Vec<_> = (0..=s).map(|w| sys.prolongation(w, sys.k)).collect();
    Hypotheses { h1: rank_at_least(f.rank(&low), s), h2: not(rank_at_least(f.rank(&high), s + 1)) }
}

/// Σ λ_w x_w = 0 with constant λ, normalized so that λ_(s+1) = 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCertificate {
    pub lambdas: Vec<Constant>,
    /// Size of Σ λ_w x_w (i64::MAX for an exact zero).
    #[serde(serialize_with = "crate::report::exact_as_null")]
    pub residual: i64,
    /// Size of the derivatives ∂λ_w, same scale.
    #[serde(serialize_with = "crate::report::exact_as_null")]
    pub derivative_residual: i64,
    pub k: usize,
    pub s: usize,
    pub hypotheses: Hypotheses,
    pub backend: String,
    pub threshold: Option<i64>,
}

/// Follows the proof: with λ_(s+1) = 1, solve Σ λ_w X^k_w = 0 over H; the
/// solution is unique by (1) and its derivatives satisfy
/// Σ ∂(λ_w) X^(k−1)_w = 0, so they vanish.
pub fn extract_constant_relation<F: DiffField + ?Sized>(
    f: &F,
    sys: &ProlongationSystem<F::Elem>,
) -> Result<RelationCertificate> {
    let hyp = check_hypotheses(f, sys);
    for (name, v) in [("(1) independence", hyp.h1), ("(2) dependence", hyp.h2)] {
        match v {
            Verdict::Yes => {}
            Verdict::No => return Err(Error::domain(format!("hypothesis {name} fails"))),
            Verdict::Indeterminate => return Err(Error::Indeterminate(format!("hypothesis {name}"))),
        }
    }
    let s = sys.s();
    let columns: Vec<_> = (0..s).map(|w| sys.prolongation(w, sys.k)).collect();
    let target: Vec<_> = sys.prolongation(s, sys.k).iter().map(|e| f.neg(e)).collect();
    let mut lambdas = solve_in_h(f, &columns, &target)?;
    lambdas.push(f.one());

    let mut derivative_residual = i64::MAX;
    let mut consts = Vec::with_capacity(lambdas.len());
    for l in &lambdas {
        derivative_residual = derivative_residual.min(f.residual_val(&f.derive(l)));
        match f.constant_value(l) {
            Some(c) => consts.push(c),
            None => {
                return Err(match f.threshold() {
                    None => Error::domain(format!("coefficient {l:?} is not a constant")),
                    Some(_) => Error::Indeterminate(format!("coefficient {l:?} is not constant at threshold")),
                })
            }
        }
    }
    let mut residual = i64::MAX;
    for i in 0..sys.v() {
        let mut acc = f.zero();
        for (w, c) in consts.iter().enumerate() {
            acc = f.add(&acc, &f.mul(&f.from_constant(c), &sys.vector(w)[i]));
        }
        residual = residual.min(f.residual_val(&acc));
    }
    Ok(RelationCertificate {
        lambdas: consts,
        residual,
        derivative_residual,
        k: sys.k,
        s,
        hypotheses: hyp,
        backend: f.backend().to_string(),
        threshold: f.threshold(),
    })
}

/// Outcome of scanning derivation orders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum Search {
    Found { certificate: RelationCertificate },
    /// No order k ≤ k_max satisfied both hypotheses.
    NotFound { k_max: usize, indeterminate: bool },
}

/// Tries k = 1..=k_max and extracts the relation at the first k where both
/// hypotheses hold.
pub fn search_relation<F: DiffField + ?Sized>(f: &F, vectors: &[Vec<F::Elem>], k_max: usize) -> Result<Search> {
    let full = ProlongationSystem::new(f, vectors.to_vec(), k_max.max(1))?;
    let mut indeterminate = false;
    for k in 1..=k_max {
        let sys = ProlongationSystem { k, derivs: full.derivs.iter().map(|d| d[..=k].to_vec()).collect() };
        let hyp = check_hypotheses(f, &sys);
        if hyp.h1 == Verdict::Indeterminate || hyp.h2 == Verdict::Indeterminate {
            indeterminate = true;
            continue;
        }
        if hyp.h1.is_yes() && hyp.h2.is_yes() {
            match extract_constant_relation(f, &sys) {
                Ok(certificate) => return Ok(Search::Found { certificate }),
                Err(Error::Indeterminate(_)) => indeterminate = true,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Search::NotFound { k_max, indeterminate })
}
