use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::max_precision;

/// Working parameters shared by every series computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Context {
    pub p: u32,
    /// Relative p-adic precision N of freshly created coefficients.
    pub prec: u32,
    /// X-adic truncation order M.
    pub trunc: i64,
    /// t-adic truncation order of Tate series.
    pub t_trunc: usize,
    /// Deepest pole accepted by ψ and by negative-power substitution.
    pub neg_depth: u32,
    /// Valuation at or above which a series pivot counts as zero.
    pub rank_threshold: i64,
}

impl Context {
    pub fn new(p: u32, prec: u32, trunc: i64) -> Result<Self> {
        let ctx = Context {
            p,
            prec,
            trunc,
            t_trunc: 8,
            neg_depth: 8,
            rank_threshold: prec as i64 - 4,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if !crate::is_supported_prime(self.p) {
            return Err(Error::domain(format!("unsupported prime {}", self.p)));
        }
        if self.prec == 0 || self.prec > max_precision(self.p) {
            return Err(Error::domain(format!(
                "precision {} outside 1..={} for p={}",
                self.prec,
                max_precision(self.p),
                self.p
            )));
        }
        if self.trunc < 1 || self.trunc > 4096 {
            return Err(Error::domain(format!("truncation {} outside 1..=4096", self.trunc)));
        }
        if self.t_trunc < 1 || self.t_trunc > 64 {
            return Err(Error::domain(format!("t-truncation {} outside 1..=64", self.t_trunc)));
        }
        if self.neg_depth > 64 {
            return Err(Error::domain("negative depth above 64"));
        }
        if self.rank_threshold < 1 {
            return Err(Error::domain("rank threshold must be positive"));
        }
        Ok(())
    }

    pub fn with_trunc(&self, trunc: i64) -> Self {
        Context { trunc, ..self.clone() }
    }
}

impl Default for Context {
    fn default() -> Self {
        Context::new(3, 24, 32).expect("default context is valid")
    }
}
