use pglab_core::{Context, Error, Result};
use serde::{Deserialize, Serialize};

/// Working parameters of a run. Every field has a default, so `{}` is a
/// valid configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub p: u32,
    /// X-adic truncation M.
    pub truncation: i64,
    /// Relative p-adic precision N.
    pub precision: u32,
    /// t-adic truncation M_t of ι_n.
    pub t_truncation: usize,
    pub neg_depth: u32,
    /// Zero threshold τ of the series-backed Wronskian solver; N − 4 when
    /// absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<i64>,
    pub seed: u64,
    /// Random cases per identity in `identities`.
    pub cases: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { p: 3, truncation: 32, precision: 24, t_truncation: 8, neg_depth: 8, tau: None, seed: 1, cases: 100 }
    }
}

impl RunConfig {
    pub fn tau(&self) -> i64 {
        self.tau.unwrap_or(self.precision as i64 - 4)
    }

    /// Rejects non-positive fields and anything the library would refuse.
    pub fn validate(&self) -> Result<()> {
        if self.neg_depth == 0 {
            return Err(Error::domain("neg_depth must be positive"));
        }
        if self.cases == 0 || self.cases > 100_000 {
            return Err(Error::domain("cases must lie in 1..=100000"));
        }
        if self.tau() < 1 {
            return Err(Error::domain("tau must be positive"));
        }
        self.context().map(|_| ())
    }

    pub fn context(&self) -> Result<Context> {
        let ctx = Context {
            p: self.p,
            prec: self.precision,
            trunc: self.truncation,
            t_trunc: self.t_truncation,
            neg_depth: self.neg_depth,
            rank_threshold: self.tau(),
        };
        ctx.validate()?;
        Ok(ctx)
    }
}

/// Parses and validates a configuration file.
pub fn parse_run_config(json: &str) -> Result<RunConfig> {
    let c: RunConfig = serde_json::from_str(json).map_err(|e| Error::parse(e.column().saturating_sub(1), e.to_string()))?;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = parse_run_config("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.tau(), 20);
        let c = parse_run_config(r#"{"p": 5, "precision": 20, "tau": 12}"#).unwrap();
        assert_eq!((c.p, c.precision, c.tau()), (5, 20, 12));
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            r#"{"p": 4}"#,
            r#"{"p": 3, "precision": 0}"#,
            r#"{"truncation": 0}"#,
            r#"{"t_truncation": 0}"#,
            r#"{"neg_depth": 0}"#,
            r#"{"cases": 0}"#,
            r#"{"tau": 0}"#,
            r#"{"precision": 40}"#,
            r#"{"unknown": 1}"#,
            r#"{"p": -3}"#,
            "[",
        ] {
            assert!(parse_run_config(bad).is_err(), "{bad}");
        }
    }
}
