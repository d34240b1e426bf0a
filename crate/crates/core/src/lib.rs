//! Exact p-adic series arithmetic for (φ,Γ)-modules over the cyclotomic
//! tower of Q_p: Laurent series with φ, ψ and the Γ-action, the
//! localization maps ι_n into K_n[[t]], a Wronskian constant-relation solver
//! and explicit twist modules.

pub mod context;
pub mod cyclo_eval;
pub mod error;
pub mod operators;
pub mod padic;
pub mod pgmod;
pub mod report;
pub mod series;
pub mod suites;
pub mod wronskian;

pub use context::Context;
pub use error::{Error, Result};
pub use padic::{CycloElement, Padic};
pub use report::CheckReport;
pub use series::LaurentSeries;

/// Primes accepted by the library. Large primes are legal mathematically but
/// the ψ solve and the cyclotomic fields grow like p and p^n.
pub fn is_supported_prime(p: u32) -> bool {
    (2..=97).contains(&p) && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}
