//! Q_p with tracked relative precision, and the cyclotomic fields K_n.

mod cyclo;
mod number;

pub use cyclo::CycloElement;
pub use number::{binom_int, binom_zp, binomial_lift_loss, log_oneplus, max_precision, Padic, VAL_INF};

pub(crate) use number::vp_i128;
