//! Complex log-Gamma, digamma, Riemann and Hurwitz zeta with derivatives.

mod bernoulli;
mod gamma;
mod params;
mod phase;
mod zeta;

pub use bernoulli::BernoulliTable;
pub use gamma::{digamma, log_gamma};
pub use params::{minimum_terms, EvalConfig, EvalParams, DEFAULT_CORRECTIONS, DEFAULT_TOL};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_deriv, riemann_zeta, riemann_zeta_deriv};

pub(crate) use zeta::{chi4_difference, zeta_regular};
