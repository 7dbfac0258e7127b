//! Arbitrary-precision scalar kernel: Gamma-family functions, Bernoulli
//! numbers and polynomials, the `F(a, b, x)` series and a Frullani quadrature.

mod asymptotic;
mod bernoulli;
mod gamma;
mod quad;
mod real;
mod series;

pub use asymptotic::{psi_asymptotic, PsiExpansion, ASYMPTOTIC_MIN_X};
pub use bernoulli::{bernoulli_number, bernoulli_poly, bernoulli_poly_rational};
pub use gamma::{digamma, euler_gamma, log_gamma, polygamma, polygamma_tower};
pub use quad::frullani_quad;
pub use real::{Real, GUARD_BITS, MIN_PRECISION};
pub use series::f_series;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },
    #[error("{op} refused: {reason}")]
    Refused { op: &'static str, reason: String },
    #[error("invalid argument to {op}: {reason}")]
    InvalidArgument { op: &'static str, reason: String },
}
