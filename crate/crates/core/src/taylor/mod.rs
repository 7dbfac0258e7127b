//! Truncated Taylor arithmetic and derivative towers of expressions.

mod eval;
mod fd;
mod jet;

pub use eval::{default_precision, eval_derivatives, eval_value, tower_loggamma, EvalError, DEFAULT_ORDER, MAX_ORDER};
pub use fd::{central_weights, fd_oracle, FdEstimate, FD_MAX_ORDER};
pub use jet::{factorial, Jet, JetError};
