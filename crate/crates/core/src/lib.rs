//! Numerical and symbolic tools for completely monotone functions built
//! from Gamma, digamma and elementary functions.

pub mod exprlang;
pub mod families;
pub mod numkernel;
pub mod taylor;
pub mod testers;
pub mod alpha0;
