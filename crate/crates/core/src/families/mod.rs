//! Parametric families, exact classifiers and builders.

mod asym;
mod builders;
mod classify;
mod instance;
mod overx;

pub use asym::{
    asym_error_exponent, asym_psi_gap, companion_coefficient, gap_coefficient, geometric_points, loglog_slope, psi_asymptotic_slope,
    psi_gap_direct, psi_gap_slopes, PsiGapExpansion, SlopeFit,
};
pub use builders::{build_gamma_power_mean, build_power_mean, kernel_phi, vogt_expr, PowerMean};
pub use classify::{classify_gamma_ratio_log, classify_gamma_ratio_power, classify_linfrac, classify_psi_gap, ClassStatus, ClassVerdict};
pub use instance::{parse_family_json, FamilyError, FamilyFile, FamilyInstance, FAMILY_NAMES};
pub use overx::{phi_over_x_jet, phi_over_x_sum_derivative_check};
