//! Numerical verdicts: grid sign tests, strictness margins, witness search
//! and the Taylor-radius probe.

mod grid;
mod radius;
mod sign;
mod witness;

pub use grid::{build_grid, GridSpec};
pub use radius::{radius_probe, RadiusEstimate, RadiusStatus, RADIUS_SLACK};
pub use sign::{point_cells, sign_test, strictness_margins, Cell, Mode, SignConfig, SignReport, SkippedPoint, TestError, Verdict, NOISE_PROBE_BITS};
pub use witness::{witness_search, Witness, WitnessConfig};
