//! Moment envelopes, small- and large-time exponents, moment existence and the function
//! conditions that make finiteness of `E^x f(X_t)` independent of `t`.
//!
//! Unspecified multiplicative constants are never given a value: envelope terms that carry
//! one are flagged `symbolic` and left out of the numeric value.

mod conditions;
mod envelope;
mod existence;
mod exponents;
mod functions;

/// Distance from the index at `∞` within which `κ` takes the `t|log t|` form.
pub const BOUNDARY_TOLERANCE: f64 = 0.05;

pub use conditions::{
    check_condition, Condition, ConditionReport, ConditionWitness, PairGrid, Verdict, GRADIENT_RADIUS,
    HOLDER_TOLERANCE, STABILITY_TOLERANCE,
};
pub use envelope::{envelope, DriftConvention, EnvelopeBound, EnvelopeTerm, Regime};
pub use existence::{moment_exists, tail_integral, MomentExistence, EXISTENCE_GRID_POINTS};
pub use exponents::{
    large_time_exponent, large_time_exponent_with, small_time_exponent, small_time_exponent_with, TimeExponent,
};
pub use functions::MomentFunction;
