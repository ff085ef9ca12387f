//! Closed-form information-theoretic quantities for compound codes.
//!
//! Arithmetic is done in nats; every public function reports bits unless it
//! says otherwise. The identity `F(1/2; D) = −(1 − h(D))` ties the two
//! conventions together and is checked in the tests.

mod bounds;
mod curve;
mod derivatives;
mod entropy;
mod enumerator;
pub mod optimize;
mod overlap;

pub use bounds::{
    channel_condition_holds, channel_exponent_l, channel_exponent_l_tilde, first_moment_exponent, rd_min_rate,
    rd_objective_k, smallest_passing_degree, ChannelCondition, LowerCode, RdObjective, DEFAULT_ENDPOINT_BAND,
    DEFAULT_GRID, REFINE_TOL,
};
pub use curve::{
    channel_curve, enum_curve, format_sig, overlap_curve, rd_ratio_curve, uniform_grid, ExponentCurve, Units,
};
pub use derivatives::{derivative_checks, first_difference, second_difference, DerivativeCheck, DerivativeReport};
pub use entropy::{bernoulli_convolve, binary_entropy, delta_fun, kl_bernoulli};
pub use enumerator::{enum_inner_saddle, ldpc_enum_bound_b};
pub use optimize::Extremum;
pub use overlap::{
    exact_overlap_log_prob, overlap_exponent_f, overlap_lambda_star, SaddleSolution, EXACT_OVERLAP_MAX_N,
};

/// Chernoff objective of the overlap exponent, nats, exposed for oracles.
pub fn overlap_chernoff_objective(t: f64, d: f64, lambda: f64) -> f64 {
    overlap::chernoff_objective(t, d, lambda)
}

/// Quadratic coefficients `(a, b, c)` whose positive root is `e^{λ*}`.
pub fn overlap_quadratic(t: f64, d: f64) -> (f64, f64, f64) {
    overlap::overlap_coefficients(t, d)
}
