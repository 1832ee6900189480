//! Optimal FDR/FNR tradeoff for the two-group model: theory curves, oracle
//! and data-driven multiple-testing rules, and error-rate metrics.
//!
//! The numerical code is generic over the scalar type. The geometry
//! ([`gcm`], [`estimators::grenander`]) accepts any [`HullScalar`], including
//! exact `Rational64`; the statistical code needs a floating [`Real`]
//! (`f32` or `f64`). Aliases for the common instantiations are defined below.

// NaN-rejecting checks are written as `!(x > 0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod gcm;
pub mod metrics;
pub mod model;
pub mod oracle_curves;
pub mod procedures;
pub mod scalar;

pub use error::{Error, Result};
pub use estimators::{
    a_hat, b_hat, b_star_hat_knots, grenander, kde, lfdr_hat, silverman_bandwidth, y_star_hat, DensityEstimate,
    EmpiricalLfdr, GrenanderFit, KdeFit, LfdrHatVector, NullDensity, OracleDensity,
};
pub use gcm::{gcm_of_points, Bracket, KnotCurve};
pub use metrics::{aggregate, exceedance, summarize, AggregateReport, Metric, TrialSummary};
pub use model::{Component, DensityTable, Family, LabeledSample, MixtureModel};
pub use oracle_curves::{
    bh_limit_threshold, default_grid, fnr_star_curve, gaussian_parametric, interpolate_curve, randomization_split,
    uniform_grid, LfdrLaw, NpRule, NpThreshold, Split, TradeoffCurve,
};
pub use procedures::{
    bh_oracle, data_driven, data_driven_from_w, estimate_lfdr, np_oracle, oracle_randomized,
    oracle_randomized_with_split, p_values, sun_cai, trivial_randomized, Branch, DecisionVector, DensityEstimator,
    PreparedProcedure, ProcedureKind, ProcedureSpec, RandomizationTrace, Setting,
};
pub use scalar::{HullScalar, Real};

/// Exact rational scalar for hull and Grenander checks.
pub type Exact = num_rational::Rational64;

pub type MixtureModelF64 = MixtureModel<f64>;
pub type MixtureModelF32 = MixtureModel<f32>;
pub type LfdrLawF64 = LfdrLaw<f64>;
pub type LfdrLawF32 = LfdrLaw<f32>;
pub type TradeoffCurveF64 = TradeoffCurve<f64>;
pub type KnotCurveF64 = KnotCurve<f64>;
pub type KnotCurveExact = KnotCurve<Exact>;
pub type GrenanderFitF64 = GrenanderFit<f64>;
pub type GrenanderFitExact = GrenanderFit<Exact>;
pub type DecisionVectorF64 = DecisionVector<f64>;
pub type ProcedureSpecF64 = ProcedureSpec<f64>;
