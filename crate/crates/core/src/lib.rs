//! Bayesian estimation of finite support bounds and tail parameters for the
//! analytical subclasses of the Generalized Pareto distribution.
//!
//! Each family (Pareto, shifted exponential, Power, Uniform) has closed-form
//! conjugate updates from [`SuffStats`], a posterior predictive that
//! extrapolates beyond the observed range, and a non-informative limit.
//! [`pipeline`] ties them together as a peaks-over-threshold workflow and
//! [`oracle`] checks every closed form against brute-force numerics.
//!
//! ```
//! use gpbayes::conjugate_pareto::ParetoPriorL;
//! use gpbayes::{fit, predict, support, ContinuousDist, ModelSpec, SuffStats};
//!
//! let prices: Vec<f64> = (85..=103).chain([80]).map(f64::from).collect();
//! let spec = ModelSpec::ParetoLocation(ParetoPriorL::new(100.0, 1.0, 1.2)?);
//! let post = fit(&spec, &SuffStats::from_data(&prices))?;
//! let bound = support(&post)?.predictive_bound.unwrap();
//! assert!((bound - 76.958_010_5).abs() < 1e-6);
//! let median = predict(&post)?.inverse_cdf(0.5);
//! assert!(median > 80.0);
//! # Ok::<(), gpbayes::Error>(())
//! ```

// `!(x >= l)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conjugate_exponential;
pub mod conjugate_pareto;
pub mod conjugate_power;
pub mod conjugate_uniform;
pub mod distributions;
pub mod error;
pub mod oracle;
pub mod pipeline;
pub mod posterior;
pub mod predictive;
pub mod quadrature;
pub mod special;
pub mod suffstats;

pub use distributions::{
    gev_cdf, ContinuousDist, Gamma, GevParams, GpMapping, GpParams, LogPower, Lomax, Orientation,
    Pareto, Power, ShiftedExp, SubclassParams, Uniform,
};
pub use error::{Error, Result};
pub use posterior::GammaPosterior;
pub use predictive::{Link, Predictive, TransformedPareto, Trapezoid};
pub use suffstats::SuffStats;
pub use pipeline::{
    fit, holdout_log_predictive, pot, predict, select_threshold, sequential_update, support,
    Case, DataView, Family, ModelSpec, Posterior, SupportReport,
};
