//! Conjugate updates for `Power(u, α)` on `(0, u)`: unknown upper bound `u`,
//! unknown shape `α`, or both.
//!
//! A lower bound of negated data is estimated by [`revert`]ing it first, and
//! a Pareto problem maps here through [`invert`], since `1/x` of
//! `Pareto(α, l)` data follows `Power(1/l, α)`.

use serde::{Deserialize, Serialize};

use crate::distributions::{Pareto, Power};
use crate::error::{ensure, param, Error, Result};
use crate::posterior::{check_pseudocount, extrapolation_ratio, improper, GammaPosterior};
use crate::predictive::{Link, Predictive, TransformedPareto};
use crate::special::ln_upper_inc_gamma;
use crate::suffstats::SuffStats;

const MODEL: &str = "the Power model";

fn positive(name: &str, v: f64) -> Result<()> {
    ensure(v > 0.0 && v.is_finite(), || {
        param(format!("{name} must be positive and finite, got {v}"))
    })
}

fn log_ratio_below_one(g0: f64) -> Result<f64> {
    ensure(g0 > 0.0 && g0 < 1.0, || {
        param(format!("g0 must lie in (0,1) so the prior rate is positive, got {g0}"))
    })?;
    Ok(g0.ln())
}

/// Negates every value; its own inverse.
pub fn revert(data: &[f64]) -> Vec<f64> {
    data.iter().map(|x| -x).collect()
}

/// Reciprocal of every value; data must be strictly positive.
pub fn invert(data: &[f64]) -> Result<Vec<f64>> {
    data.iter()
        .enumerate()
        .map(|(i, &x)| {
            ensure(x > 0.0 && x.is_finite(), || {
                Error::Domain(format!(
                    "inversion needs strictly positive finite data, value {x} at index {i}"
                ))
            })?;
            Ok(1.0 / x)
        })
        .collect()
}

/// Prior `Pareto(α·n0, u0)` on the upper bound, shape `α` known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPriorU {
    u0: f64,
    n0: f64,
    alpha: f64,
}

impl PowerPriorU {
    pub fn new(u0: f64, n0: f64, alpha: f64) -> Result<Self> {
        positive("u0", u0)?;
        check_pseudocount(n0)?;
        positive("alpha", alpha)?;
        Ok(PowerPriorU { u0, n0, alpha })
    }

    /// The limit `n0 ↓ 0`, `u0 → 0`: `p(u) ∝ 1/u`.
    pub fn noninformative(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(PowerPriorU {
            u0: 0.0,
            n0: 0.0,
            alpha,
        })
    }

    pub fn is_noninformative(&self) -> bool {
        self.u0 == 0.0
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Posterior `Pareto(α(n + n0), u_n)` over the upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBoundPosterior {
    pub alpha: f64,
    pub u_n: f64,
    pub n_eff: f64,
}

impl PowerBoundPosterior {
    pub fn is_improper(&self) -> bool {
        self.u_n == 0.0 || self.n_eff == 0.0
    }

    pub fn distribution(&self) -> Result<Pareto> {
        if self.is_improper() {
            return Err(improper());
        }
        Pareto::new(self.alpha * self.n_eff, self.u_n)
    }

    /// `Power(c^{−1/α}·u_n, α)`.
    pub fn predictive(&self) -> Result<Predictive> {
        Ok(Predictive::Power(Power::new(self.predictive_bound()?, self.alpha)?))
    }

    /// Extrapolated upper bound `x^{*}`.
    pub fn predictive_bound(&self) -> Result<f64> {
        if self.is_improper() {
            return Err(improper());
        }
        Ok(self.u_n / extrapolation_ratio(self.n_eff).powf(1.0 / self.alpha))
    }

    pub fn as_prior(&self) -> PowerPriorU {
        PowerPriorU {
            u0: self.u_n,
            n0: self.n_eff,
            alpha: self.alpha,
        }
    }
}

pub fn posterior_u(prior: &PowerPriorU, stats: &SuffStats) -> Result<PowerBoundPosterior> {
    stats.require_positive(MODEL)?;
    if stats.is_empty() && prior.n0 == 0.0 && !prior.is_noninformative() {
        return Err(Error::NoInformation(
            "n0 = 0 and no data: the prior carries no information about u".into(),
        ));
    }
    Ok(PowerBoundPosterior {
        alpha: prior.alpha,
        u_n: stats.max.map_or(prior.u0, |m| m.max(prior.u0)),
        n_eff: stats.count() + prior.n0,
    })
}

/// Prior `Γ(n0, −n0·log g0)` on the shape, upper bound `u` known. Here `g0`
/// is a geometric-mean ratio to `u`, so it lies in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPriorAlpha {
    ln_g0: f64,
    n0: f64,
    u: f64,
}

impl PowerPriorAlpha {
    pub fn new(g0: f64, n0: f64, u: f64) -> Result<Self> {
        let ln_g0 = log_ratio_below_one(g0)?;
        check_pseudocount(n0)?;
        positive("u", u)?;
        Ok(PowerPriorAlpha { ln_g0, n0, u })
    }

    /// The limit `n0 ↓ 0`: `p(α) ∝ 1/α`.
    pub fn noninformative(u: f64) -> Result<Self> {
        positive("u", u)?;
        Ok(PowerPriorAlpha {
            ln_g0: 0.0,
            n0: 0.0,
            u,
        })
    }

    pub fn is_noninformative(&self) -> bool {
        self.n0 == 0.0 && self.ln_g0 == 0.0
    }

    pub fn g0(&self) -> f64 {
        self.ln_g0.exp()
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn u(&self) -> f64 {
        self.u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerShapePosterior {
    pub u: f64,
    pub gamma: GammaPosterior,
}

impl PowerShapePosterior {
    /// `log g_n = −B/A`, with `g_n` the pooled geometric ratio to `u`.
    pub fn ln_g_n(&self) -> f64 {
        -self.gamma.rate / self.gamma.shape
    }

    /// `log(u/x) + B ~ Pareto(A, B)` on `0 < x < u`.
    pub fn predictive(&self) -> Result<Predictive> {
        if self.gamma.is_improper() {
            return Err(improper());
        }
        let GammaPosterior { shape, rate } = self.gamma;
        Ok(Predictive::TransformedPareto(TransformedPareto::new(
            shape,
            rate,
            Link::NegLog {
                anchor: self.u,
                offset: rate,
            },
        )?))
    }

    pub fn as_prior(&self) -> PowerPriorAlpha {
        PowerPriorAlpha {
            ln_g0: if self.gamma.is_improper() { 0.0 } else { self.ln_g_n() },
            n0: self.gamma.shape,
            u: self.u,
        }
    }
}

pub fn posterior_alpha(prior: &PowerPriorAlpha, stats: &SuffStats) -> Result<PowerShapePosterior> {
    let sum_log = stats.require_sum_log(MODEL)?;
    if let Some(m) = stats.max {
        ensure(m < prior.u, || {
            Error::Domain(format!(
                "datum {m} is not below the known upper bound u = {}",
                prior.u
            ))
        })?;
    }
    let n = stats.count();
    let shape = prior.n0 + n;
    if shape == 0.0 {
        return if prior.is_noninformative() {
            Ok(PowerShapePosterior {
                u: prior.u,
                gamma: GammaPosterior { shape, rate: 0.0 },
            })
        } else {
            Err(Error::NoInformation("n0 = 0 and no data".into()))
        };
    }
    let rate = -prior.n0 * prior.ln_g0 + (n * prior.u.ln() - sum_log);
    ensure(rate > 0.0, || {
        Error::Degenerate(format!("the Gamma rate {rate} is not positive"))
    })?;
    Ok(PowerShapePosterior {
        u: prior.u,
        gamma: GammaPosterior { shape, rate },
    })
}

/// Product prior `Pareto(u | α·n0, u0) · Γ(α | n0', −n0'·log g0)`, with `g0`
/// an absolute geometric mean in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerJointPrior {
    u0: f64,
    n0: f64,
    ln_g0: f64,
    n0p: f64,
}

impl PowerJointPrior {
    pub fn new(u0: f64, n0: f64, g0: f64, n0p: f64) -> Result<Self> {
        positive("u0", u0)?;
        check_pseudocount(n0)?;
        let ln_g0 = log_ratio_below_one(g0)?;
        check_pseudocount(n0p)?;
        Ok(PowerJointPrior { u0, n0, ln_g0, n0p })
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn g0(&self) -> f64 {
        self.ln_g0.exp()
    }

    pub fn n0p(&self) -> f64 {
        self.n0p
    }
}

/// Factorized posterior `Pareto(u | α(n+n0), u_n) · Γ(α | A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerJointPosterior {
    pub u_n: f64,
    pub n_eff: f64,
    pub gamma: GammaPosterior,
}

impl PowerJointPosterior {
    pub fn conditional(&self, alpha: f64) -> Result<Pareto> {
        Pareto::new(alpha * self.n_eff, self.u_n)
    }

    pub fn ln_g_n(&self) -> f64 {
        -self.gamma.rate / self.gamma.shape
    }

    fn y_star(&self) -> f64 {
        extrapolation_ratio(self.n_eff).powf(1.0 / self.gamma.shape) * self.gamma.rate
    }

    /// `log(u_n/x) + B ~ Pareto(A, c^{1/A}·B)`.
    pub fn predictive(&self) -> Result<Predictive> {
        let GammaPosterior { shape, rate } = self.gamma;
        Ok(Predictive::TransformedPareto(TransformedPareto::new(
            shape,
            self.y_star(),
            Link::NegLog {
                anchor: self.u_n,
                offset: rate,
            },
        )?))
    }

    /// `x^{*} = u_n·exp(−B(c^{1/A} − 1))`.
    pub fn predictive_bound(&self) -> f64 {
        self.u_n * (self.gamma.rate - self.y_star()).exp()
    }

    /// Predictive mean `c·u_n·A·B^A·e^B·Γ(−A, y*)` with `y* = c^{1/A}·B`,
    /// evaluated in log space.
    pub fn expected_value(&self) -> Result<f64> {
        let GammaPosterior { shape, rate } = self.gamma;
        let c = extrapolation_ratio(self.n_eff);
        let ln = self.u_n.ln() + shape.ln() + c.ln() + shape * rate.ln() + rate
            + ln_upper_inc_gamma(-shape, self.y_star())?;
        Ok(ln.exp())
    }

    pub fn as_prior(&self) -> PowerJointPrior {
        PowerJointPrior {
            u0: self.u_n,
            n0: self.n_eff,
            ln_g0: self.ln_g_n(),
            n0p: self.gamma.shape,
        }
    }
}

pub fn posterior_joint(prior: &PowerJointPrior, stats: &SuffStats) -> Result<PowerJointPosterior> {
    let sum_log = stats.require_sum_log(MODEL)?;
    let n = stats.count();
    let (n_eff, shape) = (n + prior.n0, n + prior.n0p);
    ensure(n_eff > 0.0 && shape > 0.0, || {
        Error::NoInformation("both prior pseudocounts must be positive when there is no data".into())
    })?;
    let rate = -(prior.n0p * prior.ln_g0 + sum_log);
    ensure(rate > 0.0, || {
        Error::InvalidRegime(format!(
            "the pooled geometric mean g_n = {:.6e} must be below 1 (Gamma rate {rate} <= 0); \
             divide the data by a known scale so their geometric mean is below 1",
            (-rate / shape).exp()
        ))
    })?;
    Ok(PowerJointPosterior {
        u_n: stats.max.map_or(prior.u0, |m| m.max(prior.u0)),
        n_eff,
        gamma: GammaPosterior { shape, rate },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugate_pareto::{posterior_l, ParetoPriorL};
    use crate::distributions::ContinuousDist;
    use crate::oracle::total_mass;
    use crate::quadrature::Quadrature;
    use std::f64::consts::LN_2;


    #[test]
    fn bound_update_and_predictive() {
        let stats = SuffStats::from_data(&[1.0, 2.0, 3.0]);
        let post = posterior_u(&PowerPriorU::noninformative(1.0).unwrap(), &stats).unwrap();
        let d = post.distribution().unwrap();
        assert_eq!((d.alpha(), d.l()), (3.0, 3.0));
        let pred = post.predictive().unwrap();
        assert!((post.predictive_bound().unwrap() - 4.0).abs() < 1e-14);
        assert!((pred.pdf(1.0) - 0.25).abs() < 1e-14);
        let prior = PowerPriorU::new(5.0, 2.0, 1.5).unwrap();
        let empty = posterior_u(&prior, &SuffStats::default()).unwrap();
        assert_eq!((empty.u_n, empty.n_eff), (5.0, 2.0));
        assert!(posterior_u(&prior, &SuffStats::from_data(&[0.0])).is_err());
        let improper = posterior_u(&PowerPriorU::noninformative(1.0).unwrap(), &SuffStats::default()).unwrap();
        assert!(matches!(improper.predictive(), Err(Error::Improper(_))));
    }

    #[test]
    fn bound_predictive_matches_mixture() {
        let post = posterior_u(
            &PowerPriorU::new(2.0, 1.0, 2.5).unwrap(),
            &SuffStats::from_data(&[1.0, 2.5, 0.4]),
        )
        .unwrap();
        let pred = post.predictive().unwrap();
        let upost = post.distribution().unwrap();
        let q = Quadrature::default();
        for i in 1..=50 {
            let x = post.u_n * i as f64 / 50.0;
            let mix = q
                .integrate(
                    |u| Power::new(u, 2.5).unwrap().pdf(x) * upost.pdf(u),
                    post.u_n,
                    f64::INFINITY,
                )
                .value;
            assert!((mix - pred.pdf(x)).abs() < 1e-8 * pred.pdf(x), "x={x}");
        }
    }

    #[test]
    fn shape_update_and_predictive() {
        let stats = SuffStats::from_data(&[(-1f64).exp(), (-2f64).exp()]);
        let post = posterior_alpha(&PowerPriorAlpha::noninformative(1.0).unwrap(), &stats).unwrap();
        assert_eq!(post.gamma.shape, 2.0);
        assert!((post.gamma.rate - 3.0).abs() < 1e-15);
        let exact = PowerShapePosterior {
            u: 1.0,
            gamma: GammaPosterior { shape: 2.0, rate: 3.0 },
        };
        let pred = exact.predictive().unwrap();
        assert!((pred.pdf(1.0 - 1e-13) - 2.0 / 3.0).abs() < 1e-10);
        assert_eq!(pred.cdf(1.0), 1.0);
        assert!((total_mass(&pred) - 1.0).abs() < 1e-8);
        let prior = PowerPriorAlpha::new(0.5, 2.0, 1.0).unwrap();
        let empty = posterior_alpha(&prior, &SuffStats::default()).unwrap();
        assert_eq!(empty.gamma.shape, 2.0);
        assert!((empty.gamma.rate - 2.0 * LN_2).abs() < 1e-15);
        assert!(posterior_alpha(&prior, &SuffStats::from_data(&[1.0])).is_err());
        assert!(posterior_alpha(&prior, &SuffStats::from_data(&[-0.5])).is_err());
    }

    #[test]
    fn joint_plug_in_and_bound() {
        let prior = PowerJointPrior::new(1.0, 1.0, 0.5, 1.0).unwrap();
        let post = posterior_joint(&prior, &SuffStats::from_data(&[0.5, 0.25])).unwrap();
        assert_eq!(post.u_n, 1.0);
        assert_eq!(post.gamma.shape, 3.0);
        assert!((post.gamma.rate - 4.0 * LN_2).abs() < 1e-15);
        assert!((post.ln_g_n() - (-4.0 / 3.0) * LN_2).abs() < 1e-15);
        let bound = post.predictive_bound();
        assert!((bound - (-4.0 * LN_2 * (0.75f64.cbrt() - 1.0)).exp()).abs() < 1e-14);
        assert!((bound - 1.289).abs() < 1e-3);
        let pred = post.predictive().unwrap();
        assert!((pred.support().1 - bound).abs() < 1e-14);
        assert!((total_mass(&pred) - 1.0).abs() < 1e-8);
        let max = pred.sample_n(20_000, 5).into_iter().fold(0.0, f64::max);
        assert!(max <= bound && bound - max < 0.01);
        let empty = posterior_joint(&prior, &SuffStats::default()).unwrap();
        assert_eq!(empty.u_n, 1.0);
        assert!((empty.gamma.rate - LN_2).abs() < 1e-15);
        assert!(matches!(
            posterior_joint(&prior, &SuffStats::from_data(&[5.0, 7.0])),
            Err(Error::InvalidRegime(_))
        ));
    }

    #[test]
    fn expected_value_matches_quadrature() {
        let post = posterior_joint(
            &PowerJointPrior::new(1.0, 1.0, 0.5, 1.0).unwrap(),
            &SuffStats::from_data(&[0.5, 0.25]),
        )
        .unwrap();
        let pred = post.predictive().unwrap();
        let ev = post.expected_value().unwrap();
        let quad = Quadrature::default()
            .integrate(|x| x * pred.pdf(x), 0.0, post.predictive_bound())
            .value;
        assert!(((ev - quad) / quad).abs() < 1e-6, "{ev} vs {quad}");
        assert!(ev < post.predictive_bound());
    }

    #[test]
    fn revert_and_invert() {
        let data = [-1.0, -2.0, -3.0];
        assert_eq!(revert(&revert(&data)), data.to_vec());
        let post = posterior_u(
            &PowerPriorU::noninformative(1.0).unwrap(),
            &SuffStats::from_data(&revert(&data)),
        )
        .unwrap();
        assert_eq!(post.u_n, 3.0);
        assert_eq!(-post.u_n, -3.0);
        assert!(invert(&[1.0, 0.0]).is_err());
        assert_eq!(invert(&[2.0, 4.0]).unwrap(), vec![0.5, 0.25]);
    }

    #[test]
    fn duality_with_pareto_location() {
        let data = [1.5, 2.0, 0.7, 3.3];
        let power = posterior_u(&PowerPriorU::new(2.0, 1.0, 1.7).unwrap(), &SuffStats::from_data(&data)).unwrap();
        let pareto = posterior_l(
            &ParetoPriorL::new(0.5, 1.0, 1.7).unwrap(),
            &SuffStats::from_data(&invert(&data).unwrap()),
        )
        .unwrap();
        assert!((power.u_n - 1.0 / pareto.l_n).abs() < 1e-12 * power.u_n);
        assert_eq!(power.n_eff, pareto.n_eff);
    }
}
