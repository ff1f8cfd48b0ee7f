//! Conjugate updates for the shifted exponential `ShiftedExp(α, l)`: unknown
//! location `l`, unknown rate `α`, or both. Locations may be negative.

use serde::{Deserialize, Serialize};

use crate::distributions::{LogPower, ShiftedExp};
use crate::error::{ensure, param, Error, Result};
use crate::posterior::{check_pseudocount, extrapolation_ratio, improper, GammaPosterior};
use crate::predictive::{Link, Predictive, TransformedPareto};
use crate::suffstats::SuffStats;

fn finite(name: &str, v: f64) -> Result<()> {
    ensure(v.is_finite(), || param(format!("{name} must be finite, got {v}")))
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure(v > 0.0 && v.is_finite(), || {
        param(format!("{name} must be positive and finite, got {v}"))
    })
}

fn check_data_finite(stats: &SuffStats) -> Result<()> {
    ensure(stats.sum.is_finite(), || {
        Error::Domain("the exponential model requires finite data".into())
    })
}

/// Prior `LogPower(l0, α·n0)` on the location, rate `α` known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpPriorL {
    l0: f64,
    n0: f64,
    alpha: f64,
}

impl ExpPriorL {
    pub fn new(l0: f64, n0: f64, alpha: f64) -> Result<Self> {
        finite("l0", l0)?;
        check_pseudocount(n0)?;
        positive("alpha", alpha)?;
        Ok(ExpPriorL { l0, n0, alpha })
    }

    /// The limit `n0 ↓ 0`, `l0 → ∞`: a flat prior on `l`.
    pub fn noninformative(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(ExpPriorL {
            l0: f64::INFINITY,
            n0: 0.0,
            alpha,
        })
    }

    pub fn is_noninformative(&self) -> bool {
        self.l0.is_infinite()
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Posterior `LogPower(l_n, α(n + n0))` over the location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpLocationPosterior {
    pub alpha: f64,
    pub l_n: f64,
    pub n_eff: f64,
}

impl ExpLocationPosterior {
    pub fn is_improper(&self) -> bool {
        !self.l_n.is_finite() || self.n_eff == 0.0
    }

    pub fn distribution(&self) -> Result<LogPower> {
        if self.is_improper() {
            return Err(improper());
        }
        LogPower::new(self.l_n, self.alpha * self.n_eff)
    }

    /// `ShiftedExp(α, l_n + log(c)/α)`.
    pub fn predictive(&self) -> Result<Predictive> {
        Ok(Predictive::ShiftedExp(ShiftedExp::new(
            self.alpha,
            self.predictive_bound()?,
        )?))
    }

    pub fn predictive_bound(&self) -> Result<f64> {
        if self.is_improper() {
            return Err(improper());
        }
        Ok(self.l_n + extrapolation_ratio(self.n_eff).ln() / self.alpha)
    }

    pub fn as_prior(&self) -> ExpPriorL {
        ExpPriorL {
            l0: self.l_n,
            n0: self.n_eff,
            alpha: self.alpha,
        }
    }
}

pub fn posterior_l(prior: &ExpPriorL, stats: &SuffStats) -> Result<ExpLocationPosterior> {
    check_data_finite(stats)?;
    if stats.is_empty() && prior.n0 == 0.0 && !prior.is_noninformative() {
        return Err(Error::NoInformation(
            "n0 = 0 and no data: the prior carries no information about l".into(),
        ));
    }
    Ok(ExpLocationPosterior {
        alpha: prior.alpha,
        l_n: stats.min.map_or(prior.l0, |m| m.min(prior.l0)),
        n_eff: stats.count() + prior.n0,
    })
}

/// Prior `Γ(n0, n0(μ0 − l))` on the rate, location `l` known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpPriorAlpha {
    mu0: f64,
    n0: f64,
    l: f64,
}

impl ExpPriorAlpha {
    pub fn new(mu0: f64, n0: f64, l: f64) -> Result<Self> {
        finite("mu0", mu0)?;
        check_pseudocount(n0)?;
        finite("l", l)?;
        ensure(mu0 > l, || {
            param(format!("mu0 must exceed the location l, got mu0 = {mu0}, l = {l}"))
        })?;
        Ok(ExpPriorAlpha { mu0, n0, l })
    }

    /// The limit `n0 ↓ 0`: `p(α) ∝ 1/α`.
    pub fn noninformative(l: f64) -> Result<Self> {
        finite("l", l)?;
        Ok(ExpPriorAlpha { mu0: l, n0: 0.0, l })
    }

    pub fn is_noninformative(&self) -> bool {
        self.n0 == 0.0 && self.mu0 == self.l
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn l(&self) -> f64 {
        self.l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpRatePosterior {
    pub l: f64,
    pub gamma: GammaPosterior,
}

impl ExpRatePosterior {
    /// Pooled mean `μ_n = l + B/A`.
    pub fn mu_n(&self) -> f64 {
        self.l + self.gamma.rate / self.gamma.shape
    }

    /// `x + B − l ~ Pareto(A, B)`, a shifted Lomax.
    pub fn predictive(&self) -> Result<Predictive> {
        if self.gamma.is_improper() {
            return Err(improper());
        }
        let GammaPosterior { shape, rate } = self.gamma;
        Ok(Predictive::TransformedPareto(TransformedPareto::new(
            shape,
            rate,
            Link::Shift {
                anchor: self.l,
                offset: rate,
            },
        )?))
    }

    pub fn as_prior(&self) -> ExpPriorAlpha {
        ExpPriorAlpha {
            mu0: if self.gamma.is_improper() { self.l } else { self.mu_n() },
            n0: self.gamma.shape,
            l: self.l,
        }
    }
}

pub fn posterior_alpha(prior: &ExpPriorAlpha, stats: &SuffStats) -> Result<ExpRatePosterior> {
    check_data_finite(stats)?;
    if let Some(m) = stats.min {
        ensure(m >= prior.l, || {
            Error::Domain(format!(
                "datum {m} lies below the known location l = {}",
                prior.l
            ))
        })?;
    }
    let n = stats.count();
    let shape = prior.n0 + n;
    if shape == 0.0 {
        return if prior.is_noninformative() {
            Ok(ExpRatePosterior {
                l: prior.l,
                gamma: GammaPosterior { shape, rate: 0.0 },
            })
        } else {
            Err(Error::NoInformation("n0 = 0 and no data".into()))
        };
    }
    let rate = prior.n0 * (prior.mu0 - prior.l) + (stats.sum - n * prior.l);
    ensure(rate > 0.0, || {
        Error::Degenerate(format!(
            "the pooled mean equals the location l; the Gamma rate is {rate}"
        ))
    })?;
    Ok(ExpRatePosterior {
        l: prior.l,
        gamma: GammaPosterior { shape, rate },
    })
}

/// Product prior `LogPower(l | l0, α·n0) · Γ(α | n0', n0'·μ0)`.
///
/// The rate block has no `−l` term; this differs from the single-parameter
/// rate prior on purpose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpJointPrior {
    l0: f64,
    n0: f64,
    mu0: f64,
    n0p: f64,
}

impl ExpJointPrior {
    pub fn new(l0: f64, n0: f64, mu0: f64, n0p: f64) -> Result<Self> {
        finite("l0", l0)?;
        check_pseudocount(n0)?;
        finite("mu0", mu0)?;
        check_pseudocount(n0p)?;
        Ok(ExpJointPrior { l0, n0, mu0, n0p })
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn n0p(&self) -> f64 {
        self.n0p
    }
}

/// Factorized posterior `LogPower(l | l_n, α(n+n0)) · Γ(α | A, B)` with
/// `A = n + n0'` and `B = (n + n0')·μ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpJointPosterior {
    pub l_n: f64,
    pub n_eff: f64,
    pub gamma: GammaPosterior,
}

impl ExpJointPosterior {
    pub fn conditional(&self, alpha: f64) -> Result<LogPower> {
        LogPower::new(self.l_n, alpha * self.n_eff)
    }

    pub fn mu_n(&self) -> f64 {
        self.gamma.rate / self.gamma.shape
    }

    /// `x + B − l_n ~ Pareto(A, c^{1/A}·B)`.
    pub fn predictive(&self) -> Result<Predictive> {
        let GammaPosterior { shape, rate } = self.gamma;
        let scale = extrapolation_ratio(self.n_eff).powf(1.0 / shape) * rate;
        Ok(Predictive::TransformedPareto(TransformedPareto::new(
            shape,
            scale,
            Link::Shift {
                anchor: self.l_n,
                offset: rate,
            },
        )?))
    }

    /// `x^{−*} = l_n + B(c^{1/A} − 1)`.
    pub fn predictive_bound(&self) -> f64 {
        let GammaPosterior { shape, rate } = self.gamma;
        self.l_n + rate * (extrapolation_ratio(self.n_eff).powf(1.0 / shape) - 1.0)
    }

    pub fn as_prior(&self) -> ExpJointPrior {
        ExpJointPrior {
            l0: self.l_n,
            n0: self.n_eff,
            mu0: self.mu_n(),
            n0p: self.gamma.shape,
        }
    }
}

pub fn posterior_joint(prior: &ExpJointPrior, stats: &SuffStats) -> Result<ExpJointPosterior> {
    check_data_finite(stats)?;
    let n = stats.count();
    let (n_eff, shape) = (n + prior.n0, n + prior.n0p);
    ensure(n_eff > 0.0 && shape > 0.0, || {
        Error::NoInformation("both prior pseudocounts must be positive when there is no data".into())
    })?;
    let rate = prior.n0p * prior.mu0 + stats.sum;
    ensure(rate > 0.0, || {
        Error::InvalidRegime(format!(
            "the pooled mean mu_n = {} must be positive (Gamma rate {rate} <= 0); \
             shift the data by a known offset so their mean is positive",
            rate / shape
        ))
    })?;
    Ok(ExpJointPosterior {
        l_n: stats.min.map_or(prior.l0, |m| m.min(prior.l0)),
        n_eff,
        gamma: GammaPosterior { shape, rate },
    })
}
