//! Conjugate updates for `Pareto(α, l)`: unknown lower bound `l`, unknown
//! shape `α`, or both.

use serde::{Deserialize, Serialize};

use crate::distributions::Power;
use crate::error::{ensure, param, Error, Result};
use crate::posterior::{check_pseudocount, extrapolation_ratio, improper, GammaPosterior};
use crate::predictive::{Link, Predictive, TransformedPareto};
use crate::suffstats::SuffStats;

const MODEL: &str = "the Pareto model";

fn positive(name: &str, v: f64) -> Result<()> {
    ensure(v > 0.0 && v.is_finite(), || {
        param(format!("{name} must be positive and finite, got {v}"))
    })
}

fn log_ratio_above_one(g0: f64) -> Result<f64> {
    ensure(g0 > 1.0 && g0.is_finite(), || {
        param(format!("g0 must exceed 1 so the prior rate is positive, got {g0}"))
    })?;
    Ok(g0.ln())
}

/// Prior `Power(l0, α·n0)` on the lower bound, shape `α` known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoPriorL {
    l0: f64,
    n0: f64,
    alpha: f64,
}

impl ParetoPriorL {
    pub fn new(l0: f64, n0: f64, alpha: f64) -> Result<Self> {
        positive("l0", l0)?;
        check_pseudocount(n0)?;
        positive("alpha", alpha)?;
        Ok(ParetoPriorL { l0, n0, alpha })
    }

    /// The limit `n0 → 1/α`, `l0 → ∞`: the scale-invariant prior `p(l) ∝ 1/l`.
    pub fn noninformative(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(ParetoPriorL {
            l0: f64::INFINITY,
            n0: 1.0 / alpha,
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

/// Posterior `Power(l_n, α·(n + n0))` over the lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoLocationPosterior {
    pub alpha: f64,
    pub l_n: f64,
    /// `n + n0`
    pub n_eff: f64,
}

impl ParetoLocationPosterior {
    pub fn is_improper(&self) -> bool {
        !self.l_n.is_finite()
    }

    pub fn distribution(&self) -> Result<Power> {
        if self.is_improper() {
            return Err(improper());
        }
        Power::new(self.l_n, self.alpha * self.n_eff)
    }

    /// `Pareto(α, c^{1/α}·l_n)` with `c = (n+n0)/(n+n0+1)`.
    pub fn predictive(&self) -> Result<Predictive> {
        let scale = self.predictive_bound()?;
        Ok(Predictive::Pareto(crate::distributions::Pareto::new(
            self.alpha, scale,
        )?))
    }

    /// Extrapolated lower bound `x^{−*}`.
    pub fn predictive_bound(&self) -> Result<f64> {
        if self.is_improper() {
            return Err(improper());
        }
        Ok(extrapolation_ratio(self.n_eff).powf(1.0 / self.alpha) * self.l_n)
    }

    pub fn as_prior(&self) -> ParetoPriorL {
        ParetoPriorL {
            l0: self.l_n,
            n0: self.n_eff,
            alpha: self.alpha,
        }
    }
}

pub fn posterior_l(prior: &ParetoPriorL, stats: &SuffStats) -> Result<ParetoLocationPosterior> {
    stats.require_positive(MODEL)?;
    if stats.is_empty() && prior.n0 == 0.0 && !prior.is_noninformative() {
        return Err(Error::NoInformation(
            "n0 = 0 and no data: the prior carries no information about l".into(),
        ));
    }
    let l_n = stats.min.map_or(prior.l0, |m| m.min(prior.l0));
    Ok(ParetoLocationPosterior {
        alpha: prior.alpha,
        l_n,
        n_eff: stats.count() + prior.n0,
    })
}

/// Prior `Γ(n0, n0·log g0)` on the shape, lower bound `l` known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoPriorAlpha {
    ln_g0: f64,
    n0: f64,
    l: f64,
}

impl ParetoPriorAlpha {
    pub fn new(g0: f64, n0: f64, l: f64) -> Result<Self> {
        let ln_g0 = log_ratio_above_one(g0)?;
        check_pseudocount(n0)?;
        positive("l", l)?;
        Ok(ParetoPriorAlpha { ln_g0, n0, l })
    }

    /// The limit `n0 ↓ 0`: `p(α) ∝ 1/α`.
    pub fn noninformative(l: f64) -> Result<Self> {
        positive("l", l)?;
        Ok(ParetoPriorAlpha {
            ln_g0: 0.0,
            n0: 0.0,
            l,
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

    pub fn l(&self) -> f64 {
        self.l
    }
}

/// Gamma posterior over `α` together with the known lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoShapePosterior {
    pub l: f64,
    pub gamma: GammaPosterior,
}

impl ParetoShapePosterior {
    /// `log g_n = B/A`, the pooled mean log-ratio.
    pub fn ln_g_n(&self) -> f64 {
        self.gamma.rate / self.gamma.shape
    }

    /// `log(x/l) + B ~ Pareto(A, B)`.
    pub fn predictive(&self) -> Result<Predictive> {
        let GammaPosterior { shape, rate } = self.gamma;
        if self.gamma.is_improper() {
            return Err(improper());
        }
        Ok(Predictive::TransformedPareto(TransformedPareto::new(
            shape,
            rate,
            Link::Log {
                anchor: self.l,
                offset: rate,
            },
        )?))
    }

    pub fn as_prior(&self) -> ParetoPriorAlpha {
        ParetoPriorAlpha {
            ln_g0: if self.gamma.is_improper() { 0.0 } else { self.ln_g_n() },
            n0: self.gamma.shape,
            l: self.l,
        }
    }
}

pub fn posterior_alpha(prior: &ParetoPriorAlpha, stats: &SuffStats) -> Result<ParetoShapePosterior> {
    let sum_log = stats.require_sum_log(MODEL)?;
    if let Some(m) = stats.min {
        ensure(m >= prior.l, || {
            Error::Domain(format!(
                "datum {m} lies below the known lower bound l = {}",
                prior.l
            ))
        })?;
    }
    let n = stats.count();
    let shape = prior.n0 + n;
    if shape == 0.0 {
        return if prior.is_noninformative() {
            Ok(ParetoShapePosterior {
                l: prior.l,
                gamma: GammaPosterior { shape, rate: 0.0 },
            })
        } else {
            Err(Error::NoInformation("n0 = 0 and no data".into()))
        };
    }
    let rate = prior.n0 * prior.ln_g0 + (sum_log - n * prior.l.ln());
    ensure(rate > 0.0, || {
        Error::Degenerate(format!(
            "every datum equals l and the prior adds no weight; the Gamma rate is {rate}"
        ))
    })?;
    Ok(ParetoShapePosterior {
        l: prior.l,
        gamma: GammaPosterior { shape, rate },
    })
}

/// Product prior `Power(l | l0, α·n0) · Γ(α | n0', n0'·log g0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoJointPrior {
    l0: f64,
    n0: f64,
    ln_g0: f64,
    n0p: f64,
}

impl ParetoJointPrior {
    pub fn new(l0: f64, n0: f64, g0: f64, n0p: f64) -> Result<Self> {
        positive("l0", l0)?;
        check_pseudocount(n0)?;
        let ln_g0 = log_ratio_above_one(g0)?;
        check_pseudocount(n0p)?;
        Ok(ParetoJointPrior { l0, n0, ln_g0, n0p })
    }

    pub fn l0(&self) -> f64 {
        self.l0
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

/// Factorized posterior `Power(l | l_n, α(n+n0)) · Γ(α | A, B)`.
///
/// This is the product form exactly; the marginal over `α` ignores the
/// `α`-dependence of the conditional's normalizer. The oracle module
/// measures how far that is from the exact marginal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoJointPosterior {
    pub l_n: f64,
    /// `n + n0` of the location block.
    pub n_eff: f64,
    pub gamma: GammaPosterior,
}

impl ParetoJointPosterior {
    pub fn conditional(&self, alpha: f64) -> Result<Power> {
        Power::new(self.l_n, alpha * self.n_eff)
    }

    /// `log g_n`, where `g_n` is the pooled absolute geometric mean.
    pub fn ln_g_n(&self) -> f64 {
        self.gamma.rate / self.gamma.shape
    }

    /// `log(x/l_n) + B ~ Pareto(A, c^{1/A}·B)`.
    pub fn predictive(&self) -> Result<Predictive> {
        let GammaPosterior { shape, rate } = self.gamma;
        let scale = extrapolation_ratio(self.n_eff).powf(1.0 / shape) * rate;
        Ok(Predictive::TransformedPareto(TransformedPareto::new(
            shape,
            scale,
            Link::Log {
                anchor: self.l_n,
                offset: rate,
            },
        )?))
    }

    /// `x^{−*} = l_n·exp(B(c^{1/A} − 1))`.
    pub fn predictive_bound(&self) -> f64 {
        let GammaPosterior { shape, rate } = self.gamma;
        let c = extrapolation_ratio(self.n_eff);
        self.l_n * (rate * (c.powf(1.0 / shape) - 1.0)).exp()
    }

    pub fn as_prior(&self) -> ParetoJointPrior {
        ParetoJointPrior {
            l0: self.l_n,
            n0: self.n_eff,
            ln_g0: self.ln_g_n(),
            n0p: self.gamma.shape,
        }
    }
}

pub fn posterior_joint(prior: &ParetoJointPrior, stats: &SuffStats) -> Result<ParetoJointPosterior> {
    let sum_log = stats.require_sum_log(MODEL)?;
    let n = stats.count();
    let (n_eff, shape) = (n + prior.n0, n + prior.n0p);
    ensure(n_eff > 0.0 && shape > 0.0, || {
        Error::NoInformation("both prior pseudocounts must be positive when there is no data".into())
    })?;
    let rate = prior.n0p * prior.ln_g0 + sum_log;
    ensure(rate > 0.0, || {
        Error::InvalidRegime(format!(
            "the pooled geometric mean g_n = {:.6e} must exceed 1 (Gamma rate {rate} <= 0); \
             multiply the data by a known scale so their geometric mean exceeds 1",
            (rate / shape).exp()
        ))
    })?;
    Ok(ParetoJointPosterior {
        l_n: stats.min.map_or(prior.l0, |m| m.min(prior.l0)),
        n_eff,
        gamma: GammaPosterior { shape, rate },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{ContinuousDist, Pareto};
    use crate::oracle::total_mass;
    use crate::quadrature::Quadrature;
    use std::f64::consts::E;


    fn laptop_stats() -> SuffStats {
        let mut data: Vec<f64> = (0..19).map(|i| 85.0 + i as f64).collect();
        data.push(80.0);
        SuffStats::from_data(&data)
    }

    #[test]
    fn laptop_location_update() {
        let prior = ParetoPriorL::new(100.0, 1.0, 1.2).unwrap();
        let post = posterior_l(&prior, &laptop_stats()).unwrap();
        let d = post.distribution().unwrap();
        assert_eq!((d.a(), d.b()), (80.0, 25.2));
        let bound = post.predictive_bound().unwrap();
        assert!((bound - 80.0 * (21.0f64 / 22.0).powf(1.0 / 1.2)).abs() < 1e-12);
        // Display value of the worked example, truncated to three decimals.
        assert!((bound - 76.958_01).abs() < 1e-5);
        let pred = post.predictive().unwrap();
        assert_eq!(pred.support().0, bound);
    }

    #[test]
    fn empty_update_keeps_prior() {
        let prior = ParetoPriorL::new(100.0, 1.0, 1.2).unwrap();
        let d = posterior_l(&prior, &SuffStats::default()).unwrap().distribution().unwrap();
        assert_eq!((d.a(), d.b()), (100.0, 1.2));
        let zero = ParetoPriorL::new(100.0, 0.0, 1.2).unwrap();
        assert!(matches!(
            posterior_l(&zero, &SuffStats::default()),
            Err(Error::NoInformation(_))
        ));
        assert!(posterior_l(&prior, &SuffStats::from_data(&[1.0, -1.0])).is_err());
    }

    #[test]
    fn split_batches_agree() {
        let prior = ParetoPriorL::new(100.0, 1.0, 1.2).unwrap();
        let whole = posterior_l(&prior, &SuffStats::from_data(&[90.0, 85.0, 120.0, 95.0])).unwrap();
        let first = posterior_l(&prior, &SuffStats::from_data(&[90.0, 85.0])).unwrap();
        let second = posterior_l(&first.as_prior(), &SuffStats::from_data(&[120.0, 95.0])).unwrap();
        assert_eq!(whole, second);
    }

    #[test]
    fn location_predictive_matches_mixture() {
        let post = posterior_l(&ParetoPriorL::new(100.0, 1.0, 1.2).unwrap(), &laptop_stats()).unwrap();
        let pred = post.predictive().unwrap();
        let lpost = post.distribution().unwrap();
        let q = Quadrature::default();
        for i in 0..50 {
            // The closed form is exact on the data-covered side x >= l_n.
            let x = 80.0 * (1.0 + 0.2 * i as f64);
            let mix = q
                .integrate(
                    |l| {
                        if l <= 0.0 {
                            return 0.0;
                        }
                        Pareto::new(1.2, l).unwrap().pdf(x) * lpost.pdf(l)
                    },
                    0.0,
                    80.0,
                )
                .value;
            assert!((mix - pred.pdf(x)).abs() < 1e-8 * pred.pdf(x).max(1e-300), "x={x}");
        }
    }

    #[test]
    fn shape_update_and_predictive() {
        let stats = SuffStats::from_data(&[1.0, E, E * E]);
        let post = posterior_alpha(&ParetoPriorAlpha::noninformative(1.0).unwrap(), &stats).unwrap();
        assert!((post.gamma.shape - 3.0).abs() < 1e-15);
        assert!((post.gamma.rate - 3.0).abs() < 1e-14);
        let pred = posterior_alpha(&ParetoPriorAlpha::noninformative(1.0).unwrap(), &stats)
            .unwrap()
            .predictive()
            .unwrap();
        // A/(l·B) at the edge with A = B = 3.
        let exact = ParetoShapePosterior {
            l: 1.0,
            gamma: GammaPosterior { shape: 3.0, rate: 3.0 },
        }
        .predictive()
        .unwrap();
        assert!((exact.pdf(1.0) - 1.0).abs() < 1e-14);
        assert_eq!(exact.cdf(1.0), 0.0);
        assert!((pred.pdf(2.0) - exact.pdf(2.0)).abs() < 1e-12);
        assert!((total_mass(&exact) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn shape_prior_only_and_errors() {
        let prior = ParetoPriorAlpha::new(E, 2.0, 1.0).unwrap();
        let post = posterior_alpha(&prior, &SuffStats::default()).unwrap();
        assert_eq!(post.gamma, GammaPosterior { shape: 2.0, rate: 2.0 });
        assert!(posterior_alpha(&prior, &SuffStats::from_data(&[0.5])).is_err());
        let flat = ParetoPriorAlpha::noninformative(1.0).unwrap();
        assert!(matches!(
            posterior_alpha(&flat, &SuffStats::from_data(&[1.0, 1.0])),
            Err(Error::Degenerate(_))
        ));
        let improper = posterior_alpha(&flat, &SuffStats::default()).unwrap();
        assert!(improper.gamma.is_improper());
        assert!(matches!(improper.predictive(), Err(Error::Improper(_))));
        assert!(ParetoPriorAlpha::new(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn shape_split_batches_agree() {
        let prior = ParetoPriorAlpha::new(2.0, 1.5, 1.0).unwrap();
        let whole = posterior_alpha(&prior, &SuffStats::from_data(&[1.5, 3.0, 7.0, 2.2])).unwrap();
        let a = posterior_alpha(&prior, &SuffStats::from_data(&[1.5, 3.0])).unwrap();
        let b = posterior_alpha(&a.as_prior(), &SuffStats::from_data(&[7.0, 2.2])).unwrap();
        assert!((whole.gamma.shape - b.gamma.shape).abs() < 1e-12);
        assert!((whole.gamma.rate - b.gamma.rate).abs() < 1e-12 * whole.gamma.rate);
    }

    #[test]
    fn noninformative_rules() {
        let prior = ParetoPriorL::noninformative(1.2).unwrap();
        let d = posterior_l(&prior, &laptop_stats()).unwrap().distribution().unwrap();
        assert_eq!(d.a(), 80.0);
        assert!((d.b() - 25.0).abs() < 1e-12);
        let empty = posterior_l(&prior, &SuffStats::default()).unwrap();
        assert!(empty.is_improper());
        assert!(matches!(empty.predictive(), Err(Error::Improper(_))));
    }

    #[test]
    fn joint_plug_in() {
        let prior = ParetoJointPrior::new(10.0, 1.0, E, 1.0).unwrap();
        let stats = SuffStats::from_data(&[2.0, 2.0 * E, 2.0 * E * E]);
        let post = posterior_joint(&prior, &stats).unwrap();
        assert_eq!(post.l_n, 2.0);
        assert_eq!(post.gamma.shape, 4.0);
        let g_n = 2f64.powf(0.75) * E;
        assert!((post.ln_g_n() - g_n.ln()).abs() < 1e-14);
        assert!((post.gamma.rate - 4.0 * g_n.ln()).abs() < 1e-13);
        let bound = post.predictive_bound();
        let expected = 2.0 * (post.gamma.rate * (0.8f64.powf(0.25) - 1.0)).exp();
        assert!((bound - expected).abs() < 1e-13);
        assert!((bound - 1.438_05).abs() < 1e-5);
        let pred = post.predictive().unwrap();
        assert!((pred.support().0 - bound).abs() < 1e-13);
        assert!((total_mass(&pred) - 1.0).abs() < 1e-8);
        let min = pred.sample_n(20_000, 3).into_iter().fold(f64::INFINITY, f64::min);
        assert!(min >= bound && min < bound * 1.01);
    }

    #[test]
    fn joint_prior_only_and_regime() {
        let prior = ParetoJointPrior::new(10.0, 1.0, E, 1.0).unwrap();
        let post = posterior_joint(&prior, &SuffStats::default()).unwrap();
        assert_eq!(post.l_n, 10.0);
        let c = post.conditional(1.5).unwrap();
        assert_eq!((c.a(), c.b()), (10.0, 1.5));
        assert_eq!(post.gamma, GammaPosterior { shape: 1.0, rate: 1.0 });
        let small = SuffStats::from_data(&[0.01, 0.02, 0.05]);
        assert!(matches!(posterior_joint(&prior, &small), Err(Error::InvalidRegime(_))));
    }
}
