//! Peaks-over-threshold workflow: pick a threshold, choose a family and
//! case, fit, read off the support bounds, validate on held-out data, and
//! keep updating as batches arrive.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conjugate_exponential::{
    self as exponential, ExpJointPosterior, ExpJointPrior, ExpLocationPosterior, ExpPriorAlpha,
    ExpPriorL, ExpRatePosterior,
};
use crate::conjugate_pareto::{
    self as pareto, ParetoJointPosterior, ParetoJointPrior, ParetoLocationPosterior,
    ParetoPriorAlpha, ParetoPriorL, ParetoShapePosterior,
};
use crate::conjugate_power::{
    self as power, PowerBoundPosterior, PowerJointPosterior, PowerJointPrior, PowerPriorAlpha,
    PowerPriorU, PowerShapePosterior,
};
use crate::conjugate_uniform::{
    self as uniform, JointPredictiveMode, UniformJointPosterior, UniformJointPrior,
    UniformLowerPosterior, UniformPriorL, UniformPriorW, UniformWidthPosterior,
};
use crate::distributions::ContinuousDist;
use crate::error::{ensure, param, Error, Result};
use crate::predictive::Predictive;
use crate::suffstats::SuffStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Pareto,
    ShiftedExp,
    Power,
    Uniform,
}

/// Which parameters are unknown. The uniform family uses `Width`, `Lower`
/// and `Joint`; the others use `Location`, `Shape` and `Joint`. For the
/// Power family `Location` is the upper bound `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Location,
    Shape,
    Joint,
    Width,
    Lower,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pareto" => Ok(Family::Pareto),
            "shifted_exp" | "exponential" | "exp" => Ok(Family::ShiftedExp),
            "power" => Ok(Family::Power),
            "uniform" => Ok(Family::Uniform),
            _ => Err(Error::Spec(format!(
                "unknown family {s:?}; expected pareto, shifted_exp, power or uniform"
            ))),
        }
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "location" | "bound" => Ok(Case::Location),
            "shape" => Ok(Case::Shape),
            "joint" => Ok(Case::Joint),
            "width" => Ok(Case::Width),
            "lower" => Ok(Case::Lower),
            _ => Err(Error::Spec(format!("unknown case {s:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Pareto => "pareto",
            Family::ShiftedExp => "shifted_exp",
            Family::Power => "power",
            Family::Uniform => "uniform",
        })
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Location => "location",
            Case::Shape => "shape",
            Case::Joint => "joint",
            Case::Width => "width",
            Case::Lower => "lower",
        })
    }
}

/// Named numeric parameters, e.g. `{l0: 100, n0: 1}`.
pub type Params = BTreeMap<String, f64>;

/// A family, a case, and the prior (which carries the known parameters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "prior", rename_all = "snake_case")]
pub enum ModelSpec {
    ParetoLocation(ParetoPriorL),
    ParetoShape(ParetoPriorAlpha),
    ParetoJoint(ParetoJointPrior),
    ExpLocation(ExpPriorL),
    ExpShape(ExpPriorAlpha),
    ExpJoint(ExpJointPrior),
    PowerLocation(PowerPriorU),
    PowerShape(PowerPriorAlpha),
    PowerJoint(PowerJointPrior),
    UniformWidth(UniformPriorW),
    UniformLower(UniformPriorL),
    UniformJoint(UniformJointPrior),
}

/// Values of exactly the keys in `wanted`, in that order.
fn exact_keys(what: &str, params: &Params, wanted: &[&str]) -> Result<Vec<f64>> {
    let missing: Vec<&str> = wanted
        .iter()
        .copied()
        .filter(|k| !params.contains_key(*k))
        .collect();
    let extra: Vec<&str> = params
        .keys()
        .map(String::as_str)
        .filter(|k| !wanted.contains(k))
        .collect();
    ensure(missing.is_empty() && extra.is_empty(), || {
        Error::Spec(format!(
            "{what} needs exactly [{}]; missing [{}], unexpected [{}]",
            wanted.join(", "),
            missing.join(", "),
            extra.join(", ")
        ))
    })?;
    Ok(wanted.iter().map(|k| params[*k]).collect())
}

impl ModelSpec {
    /// Builds a model from loose key/value parameters. `prior = None` selects
    /// the non-informative limit, which exists for every single-parameter
    /// case; the joint cases need a proper prior.
    pub fn from_parts(
        family: Family,
        case: Case,
        prior: Option<&Params>,
        known: &Params,
    ) -> Result<Self> {
        use Case::*;
        use Family::*;
        let known_key = match (family, case) {
            (Pareto | ShiftedExp | Power, Location) => Some("alpha"),
            (Pareto | ShiftedExp, Shape) | (Uniform, Width) => Some("l"),
            (Power, Shape) => Some("u"),
            (Uniform, Lower) => Some("w"),
            (_, Joint) => None,
            _ => {
                return Err(Error::Spec(format!(
                    "case {case} does not apply to family {family}"
                )))
            }
        };
        let what = format!("{family}/{case} known parameters");
        let k = match known_key {
            Some(key) => exact_keys(&what, known, &[key])?[0],
            None => {
                exact_keys(&what, known, &[])?;
                f64::NAN
            }
        };
        let Some(prior) = prior else {
            return Ok(match (family, case) {
                (Pareto, Location) => ModelSpec::ParetoLocation(ParetoPriorL::noninformative(k)?),
                (Pareto, Shape) => ModelSpec::ParetoShape(ParetoPriorAlpha::noninformative(k)?),
                (ShiftedExp, Location) => ModelSpec::ExpLocation(ExpPriorL::noninformative(k)?),
                (ShiftedExp, Shape) => ModelSpec::ExpShape(ExpPriorAlpha::noninformative(k)?),
                (Power, Location) => ModelSpec::PowerLocation(PowerPriorU::noninformative(k)?),
                (Power, Shape) => ModelSpec::PowerShape(PowerPriorAlpha::noninformative(k)?),
                (Uniform, Width) => ModelSpec::UniformWidth(UniformPriorW::noninformative(k)?),
                (Uniform, Lower) => ModelSpec::UniformLower(UniformPriorL::noninformative(k)?),
                _ => {
                    return Err(Error::Spec(format!(
                        "{family}/{case} has no non-informative prior; supply one"
                    )))
                }
            });
        };
        let what = format!("{family}/{case} prior");
        let p = |keys: &[&str]| exact_keys(&what, prior, keys);
        Ok(match (family, case) {
            (Pareto, Location) => {
                let v = p(&["l0", "n0"])?;
                ModelSpec::ParetoLocation(ParetoPriorL::new(v[0], v[1], k)?)
            }
            (Pareto, Shape) => {
                let v = p(&["g0", "n0"])?;
                ModelSpec::ParetoShape(ParetoPriorAlpha::new(v[0], v[1], k)?)
            }
            (Pareto, Joint) => {
                let v = p(&["l0", "n0", "g0", "n0p"])?;
                ModelSpec::ParetoJoint(ParetoJointPrior::new(v[0], v[1], v[2], v[3])?)
            }
            (ShiftedExp, Location) => {
                let v = p(&["l0", "n0"])?;
                ModelSpec::ExpLocation(ExpPriorL::new(v[0], v[1], k)?)
            }
            (ShiftedExp, Shape) => {
                let v = p(&["mu0", "n0"])?;
                ModelSpec::ExpShape(ExpPriorAlpha::new(v[0], v[1], k)?)
            }
            (ShiftedExp, Joint) => {
                let v = p(&["l0", "n0", "mu0", "n0p"])?;
                ModelSpec::ExpJoint(ExpJointPrior::new(v[0], v[1], v[2], v[3])?)
            }
            (Power, Location) => {
                let v = p(&["u0", "n0"])?;
                ModelSpec::PowerLocation(PowerPriorU::new(v[0], v[1], k)?)
            }
            (Power, Shape) => {
                let v = p(&["g0", "n0"])?;
                ModelSpec::PowerShape(PowerPriorAlpha::new(v[0], v[1], k)?)
            }
            (Power, Joint) => {
                let v = p(&["u0", "n0", "g0", "n0p"])?;
                ModelSpec::PowerJoint(PowerJointPrior::new(v[0], v[1], v[2], v[3])?)
            }
            (Uniform, Width) => {
                let v = p(&["w0", "n0"])?;
                ModelSpec::UniformWidth(UniformPriorW::new(v[0], v[1], k)?)
            }
            (Uniform, Lower) => {
                let v = p(&["l0", "u0"])?;
                ModelSpec::UniformLower(UniformPriorL::new(v[0], v[1], k)?)
            }
            (Uniform, Joint) => {
                let v = p(&["w0", "n0", "l0", "u0"])?;
                ModelSpec::UniformJoint(UniformJointPrior::new(v[0], v[1], v[2], v[3])?)
            }
            _ => unreachable!("rejected above"),
        })
    }

    pub fn family(&self) -> Family {
        use ModelSpec::*;
        match self {
            ParetoLocation(_) | ParetoShape(_) | ParetoJoint(_) => Family::Pareto,
            ExpLocation(_) | ExpShape(_) | ExpJoint(_) => Family::ShiftedExp,
            PowerLocation(_) | PowerShape(_) | PowerJoint(_) => Family::Power,
            UniformWidth(_) | UniformLower(_) | UniformJoint(_) => Family::Uniform,
        }
    }

    pub fn case(&self) -> Case {
        use ModelSpec::*;
        match self {
            ParetoLocation(_) | ExpLocation(_) | PowerLocation(_) => Case::Location,
            ParetoShape(_) | ExpShape(_) | PowerShape(_) => Case::Shape,
            ParetoJoint(_) | ExpJoint(_) | PowerJoint(_) | UniformJoint(_) => Case::Joint,
            UniformWidth(_) => Case::Width,
            UniformLower(_) => Case::Lower,
        }
    }
}

/// Posterior of any of the twelve models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "snake_case")]
pub enum Posterior {
    ParetoLocation(ParetoLocationPosterior),
    ParetoShape(ParetoShapePosterior),
    ParetoJoint(ParetoJointPosterior),
    ExpLocation(ExpLocationPosterior),
    ExpShape(ExpRatePosterior),
    ExpJoint(ExpJointPosterior),
    PowerLocation(PowerBoundPosterior),
    PowerShape(PowerShapePosterior),
    PowerJoint(PowerJointPosterior),
    UniformWidth(UniformWidthPosterior),
    UniformLower(UniformLowerPosterior),
    UniformJoint(UniformJointPosterior),
}

/// Conjugate update of `spec`'s prior with `stats`.
pub fn fit(spec: &ModelSpec, stats: &SuffStats) -> Result<Posterior> {
    Ok(match spec {
        ModelSpec::ParetoLocation(p) => Posterior::ParetoLocation(pareto::posterior_l(p, stats)?),
        ModelSpec::ParetoShape(p) => Posterior::ParetoShape(pareto::posterior_alpha(p, stats)?),
        ModelSpec::ParetoJoint(p) => Posterior::ParetoJoint(pareto::posterior_joint(p, stats)?),
        ModelSpec::ExpLocation(p) => Posterior::ExpLocation(exponential::posterior_l(p, stats)?),
        ModelSpec::ExpShape(p) => Posterior::ExpShape(exponential::posterior_alpha(p, stats)?),
        ModelSpec::ExpJoint(p) => Posterior::ExpJoint(exponential::posterior_joint(p, stats)?),
        ModelSpec::PowerLocation(p) => Posterior::PowerLocation(power::posterior_u(p, stats)?),
        ModelSpec::PowerShape(p) => Posterior::PowerShape(power::posterior_alpha(p, stats)?),
        ModelSpec::PowerJoint(p) => Posterior::PowerJoint(power::posterior_joint(p, stats)?),
        ModelSpec::UniformWidth(p) => Posterior::UniformWidth(uniform::posterior_w(p, stats)?),
        ModelSpec::UniformLower(p) => Posterior::UniformLower(uniform::posterior_l(p, stats)?),
        ModelSpec::UniformJoint(p) => Posterior::UniformJoint(uniform::posterior_joint(p, stats)?),
    })
}

/// Posterior predictive; the uniform joint model uses the exact numeric form.
pub fn predict(posterior: &Posterior) -> Result<Predictive> {
    posterior.predictive_with(JointPredictiveMode::Numeric)
}

/// Conjugate update of an existing posterior with a further batch.
///
/// Equals [`fit`] on the pooled data up to rounding. The uniform joint
/// posterior is not closed under updating and returns
/// [`Error::UnsupportedComposition`].
pub fn sequential_update(posterior: &Posterior, stats: &SuffStats) -> Result<Posterior> {
    fit(&posterior.as_prior()?, stats)
}

impl Posterior {
    pub fn family(&self) -> Family {
        self.spec_shape().0
    }

    pub fn case(&self) -> Case {
        self.spec_shape().1
    }

    fn spec_shape(&self) -> (Family, Case) {
        use Posterior::*;
        match self {
            ParetoLocation(_) => (Family::Pareto, Case::Location),
            ParetoShape(_) => (Family::Pareto, Case::Shape),
            ParetoJoint(_) => (Family::Pareto, Case::Joint),
            ExpLocation(_) => (Family::ShiftedExp, Case::Location),
            ExpShape(_) => (Family::ShiftedExp, Case::Shape),
            ExpJoint(_) => (Family::ShiftedExp, Case::Joint),
            PowerLocation(_) => (Family::Power, Case::Location),
            PowerShape(_) => (Family::Power, Case::Shape),
            PowerJoint(_) => (Family::Power, Case::Joint),
            UniformWidth(_) => (Family::Uniform, Case::Width),
            UniformLower(_) => (Family::Uniform, Case::Lower),
            UniformJoint(_) => (Family::Uniform, Case::Joint),
        }
    }

    pub fn predictive_with(&self, mode: JointPredictiveMode) -> Result<Predictive> {
        use Posterior::*;
        match self {
            ParetoLocation(p) => p.predictive(),
            ParetoShape(p) => p.predictive(),
            ParetoJoint(p) => p.predictive(),
            ExpLocation(p) => p.predictive(),
            ExpShape(p) => p.predictive(),
            ExpJoint(p) => p.predictive(),
            PowerLocation(p) => p.predictive(),
            PowerShape(p) => p.predictive(),
            PowerJoint(p) => p.predictive(),
            UniformWidth(p) => p.predictive(),
            UniformLower(p) => p.predictive(),
            UniformJoint(p) => p.predictive(mode),
        }
    }

    /// The posterior as a prior for the next batch.
    pub fn as_prior(&self) -> Result<ModelSpec> {
        use Posterior::*;
        Ok(match self {
            ParetoLocation(p) => ModelSpec::ParetoLocation(p.as_prior()),
            ParetoShape(p) => ModelSpec::ParetoShape(p.as_prior()),
            ParetoJoint(p) => ModelSpec::ParetoJoint(p.as_prior()),
            ExpLocation(p) => ModelSpec::ExpLocation(p.as_prior()),
            ExpShape(p) => ModelSpec::ExpShape(p.as_prior()),
            ExpJoint(p) => ModelSpec::ExpJoint(p.as_prior()),
            PowerLocation(p) => ModelSpec::PowerLocation(p.as_prior()),
            PowerShape(p) => ModelSpec::PowerShape(p.as_prior()),
            PowerJoint(p) => ModelSpec::PowerJoint(p.as_prior()),
            UniformWidth(p) => ModelSpec::UniformWidth(p.as_prior()),
            UniformLower(p) => ModelSpec::UniformLower(p.as_prior()),
            UniformJoint(_) => {
                return Err(Error::UnsupportedComposition(
                    "the uniform joint posterior is not conjugate; refit on the pooled data".into(),
                ))
            }
        })
    }

    /// The posterior's own bound parameter (`l_n`, `u_n` or `w_n`); `None`
    /// for the shape cases, whose bound is known.
    pub fn posterior_bound(&self) -> Option<f64> {
        use Posterior::*;
        match self {
            ParetoLocation(p) => Some(p.l_n),
            ExpLocation(p) => Some(p.l_n),
            ParetoJoint(p) => Some(p.l_n),
            ExpJoint(p) => Some(p.l_n),
            PowerLocation(p) => Some(p.u_n),
            PowerJoint(p) => Some(p.u_n),
            UniformWidth(p) => Some(p.w_n),
            UniformJoint(p) => Some(p.w_n),
            UniformLower(p) => Some(p.l_n),
            ParetoShape(_) | ExpShape(_) | PowerShape(_) => None,
        }
    }

    /// `n + n0` of the block that carries the bound, or of the shape block
    /// in the shape cases. The uniform-lower case has no pseudocount.
    pub fn n_effective(&self) -> Option<f64> {
        use Posterior::*;
        match self {
            ParetoLocation(p) => Some(p.n_eff),
            ExpLocation(p) => Some(p.n_eff),
            ParetoJoint(p) => Some(p.n_eff),
            ExpJoint(p) => Some(p.n_eff),
            PowerLocation(p) => Some(p.n_eff),
            PowerJoint(p) => Some(p.n_eff),
            UniformWidth(p) => Some(p.n_eff),
            UniformJoint(p) => Some(p.n_eff),
            ParetoShape(p) => Some(p.gamma.shape),
            ExpShape(p) => Some(p.gamma.shape),
            PowerShape(p) => Some(p.gamma.shape),
            UniformLower(_) => None,
        }
    }
}

/// Which end of the support a model extrapolates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
    Both,
}

/// Support summary of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub family: Family,
    pub case: Case,
    pub side: Side,
    /// `l_n`, `u_n` or `w_n`; absent in the shape cases.
    pub posterior_bound: Option<f64>,
    /// The predictive's support end on `side` (for `Both`, absent).
    pub predictive_bound: Option<f64>,
    /// Predictive support; infinite ends are absent.
    pub predictive_lower: Option<f64>,
    pub predictive_upper: Option<f64>,
    pub n_effective: Option<f64>,
}

/// Support report from the posterior and its predictive.
pub fn support(posterior: &Posterior) -> Result<SupportReport> {
    let pred = predict(posterior)?;
    let (lo, hi) = pred.support();
    let side = match (posterior.family(), posterior.case()) {
        (Family::Pareto | Family::ShiftedExp, _) => Side::Lower,
        (Family::Power, _) | (Family::Uniform, Case::Width) => Side::Upper,
        (Family::Uniform, _) => Side::Both,
    };
    let finite = |v: f64| v.is_finite().then_some(v);
    Ok(SupportReport {
        family: posterior.family(),
        case: posterior.case(),
        side,
        posterior_bound: posterior.posterior_bound(),
        predictive_bound: match side {
            Side::Lower => finite(lo),
            Side::Upper => finite(hi),
            Side::Both => None,
        },
        predictive_lower: finite(lo),
        predictive_upper: finite(hi),
        n_effective: posterior.n_effective(),
    })
}

/// A threshold and the values strictly above it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub theta: f64,
    pub exceedances: Vec<f64>,
}

/// `theta` is the `k`-th largest value; exceedances are the values strictly
/// above it, in input order, so ties at `theta` are dropped.
pub fn select_threshold(data: &[f64], k: usize) -> Result<Threshold> {
    ensure(k >= 1 && k <= data.len(), || {
        param(format!("k must be in 1..={}, got {k}", data.len()))
    })?;
    ensure(data.iter().all(|x| !x.is_nan()), || Error::Domain("data contain NaN".into()))?;
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let theta = sorted[k - 1];
    Ok(Threshold {
        theta,
        exceedances: data.iter().copied().filter(|&x| x > theta).collect(),
    })
}

/// Whether exceedances are fitted as raw values or as excesses `x − theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataView {
    #[default]
    Raw,
    Excess,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotFit {
    pub theta: f64,
    pub k: usize,
    pub view: DataView,
    pub stats: SuffStats,
    pub posterior: Posterior,
}

/// Threshold at the `k`-th largest value, then fit the exceedances.
pub fn pot(data: &[f64], k: usize, view: DataView, spec: &ModelSpec) -> Result<PotFit> {
    let Threshold { theta, exceedances } = select_threshold(data, k)?;
    let values: Vec<f64> = match view {
        DataView::Raw => exceedances,
        DataView::Excess => exceedances.iter().map(|x| x - theta).collect(),
    };
    let stats = SuffStats::from_data(&values);
    let posterior = fit(spec, &stats)?;
    Ok(PotFit {
        theta,
        k,
        view,
        stats,
        posterior,
    })
}

/// `Σ log p(x′)` over the holdout; `−∞` when a point lies outside the
/// predictive support.
///
/// Terms are summed in sorted order, so the result does not depend on the
/// order of the holdout.
pub fn holdout_log_predictive(predictive: &dyn ContinuousDist, holdout: &[f64]) -> f64 {
    let mut terms: Vec<f64> = holdout.iter().map(|&x| predictive.ln_pdf(x)).collect();
    if terms.contains(&f64::NEG_INFINITY) {
        return f64::NEG_INFINITY;
    }
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// Index and score of the candidate with the highest holdout log predictive.
/// Ties go to the earlier candidate.
pub fn select_by_holdout(candidates: &[Predictive], holdout: &[f64]) -> Option<(usize, f64)> {
    candidates
        .iter()
        .map(|p| holdout_log_predictive(p, holdout))
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, s)| match best {
            Some((_, b)) if b >= s => best,
            _ => Some((i, s)),
        })
}
