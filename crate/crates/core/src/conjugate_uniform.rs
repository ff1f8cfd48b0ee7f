//! Uniform `U(l, l + w)`: unknown width `w` (the German tank problem),
//! unknown lower bound `l`, or both.
//!
//! With both unknown the width posterior is not conjugate:
//!
//! ```text
//! p(w | X) = w^{−(N+1)} (w − w_n)/(w − w0) / C(N),   w > w_n
//! C(N)     = ∫_{w_n}^∞ w^{−(N+1)} (w − w_n)/(w − w0) dw
//! ```
//!
//! `C(N)` is computed by quadrature after the substitution `t = w_n/w`,
//! which gives `C(N) = w_n^{−N} K(N, w0/w_n)` with
//! `K(m, y) = ∫₀¹ t^{m−1}(1−t)/(1−yt) dt`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::distributions::{invert_monotone, open_unit, ContinuousDist, Pareto, Uniform};
use crate::error::{ensure, param, Error, Result};
use crate::posterior::{check_pseudocount, extrapolation_ratio, improper};
use crate::predictive::{Predictive, Trapezoid};
use crate::quadrature::Quadrature;
use crate::special::{inc_beta_b0_scaled, SeriesAccuracy};
use crate::suffstats::SuffStats;

fn finite(name: &str, v: f64) -> Result<()> {
    ensure(v.is_finite(), || param(format!("{name} must be finite, got {v}")))
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure(v > 0.0 && v.is_finite(), || {
        param(format!("{name} must be positive and finite, got {v}"))
    })
}

/// Prior `Pareto(n0, w0)` on the width, lower bound `l` known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformPriorW {
    w0: f64,
    n0: f64,
    l: f64,
}

impl UniformPriorW {
    pub fn new(w0: f64, n0: f64, l: f64) -> Result<Self> {
        positive("w0", w0)?;
        check_pseudocount(n0)?;
        finite("l", l)?;
        Ok(UniformPriorW { w0, n0, l })
    }

    /// The limit `n0 ↓ 0`, `w0 → 0`: `p(w) ∝ 1/w`.
    pub fn noninformative(l: f64) -> Result<Self> {
        finite("l", l)?;
        Ok(UniformPriorW {
            w0: 0.0,
            n0: 0.0,
            l,
        })
    }

    pub fn is_noninformative(&self) -> bool {
        self.w0 == 0.0
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn l(&self) -> f64 {
        self.l
    }
}

/// Posterior `Pareto(n + n0, w_n)` over the width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformWidthPosterior {
    pub l: f64,
    pub w_n: f64,
    pub n_eff: f64,
}

impl UniformWidthPosterior {
    pub fn is_improper(&self) -> bool {
        self.w_n == 0.0 || self.n_eff == 0.0
    }

    pub fn distribution(&self) -> Result<Pareto> {
        if self.is_improper() {
            return Err(improper());
        }
        Pareto::new(self.n_eff, self.w_n)
    }

    /// `U(l, l + w_n·(N+1)/N)`.
    pub fn predictive(&self) -> Result<Predictive> {
        Ok(Predictive::Uniform(Uniform::new(self.l, self.predictive_bound()?)?))
    }

    /// Extrapolated upper end of the observable, `l + w_n/c`.
    pub fn predictive_bound(&self) -> Result<f64> {
        if self.is_improper() {
            return Err(improper());
        }
        Ok(self.l + self.w_n / extrapolation_ratio(self.n_eff))
    }

    pub fn as_prior(&self) -> UniformPriorW {
        UniformPriorW {
            w0: self.w_n,
            n0: self.n_eff,
            l: self.l,
        }
    }
}

pub fn posterior_w(prior: &UniformPriorW, stats: &SuffStats) -> Result<UniformWidthPosterior> {
    ensure(stats.sum.is_finite(), || {
        Error::Domain("the uniform model requires finite data".into())
    })?;
    if let Some(m) = stats.min {
        ensure(m >= prior.l, || {
            Error::Domain(format!(
                "datum {m} lies below the known lower bound l = {}",
                prior.l
            ))
        })?;
    }
    if stats.is_empty() && prior.n0 == 0.0 && !prior.is_noninformative() {
        return Err(Error::NoInformation(
            "n0 = 0 and no data: the prior carries no information about w".into(),
        ));
    }
    Ok(UniformWidthPosterior {
        l: prior.l,
        w_n: stats.max.map_or(prior.w0, |m| (m - prior.l).max(prior.w0)),
        n_eff: stats.count() + prior.n0,
    })
}

/// Prior `U(u0 − w, l0)` on the lower bound, width `w` known.
///
/// `l0` caps the lower bound from above and `u0` is a value the upper end
/// `l + w` is known to exceed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformPriorL {
    l0: f64,
    u0: f64,
    w: f64,
}

impl UniformPriorL {
    pub fn new(l0: f64, u0: f64, w: f64) -> Result<Self> {
        finite("l0", l0)?;
        finite("u0", u0)?;
        positive("w", w)?;
        ensure(u0 - w < l0, || {
            param(format!("prior interval (u0 − w, l0) = ({}, {l0}) is empty", u0 - w))
        })?;
        Ok(UniformPriorL { l0, u0, w })
    }

    /// The limit `l0 → +∞`, `u0 → −∞`: a flat prior on `l`.
    pub fn noninformative(w: f64) -> Result<Self> {
        positive("w", w)?;
        Ok(UniformPriorL {
            l0: f64::INFINITY,
            u0: f64::NEG_INFINITY,
            w,
        })
    }

    pub fn is_noninformative(&self) -> bool {
        self.l0.is_infinite()
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn w(&self) -> f64 {
        self.w
    }
}

/// Posterior `U(u_n − w, l_n)` over the lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformLowerPosterior {
    pub w: f64,
    pub l_n: f64,
    pub u_n: f64,
}

impl UniformLowerPosterior {
    pub fn is_improper(&self) -> bool {
        !(self.l_n.is_finite() && self.u_n.is_finite())
    }

    pub fn distribution(&self) -> Result<Uniform> {
        if self.is_improper() {
            return Err(improper());
        }
        Uniform::new(self.u_n - self.w, self.l_n)
    }

    /// Trapezoid with knots `(u_n − w, min(l_n, u_n), max(l_n, u_n), l_n + w)`.
    pub fn predictive(&self) -> Result<Predictive> {
        if self.is_improper() {
            return Err(improper());
        }
        let (lo, hi) = (self.l_n.min(self.u_n), self.l_n.max(self.u_n));
        Ok(Predictive::Trapezoid(Trapezoid::new(
            self.u_n - self.w,
            lo,
            hi,
            self.l_n + self.w,
        )?))
    }

    /// Predictive density between `l_n` and `u_n` (when `l_n < u_n`), next to
    /// the alternative `(l_n − u_n)/(w(l_n − u_n + w))`. The alternative is
    /// negative there, so the trapezoid uses `1/w`, the only value that keeps
    /// the density continuous and normalized.
    pub fn middle_branch(&self) -> MiddleBranch {
        let d = self.l_n - self.u_n;
        MiddleBranch {
            used: 1.0 / self.w,
            alternative: d / (self.w * (d + self.w)),
        }
    }

    pub fn as_prior(&self) -> UniformPriorL {
        UniformPriorL {
            l0: self.l_n,
            u0: self.u_n,
            w: self.w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiddleBranch {
    pub used: f64,
    pub alternative: f64,
}

pub fn posterior_l(prior: &UniformPriorL, stats: &SuffStats) -> Result<UniformLowerPosterior> {
    ensure(stats.sum.is_finite(), || {
        Error::Domain("the uniform model requires finite data".into())
    })?;
    if let (Some(lo), Some(hi)) = (stats.min, stats.max) {
        ensure(hi - lo < prior.w, || {
            Error::Inconsistent(format!(
                "data range {} is not below the known width {}",
                hi - lo,
                prior.w
            ))
        })?;
    }
    let l_n = stats.min.map_or(prior.l0, |m| m.min(prior.l0));
    let u_n = stats.max.map_or(prior.u0, |m| m.max(prior.u0));
    ensure(u_n - prior.w < l_n, || {
        Error::Inconsistent(format!(
            "posterior interval (u_n − w, l_n) = ({}, {l_n}) is empty",
            u_n - prior.w
        ))
    })?;
    Ok(UniformLowerPosterior {
        w: prior.w,
        l_n,
        u_n,
    })
}

/// Prior `Pareto(w | n0, w0) · U(l | u0 − w, l0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformJointPrior {
    w0: f64,
    n0: f64,
    l0: f64,
    u0: f64,
}

impl UniformJointPrior {
    pub fn new(w0: f64, n0: f64, l0: f64, u0: f64) -> Result<Self> {
        positive("w0", w0)?;
        check_pseudocount(n0)?;
        finite("l0", l0)?;
        finite("u0", u0)?;
        Ok(UniformJointPrior { w0, n0, l0, u0 })
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }
}

/// `(1/m)∫₀^∞ e^{−v} (1−t)^p / (1 − yt) dv` with `t = e^{−v/m}`, which equals
/// `∫₀¹ t^{m−1}(1−t)^p/(1−yt) dt` for `0 ≤ y ≤ 1`.
///
/// The substitution keeps the integrand spread over `v ∈ [0, 40]` whatever
/// `m` is, where the original concentrates in a sliver near `t = 1`.
fn kernel(m: f64, y: f64, p: i32) -> f64 {
    let q = Quadrature::with_tolerance(1e-300, 1e-13);
    let value = q
        .integrate(
            |v| {
                let one_minus_t = -(-v / m).exp_m1();
                let t = 1.0 - one_minus_t;
                let ratio = if y == 1.0 {
                    one_minus_t.powi(p - 1)
                } else {
                    one_minus_t.powi(p) / (one_minus_t + t * (1.0 - y))
                };
                (-v).exp() * ratio
            },
            0.0,
            f64::INFINITY,
        )
        .value;
    value / m
}

/// `ln C(M)` for width posterior parameters, by quadrature.
fn ln_evidence(m: f64, w0: f64, w_n: f64) -> f64 {
    if w0 == w_n {
        return -m * w_n.ln() - m.ln();
    }
    -m * w_n.ln() + kernel(m, w0 / w_n, 1).ln()
}

fn check_evidence_args(n: f64, w0: f64, w_n: f64) -> Result<()> {
    ensure(n > 0.0 && n.is_finite(), || param(format!("N must be positive, got {n}")))?;
    positive("w0", w0)?;
    positive("w_n", w_n)?;
    ensure(w0 <= w_n, || {
        Error::InvalidRegime(format!(
            "w0 = {w0} exceeds w_n = {w_n}: the width posterior has a non-integrable pole at w = w0"
        ))
    })
}

/// `C(N)` together with the closed incomplete-beta expression for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceReport {
    pub n: f64,
    pub w0: f64,
    pub w_n: f64,
    /// `C(N)` by quadrature; exact when `w0 = w_n`.
    pub value: f64,
    pub ln_value: f64,
    /// `(w_n/w0·B(w0/w_n; N+1, 0) − B(w0/w_n; N, 0))·w_n/w0^N`, when the
    /// series is evaluable.
    pub closed_form: Option<f64>,
    /// `closed_form / value`; the closed form is negative and carries an
    /// extra factor `w_n`, so this comes out as `−w_n`.
    pub ratio: Option<f64>,
    /// Why the closed form could not be evaluated, if it could not.
    pub closed_form_error: Option<String>,
}

/// Evaluates `C(N)` and the closed incomplete-beta expression side by side.
pub fn evidence_c(n: f64, w0: f64, w_n: f64) -> Result<EvidenceReport> {
    check_evidence_args(n, w0, w_n)?;
    let ln_value = ln_evidence(n, w0, w_n);
    let value = ln_value.exp();
    let x = w0 / w_n;
    let acc = SeriesAccuracy::default();
    // x^N·(S(N+1) − S(N))·w_n/w0^N = w_n^{1−N}·(S(N+1) − S(N)), S the scaled series.
    let closed = inc_beta_b0_scaled(x, n + 1.0, acc)
        .and_then(|hi| Ok((hi, inc_beta_b0_scaled(x, n, acc)?)))
        .map(|(hi, lo)| (hi - lo) * ((1.0 - n) * w_n.ln()).exp());
    let (closed_form, closed_form_error) = match closed {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(EvidenceReport {
        n,
        w0,
        w_n,
        value,
        ln_value,
        closed_form,
        ratio: closed_form.map(|c| c / value),
        closed_form_error,
    })
}

/// Which predictive the joint uniform model returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointPredictiveMode {
    /// Full double integral over `l` and `w`.
    #[default]
    Numeric,
    /// A uniform of density `C(N+1)/C(N)` ending at `u_n`.
    Plateau,
}

/// Posterior `U(l | u_n − w, l_n) · p(w | X)` of the joint uniform model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformJointPosterior {
    pub l_n: f64,
    pub u_n: f64,
    pub w_n: f64,
    pub w0: f64,
    /// `N = n + n0`
    pub n_eff: f64,
    pub ln_c_n: f64,
    pub ln_c_n1: f64,
}

impl UniformJointPosterior {
    pub fn conditional(&self, w: f64) -> Result<Uniform> {
        ensure(w > self.w_n, || {
            Error::Domain(format!("width {w} is not above w_n = {}", self.w_n))
        })?;
        Uniform::new(self.u_n - w, self.l_n)
    }

    pub fn width_ln_pdf(&self, w: f64) -> f64 {
        if !(w > self.w_n) || !w.is_finite() {
            return f64::NEG_INFINITY;
        }
        let ratio = if self.w0 == self.w_n {
            0.0
        } else {
            ((w - self.w_n) / (w - self.w0)).ln()
        };
        -(self.n_eff + 1.0) * w.ln() + ratio - self.ln_c_n
    }

    pub fn width_pdf(&self, w: f64) -> f64 {
        self.width_ln_pdf(w).exp()
    }

    /// `C(N+1)/C(N)`, the flat predictive density between `l_n` and `u_n`.
    pub fn plateau(&self) -> f64 {
        (self.ln_c_n1 - self.ln_c_n).exp()
    }

    pub fn evidence(&self) -> Result<EvidenceReport> {
        evidence_c(self.n_eff, self.w0, self.w_n)
    }

    pub fn predictive(&self, mode: JointPredictiveMode) -> Result<Predictive> {
        Ok(match mode {
            JointPredictiveMode::Numeric => {
                Predictive::UniformJoint(Box::new(UniformJointPredictive::new(self)))
            }
            JointPredictiveMode::Plateau => {
                Predictive::Uniform(Uniform::new(self.u_n - 1.0 / self.plateau(), self.u_n)?)
            }
        })
    }
}

pub fn posterior_joint(prior: &UniformJointPrior, stats: &SuffStats) -> Result<UniformJointPosterior> {
    ensure(stats.sum.is_finite(), || {
        Error::Domain("the uniform model requires finite data".into())
    })?;
    let n_eff = stats.count() + prior.n0;
    ensure(n_eff > 0.0, || {
        Error::NoInformation("n0 = 0 and no data".into())
    })?;
    let l_n = stats.min.map_or(prior.l0, |m| m.min(prior.l0));
    let u_n = stats.max.map_or(prior.u0, |m| m.max(prior.u0));
    let w_n = u_n - l_n;
    ensure(w_n > 0.0, || {
        Error::Degenerate(format!("w_n = u_n − l_n = {w_n} must be positive"))
    })?;
    check_evidence_args(n_eff, prior.w0, w_n)?;
    Ok(UniformJointPosterior {
        l_n,
        u_n,
        w_n,
        w0: prior.w0,
        n_eff,
        ln_c_n: ln_evidence(n_eff, prior.w0, w_n),
        ln_c_n1: ln_evidence(n_eff + 1.0, prior.w0, w_n),
    })
}

/// Exact predictive of the joint uniform model.
///
/// With `d(x) = max(w_n, x − l_n, u_n − x)`:
///
/// ```text
/// p(x | X) = ∫_{d}^∞ w^{−(N+2)} (w − d)/(w − w0) dw / C(N)
/// ```
///
/// which is flat at `C(N+1)/C(N)` on `[l_n, u_n]` and symmetric about the
/// midpoint. The tail mass beyond `u_n + s` has the closed reduction
/// `(w_n/e)^N · K₂(N, w0/e) / K(N, w0/w_n)` with `e = w_n + s` and
/// `K₂(m, y) = ½∫₀¹ t^{m−1}(1−t)²/(1−yt) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformJointPredictive {
    l_n: f64,
    u_n: f64,
    w_n: f64,
    w0: f64,
    n_eff: f64,
    ln_k_n: f64,
    plateau: f64,
}

impl UniformJointPredictive {
    fn new(post: &UniformJointPosterior) -> Self {
        UniformJointPredictive {
            l_n: post.l_n,
            u_n: post.u_n,
            w_n: post.w_n,
            w0: post.w0,
            n_eff: post.n_eff,
            ln_k_n: post.ln_c_n + post.n_eff * post.w_n.ln(),
            plateau: post.plateau(),
        }
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    /// Mass strictly beyond `u_n + s` (equivalently below `l_n − s`).
    pub fn tail_mass(&self, s: f64) -> f64 {
        if s.is_infinite() {
            return 0.0;
        }
        let e = self.w_n + s.max(0.0);
        let k2 = 0.5 * kernel(self.n_eff, self.w0 / e, 2);
        (self.n_eff * (self.w_n / e).ln() + k2.ln() - self.ln_k_n).exp()
    }

    fn distance(&self, x: f64) -> f64 {
        self.w_n.max(x - self.l_n).max(self.u_n - x)
    }
}

impl ContinuousDist for UniformJointPredictive {
    fn ln_pdf(&self, x: f64) -> f64 {
        if !x.is_finite() {
            return f64::NEG_INFINITY;
        }
        if x >= self.l_n && x <= self.u_n {
            return self.plateau.ln();
        }
        let d = self.distance(x);
        let m = self.n_eff + 1.0;
        let k = kernel(m, self.w0 / d, 1);
        self.n_eff * (self.w_n / d).ln() - d.ln() + k.ln() - self.ln_k_n
    }

    fn cdf(&self, x: f64) -> f64 {
        if x < self.l_n {
            self.tail_mass(self.l_n - x)
        } else if x <= self.u_n {
            (self.tail_mass(0.0) + (x - self.l_n) * self.plateau).min(1.0)
        } else {
            1.0 - self.tail_mass(x - self.u_n)
        }
    }

    fn inverse_cdf(&self, p: f64) -> f64 {
        let t0 = self.tail_mass(0.0);
        if p >= t0 && p <= 1.0 - t0 {
            return (self.l_n + (p - t0) / self.plateau).min(self.u_n);
        }
        let cdf = |x: f64| self.cdf(x);
        let pdf = |x: f64| self.pdf(x);
        if p < t0 {
            invert_monotone(cdf, pdf, p, f64::NEG_INFINITY, self.l_n, self.l_n - self.w_n)
        } else {
            invert_monotone(cdf, pdf, p, self.u_n, f64::INFINITY, self.u_n + self.w_n)
        }
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.inverse_cdf(open_unit(rng))
    }
}
