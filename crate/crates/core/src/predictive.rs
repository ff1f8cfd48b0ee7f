//! Posterior-predictive distributions.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::conjugate_uniform::UniformJointPredictive;
use crate::distributions::{ContinuousDist, Pareto, Power, ShiftedExp, Uniform};
use crate::error::{ensure, param, Result};

/// Monotone map between a Pareto variable `y` and the observable `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "link", rename_all = "snake_case")]
pub enum Link {
    /// `y = log(x/anchor) + offset`
    Log { anchor: f64, offset: f64 },
    /// `y = x − anchor + offset`
    Shift { anchor: f64, offset: f64 },
    /// `y = log(anchor/x) + offset`; decreasing in `x`.
    NegLog { anchor: f64, offset: f64 },
}

impl Link {
    fn forward(&self, x: f64) -> f64 {
        match *self {
            Link::Log { anchor, offset } => (x / anchor).ln() + offset,
            Link::Shift { anchor, offset } => x - anchor + offset,
            Link::NegLog { anchor, offset } => (anchor / x).ln() + offset,
        }
    }

    fn backward(&self, y: f64) -> f64 {
        match *self {
            Link::Log { anchor, offset } => anchor * (y - offset).exp(),
            Link::Shift { anchor, offset } => y - offset + anchor,
            Link::NegLog { anchor, offset } => anchor * (offset - y).exp(),
        }
    }

    /// `ln |dy/dx|`
    fn ln_jacobian(&self, x: f64) -> f64 {
        match self {
            Link::Log { .. } | Link::NegLog { .. } => -x.ln(),
            Link::Shift { .. } => 0.0,
        }
    }

    fn increasing(&self) -> bool {
        !matches!(self, Link::NegLog { .. })
    }
}

/// An observable whose image under a [`Link`] is `Pareto(shape, scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformedPareto {
    pub pareto: Pareto,
    pub link: Link,
}

impl TransformedPareto {
    pub fn new(shape: f64, scale: f64, link: Link) -> Result<Self> {
        Ok(TransformedPareto {
            pareto: Pareto::new(shape, scale)?,
            link,
        })
    }
}

impl ContinuousDist for TransformedPareto {
    fn ln_pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        let inside = if self.link.increasing() {
            x >= lo && x.is_finite()
        } else {
            x > lo && x < hi
        };
        if !inside {
            return f64::NEG_INFINITY;
        }
        // Clamp so rounding at the support edge cannot push y below the scale.
        let y = self.link.forward(x).max(self.pareto.l());
        self.pareto.ln_pdf(y) + self.link.ln_jacobian(x)
    }

    fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let y = self.link.forward(x);
        if self.link.increasing() {
            self.pareto.cdf(y)
        } else {
            // 1 − F(y) without cancellation.
            (self.pareto.alpha() * (self.pareto.l() / y).ln()).exp()
        }
    }

    fn inverse_cdf(&self, p: f64) -> f64 {
        if self.link.increasing() {
            self.link.backward(self.pareto.inverse_cdf(p))
        } else {
            self.link.backward(self.pareto.inverse_cdf(1.0 - p))
        }
    }

    fn support(&self) -> (f64, f64) {
        let edge = self.link.backward(self.pareto.l());
        match self.link {
            Link::Log { .. } | Link::Shift { .. } => (edge, f64::INFINITY),
            Link::NegLog { .. } => (0.0, edge),
        }
    }
}

/// Trapezoid with knots `a ≤ b ≤ c ≤ d`: linear rise on `(a, b)`, flat on
/// `(b, c)`, linear fall on `(c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trapezoid {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Trapezoid {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        ensure(
            [a, b, c, d].iter().all(|v| v.is_finite()) && a < b && b <= c && c < d,
            || param(format!("trapezoid knots must satisfy a < b <= c < d, got {a}, {b}, {c}, {d}")),
        )?;
        Ok(Trapezoid { a, b, c, d })
    }

    pub fn knots(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Plateau density `2 / ((d − a) + (c − b))`.
    pub fn height(&self) -> f64 {
        2.0 / ((self.d - self.a) + (self.c - self.b))
    }

    /// Total mass from the three pieces; equals one up to rounding.
    pub fn analytic_mass(&self) -> f64 {
        let h = self.height();
        0.5 * h * (self.b - self.a) + h * (self.c - self.b) + 0.5 * h * (self.d - self.c)
    }
}

impl ContinuousDist for Trapezoid {
    fn ln_pdf(&self, x: f64) -> f64 {
        self.pdf(x).ln()
    }

    fn pdf(&self, x: f64) -> f64 {
        let h = self.height();
        if !(x > self.a && x < self.d) {
            0.0
        } else if x < self.b {
            h * (x - self.a) / (self.b - self.a)
        } else if x <= self.c {
            h
        } else {
            h * (self.d - x) / (self.d - self.c)
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let h = self.height();
        if x <= self.a {
            0.0
        } else if x < self.b {
            0.5 * h * (x - self.a).powi(2) / (self.b - self.a)
        } else if x <= self.c {
            0.5 * h * (self.b - self.a) + h * (x - self.b)
        } else if x < self.d {
            1.0 - 0.5 * h * (self.d - x).powi(2) / (self.d - self.c)
        } else {
            1.0
        }
    }

    fn inverse_cdf(&self, p: f64) -> f64 {
        let h = self.height();
        let rise = 0.5 * h * (self.b - self.a);
        let flat = h * (self.c - self.b);
        if p <= rise {
            self.a + (2.0 * p * (self.b - self.a) / h).sqrt()
        } else if p <= rise + flat {
            self.b + (p - rise) / h
        } else {
            self.d - (2.0 * (1.0 - p) * (self.d - self.c) / h).sqrt()
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.a, self.d)
    }
}

/// A posterior predictive `p(x | X)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictive {
    Pareto(Pareto),
    Power(Power),
    ShiftedExp(ShiftedExp),
    Uniform(Uniform),
    TransformedPareto(TransformedPareto),
    Trapezoid(Trapezoid),
    /// Quadrature-backed predictive of the uniform model with unknown
    /// location and width.
    UniformJoint(Box<UniformJointPredictive>),
}

impl Predictive {
    fn inner(&self) -> &dyn ContinuousDist {
        match self {
            Predictive::Pareto(d) => d,
            Predictive::Power(d) => d,
            Predictive::ShiftedExp(d) => d,
            Predictive::Uniform(d) => d,
            Predictive::TransformedPareto(d) => d,
            Predictive::Trapezoid(d) => d,
            Predictive::UniformJoint(d) => d.as_ref(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Predictive::Pareto(_) => "pareto",
            Predictive::Power(_) => "power",
            Predictive::ShiftedExp(_) => "shifted_exp",
            Predictive::Uniform(_) => "uniform",
            Predictive::TransformedPareto(_) => "transformed_pareto",
            Predictive::Trapezoid(_) => "trapezoid",
            Predictive::UniformJoint(_) => "uniform_joint_numeric",
        }
    }
}

impl ContinuousDist for Predictive {
    fn ln_pdf(&self, x: f64) -> f64 {
        self.inner().ln_pdf(x)
    }

    fn pdf(&self, x: f64) -> f64 {
        self.inner().pdf(x)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.inner().cdf(x)
    }

    fn inverse_cdf(&self, p: f64) -> f64 {
        self.inner().inverse_cdf(p)
    }

    fn support(&self) -> (f64, f64) {
        self.inner().support()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.inner().sample(rng)
    }
}
