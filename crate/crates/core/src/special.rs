//! Incomplete beta with zero second parameter and the upper incomplete gamma
//! function at non-positive order.

use crate::error::{domain, ensure, param, Error, Result};
use crate::quadrature::Quadrature;

pub use statrs::function::gamma::ln_gamma;

/// Stopping rule for the series evaluations in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesAccuracy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesAccuracy {
    fn default() -> Self {
        SeriesAccuracy {
            rel_tol: 1e-12,
            max_terms: 1_000_000,
        }
    }
}

impl SeriesAccuracy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        ensure(rel_tol > 0.0 && rel_tol < 1.0, || {
            param(format!("rel_tol must lie in (0,1), got {rel_tol}"))
        })?;
        ensure(max_terms >= 1, || param("max_terms must be at least 1"))?;
        Ok(SeriesAccuracy { rel_tol, max_terms })
    }
}

/// Arguments above this are refused; the series would crawl.
pub const INC_BETA_B0_MAX_X: f64 = 0.999;

/// `Σ_{k≥0} x^k/(a+k)`, i.e. `B(x; a, 0) / x^a`.
///
/// The scaled form never underflows for large `a`, which the evidence
/// computations in the uniform model rely on.
pub fn inc_beta_b0_scaled(x: f64, a: f64, acc: SeriesAccuracy) -> Result<f64> {
    ensure(a > 0.0 && a.is_finite(), || {
        domain(format!("inc_beta_b0 needs a > 0, got {a}"))
    })?;
    ensure(x >= 0.0, || domain(format!("inc_beta_b0 needs x > 0, got {x}")))?;
    ensure(x < 1.0, || {
        Error::Divergence(format!("B(x; a, 0) diverges for x >= 1 (x = {x})"))
    })?;
    ensure(x <= INC_BETA_B0_MAX_X, || {
        Error::Convergence(format!(
            "x = {x} exceeds {INC_BETA_B0_MAX_X}; series refused, integrate the evidence directly"
        ))
    })?;
    let mut sum = 1.0 / a;
    let mut power = 1.0;
    for k in 1..acc.max_terms {
        power *= x;
        let term = power / (a + k as f64);
        sum += term;
        // Terms decrease at least geometrically, so term·x/(1−x) bounds the tail.
        if term * x / (1.0 - x) < acc.rel_tol * sum {
            return Ok(sum);
        }
    }
    let tail = power * x / ((a + acc.max_terms as f64) * (1.0 - x));
    Err(Error::Convergence(format!(
        "max_terms = {} reached; achieved relative bound {:.3e}",
        acc.max_terms,
        tail / sum
    )))
}

/// `B(x; a, 0) = ∫₀ˣ t^{a−1}/(1−t) dt = Σ_{k≥0} x^{a+k}/(a+k)`.
pub fn inc_beta_b0(x: f64, a: f64, acc: SeriesAccuracy) -> Result<f64> {
    let s = inc_beta_b0_scaled(x, a, acc)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((a * x.ln()).exp() * s)
}

/// `J(s, y) = ∫₀^∞ (1+u/y)^{s−1} e^{−u} du`, so that `Γ(s, y) = y^{s−1} e^{−y} J`.
fn upper_gamma_core(s: f64, y: f64) -> f64 {
    // The integrand decays over a width of about y/(1−s) near the origin.
    let width = if s < 1.0 { y / (1.0 - s) } else { 1.0 };
    let scale = width.clamp(1e-300, 1.0);
    let q = Quadrature::with_tolerance(1e-300, 1e-14).with_scale(scale);
    q.integrate(
        |u| {
            let base = (u / y).ln_1p();
            ((s - 1.0) * base - u).exp()
        },
        0.0,
        f64::INFINITY,
    )
    .value
}

/// Natural log of the upper incomplete gamma function `Γ(s, y)`.
pub fn ln_upper_inc_gamma(s: f64, y: f64) -> Result<f64> {
    ensure(y > 0.0, || {
        domain(format!(
            "upper incomplete gamma needs y > 0 for order {s} (got y = {y})"
        ))
    })?;
    ensure(s.is_finite(), || domain("order must be finite"))?;
    if y.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    let j = upper_gamma_core(s, y);
    Ok((s - 1.0) * y.ln() - y + j.ln())
}

/// Upper incomplete gamma `Γ(s, y) = ∫_y^∞ t^{s−1} e^{−t} dt`.
///
/// Intended for `s ≤ 0` where the regularized forms do not exist, though any
/// finite order is accepted. Computed by adaptive quadrature after factoring
/// out `y^{s−1} e^{−y}`.
pub fn upper_inc_gamma_neg(s: f64, y: f64) -> Result<f64> {
    Ok(ln_upper_inc_gamma(s, y)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn inc_beta_identities() {
        let acc = SeriesAccuracy::default();
        let v = inc_beta_b0(0.5, 1.0, acc).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12);
        let v = inc_beta_b0(0.25, 2.0, acc).unwrap();
        assert!((v - 0.037_682_072_451_780_9).abs() < 1e-12);
        assert!((v - (-0.25 - 0.75f64.ln())).abs() < 1e-12);
        assert_eq!(inc_beta_b0(0.0, 3.0, acc).unwrap(), 0.0);
        assert!(inc_beta_b0(1e-300, 1.0, acc).unwrap() < 1e-299);
    }

    #[test]
    fn inc_beta_errors() {
        let acc = SeriesAccuracy::default();
        assert!(matches!(
            inc_beta_b0(1.0, 1.0, acc),
            Err(Error::Divergence(_))
        ));
        assert!(matches!(
            inc_beta_b0(0.9995, 1.0, acc),
            Err(Error::Convergence(_))
        ));
        let tight = SeriesAccuracy::new(1e-12, 5).unwrap();
        match inc_beta_b0(0.9, 1.0, tight) {
            Err(Error::Convergence(msg)) => assert!(msg.contains("achieved")),
            other => panic!("expected convergence error, got {other:?}"),
        }
        assert!(inc_beta_b0(0.5, 0.0, acc).is_err());
        assert!(SeriesAccuracy::new(1.5, 10).is_err());
        assert!(SeriesAccuracy::new(1e-3, 0).is_err());
    }

    #[test]
    fn inc_beta_matches_direct_integration() {
        let acc = SeriesAccuracy::default();
        for &(x, a) in &[(0.3, 0.5), (0.9, 4.0), (0.98, 20.0), (0.6, 49.0)] {
            let series = inc_beta_b0(x, a, acc).unwrap();
            let direct = integrate(|t: f64| t.powf(a - 1.0) / (1.0 - t), 0.0, x);
            assert!(
                ((series - direct) / direct).abs() < 1e-8,
                "x={x} a={a}: {series} vs {direct}"
            );
        }
    }

    #[test]
    fn exponential_integral_values() {
        // E1(1) = 0.21938393439552027...
        let e1 = upper_inc_gamma_neg(0.0, 1.0).unwrap();
        assert!((e1 - 0.219_383_934_395_520_27).abs() < 1e-13);
        let g = upper_inc_gamma_neg(-1.0, 1.0).unwrap();
        assert!((g - ((-1f64).exp() - 0.219_383_934_395_520_27)).abs() < 1e-13);
        assert!((g - 0.148_495_506_775_922_1).abs() < 1e-12);
    }

    #[test]
    fn upper_gamma_edges() {
        assert!(upper_inc_gamma_neg(-2.0, 0.0).is_err());
        assert!(upper_inc_gamma_neg(-2.0, -1.0).is_err());
        assert_eq!(upper_inc_gamma_neg(-2.0, f64::INFINITY).unwrap(), 0.0);
        assert!(upper_inc_gamma_neg(-2.0, 700.0).unwrap() < 1e-300);
        // Positive order agrees with the regularized gamma from statrs.
        let reg = statrs::function::gamma::gamma_ur(2.5, 1.7) * ln_gamma(2.5).exp();
        assert!((upper_inc_gamma_neg(2.5, 1.7).unwrap() - reg).abs() < 1e-12);
    }
}
