//! Pieces shared by the conjugate families.

use serde::{Deserialize, Serialize};

use crate::distributions::Gamma;
use crate::error::{Error, Result};

/// `Γ(A, B)` posterior over a shape or rate parameter (rate form).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPosterior {
    /// `A`, the updated pseudocount.
    pub shape: f64,
    /// `B`
    pub rate: f64,
}

impl GammaPosterior {
    /// Both parameters zero: the improper `1/α` prior with no data.
    pub fn is_improper(&self) -> bool {
        self.shape == 0.0
    }

    pub fn distribution(&self) -> Result<Gamma> {
        if self.is_improper() {
            return Err(improper());
        }
        Gamma::new(self.shape, self.rate)
    }
}

/// `(n + n0) / (n + n0 + 1)`, the factor behind every extrapolated bound.
pub fn extrapolation_ratio(n_eff: f64) -> f64 {
    n_eff / (n_eff + 1.0)
}

pub(crate) fn improper() -> Error {
    Error::Improper("non-informative prior with no observations; no predictive exists".into())
}

/// Checks a pseudocount and, when the prior is proper, that the prior and
/// data together carry some information.
pub(crate) fn check_pseudocount(n0: f64) -> Result<()> {
    if n0 >= 0.0 && n0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "pseudocount must be a non-negative real, got {n0}"
        )))
    }
}
