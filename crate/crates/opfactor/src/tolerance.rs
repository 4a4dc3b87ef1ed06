//! Tolerance knobs shared by every numerical decision in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{OpfactorError, Result};

/// Relative tolerances for spectral tests, rank cutoffs, and residuals.
///
/// * `eig_rel` — eigenvalue slack for positive-semidefinite tests, relative
///   to the spectral norm of the operator under test.
/// * `rank_rel` — singular-value cutoff for pseudoinverses and range
///   projections, relative to the largest singular value.
/// * `residual_rel` — residual bound for factorization and inclusion
///   checks, relative to the scale of the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    pub eig_rel: f64,
    pub rank_rel: f64,
    pub residual_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eig_rel: 1e-9,
            rank_rel: 1e-10,
            residual_rel: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(eig_rel: f64, rank_rel: f64, residual_rel: f64) -> Result<Self> {
        let t = Self {
            eig_rel,
            rank_rel,
            residual_rel,
        };
        t.validate()?;
        Ok(t)
    }

    /// Derives all three knobs from a single scalar `t`: residuals at `t`,
    /// eigenvalue slack at `t/10`, rank cutoff at `t/100`.  The default
    /// tolerance is `from_scalar(1e-8)`.
    pub fn from_scalar(t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(OpfactorError::InvalidTolerance(format!(
                "scalar tolerance must lie in (0, 1), got {t}"
            )));
        }
        Ok(Self {
            eig_rel: t / 10.0,
            rank_rel: t / 100.0,
            residual_rel: t,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eig_rel", self.eig_rel),
            ("rank_rel", self.rank_rel),
            ("residual_rel", self.residual_rel),
        ] {
            if !(v.is_finite() && (0.0..1.0).contains(&v)) {
                return Err(OpfactorError::InvalidTolerance(format!(
                    "{name} must lie in [0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_values() {
        let t = Tolerance::default();
        assert_eq!(t.eig_rel, 1e-9);
        assert_eq!(t.rank_rel, 1e-10);
        assert_eq!(t.residual_rel, 1e-8);
        t.validate().unwrap();
    }

    #[test]
    fn scalar_reproduces_default() {
        let t = Tolerance::from_scalar(1e-8).unwrap();
        assert_eq!(t, Tolerance::default());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Tolerance::new(1.0, 0.0, 0.0).is_err());
        assert!(Tolerance::new(-1e-9, 0.0, 0.0).is_err());
        assert!(Tolerance::from_scalar(0.0).is_err());
        assert!(Tolerance::from_scalar(f64::NAN).is_err());
        assert!(Tolerance::from_scalar(1.0).is_err());
    }
}
