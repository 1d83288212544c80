//! Numerical tolerances shared by the solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic trapezoidal quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(rename = "points")]
    pub base_points_per_dim: usize,
    #[serde(rename = "tol")]
    pub abs_tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            base_points_per_dim: 16,
            abs_tol: 1e-12,
            max_doublings: 14,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_points_per_dim < 4 {
            return Err(Error::InvalidParameter(format!(
                "quadrature needs at least 4 base points per dimension, got {}",
                self.base_points_per_dim
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerance must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_doublings == 0 {
            return Err(Error::InvalidParameter(
                "max_doublings must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Bracketing root finder settings.
///
/// `abs_tol` bounds the residual of the gap function at an accepted root,
/// `x_tol` the final bracket width. A root is accepted once both hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RootConfig {
    pub abs_tol: f64,
    pub x_tol: f64,
    pub max_iter: usize,
    pub classification_tol: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            x_tol: 1e-13,
            max_iter: 400,
            classification_tol: 1e-8,
        }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.x_tol > 0.0
            && self.max_iter > 0
            && self.classification_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "root tolerances must be positive: {self:?}"
            )))
        }
    }
}

/// Everything a solver call needs besides the model and the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default)]
    pub quad: QuadratureConfig,
    #[serde(default)]
    pub root: RootConfig,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        self.root.validate()
    }
}
