//! JSON run configuration.

use std::path::Path;

use bcsphase_core::dispersion::build_bump_dispersion;
use bcsphase_core::gap::check_admissible;
use bcsphase_core::{
    BzGeometry, DispersionModel, GridSpec, MeasureFractions, QuadratureConfig, RootConfig,
    SolverConfig,
};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Constant {
        b: usize,
        e: f64,
    },
    MultiOrbital {
        b: usize,
        b_prime: usize,
        e_min: f64,
        e_max: f64,
    },
    #[serde(rename = "cosine_1d")]
    Cosine1d {
        t_hop: f64,
        e_min: f64,
    },
    Bump {
        b: usize,
        /// Measure of the top plateau.
        s: f64,
        /// One minus the measure of the bottom level set.
        t: f64,
        e_min: f64,
        e_max: f64,
        /// Rows are the lattice basis vectors; the unit lattice of
        /// dimension `dim` when absent.
        #[serde(default)]
        basis: Option<Vec<Vec<f64>>>,
        #[serde(default = "one")]
        dim: usize,
    },
}

fn one() -> usize {
    1
}

impl ModelSpec {
    pub fn build(&self) -> bcsphase_core::Result<DispersionModel> {
        match *self {
            ModelSpec::Constant { b, e } => DispersionModel::constant(b, e),
            ModelSpec::MultiOrbital {
                b,
                b_prime,
                e_min,
                e_max,
            } => DispersionModel::multi_orbital(b, b_prime, e_min, e_max),
            ModelSpec::Cosine1d { t_hop, e_min } => DispersionModel::cosine_1d(t_hop, e_min),
            ModelSpec::Bump {
                b,
                s,
                t,
                e_min,
                e_max,
                ref basis,
                dim,
            } => {
                let geometry = match basis {
                    Some(rows) => BzGeometry::new(rows)?,
                    None => BzGeometry::canonical(dim)?,
                };
                build_bump_dispersion(b, MeasureFractions::new(s, t)?, e_min, e_max, geometry)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapBlock {
    pub beta: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauCurveBlock {
    pub core_points: usize,
    pub points_per_decade: usize,
    pub decades: u32,
    pub with_tau_second: bool,
}

impl Default for TauCurveBlock {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            core_points: g.core_points,
            points_per_decade: g.points_per_decade,
            decades: g.decades,
            with_tau_second: true,
        }
    }
}

impl TauCurveBlock {
    pub fn grid(&self) -> GridSpec {
        GridSpec {
            core_points: self.core_points,
            points_per_decade: self.points_per_decade,
            decades: self.decades,
            with_tau_second: self.with_tau_second,
        }
    }
}

/// Inclusive, evenly spaced range.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramBlock {
    pub beta: Axis,
    pub t: Axis,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub coupling: f64,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub root: RootConfig,
    #[serde(default)]
    pub gap: Option<GapBlock>,
    #[serde(default)]
    pub tau_curve: Option<TauCurveBlock>,
    #[serde(default)]
    pub phase_diagram: Option<PhaseDiagramBlock>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn solver(&self) -> Result<SolverConfig, CliError> {
        let cfg = SolverConfig {
            quad: self.quadrature,
            root: self.root,
        };
        cfg.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// The model, with the coupling checked for sign and admissibility.
    pub fn admissible_model(&self) -> Result<DispersionModel, CliError> {
        let model = self
            .model
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?;
        check_admissible(&model, self.coupling).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(model)
    }
}
