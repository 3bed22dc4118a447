//! JSON file formats. Every top-level config carries `"schema": 1`.

use multiphase_core::constructor::ConstructOptions;
use multiphase_core::layered::{InterfaceJump, LayeredGeometry, SolverConfig};
use multiphase_core::radial::PhaseConfig;
use multiphase_core::{FourierField, StarCurve, Vec2};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub fn check_schema(version: u32) -> Result<(), CliError> {
    if version != SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "unsupported schema version {version} (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

/// `mean + Σ a_k cos kθ + b_k sin kθ`, modes as `[k, a_k, b_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FieldDto {
    #[serde(default)]
    pub mean: f64,
    #[serde(default)]
    pub modes: Vec<(usize, f64, f64)>,
}

impl FieldDto {
    pub fn to_field(&self, truncation: usize) -> Result<FourierField, CliError> {
        if self.modes.iter().any(|&(k, _, _)| k == 0) {
            return Err(CliError::Validation("mode index 0 belongs in `mean`".into()));
        }
        Ok(FourierField::from_modes(self.mean, &self.modes, truncation)?)
    }

    /// Nonzero modes only, so round trips do not depend on truncation.
    pub fn from_field(field: &FourierField) -> Self {
        FieldDto {
            mean: field.mean(),
            modes: field.modes().filter(|&(_, a, b)| a != 0.0 || b != 0.0).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.modes.iter().map(|m| m.0).max().unwrap_or(0)
    }
}

/// A star-shaped curve `center + r(θ)e^{iθ}` with `r = r0 + Σ …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDto {
    pub center: [f64; 2],
    pub r0: f64,
    #[serde(default)]
    pub modes: Vec<(usize, f64, f64)>,
}

impl CurveDto {
    pub fn to_curve(&self) -> Result<StarCurve, CliError> {
        let field = FieldDto {
            mean: self.r0,
            modes: self.modes.clone(),
        };
        let radius = field.to_field(field.degree())?;
        Ok(StarCurve::new(Vec2::new(self.center[0], self.center[1]), radius)?)
    }

    pub fn from_curve(curve: &StarCurve) -> Self {
        let field = FieldDto::from_field(curve.radius_field());
        CurveDto {
            center: [curve.center().x, curve.center().y],
            r0: field.mean,
            modes: field.modes,
        }
    }
}

/// Either explicit curves or concentric circles of the given radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<CurveDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    pub sigmas: Vec<f64>,
    #[serde(default = "unit_source")]
    pub source: f64,
}

fn unit_source() -> f64 {
    1.0
}

impl GeometryDto {
    pub fn to_geometry(&self) -> Result<LayeredGeometry, CliError> {
        match (&self.curves, &self.radii) {
            (Some(curves), None) => {
                let curves = curves.iter().map(CurveDto::to_curve).collect::<Result<Vec<_>, _>>()?;
                Ok(LayeredGeometry::new(curves, self.sigmas.clone(), self.source)?)
            }
            (None, Some(radii)) => {
                let config = PhaseConfig::planar(radii.clone(), self.sigmas.clone())?;
                Ok(LayeredGeometry::concentric(&config, self.source)?)
            }
            _ => Err(CliError::Validation(
                "geometry needs exactly one of `curves` and `radii`".into(),
            )),
        }
    }

    pub fn from_geometry(geometry: &LayeredGeometry) -> Self {
        GeometryDto {
            curves: Some(geometry.curves().iter().map(CurveDto::from_curve).collect()),
            radii: None,
            sigmas: geometry.sigmas().to_vec(),
            source: geometry.source(),
        }
    }
}

/// Geometry file written by `construct` and accepted by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryFile {
    pub schema: u32,
    pub geometry: GeometryDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverDto {
    pub truncation: usize,
    pub nodes_per_curve: Option<usize>,
    pub residual_tolerance: f64,
    pub svd_cutoff: f64,
    pub max_rank_deficiency: usize,
    pub max_derivative_order: u32,
}

impl Default for SolverDto {
    fn default() -> Self {
        Self::from_config(&SolverConfig::default())
    }
}

impl SolverDto {
    pub fn from_config(c: &SolverConfig) -> Self {
        SolverDto {
            truncation: c.truncation,
            nodes_per_curve: c.nodes_per_curve,
            residual_tolerance: c.residual_tolerance,
            svd_cutoff: c.svd_cutoff,
            max_rank_deficiency: c.max_rank_deficiency,
            max_derivative_order: c.max_derivative_order,
        }
    }

    pub fn to_config(&self) -> Result<SolverConfig, CliError> {
        let config = SolverConfig {
            truncation: self.truncation,
            nodes_per_curve: self.nodes_per_curve,
            residual_tolerance: self.residual_tolerance,
            svd_cutoff: self.svd_cutoff,
            max_rank_deficiency: self.max_rank_deficiency,
            max_derivative_order: self.max_derivative_order,
            ..SolverConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpDto {
    pub interface: usize,
    pub values: FieldDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub schema: u32,
    pub geometry: GeometryDto,
    #[serde(default)]
    pub dirichlet: FieldDto,
    #[serde(default)]
    pub jumps: Vec<JumpDto>,
    #[serde(default)]
    pub solver: SolverDto,
}

impl SolveConfig {
    pub fn jumps(&self, truncation: usize) -> Result<Vec<InterfaceJump>, CliError> {
        self.jumps
            .iter()
            .map(|j| {
                Ok(InterfaceJump {
                    interface: j.interface,
                    values: j.values.to_field(truncation)?,
                })
            })
            .collect()
    }
}

/// Three or more layers with `R₂ = 1`, `σ₂ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructConfig {
    pub schema: u32,
    pub radii: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub eta: FieldDto,
    #[serde(default)]
    pub options: ConstructOptionsDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructOptionsDto {
    pub truncation: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub amplitude_cap: f64,
    pub mean_tolerance: f64,
    pub stall_ratio: f64,
    pub jacobian_step: f64,
    pub solver: SolverDto,
}

impl Default for ConstructOptionsDto {
    fn default() -> Self {
        let o = ConstructOptions::default();
        ConstructOptionsDto {
            truncation: o.truncation,
            tolerance: o.tolerance,
            max_iterations: o.max_iterations,
            amplitude_cap: o.amplitude_cap,
            mean_tolerance: o.mean_tolerance,
            stall_ratio: o.stall_ratio,
            jacobian_step: o.jacobian_step,
            solver: SolverDto::from_config(&o.solver),
        }
    }
}

impl ConstructOptionsDto {
    pub fn to_options(&self) -> Result<ConstructOptions, CliError> {
        let options = ConstructOptions {
            truncation: self.truncation,
            solver: self.solver.to_config()?,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            amplitude_cap: self.amplitude_cap,
            mean_tolerance: self.mean_tolerance,
            stall_ratio: self.stall_ratio,
            jacobian_step: self.jacobian_step,
        };
        options.validate()?;
        Ok(options)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeriveCheckConfig {
    pub schema: u32,
    pub radii: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub direction: FieldDto,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub options: ConstructOptionsDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub schema: u32,
    pub geometry: GeometryDto,
    pub orders: Vec<u32>,
    #[serde(default)]
    pub solver: SolverDto,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_round_trip() {
        let dto = CurveDto {
            center: [0.1, -0.2],
            r0: 0.5,
            modes: vec![(3, 0.03, 0.0), (5, 0.0, -0.01)],
        };
        let text = serde_json::to_string(&dto).unwrap();
        let back: CurveDto = serde_json::from_str(&text).unwrap();
        assert_eq!(back, dto);
        assert_eq!(CurveDto::from_curve(&dto.to_curve().unwrap()), dto);
    }

    #[test]
    fn solver_defaults_fill_missing_fields() {
        let s: SolverDto = serde_json::from_str(r#"{"truncation": 24}"#).unwrap();
        let c = s.to_config().unwrap();
        assert_eq!(c.truncation, 24);
        assert_eq!(c.residual_tolerance, SolverConfig::default().residual_tolerance);
    }

    #[test]
    fn geometry_needs_one_description() {
        let g = GeometryDto {
            curves: None,
            radii: None,
            sigmas: vec![1.0],
            source: 1.0,
        };
        assert!(matches!(g.to_geometry(), Err(CliError::Validation(_))));
    }
}
