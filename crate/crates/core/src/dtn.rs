//! The two-phase Dirichlet-to-Neumann map on concentric circles.
//!
//! With the inner disk of radius `R < 1` carrying conductivity `σ₁` and the
//! annulus `R < r < 1` conductivity 1, the map `ξ ↦ ∂_n w[ξ]` is diagonal on
//! spherical harmonics of degree `k`, with eigenvalue
//!
//! ```text
//! μ_k = k [(2 − N − k)(1 − σ₁) + (N − 2 + k + kσ₁) R^{2−N−2k}] / F,
//! F   = k(1 − σ₁) + (N − 2 + k + kσ₁) R^{2−N−2k}.
//! ```

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fourier::FourierField;
use crate::layered::{solve, InterfaceJump, LayeredGeometry, SolverConfig};
use crate::radial::PhaseConfig;

fn check_parameters(inner_radius: f64, sigma1: f64, dimension: u32) -> Result<()> {
    if !(inner_radius > 0.0 && inner_radius <= 1.0) {
        return Err(Error::Domain("inner radius must lie in (0, 1]"));
    }
    if !(sigma1 > 0.0) || !sigma1.is_finite() {
        return Err(Error::Domain("inner conductivity must be positive"));
    }
    if dimension < 2 {
        return Err(Error::Domain("dimension must be at least 2"));
    }
    Ok(())
}

/// The pieces of the eigenvalue formula: `(numerator φ, denominator F)`,
/// so that `μ_k = k φ / F`.
pub fn eigenvalue_parts(k: usize, inner_radius: f64, sigma1: f64, dimension: u32) -> Result<(f64, f64)> {
    check_parameters(inner_radius, sigma1, dimension)?;
    let (kf, n) = (k as f64, dimension as f64);
    let power = inner_radius.powf(2.0 - n - 2.0 * kf);
    let growth = n - 2.0 + kf + kf * sigma1;
    let numerator = (2.0 - n - kf) * (1.0 - sigma1) + growth * power;
    let denominator = kf * (1.0 - sigma1) + growth * power;
    Ok((numerator, denominator))
}

/// `μ_k` for the mode-`k` harmonics.
pub fn eigenvalue(k: usize, inner_radius: f64, sigma1: f64, dimension: u32) -> Result<f64> {
    let (numerator, denominator) = eigenvalue_parts(k, inner_radius, sigma1, dimension)?;
    if k == 0 {
        return Ok(0.0);
    }
    if !(denominator > 0.0) {
        return Err(Error::Domain("eigenvalue denominator is not positive"));
    }
    if !(numerator > 0.0) {
        return Err(Error::Domain("eigenvalue numerator is not positive"));
    }
    Ok(k as f64 * numerator / denominator)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inverse {
    /// `ℕ⁻¹` on zero-mean fields.
    Dtn,
    /// `(Id + ℕ)⁻¹` on all fields.
    IdPlusDtn,
}

/// Closed-form eigenvalues `μ_0 … μ_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnSpectrum {
    inner_radius: f64,
    sigma1: f64,
    dimension: u32,
    eigenvalues: Vec<f64>,
}

impl DtnSpectrum {
    pub fn new(inner_radius: f64, sigma1: f64, dimension: u32, truncation: usize) -> Result<Self> {
        let eigenvalues = (0..=truncation)
            .map(|k| eigenvalue(k, inner_radius, sigma1, dimension))
            .collect::<Result<_>>()?;
        Ok(DtnSpectrum {
            inner_radius,
            sigma1,
            dimension,
            eigenvalues,
        })
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn truncation(&self) -> usize {
        self.eigenvalues.len() - 1
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn check_truncation(&self, field: &FourierField) -> Result<()> {
        if field.truncation() > self.truncation() {
            return Err(Error::TruncationMismatch {
                field: field.truncation(),
                spectrum: self.truncation(),
            });
        }
        Ok(())
    }

    /// `ℕ(ξ)`; constants are sent to zero.
    pub fn apply(&self, xi: &FourierField) -> Result<FourierField> {
        self.check_truncation(xi)?;
        Ok(xi.map_modes(|k| self.eigenvalues[k]).zero_mean_part())
    }

    pub fn invert(&self, eta: &FourierField, mode: Inverse) -> Result<FourierField> {
        self.check_truncation(eta)?;
        match mode {
            Inverse::Dtn => {
                if eta.mean() != 0.0 {
                    return Err(Error::KernelObstruction { mean: eta.mean() });
                }
                Ok(eta
                    .map_modes(|k| if k == 0 { 0.0 } else { 1.0 / self.eigenvalues[k] })
                    .zero_mean_part())
            }
            Inverse::IdPlusDtn => Ok(eta.map_modes(|k| 1.0 / (1.0 + self.eigenvalues[k]))),
        }
    }
}

/// `μ_k` recovered from a collocation solve of the `σ`-harmonic extension of
/// `cos kθ` (planar only).
pub fn numerical_dtn(inner_radius: f64, sigma1: f64, k: usize, config: &SolverConfig) -> Result<f64> {
    check_parameters(inner_radius, sigma1, 2)?;
    if inner_radius >= 1.0 {
        return Err(Error::Domain("the numerical map needs an inner radius below 1"));
    }
    let phases = PhaseConfig::planar(vec![inner_radius, 1.0], vec![sigma1, 1.0])?;
    let geometry = LayeredGeometry::concentric(&phases, 0.0)?;
    let config = SolverConfig {
        truncation: config.truncation.max(k),
        ..config.clone()
    };
    let data = FourierField::cosine(k, 1.0, config.truncation);
    let solution = solve(&geometry, &data, &[], &config)?;
    let neumann = solution.boundary_trace(1, 1)?;
    Ok(neumann.mode(k).0)
}

/// The jump-to-Neumann map on a concentric configuration: `∂_n w` on the
/// outer circle, where `w` is harmonic in each phase, vanishes on the outer
/// circle, jumps by `ξ` across `∂Ω₂` with continuous flux, and is fully
/// continuous across every other interface.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpToNeumann {
    pub neumann: FourierField,
    /// `g_k`: cosine coefficient of the response to `cos kθ`, `k = 0..=K`.
    pub gains: Vec<f64>,
}

pub fn jump_to_neumann(config: &PhaseConfig, xi: &FourierField, solver: &SolverConfig) -> Result<JumpToNeumann> {
    if config.layers() < 3 {
        return Err(Error::Domain("the jump-to-Neumann map needs at least three layers"));
    }
    if xi.truncation() > solver.truncation {
        return Err(Error::TruncationMismatch {
            field: xi.truncation(),
            spectrum: solver.truncation,
        });
    }
    let geometry = LayeredGeometry::concentric(config, 0.0)?;
    let outer = config.layers() - 1;
    let response = |field: &FourierField| -> Result<FourierField> {
        let jump = InterfaceJump {
            interface: 1,
            values: field.clone(),
        };
        let solution = solve(&geometry, &FourierField::zeros(0), &[jump], solver)?;
        solution.boundary_trace(outer, 1)
    };
    let neumann = response(xi)?;
    let gains = (0..=solver.truncation)
        .map(|k| Ok(response(&FourierField::cosine(k, 1.0, solver.truncation))?.mode(k).0))
        .collect::<Result<_>>()?;
    Ok(JumpToNeumann { neumann, gains })
}
