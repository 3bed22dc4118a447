//! First-order variation of the two-phase state under a normal displacement
//! `ξ` of the outer boundary, and a finite-difference check of the
//! linearization of the Neumann-tracking map.
//!
//! The derivative `v′[ξ]` is harmonic in each phase with continuous value and
//! flux across `r = R` and Dirichlet data `c_bc·ξ` on the unit circle,
//! `c_bc = (1/N)(1 − 1/σ₃)`. Hence `∂_n v′[ξ] = c_bc·ℕ(ξ)`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::constructor::{boundary_coefficient, check_config, psi_map, ConstructOptions};
use crate::dtn::DtnSpectrum;
use crate::error::{Error, Result};
use crate::fourier::FourierField;
use crate::layered::{solve, LayeredGeometry, PiecewiseSolution, SolverConfig};
use crate::radial::PhaseConfig;

#[derive(Debug, Clone)]
pub struct ShapeDerivative {
    pub direction: FourierField,
    /// `c_bc = (1/N)(1 − 1/σ₃)`.
    pub coefficient: f64,
    pub solution: PiecewiseSolution,
    /// `∂_n v′` on the unit circle.
    pub neumann: FourierField,
}

impl ShapeDerivative {
    /// Trace of `v′` on the unit circle; equals `c_bc·ξ` up to the solver
    /// tolerance.
    pub fn trace(&self) -> Result<FourierField> {
        self.solution.boundary_trace(1, 0)
    }
}

/// Planar, `σ₂ = 1`.
pub fn shape_derivative(
    xi: &FourierField,
    inner_radius: f64,
    sigma1: f64,
    sigma3: f64,
    solver: &SolverConfig,
) -> Result<ShapeDerivative> {
    if !(sigma3 > 0.0) || !sigma3.is_finite() {
        return Err(Error::Domain("σ₃ must be positive"));
    }
    if !(inner_radius > 0.0 && inner_radius < 1.0) {
        return Err(Error::Domain("inner radius must lie in (0, 1)"));
    }
    if xi.truncation() > solver.truncation {
        return Err(Error::TruncationMismatch {
            field: xi.truncation(),
            spectrum: solver.truncation,
        });
    }
    let coefficient = (1.0 - 1.0 / sigma3) / 2.0;
    let phases = PhaseConfig::planar(vec![inner_radius, 1.0], vec![sigma1, 1.0])?;
    let geometry = LayeredGeometry::concentric(&phases, 0.0)?;
    let solution = solve(&geometry, &xi.scaled(coefficient), &[], solver)?;
    let neumann = solution.boundary_trace(1, 1)?;
    Ok(ShapeDerivative {
        direction: xi.clone(),
        coefficient,
        solution,
        neumann,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdStep {
    pub epsilon: f64,
    /// `(Ψ(εξ, 0) − Ψ(−εξ, 0))/(2ε)`.
    pub difference: FourierField,
    /// `‖difference − c_bc·ℕ(ξ)‖_{L²}`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    pub direction: FourierField,
    /// `c_bc·ℕ(ξ)`.
    pub reference: FourierField,
    pub steps: Vec<FdStep>,
    /// Observed order between consecutive steps; `None` once either error is
    /// below `noise_floor`.
    pub orders: Vec<Option<f64>>,
    pub noise_floor: f64,
}

impl FdReport {
    pub fn errors_decreasing(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].error < w[0].error)
    }
}

/// Below this error level the differences are dominated by solver round-off
/// amplified by `1/ε`.
pub const FD_NOISE_FLOOR: f64 = 1e-11;

/// Central differences of `Ψ(·, 0)` along `ξ` compared with `c_bc·ℕ(ξ)`.
pub fn fd_validate(
    xi: &FourierField,
    ladder: &[f64],
    config: &PhaseConfig,
    options: &ConstructOptions,
) -> Result<FdReport> {
    check_config(config)?;
    if ladder.is_empty() || ladder.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Config("step sizes must be positive"));
    }
    let k = options.truncation;
    let spectrum = DtnSpectrum::new(config.radii()[0], config.sigmas()[0], 2, k)?;
    let reference = spectrum.apply(xi)?.scaled(boundary_coefficient(config));
    let eta = FourierField::zeros(k);
    let steps = ladder
        .iter()
        .map(|&epsilon| {
            let plus = psi_map(&xi.scaled(epsilon), &eta, config, options)?;
            let minus = psi_map(&xi.scaled(-epsilon), &eta, config, options)?;
            let difference = (&plus.residual - &minus.residual).scaled(0.5 / epsilon);
            let error = (&difference - &reference).l2_norm();
            Ok(FdStep {
                epsilon,
                difference,
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let orders = steps
        .windows(2)
        .map(|w| {
            (w[0].error > FD_NOISE_FLOOR && w[1].error > FD_NOISE_FLOOR)
                .then(|| (w[0].error / w[1].error).ln() / (w[0].epsilon / w[1].epsilon).ln())
        })
        .collect();
    Ok(FdReport {
        direction: xi.clone(),
        reference,
        steps,
        orders,
        noise_floor: FD_NOISE_FLOOR,
    })
}
