//! Non-radial configurations whose torsion function has constant normal
//! derivatives of every order on the outer boundary.
//!
//! The inner interface is `r = R₁ + η(θ)` and the middle one `r = 1 + ξ(θ)`.
//! For given `η` we look for `ξ` such that the two-phase state `v_{ξ,η}`
//! (Dirichlet data `v₀` on `r = 1 + ξ`) has the same flux there as the
//! radial outer state `v₀`. Outside `r = 1 + ξ` the glued solution is then
//! radial, so every `(∂_n)ᵏu` is constant on the outer circle.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::dtn::{DtnSpectrum, Inverse};
use crate::error::{Error, Result};
use crate::fourier::FourierField;
use crate::geometry::{pullback_grid, StarCurve, Vec2};
use crate::layered::{solve_pointwise, LayeredGeometry, PiecewiseSolution, SolverConfig};
use crate::radial::{merged_solution, PhaseConfig, RadialProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructOptions {
    /// Fourier truncation `K` of `ξ`, `η` and `Ψ`.
    pub truncation: usize,
    /// Collocation settings; the series truncation must be at least `K`.
    pub solver: SolverConfig,
    /// Newton stops once `‖Ψ‖_{L²} ≤ tolerance`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// `‖η‖∞ ≤ amplitude_cap · R₁`.
    pub amplitude_cap: f64,
    /// Largest admissible `|mean Ψ|` before projection.
    pub mean_tolerance: f64,
    /// A quasi-Newton step that leaves more than this fraction of the
    /// residual counts as a stall.
    pub stall_ratio: f64,
    /// Central-difference step for Jacobian columns.
    pub jacobian_step: f64,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            truncation: 16,
            solver: SolverConfig::with_truncation(40),
            tolerance: 1e-10,
            max_iterations: 50,
            amplitude_cap: 0.1,
            mean_tolerance: 1e-8,
            stall_ratio: 0.9,
            jacobian_step: 1e-6,
        }
    }
}

impl ConstructOptions {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if self.truncation == 0 || self.truncation > self.solver.truncation {
            return Err(Error::Config("field truncation must lie in 1..=series truncation"));
        }
        let positive = [self.tolerance, self.amplitude_cap, self.mean_tolerance, self.jacobian_step];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Config("construction tolerances must be positive"));
        }
        if !(self.stall_ratio > 0.0 && self.stall_ratio < 1.0) {
            return Err(Error::Config("stall ratio must lie in (0, 1)"));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("at least one iteration is required"));
        }
        Ok(())
    }
}

/// Rejects configurations outside the normalized setting: planar, at least
/// three layers, `R₂ = 1` and `σ₂ = 1`.
pub fn check_config(config: &PhaseConfig) -> Result<()> {
    if config.layers() < 3 {
        return Err(Error::Config("the construction needs at least three layers"));
    }
    if config.dimension() != 2 {
        return Err(Error::Config("the construction is planar"));
    }
    if config.radii()[1] != 1.0 || config.sigmas()[1] != 1.0 {
        return Err(Error::Config("the construction expects R₂ = 1 and σ₂ = 1"));
    }
    Ok(())
}

/// `c_bc = (1/N)(1 − 1/σ₃)`.
pub fn boundary_coefficient(config: &PhaseConfig) -> f64 {
    (1.0 - 1.0 / config.sigmas()[2]) / config.dimension() as f64
}

#[derive(Debug, Clone)]
pub struct PsiEvaluation {
    pub xi: FourierField,
    pub eta: FourierField,
    /// Zero-mean projection of `Ψ(ξ, η)`.
    pub residual: FourierField,
    pub raw_mean: f64,
    /// Samples of `Ψ` at the pullback nodes.
    pub samples: Vec<f64>,
    pub solution: PiecewiseSolution,
}

impl PsiEvaluation {
    pub fn residual_norm(&self) -> f64 {
        self.residual.l2_norm()
    }
}

/// Two-phase geometry `r = R₁ + η` inside `r = 1 + ξ`.
pub fn inner_geometry(xi: &FourierField, eta: &FourierField, config: &PhaseConfig) -> Result<LayeredGeometry> {
    let inner = StarCurve::perturbed_circle(config.radii()[0], eta)?;
    let outer = StarCurve::perturbed_circle(1.0, xi)?;
    LayeredGeometry::new(vec![inner, outer], vec![config.sigmas()[0], 1.0], 1.0)
}

/// `Ψ(ξ, η) = (∂_n v_{ξ,η} − σ₃∂_n v₀)(γ(θ)) · J_τ(ξ)(θ)` on `γ(θ) = (1 + ξ(θ))e^{iθ}`.
pub fn psi_map(
    xi: &FourierField,
    eta: &FourierField,
    config: &PhaseConfig,
    options: &ConstructOptions,
) -> Result<PsiEvaluation> {
    check_config(config)?;
    options.validate()?;
    let solver = &options.solver;
    if xi.truncation() > options.truncation || eta.truncation() > options.truncation {
        return Err(Error::TruncationMismatch {
            field: xi.truncation().max(eta.truncation()),
            spectrum: options.truncation,
        });
    }
    let geometry = inner_geometry(xi, eta, config)?;
    let v0 = merged_solution(config)?;
    let sigma3 = config.sigmas()[2];
    let solution = solve_pointwise(&geometry, &|p| v0.value_in_shell(0, p.point.norm()), &[], solver)?;

    let m = solver.nodes();
    let inner_flux = solution.boundary_samples(1, 1, 1, m)?;
    let grid = pullback_grid(geometry.curve(1), m)?;
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&inner_flux)
        .map(|(p, dn)| {
            let r = p.point.norm();
            let outer_flux = sigma3 * v0.derivative_in_shell(0, r, 1) * p.point.dot(&p.normal) / r;
            (dn - outer_flux) * p.speed
        })
        .collect();
    let projected = FourierField::from_samples(&samples, options.truncation)?;
    let raw_mean = projected.mean();
    if !(raw_mean.abs() <= options.mean_tolerance) {
        return Err(Error::MeanDefect {
            raw_mean,
            tolerance: options.mean_tolerance,
        });
    }
    Ok(PsiEvaluation {
        xi: xi.clone(),
        eta: eta.clone(),
        residual: projected.zero_mean_part(),
        raw_mean,
        samples,
        solution,
    })
}

/// Which linear model produced a Newton step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Frozen,
    Jacobian,
}

#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub eta: FourierField,
    pub xi: FourierField,
    /// `‖Ψ‖_{L²}` at every iterate, starting with `ξ = 0`.
    pub trace: Vec<f64>,
    pub steps: Vec<StepKind>,
    /// Every iterate, `ξ₀ = 0` first.
    pub iterates: Vec<FourierField>,
    pub glued: GluedSolution,
}

impl ConstructionResult {
    /// Number of `Ψ` evaluations in the Newton loop.
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn final_residual(&self) -> f64 {
        *self.trace.last().unwrap_or(&0.0)
    }
}

/// Central-difference Jacobian of `Ψ(·, η)` in the coordinates
/// `[a_1, b_1, …, a_K, b_K]`.
pub fn psi_jacobian(
    xi: &FourierField,
    eta: &FourierField,
    config: &PhaseConfig,
    options: &ConstructOptions,
) -> Result<DMatrix<f64>> {
    let k = options.truncation;
    let base = xi.with_truncation(k).zero_mean_part().to_coefficients();
    let n = base.len();
    let h = options.jacobian_step;
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += h;
        minus[j] -= h;
        let fp = psi_map(&FourierField::from_coefficients(&plus), eta, config, options)?;
        let fm = psi_map(&FourierField::from_coefficients(&minus), eta, config, options)?;
        let cp = fp.residual.with_truncation(k).to_coefficients();
        let cm = fm.residual.with_truncation(k).to_coefficients();
        for i in 0..n {
            jac[(i, j)] = (cp[i] - cm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Solves `Ψ(ξ, η) = 0` for `ξ` near 0 and glues the result with the radial
/// outer state.
pub fn construct(eta: &FourierField, config: &PhaseConfig, options: &ConstructOptions) -> Result<ConstructionResult> {
    check_config(config)?;
    options.validate()?;
    let c_bc = boundary_coefficient(config);
    if c_bc == 0.0 {
        return Err(Error::DegenerateLinearization {
            sigma3: config.sigmas()[2],
        });
    }
    let r1 = config.radii()[0];
    let amplitude = eta.sup_norm();
    if amplitude > options.amplitude_cap * r1 {
        return Err(Error::AmplitudeTooLarge {
            amplitude,
            cap: options.amplitude_cap * r1,
        });
    }
    let k = options.truncation;
    let spectrum = DtnSpectrum::new(r1, config.sigmas()[0], 2, k)?;

    let mut xi = FourierField::zeros(k).zero_mean_part();
    let mut trace = Vec::new();
    let mut steps = Vec::new();
    let mut iterates = vec![xi.clone()];
    let mut full_newton = false;
    loop {
        let eval = psi_map(&xi, eta, config, options)?;
        let norm = eval.residual_norm();
        if let Some(&previous) = trace.last() {
            if !full_newton && norm > options.stall_ratio * previous {
                full_newton = true;
            }
        }
        trace.push(norm);
        if norm <= options.tolerance {
            let glued = glue(&eval, config, options)?;
            return Ok(ConstructionResult {
                eta: eta.clone(),
                xi,
                trace,
                steps,
                iterates,
                glued,
            });
        }
        if trace.len() >= options.max_iterations {
            return Err(Error::NewtonDiverged {
                iterations: trace.len(),
                residual: norm,
                trace,
            });
        }
        let step = if full_newton {
            steps.push(StepKind::Jacobian);
            let jac = psi_jacobian(&xi, eta, config, options)?;
            let rhs = DVector::from_vec(eval.residual.with_truncation(k).to_coefficients());
            let delta = jac.lu().solve(&rhs).ok_or(Error::IllConditioned {
                rank: 0,
                columns: rhs.len(),
            })?;
            FourierField::from_coefficients(delta.as_slice())
        } else {
            steps.push(StepKind::Frozen);
            spectrum.invert(&eval.residual, Inverse::Dtn)?.scaled(1.0 / c_bc)
        };
        xi = (&xi - &step).zero_mean_part();
        iterates.push(xi.clone());
    }
}

/// The glued solution: the two-phase state inside `r = 1 + ξ`, the radial
/// state `v₀` outside.
#[derive(Debug, Clone)]
pub struct GluedSolution {
    pub geometry: LayeredGeometry,
    pub inner: PiecewiseSolution,
    /// `v₀`; its first shell extends down to the origin and is used only
    /// outside `r = 1 + ξ`.
    pub outer: RadialProfile,
    /// Largest `|⟦v⟧|` over the nodes of `r = 1 + ξ`.
    pub value_defect: f64,
    /// Largest `|⟦σ∂_n v⟧|` over the same nodes.
    pub flux_defect: f64,
}

impl GluedSolution {
    pub fn value(&self, x: Vec2) -> Result<f64> {
        if self.geometry.curve(1).contains(x) {
            self.inner.value(x)
        } else if x.norm() <= self.geometry.outer_curve().mean_radius() {
            Ok(self.outer.value(x.norm()))
        } else {
            Err(Error::Domain("point lies outside the outer curve"))
        }
    }

    /// `c_k = (∂_r)ᵏ v₀` at the outer radius; exact for every `k` since the
    /// outer region is radial.
    pub fn outer_constant(&self, order: u32) -> f64 {
        self.outer.outer_normal_derivative(order)
    }
}

/// Assembles the full `m`-layer configuration once `Ψ(ξ, η) ≈ 0`.
pub fn glue(eval: &PsiEvaluation, config: &PhaseConfig, options: &ConstructOptions) -> Result<GluedSolution> {
    check_config(config)?;
    let norm = eval.residual_norm();
    if !(norm <= options.tolerance) {
        return Err(Error::ContractViolation {
            residual: norm,
            tolerance: options.tolerance,
        });
    }
    let inner_geometry = eval.solution.geometry();
    let mut curves = inner_geometry.curves().to_vec();
    for &r in &config.radii()[2..] {
        curves.push(StarCurve::circle(Vec2::zeros(), r)?);
    }
    let geometry = LayeredGeometry::new(curves, config.sigmas().to_vec(), 1.0)?;
    let outer = merged_solution(config)?;
    let sigma3 = config.sigmas()[2];

    let grid = pullback_grid(inner_geometry.curve(1), options.solver.nodes())?;
    let (mut value_defect, mut flux_defect): (f64, f64) = (0.0, 0.0);
    for p in grid.nodes() {
        let r = p.point.norm();
        let v = eval.solution.value_in_phase(1, p.point);
        value_defect = value_defect.max((v - outer.value_in_shell(0, r)).abs());
        let inner_flux = eval.solution.directional_derivative(1, p.point, p.normal, 1)?;
        let outer_flux = sigma3 * outer.derivative_in_shell(0, r, 1) * p.point.dot(&p.normal) / r;
        flux_defect = flux_defect.max((inner_flux - outer_flux).abs());
    }
    Ok(GluedSolution {
        geometry,
        inner: eval.solution.clone(),
        outer,
        value_defect,
        flux_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn benchmark() -> PhaseConfig {
        PhaseConfig::planar(vec![0.5, 1.0, 1.5], vec![2.0, 1.0, 3.0]).unwrap()
    }

    #[test]
    fn trivial_configuration_has_zero_residual() {
        let options = ConstructOptions::default();
        let zero = FourierField::zeros(16);
        let eval = psi_map(&zero, &zero, &benchmark(), &options).unwrap();
        assert!(eval.residual.sup_norm() < 1e-12 && eval.raw_mean.abs() < 1e-12);
    }

    #[test]
    fn inner_perturbation_breaks_flux_match_linearly() {
        let options = ConstructOptions::default();
        let zero = FourierField::zeros(16);
        let small = psi_map(&zero, &FourierField::cosine(3, 1e-3, 16), &benchmark(), &options).unwrap();
        let large = psi_map(&zero, &FourierField::cosine(3, 2e-3, 16), &benchmark(), &options).unwrap();
        let ratio = large.residual_norm() / small.residual_norm();
        assert!(small.residual_norm() > 1e-6);
        assert!((ratio - 2.0).abs() < 1e-2, "ratio {ratio}");
    }

    #[test]
    fn raw_mean_vanishes() {
        let options = ConstructOptions::default();
        let eval = psi_map(
            &FourierField::cosine(2, 0.01, 16),
            &FourierField::cosine(3, 0.01, 16),
            &benchmark(),
            &options,
        )
        .unwrap();
        assert!(eval.raw_mean.abs() <= 1e-9, "mean {:e}", eval.raw_mean);
    }

    #[test]
    fn zero_eta_converges_immediately() {
        let result = construct(&FourierField::zeros(16), &benchmark(), &ConstructOptions::default()).unwrap();
        assert_eq!(result.iterations(), 1);
        assert!(result.xi.is_zero());
        assert!(result.glued.value_defect < 1e-12 && result.glued.flux_defect < 1e-12);
        assert!((result.glued.outer_constant(1) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_oversized_inputs_fail_fast() {
        let eta = FourierField::cosine(3, 0.03, 16);
        let flat = PhaseConfig::planar(vec![0.5, 1.0, 1.5], vec![2.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            construct(&eta, &flat, &ConstructOptions::default()),
            Err(Error::DegenerateLinearization { .. })
        ));
        assert!(matches!(
            construct(&FourierField::cosine(3, 0.2, 16), &benchmark(), &ConstructOptions::default()),
            Err(Error::AmplitudeTooLarge { .. })
        ));
        let unnormalized = PhaseConfig::planar(vec![0.5, 1.2, 1.5], vec![2.0, 1.0, 3.0]).unwrap();
        assert!(matches!(
            construct(&eta, &unnormalized, &ConstructOptions::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn glue_rejects_unconverged_residual() {
        let options = ConstructOptions::default();
        let eval = psi_map(
            &FourierField::zeros(16),
            &FourierField::cosine(3, 0.01, 16),
            &benchmark(),
            &options,
        )
        .unwrap();
        assert!(matches!(
            glue(&eval, &benchmark(), &options),
            Err(Error::ContractViolation { .. })
        ));
    }

    #[test]
    fn benchmark_converges_to_nonradial_configuration() {
        let eta = FourierField::cosine(3, 0.03, 16);
        let result = construct(&eta, &benchmark(), &ConstructOptions::default()).unwrap();
        assert!(result.final_residual() <= 1e-10);
        assert!(result.trace.windows(2).skip(1).all(|w| w[1] < w[0]));
        assert!(result.iterates.iter().all(|x| x.mean().abs() <= 1e-12));
        let sup = result.xi.sup_norm();
        assert!(sup > 1e-4 && sup < 1e-1, "‖ξ‖∞ = {sup:e}");
        let (a3, _) = result.xi.mode(3);
        let rest = (1..=16).filter(|&k| k != 3).map(|k| {
            let (a, b) = result.xi.mode(k);
            a.hypot(b)
        });
        assert!(rest.fold(0.0, f64::max) < 0.05 * a3.abs());
        assert!(result.glued.flux_defect <= 1e-9 && result.glued.value_defect <= 1e-9);
        assert!((result.glued.outer_constant(1) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn rotating_eta_rotates_xi() {
        let eta = FourierField::from_modes(0.0, &[(2, 0.01, 0.004), (3, 0.0, -0.012)], 16).unwrap();
        let phi = 0.7;
        let options = ConstructOptions::default();
        let base = construct(&eta, &benchmark(), &options).unwrap();
        let turned = construct(&eta.rotated(phi), &benchmark(), &options).unwrap();
        let diff = (&turned.xi - &base.xi.rotated(phi)).coefficient_norm();
        assert!(diff <= 1e-8, "{diff:e}");
        assert!(base.xi.coefficient_norm() >= 1e-6);
    }

    #[test]
    fn jacobian_fallback_reaches_the_same_root() {
        let eta = FourierField::cosine(2, 0.01, 8);
        let frozen_options = ConstructOptions {
            truncation: 8,
            ..ConstructOptions::default()
        };
        let frozen = construct(&eta, &benchmark(), &frozen_options).unwrap();
        // force the fallback by demanding an unattainable contraction
        let newton_options = ConstructOptions {
            stall_ratio: 1e-6,
            ..frozen_options.clone()
        };
        let newton = construct(&eta, &benchmark(), &newton_options).unwrap();
        assert!(newton.steps.contains(&StepKind::Jacobian));
        assert!((&newton.xi - &frozen.xi).coefficient_norm() <= 1e-9);
    }
}
