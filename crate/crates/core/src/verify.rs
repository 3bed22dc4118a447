//! Checks on computed configurations: overdetermined conditions from a
//! fresh full solve, the boundary decomposition of the Laplacian, and the
//! rigidity chain for two-phase problems.

use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fourier::{spectral_derivatives, FourierField};
use crate::geometry::pullback_grid;
use crate::layered::{solve, LayeredGeometry, PiecewiseSolution, SolverConfig};

/// Highest normal-derivative order checked by re-solving; each order costs
/// roughly a factor `K` in series accuracy.
pub const MAX_CHECKED_ORDER: u32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderDeviation {
    pub order: u32,
    /// Arclength mean `c_k` of `(∂_n)ᵏu` on the outer curve.
    pub mean: f64,
    /// `sup |(∂_n)ᵏu − c_k|` over the collocation nodes.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverdeterminedReport {
    pub orders: Vec<OrderDeviation>,
    pub nonradiality: f64,
    pub solver_residual: f64,
}

impl OverdeterminedReport {
    pub fn deviation(&self, order: u32) -> Option<f64> {
        self.orders.iter().find(|o| o.order == order).map(|o| o.deviation)
    }

    pub fn mean(&self, order: u32) -> Option<f64> {
        self.orders.iter().find(|o| o.order == order).map(|o| o.mean)
    }
}

/// Per-node `(θ, (∂_n)ᵏu)` on the outer curve of a solved problem.
pub fn outer_normal_derivatives(solution: &PiecewiseSolution, order: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    let geometry = solution.geometry();
    let last = geometry.layers() - 1;
    let m = solution.nodes_per_curve();
    let values = solution.boundary_samples(last, last, order, m)?;
    let grid = pullback_grid(geometry.curve(last), m)?;
    Ok((grid.nodes().iter().map(|p| p.theta).collect(), values))
}

/// Solves the torsion problem (`f₀ = 1`, zero Dirichlet data) on `geometry`
/// and measures how far each `(∂_n)ᵏu` is from a constant on the outer
/// curve.
pub fn check_overdetermined(
    geometry: &LayeredGeometry,
    orders: &[u32],
    solver: &SolverConfig,
) -> Result<OverdeterminedReport> {
    check_orders(orders)?;
    let solution = solve(&geometry.with_source(1.0), &FourierField::zeros(0), &[], solver)?;
    overdetermined_report(&solution, orders)
}

fn check_orders(orders: &[u32]) -> Result<()> {
    if orders.iter().any(|&k| k == 0 || k > MAX_CHECKED_ORDER) {
        return Err(Error::Domain("orders must lie in 1..=4"));
    }
    Ok(())
}

/// Deviations of `(∂_n)ᵏu` from their arclength means for an existing
/// solution.
pub fn overdetermined_report(solution: &PiecewiseSolution, orders: &[u32]) -> Result<OverdeterminedReport> {
    check_orders(orders)?;
    let geometry = solution.geometry();
    let grid = pullback_grid(geometry.outer_curve(), solution.nodes_per_curve())?;
    let orders = orders
        .iter()
        .map(|&order| {
            let (_, values) = outer_normal_derivatives(solution, order)?;
            let mean = grid.arclength_mean(&values);
            let deviation = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
            Ok(OrderDeviation { order, mean, deviation })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OverdeterminedReport {
        orders,
        nonradiality: geometry.nonradiality(),
        solver_residual: solution.residual(),
    })
}

/// Nodes used for the spectral tangential derivatives.
pub const DECOMPOSITION_NODES: usize = 256;

/// `sup |(∂_n)²u + κ∂_n u + Δ_τ u + f₀/σ|` over nodes of curve `curve`,
/// evaluated from the inner phase. `Δ_τ` is the second arclength
/// derivative, obtained from spectral `θ`-derivatives of the trace.
pub fn laplacian_decomposition_residual(solution: &PiecewiseSolution, curve: usize) -> Result<f64> {
    if solution.config().max_derivative_order < 2 {
        return Err(Error::Domain("second normal derivatives are unavailable"));
    }
    let geometry = solution.geometry();
    if curve >= geometry.layers() {
        return Err(Error::Domain("curve index out of range"));
    }
    let m = DECOMPOSITION_NODES.max(solution.nodes_per_curve());
    let grid = pullback_grid(geometry.curve(curve), m)?;
    let u = solution.boundary_samples(curve, curve, 0, m)?;
    let un = solution.boundary_samples(curve, curve, 1, m)?;
    let unn = solution.boundary_samples(curve, curve, 2, m)?;
    let (ut, utt) = spectral_derivatives(&u)?;
    let source = geometry.source() / geometry.sigmas()[curve];
    Ok(grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let s = p.speed;
            let tangential = (utt[j] - ut[j] * p.speed_derivative / s) / (s * s);
            (unn[j] + p.curvature * un[j] + tangential + source).abs()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityWitness {
    pub dev1: f64,
    pub dev2: f64,
    /// `sup |κ − mean κ|` on the outer curve.
    pub curvature_variation: f64,
    pub c1: f64,
    pub c2: f64,
    /// `|c₂ + κ̄c₁ + 1/σ₂|` with `κ̄` the mean curvature.
    pub identity_defect: f64,
    /// Whether small `dev₁, dev₂` come with small curvature variation on
    /// this instance (vacuous when a deviation is large).
    pub implication_holds: bool,
    pub threshold: f64,
}

/// For a two-phase geometry: whether constant `∂_n u` and `(∂_n)²u` on the
/// outer curve force constant curvature there.
pub fn rigidity_witness(geometry: &LayeredGeometry, solver: &SolverConfig, threshold: f64) -> Result<RigidityWitness> {
    if geometry.layers() != 2 {
        return Err(Error::Domain("the rigidity witness is for two-phase geometries"));
    }
    let report = check_overdetermined(geometry, &[1, 2], solver)?;
    let grid = pullback_grid(geometry.outer_curve(), solver.nodes().max(DECOMPOSITION_NODES))?;
    let curvatures: Vec<f64> = grid.nodes().iter().map(|p| p.curvature).collect();
    let mean_curvature = grid.arclength_mean(&curvatures);
    let curvature_variation = curvatures.iter().map(|k| (k - mean_curvature).abs()).fold(0.0, f64::max);
    let (dev1, dev2) = (report.orders[0].deviation, report.orders[1].deviation);
    let (c1, c2) = (report.orders[0].mean, report.orders[1].mean);
    let identity_defect = (c2 + mean_curvature * c1 + 1.0 / geometry.sigmas()[1]).abs();
    let premise = dev1 <= threshold && dev2 <= threshold;
    Ok(RigidityWitness {
        dev1,
        dev2,
        curvature_variation,
        c1,
        c2,
        identity_defect,
        implication_holds: !premise || curvature_variation <= threshold,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{StarCurve, Vec2};
    use crate::radial::PhaseConfig;
    use alloc::vec;

    fn benchmark() -> PhaseConfig {
        PhaseConfig::planar(vec![0.5, 1.0, 1.5], vec![2.0, 1.0, 3.0]).unwrap()
    }

    #[test]
    fn concentric_benchmark_has_constant_normal_derivatives() {
        let geometry = LayeredGeometry::concentric(&benchmark(), 1.0).unwrap();
        let report = check_overdetermined(&geometry, &[1, 2, 3, 4], &SolverConfig::default()).unwrap();
        assert!((report.mean(1).unwrap() + 0.25).abs() < 1e-10);
        assert!((report.mean(2).unwrap() + 1.0 / 6.0).abs() < 1e-10);
        for k in 1..=4 {
            assert!(report.deviation(k).unwrap() <= 1e-10);
        }
        assert_eq!(report.nonradiality, 0.0);
        assert!(check_overdetermined(&geometry, &[5], &SolverConfig::default()).is_err());
    }

    #[test]
    fn offset_inner_disk_breaks_the_condition() {
        let inner = StarCurve::circle(Vec2::new(0.1, 0.0), 0.5).unwrap();
        let outer = StarCurve::circle(Vec2::zeros(), 1.0).unwrap();
        let geometry = LayeredGeometry::new(vec![inner, outer], vec![2.0, 1.0], 1.0).unwrap();
        let report = check_overdetermined(&geometry, &[1], &SolverConfig::with_truncation(32)).unwrap();
        assert!(report.deviation(1).unwrap() > 1e-3);
    }

    #[test]
    fn decomposition_vanishes_on_radial_and_curved_boundaries() {
        let config = PhaseConfig::planar(vec![0.5, 1.0], vec![2.0, 1.0]).unwrap();
        let radial = LayeredGeometry::concentric(&config, 1.0).unwrap();
        let sol = solve(&radial, &FourierField::zeros(0), &[], &SolverConfig::default()).unwrap();
        assert!(laplacian_decomposition_residual(&sol, 1).unwrap() <= 1e-9);

        let harmonic = radial.with_source(0.0);
        let data = FourierField::from_modes(0.0, &[(2, 1.0, 0.5), (5, 0.0, 0.2)], 16).unwrap();
        let sol = solve(&harmonic, &data, &[], &SolverConfig::default()).unwrap();
        assert!(laplacian_decomposition_residual(&sol, 1).unwrap() <= 1e-9);

        let inner = StarCurve::circle(Vec2::zeros(), 0.5).unwrap();
        let outer = StarCurve::perturbed_circle(1.0, &FourierField::cosine(2, 0.02, 2)).unwrap();
        let curved = LayeredGeometry::new(vec![inner, outer], vec![2.0, 1.0], 1.0).unwrap();
        let sol = solve(&curved, &FourierField::zeros(0), &[], &SolverConfig::with_truncation(32)).unwrap();
        let r0 = laplacian_decomposition_residual(&sol, 1).unwrap();
        let r1 = laplacian_decomposition_residual(&sol, 0).unwrap();
        assert!(r0 <= 1e-7 && r1 <= 1e-7, "{r0:e} {r1:e}");
    }

    #[test]
    fn rigidity_chain_on_two_phase_geometries() {
        let config = PhaseConfig::planar(vec![0.5, 1.0], vec![2.0, 1.0]).unwrap();
        let radial = LayeredGeometry::concentric(&config, 1.0).unwrap();
        let w = rigidity_witness(&radial, &SolverConfig::default(), 1e-6).unwrap();
        assert!(w.dev1 <= 1e-9 && w.dev2 <= 1e-9 && w.curvature_variation <= 1e-9);
        assert!(w.identity_defect <= 1e-9 && w.implication_holds);

        let inner = StarCurve::circle(Vec2::zeros(), 0.5).unwrap();
        let outer = StarCurve::perturbed_circle(1.0, &FourierField::cosine(2, 0.05, 2)).unwrap();
        let curved = LayeredGeometry::new(vec![inner, outer], vec![2.0, 1.0], 1.0).unwrap();
        let w = rigidity_witness(&curved, &SolverConfig::with_truncation(32), 1e-6).unwrap();
        assert!(w.dev1 >= 1e-3 || w.dev2 >= 1e-3);
        assert!(w.implication_holds);
    }
}
