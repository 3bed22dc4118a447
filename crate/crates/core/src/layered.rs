//! Spectral collocation for the piecewise-conductivity Poisson problem.
//!
//! Each phase carries the particular term `−f₀|x − c|²/(2Nσ)` plus a
//! harmonic series about the common expansion center `c`: a Taylor series
//! in the innermost phase, and a Laurent series with a `log r` term in every
//! annular phase. Coefficients are fitted by least squares to the value and
//! flux transmission conditions at `M` nodes per interface and to the
//! Dirichlet data on the outer curve. Every basis function solves the PDE
//! exactly, so the only error is in the boundary and interface conditions.
//!
//! Directional derivatives use the analytic structure of planar harmonic
//! functions: if `h = Re H(z)` then `(ν·∇)ʲ h = Re(νʲ H⁽ʲ⁾(z))` with the unit
//! vector `ν` read as a complex number.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fourier::FourierField;
use crate::geometry::{pullback_grid, CollocationGrid, CurvePoint, StarCurve, Vec2};
use crate::linalg::solve_least_squares;
use crate::radial::PhaseConfig;

/// Planar problems only; the particular term is `−f₀|x|²/(2Nσ)`.
const DIM: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Harmonic truncation `K` per series.
    pub truncation: usize,
    /// Collocation nodes per curve; `None` means `2(2K + 1)`.
    pub nodes_per_curve: Option<usize>,
    pub residual_tolerance: f64,
    /// Relative pivot / singular-value cutoff of the least-squares solve.
    pub svd_cutoff: f64,
    /// Numerical rank loss tolerated by the SVD fallback.
    pub max_rank_deficiency: usize,
    pub max_derivative_order: u32,
    /// Minimum radial distance between an interior probe and any curve.
    pub probe_margin: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            truncation: 16,
            nodes_per_curve: None,
            residual_tolerance: 1e-9,
            svd_cutoff: 1e-13,
            max_rank_deficiency: 0,
            max_derivative_order: 6,
            probe_margin: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn with_truncation(truncation: usize) -> Self {
        SolverConfig {
            truncation,
            ..Self::default()
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes_per_curve
            .unwrap_or(2 * (2 * self.truncation + 1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation == 0 {
            return Err(Error::Config("truncation must be at least 1"));
        }
        if self.nodes() < 2 * (2 * self.truncation + 1) {
            return Err(Error::Config("fewer than 2(2K + 1) nodes per curve"));
        }
        if !(self.residual_tolerance > 0.0) || !(self.svd_cutoff > 0.0) || !(self.probe_margin > 0.0) {
            return Err(Error::Config("tolerances must be positive"));
        }
        Ok(())
    }
}

/// Nested star-shaped interfaces (innermost first), one conductivity per
/// phase, and the constant source `f₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredGeometry {
    curves: Vec<StarCurve>,
    sigmas: Vec<f64>,
    source: f64,
}

impl LayeredGeometry {
    pub fn new(curves: Vec<StarCurve>, sigmas: Vec<f64>, source: f64) -> Result<Self> {
        if curves.is_empty() || curves.len() != sigmas.len() {
            return Err(Error::Config("one conductivity per curve is required"));
        }
        if sigmas.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::Config("conductivities must be positive"));
        }
        if !source.is_finite() {
            return Err(Error::Config("source must be finite"));
        }
        for k in 1..curves.len() {
            let outer = &curves[k];
            let (min_r, _) = outer.radius_bounds();
            if curves[k - 1].max_distance_from(outer.center()) >= min_r {
                return Err(Error::NotNested { inner: k - 1, outer: k });
            }
        }
        Ok(LayeredGeometry {
            curves,
            sigmas,
            source,
        })
    }

    /// Concentric circles about the origin.
    pub fn concentric(config: &PhaseConfig, source: f64) -> Result<Self> {
        let curves = config
            .radii()
            .iter()
            .map(|&r| StarCurve::circle(Vec2::zeros(), r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(curves, config.sigmas().to_vec(), source)
    }

    pub fn layers(&self) -> usize {
        self.curves.len()
    }

    pub fn curves(&self) -> &[StarCurve] {
        &self.curves
    }

    pub fn curve(&self, index: usize) -> &StarCurve {
        &self.curves[index]
    }

    pub fn outer_curve(&self) -> &StarCurve {
        &self.curves[self.curves.len() - 1]
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn source(&self) -> f64 {
        self.source
    }

    pub fn with_source(&self, source: f64) -> Self {
        LayeredGeometry {
            source,
            ..self.clone()
        }
    }

    /// Center of the innermost curve; all series are expanded about it.
    pub fn expansion_center(&self) -> Vec2 {
        self.curves[0].center()
    }

    /// Phase containing `x` (points on a curve belong to the inner phase).
    pub fn phase_of(&self, x: Vec2) -> Option<usize> {
        self.curves.iter().position(|c| c.contains(x))
    }

    /// Largest root energy of the curves' non-constant radius modes plus
    /// their center offsets from the outer curve.
    pub fn nonradiality(&self) -> f64 {
        let c = self.outer_curve().center();
        self.curves
            .iter()
            .map(|curve| curve.nonradial_energy() + (curve.center() - c).norm())
            .fold(0.0, f64::max)
    }
}

/// Prescribed value jump `⟦u⟧ = u_outer − u_inner` on interface `interface`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceJump {
    pub interface: usize,
    pub values: FourierField,
}

/// Column layout of one phase's harmonic series.
#[derive(Debug, Clone, PartialEq)]
struct PhaseBasis {
    truncation: usize,
    /// Scale of the positive powers, `(z/ρ_out)^k`.
    outer_scale: f64,
    /// Scale of the negative powers and the logarithm; `None` for the disk.
    inner_scale: Option<f64>,
}

impl PhaseBasis {
    fn len(&self) -> usize {
        let positive = 2 * self.truncation + 1;
        match self.inner_scale {
            Some(_) => 2 * positive,
            None => positive,
        }
    }

    /// Writes the `order`-th derivative along `nu` of every basis function
    /// at `z` (relative to the expansion center) into `out`.
    fn derivatives(&self, z: Complex64, nu: Complex64, order: u32, out: &mut [f64]) {
        let nu_j = nu.powi(order as i32);
        let k_max = self.truncation;
        out[0] = if order == 0 { 1.0 } else { 0.0 };
        for k in 1..=k_max {
            let d = if order as usize > k {
                Complex64::new(0.0, 0.0)
            } else {
                let coef = falling(k as f64, order);
                nu_j * coef * (z / self.outer_scale).powi(k as i32 - order as i32)
                    / self.outer_scale.powi(order as i32)
            };
            out[2 * k - 1] = d.re;
            out[2 * k] = d.im;
        }
        if let Some(rho) = self.inner_scale {
            let base = 2 * k_max + 1;
            out[base] = if order == 0 {
                (z.norm() / rho).ln()
            } else {
                // d^j/dz^j log z = (−1)^{j−1} (j−1)! z^{−j}
                let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
                (nu_j * sign * factorial(order - 1) * z.powi(-(order as i32))).re
            };
            for k in 1..=k_max {
                // (ρ/z)^k = ρ^k z^{−k}
                let coef = falling(-(k as f64), order);
                let d = nu_j * coef * (rho / z).powi(k as i32) / z.powi(order as i32);
                out[base + 2 * k - 1] = d.re;
                out[base + 2 * k] = -d.im;
            }
        }
    }
}

fn falling(x: f64, order: u32) -> f64 {
    (0..order).fold(1.0, |acc, i| acc * (x - i as f64))
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn to_complex(v: Vec2) -> Complex64 {
    Complex64::new(v.x, v.y)
}

/// Harmonic series of one phase: `H(z) = Σ p_k (z/ρ_o)^k + Σ q_k (ρ_i/z)^k
/// + γ log(|z|/ρ_i)` with `p_k = a_k − i b_k`, `q_k = c_k + i d_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    basis: PhaseBasis,
    coefficients: Vec<f64>,
    sigma: f64,
}

impl PhaseSeries {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn is_annular(&self) -> bool {
        self.basis.inner_scale.is_some()
    }

    pub fn constant(&self) -> f64 {
        self.coefficients[0]
    }

    /// `(a_k, b_k)` of `r^k (a_k cos kθ + b_k sin kθ)` in scaled units.
    pub fn positive_mode(&self, k: usize) -> (f64, f64) {
        (self.coefficients[2 * k - 1], self.coefficients[2 * k])
    }

    /// `(c_k, d_k)` of `r^{−k} (c_k cos kθ + d_k sin kθ)` in scaled units.
    pub fn negative_mode(&self, k: usize) -> Option<(f64, f64)> {
        self.basis.inner_scale.map(|_| {
            let base = 2 * self.basis.truncation + 1;
            (self.coefficients[base + 2 * k - 1], self.coefficients[base + 2 * k])
        })
    }

    pub fn log_coefficient(&self) -> Option<f64> {
        self.basis
            .inner_scale
            .map(|_| self.coefficients[2 * self.basis.truncation + 1])
    }
}

/// Collocation solution with per-phase series and diagnostics.
#[derive(Debug, Clone)]
pub struct PiecewiseSolution {
    geometry: LayeredGeometry,
    config: SolverConfig,
    phases: Vec<PhaseSeries>,
    jumps: Vec<InterfaceJump>,
    residual: f64,
    condition: f64,
    rank: usize,
}

impl PiecewiseSolution {
    pub fn geometry(&self) -> &LayeredGeometry {
        &self.geometry
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn phases(&self) -> &[PhaseSeries] {
        &self.phases
    }

    /// Largest collocation residual over all conditions and nodes.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Pivot ratio of the column-scaled system.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn truncation(&self) -> usize {
        self.config.truncation
    }

    pub fn nodes_per_curve(&self) -> usize {
        self.config.nodes()
    }

    pub fn jumps(&self) -> &[InterfaceJump] {
        &self.jumps
    }

    /// `(ν·∇)ʲ u` of phase `phase`'s expansion at `x`; `nu` must be a unit
    /// vector. The expansion is evaluated even outside the phase.
    pub fn directional_derivative(&self, phase: usize, x: Vec2, nu: Vec2, order: u32) -> Result<f64> {
        if order > self.config.max_derivative_order {
            return Err(Error::Domain("derivative order exceeds the configured maximum"));
        }
        Ok(self.directional_unchecked(phase, x, nu, order))
    }

    fn directional_unchecked(&self, phase: usize, x: Vec2, nu: Vec2, order: u32) -> f64 {
        let series = &self.phases[phase];
        let c = self.geometry.expansion_center();
        let mut row = vec![0.0; series.basis.len()];
        series
            .basis
            .derivatives(to_complex(x - c), to_complex(nu), order, &mut row);
        let harmonic: f64 = row.iter().zip(&series.coefficients).map(|(a, b)| a * b).sum();
        harmonic + particular(self.geometry.source, series.sigma, x - c, nu, order)
    }

    pub fn value_in_phase(&self, phase: usize, x: Vec2) -> f64 {
        self.directional_unchecked(phase, x, Vec2::new(1.0, 0.0), 0)
    }

    pub fn gradient_in_phase(&self, phase: usize, x: Vec2) -> Vec2 {
        Vec2::new(
            self.directional_unchecked(phase, x, Vec2::new(1.0, 0.0), 1),
            self.directional_unchecked(phase, x, Vec2::new(0.0, 1.0), 1),
        )
    }

    /// `u(x)` in whichever phase contains `x`.
    pub fn value(&self, x: Vec2) -> Result<f64> {
        let phase = self
            .geometry
            .phase_of(x)
            .ok_or(Error::Domain("point lies outside the outer curve"))?;
        Ok(self.value_in_phase(phase, x))
    }

    pub fn gradient(&self, x: Vec2) -> Result<Vec2> {
        let phase = self
            .geometry
            .phase_of(x)
            .ok_or(Error::Domain("point lies outside the outer curve"))?;
        Ok(self.gradient_in_phase(phase, x))
    }

    /// `(∂_n)ʲ u` at `m` nodes of curve `curve`, from the side of phase `phase`.
    pub fn boundary_samples(&self, curve: usize, phase: usize, order: u32, m: usize) -> Result<Vec<f64>> {
        if curve >= self.geometry.layers() || phase >= self.geometry.layers() {
            return Err(Error::Domain("curve or phase index out of range"));
        }
        if order > self.config.max_derivative_order {
            return Err(Error::Domain("derivative order exceeds the configured maximum"));
        }
        let grid = pullback_grid(self.geometry.curve(curve), m)?;
        Ok(grid
            .nodes()
            .iter()
            .map(|p| self.directional_unchecked(phase, p.point, p.normal, order))
            .collect())
    }

    /// `(∂_n)ʲ u` on curve `curve` seen from its inner phase, projected onto
    /// `K` Fourier modes in the curve parameter.
    pub fn boundary_trace(&self, curve: usize, order: u32) -> Result<FourierField> {
        self.boundary_trace_from(curve, curve, order)
    }

    pub fn boundary_trace_from(&self, curve: usize, phase: usize, order: u32) -> Result<FourierField> {
        let m = self.nodes_per_curve();
        let samples = self.boundary_samples(curve, phase, order, m)?;
        FourierField::from_samples(&samples, self.truncation())
    }

    /// `max |σΔu + f₀|` over `probes`, with the Laplacian assembled from
    /// series second derivatives.
    pub fn interior_residual(&self, probes: &[Vec2]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &x in probes {
            let phase = self
                .geometry
                .phase_of(x)
                .ok_or(Error::Domain("probe lies outside the outer curve"))?;
            let near = self
                .geometry
                .curves()
                .iter()
                .any(|c| c.radial_gap(x).1.abs() < self.config.probe_margin);
            if near {
                return Err(Error::Domain("probe lies on an interface"));
            }
            let lap = self.directional_unchecked(phase, x, Vec2::new(1.0, 0.0), 2)
                + self.directional_unchecked(phase, x, Vec2::new(0.0, 1.0), 2);
            worst = worst.max((self.phases[phase].sigma * lap + self.geometry.source).abs());
        }
        Ok(worst)
    }

    /// Largest `|⟦u⟧ − prescribed|` and `|⟦σ∂_n u⟧|` over the interface nodes.
    pub fn jump_defects(&self) -> Result<(f64, f64)> {
        let m = self.nodes_per_curve();
        let (mut value, mut flux): (f64, f64) = (0.0, 0.0);
        for i in 0..self.geometry.layers() - 1 {
            let grid = pullback_grid(self.geometry.curve(i), m)?;
            let prescribed = self.jumps.iter().find(|j| j.interface == i);
            let (si, so) = (self.phases[i].sigma, self.phases[i + 1].sigma);
            for p in grid.nodes() {
                let target = prescribed.map_or(0.0, |j| j.values.eval(p.theta));
                let jump = self.value_in_phase(i + 1, p.point) - self.value_in_phase(i, p.point);
                value = value.max((jump - target).abs());
                let fo = so * self.directional_unchecked(i + 1, p.point, p.normal, 1);
                let fi = si * self.directional_unchecked(i, p.point, p.normal, 1);
                flux = flux.max((fo - fi).abs());
            }
        }
        Ok((value, flux))
    }
}

/// `(ν·∇)ʲ` of `−f₀|x|²/(2Nσ)`.
fn particular(source: f64, sigma: f64, x: Vec2, nu: Vec2, order: u32) -> f64 {
    let scale = -source / (2.0 * DIM * sigma);
    match order {
        0 => scale * x.norm_squared(),
        1 => scale * 2.0 * x.dot(&nu),
        2 => scale * 2.0 * nu.norm_squared(),
        _ => 0.0,
    }
}

/// Solves with Dirichlet data given as a Fourier series in the outer curve's
/// parameter.
pub fn solve(
    geometry: &LayeredGeometry,
    dirichlet: &FourierField,
    jumps: &[InterfaceJump],
    config: &SolverConfig,
) -> Result<PiecewiseSolution> {
    let zero_data = dirichlet.is_zero() && jumps.iter().all(|j| j.values.is_zero());
    solve_with(geometry, &|p: &CurvePoint| dirichlet.eval(p.theta), zero_data, jumps, config)
}

/// Solves with Dirichlet data evaluated pointwise on the outer curve.
pub fn solve_pointwise(
    geometry: &LayeredGeometry,
    dirichlet: &dyn Fn(&CurvePoint) -> f64,
    jumps: &[InterfaceJump],
    config: &SolverConfig,
) -> Result<PiecewiseSolution> {
    solve_with(geometry, dirichlet, false, jumps, config)
}

fn solve_with(
    geometry: &LayeredGeometry,
    dirichlet: &dyn Fn(&CurvePoint) -> f64,
    zero_data: bool,
    jumps: &[InterfaceJump],
    config: &SolverConfig,
) -> Result<PiecewiseSolution> {
    config.validate()?;
    let m_layers = geometry.layers();
    for j in jumps {
        if j.interface + 1 >= m_layers {
            return Err(Error::Domain("jumps are prescribed on interior interfaces only"));
        }
    }
    let k = config.truncation;
    let center = geometry.expansion_center();
    let bases: Vec<PhaseBasis> = (0..m_layers)
        .map(|p| PhaseBasis {
            truncation: k,
            outer_scale: geometry.curve(p).max_distance_from(center),
            inner_scale: (p > 0).then(|| geometry.curve(p - 1).min_distance_from(center)),
        })
        .collect();
    let offsets: Vec<usize> = bases
        .iter()
        .scan(0, |acc, b| {
            let start = *acc;
            *acc += b.len();
            Some(start)
        })
        .collect();
    let columns: usize = bases.iter().map(PhaseBasis::len).sum();

    if zero_data && geometry.source == 0.0 {
        let phases = bases
            .into_iter()
            .zip(geometry.sigmas())
            .map(|(basis, &sigma)| PhaseSeries {
                coefficients: vec![0.0; basis.len()],
                basis,
                sigma,
            })
            .collect();
        return Ok(PiecewiseSolution {
            geometry: geometry.clone(),
            config: config.clone(),
            phases,
            jumps: jumps.to_vec(),
            residual: 0.0,
            condition: 1.0,
            rank: columns,
        });
    }

    let m = config.nodes();
    let grids: Vec<CollocationGrid> = geometry
        .curves()
        .iter()
        .map(|c| pullback_grid(c, m))
        .collect::<Result<_>>()?;
    let rows = m * (2 * (m_layers - 1) + 1);
    let mut a = DMatrix::<f64>::zeros(rows, columns);
    let mut b = DVector::<f64>::zeros(rows);
    // per-row scale to report residuals in natural units
    let mut weights = vec![1.0; rows];
    let sigmas = geometry.sigmas();
    let f0 = geometry.source;
    let mut scratch_in = vec![0.0; columns];
    let mut scratch_out = vec![0.0; columns];
    let mut row = 0;

    for i in 0..m_layers - 1 {
        let prescribed = jumps.iter().find(|j| j.interface == i);
        let (si, so) = (sigmas[i], sigmas[i + 1]);
        let flux_weight = 1.0 / (si + so);
        for p in grids[i].nodes() {
            let z = to_complex(p.point - center);
            let nu = to_complex(p.normal);
            let x = p.point - center;
            let (bi, bo) = (&bases[i], &bases[i + 1]);
            let (ni, no) = (bi.len(), bo.len());

            bi.derivatives(z, nu, 0, &mut scratch_in[..ni]);
            bo.derivatives(z, nu, 0, &mut scratch_out[..no]);
            for c in 0..ni {
                a[(row, offsets[i] + c)] = -scratch_in[c];
            }
            for c in 0..no {
                a[(row, offsets[i + 1] + c)] = scratch_out[c];
            }
            let target = prescribed.map_or(0.0, |j| j.values.eval(p.theta));
            b[row] = target
                - (particular(f0, so, x, p.normal, 0) - particular(f0, si, x, p.normal, 0));
            row += 1;

            bi.derivatives(z, nu, 1, &mut scratch_in[..ni]);
            bo.derivatives(z, nu, 1, &mut scratch_out[..no]);
            for c in 0..ni {
                a[(row, offsets[i] + c)] = -si * scratch_in[c] * flux_weight;
            }
            for c in 0..no {
                a[(row, offsets[i + 1] + c)] = so * scratch_out[c] * flux_weight;
            }
            b[row] = -(so * particular(f0, so, x, p.normal, 1)
                - si * particular(f0, si, x, p.normal, 1))
                * flux_weight;
            weights[row] = flux_weight;
            row += 1;
        }
    }
    let last = m_layers - 1;
    for p in grids[last].nodes() {
        let z = to_complex(p.point - center);
        let nb = bases[last].len();
        bases[last].derivatives(z, to_complex(p.normal), 0, &mut scratch_out[..nb]);
        for c in 0..nb {
            a[(row, offsets[last] + c)] = scratch_out[c];
        }
        b[row] = dirichlet(p) - particular(f0, sigmas[last], p.point - center, p.normal, 0);
        row += 1;
    }

    let lsq = solve_least_squares(a.clone(), &b, config.svd_cutoff, config.max_rank_deficiency)?;
    let r = &a * &lsq.x - &b;
    let residual = r
        .iter()
        .zip(&weights)
        .map(|(r, w)| (r / w).abs())
        .fold(0.0, f64::max);
    if !(residual <= config.residual_tolerance) {
        return Err(Error::NotConverged {
            residual,
            tolerance: config.residual_tolerance,
        });
    }
    let phases = bases
        .into_iter()
        .enumerate()
        .map(|(p, basis)| {
            let start = offsets[p];
            let coefficients = lsq.x.as_slice()[start..start + basis.len()].to_vec();
            PhaseSeries {
                basis,
                coefficients,
                sigma: sigmas[p],
            }
        })
        .collect();
    Ok(PiecewiseSolution {
        geometry: geometry.clone(),
        config: config.clone(),
        phases,
        jumps: jumps.to_vec(),
        residual,
        condition: lsq.condition,
        rank: lsq.rank,
    })
}
