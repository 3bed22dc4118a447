//! Star-shaped curves and collocation grids.
//!
//! Every curve is a radius function `r(θ)` about a fixed center, stored as a
//! [`FourierField`]. Normal displacements of a circle of radius `R` by a
//! field `ξ` are exactly the curves `r = R + ξ(θ)`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use nalgebra::Vector2;
#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fourier::FourierField;

pub type Vec2 = Vector2<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct StarCurve {
    center: Vec2,
    radius: FourierField,
}

/// Differential-geometric data of a curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub theta: f64,
    pub point: Vec2,
    /// Outward unit normal.
    pub normal: Vec2,
    /// Signed curvature, positive for convex arcs.
    pub curvature: f64,
    /// Parametric speed `|γ′(θ)| = sqrt(r² + r′²)`.
    pub speed: f64,
    /// `d|γ′|/dθ`.
    pub speed_derivative: f64,
}

impl StarCurve {
    /// Validates `r(θ) > 0` on a `4K`-point grid.
    pub fn new(center: Vec2, radius: FourierField) -> Result<Self> {
        let m = (4 * radius.truncation()).max(8);
        for (j, r) in radius.sample(m).into_iter().enumerate() {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidCurve {
                    theta: TAU * j as f64 / m as f64,
                    radius: r,
                });
            }
        }
        Ok(StarCurve { center, radius })
    }

    pub fn circle(center: Vec2, radius: f64) -> Result<Self> {
        Self::new(center, FourierField::constant(radius, 0))
    }

    /// `∂D = { x + ξ(x) n(x) : x on the circle of radius R about the origin }`.
    pub fn perturbed_circle(radius: f64, displacement: &FourierField) -> Result<Self> {
        let mut r = displacement.clone();
        r.set_mode(0, radius + displacement.mean(), 0.0);
        Self::new(Vec2::zeros(), r)
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn radius_field(&self) -> &FourierField {
        &self.radius
    }

    /// Mean radius `r₀`.
    pub fn mean_radius(&self) -> f64 {
        self.radius.mean()
    }

    pub fn truncation(&self) -> usize {
        self.radius.truncation()
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.radius.eval(theta)
    }

    pub fn point(&self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        self.center + self.radius(theta) * Vec2::new(c, s)
    }

    pub fn eval(&self, theta: f64) -> Result<CurvePoint> {
        let r = self.radius.eval(theta);
        if !(r > 0.0) {
            return Err(Error::InvalidCurve { theta, radius: r });
        }
        let dr = self.radius.derivative(theta, 1);
        let ddr = self.radius.derivative(theta, 2);
        let (s, c) = theta.sin_cos();
        let speed = (r * r + dr * dr).sqrt();
        let normal = Vec2::new(r * c + dr * s, r * s - dr * c) / speed;
        let curvature = (r * r + 2.0 * dr * dr - r * ddr) / speed.powi(3);
        Ok(CurvePoint {
            theta,
            point: self.center + r * Vec2::new(c, s),
            normal,
            curvature,
            speed,
            speed_derivative: dr * (r + ddr) / speed,
        })
    }

    /// Min and max of `r` over a grid resolving all modes.
    pub fn radius_bounds(&self) -> (f64, f64) {
        let m = (8 * self.truncation()).max(64);
        self.radius
            .sample(m)
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r), hi.max(r))
            })
    }

    /// Largest distance from `origin` to a point of the curve.
    pub fn max_distance_from(&self, origin: Vec2) -> f64 {
        let m = (8 * self.truncation()).max(64);
        (0..m)
            .map(|j| (self.point(TAU * j as f64 / m as f64) - origin).norm())
            .fold(0.0, f64::max)
    }

    /// Smallest distance from `origin` to a point of the curve.
    pub fn min_distance_from(&self, origin: Vec2) -> f64 {
        let m = (8 * self.truncation()).max(64);
        (0..m)
            .map(|j| (self.point(TAU * j as f64 / m as f64) - origin).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Polar coordinates of `x` about the center, with the signed radial gap
    /// `|x − c| − r(θ)` (negative inside).
    pub fn radial_gap(&self, x: Vec2) -> (f64, f64) {
        let d = x - self.center;
        let theta = d.y.atan2(d.x);
        (theta, d.norm() - self.radius(theta))
    }

    pub fn contains(&self, x: Vec2) -> bool {
        self.radial_gap(x).1 <= 0.0
    }

    /// `∫ |γ′| dθ` by the periodic trapezoid rule (spectrally accurate).
    pub fn perimeter(&self) -> f64 {
        let m = (16 * self.truncation()).max(256);
        let r = self.radius.sample(m);
        let dr = self.radius.differentiate().sample(m);
        r.iter()
            .zip(&dr)
            .map(|(r, dr)| (r * r + dr * dr).sqrt())
            .sum::<f64>()
            * TAU
            / m as f64
    }

    /// Enclosed area `½ ∫ r² dθ`, exact from the coefficients.
    pub fn area(&self) -> f64 {
        let r0 = self.radius.mean();
        let modes: f64 = self.radius.modes().map(|(_, a, b)| a * a + b * b).sum();
        core::f64::consts::PI * (r0 * r0 + 0.5 * modes)
    }

    /// Root energy of the non-constant radius modes.
    pub fn nonradial_energy(&self) -> f64 {
        self.radius
            .modes()
            .map(|(_, a, b)| a * a + b * b)
            .sum::<f64>()
            .sqrt()
    }
}

/// Arclength distortion of `Id + ξn` from the unit circle onto
/// `r = 1 + ξ(θ)`: `sqrt((1 + ξ)² + ξ′²)`.
pub fn tangential_jacobian(xi: &FourierField, theta: f64) -> Result<f64> {
    let r = 1.0 + xi.eval(theta);
    if !(r > 0.0) {
        return Err(Error::InvalidPerturbation { theta, value: r });
    }
    let dr = xi.derivative(theta, 1);
    Ok((r * r + dr * dr).sqrt())
}

/// Curve data cached at `M` equispaced parameter values.
#[derive(Debug, Clone)]
pub struct CollocationGrid {
    curve: StarCurve,
    nodes: Vec<CurvePoint>,
}

impl CollocationGrid {
    pub fn curve(&self) -> &StarCurve {
        &self.curve
    }

    pub fn nodes(&self) -> &[CurvePoint] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Arclength-weighted mean of per-node values.
    pub fn arclength_mean(&self, values: &[f64]) -> f64 {
        let (num, den) = self
            .nodes
            .iter()
            .zip(values)
            .fold((0.0, 0.0), |(n, d), (p, v)| (n + v * p.speed, d + p.speed));
        num / den
    }
}

/// Samples `curve` at `M ≥ 2(2K + 1)` nodes `θ_j = 2πj/M`.
pub fn pullback_grid(curve: &StarCurve, m: usize) -> Result<CollocationGrid> {
    if m < 2 * (2 * curve.truncation() + 1) {
        return Err(Error::Config("collocation grid undersamples the curve"));
    }
    let nodes = (0..m)
        .map(|j| curve.eval(TAU * j as f64 / m as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(CollocationGrid {
        curve: curve.clone(),
        nodes,
    })
}
