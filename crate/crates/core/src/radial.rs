//! Closed-form radial solutions of the layered torsion problem.
//!
//! In shell `k` (`R_{k−1} ≤ r ≤ R_k`) the radial solution is
//! `u(r) = A_k − r² / (2N σ_k)`, so `σ_k u′(r) = −r/N` in every shell and
//! the flux is continuous across each interface by construction.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Concentric layer data: radii `R₁ < … < R_m`, conductivities `σ₁ … σ_m`
/// and the ambient dimension `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    radii: Vec<f64>,
    sigmas: Vec<f64>,
    dimension: u32,
}

impl PhaseConfig {
    pub fn new(radii: Vec<f64>, sigmas: Vec<f64>, dimension: u32) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Config("at least one layer is required"));
        }
        if radii.len() != sigmas.len() {
            return Err(Error::Config("radii and conductivities differ in length"));
        }
        if dimension < 2 {
            return Err(Error::Config("dimension must be at least 2"));
        }
        if !(radii[0] > 0.0) || radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("radii must be positive and strictly increasing"));
        }
        if sigmas.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::Config("conductivities must be positive"));
        }
        Ok(PhaseConfig {
            radii,
            sigmas,
            dimension,
        })
    }

    pub fn planar(radii: Vec<f64>, sigmas: Vec<f64>) -> Result<Self> {
        Self::new(radii, sigmas, 2)
    }

    pub fn layers(&self) -> usize {
        self.radii.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn outer_radius(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    /// 1-based indices `k` with `σ_{k−1} = σ_k`; merged phases are allowed
    /// but every such pair is reported here.
    pub fn equal_adjacent_sigmas(&self) -> Vec<usize> {
        (1..self.sigmas.len())
            .filter(|&i| self.sigmas[i - 1] == self.sigmas[i])
            .map(|i| i + 1)
            .collect()
    }

    /// Drops the first `count` layers.
    pub fn outer_layers(&self, count: usize) -> Result<Self> {
        if count >= self.layers() {
            return Err(Error::Domain("cannot drop every layer"));
        }
        Self::new(
            self.radii[count..].to_vec(),
            self.sigmas[count..].to_vec(),
            self.dimension,
        )
    }
}

/// One quadratic piece `u(r) = constant − r²/(2Nσ)` on `[inner, outer]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shell {
    pub inner: f64,
    pub outer: f64,
    pub sigma: f64,
    pub constant: f64,
}

/// A piecewise-quadratic radial profile stored symbolically.
///
/// `config` is the layer structure the profile solves; `shells` is the
/// actual piecewise description and may be finer than `config` (after a
/// phase collapse the collapsed inner piece is kept separate).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    config: PhaseConfig,
    shells: Vec<Shell>,
}

impl RadialProfile {
    pub fn config(&self) -> &PhaseConfig {
        &self.config
    }

    pub fn shells(&self) -> &[Shell] {
        &self.shells
    }

    fn n(&self) -> f64 {
        self.config.dimension as f64
    }

    /// Index of the shell containing `r` (interfaces belong to the inner shell).
    pub fn shell_index(&self, r: f64) -> usize {
        self.shells
            .iter()
            .position(|s| r <= s.outer)
            .unwrap_or(self.shells.len() - 1)
    }

    /// Value of shell `index`'s quadratic at `r`, also outside its interval.
    pub fn value_in_shell(&self, index: usize, r: f64) -> f64 {
        let s = &self.shells[index];
        s.constant - r * r / (2.0 * self.n() * s.sigma)
    }

    /// `d^order u / dr^order` of shell `index`'s quadratic at `r`.
    pub fn derivative_in_shell(&self, index: usize, r: f64, order: u32) -> f64 {
        let s = &self.shells[index];
        let n = self.n();
        match order {
            0 => self.value_in_shell(index, r),
            1 => -r / (n * s.sigma),
            2 => -1.0 / (n * s.sigma),
            _ => 0.0,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.value_in_shell(self.shell_index(r), r)
    }

    pub fn derivative(&self, r: f64, order: u32) -> f64 {
        self.derivative_in_shell(self.shell_index(r), r, order)
    }

    pub fn sigma_at(&self, r: f64) -> f64 {
        self.shells[self.shell_index(r)].sigma
    }

    /// `(∂_n)^order u` on the outer boundary, constant by symmetry.
    pub fn outer_normal_derivative(&self, order: u32) -> f64 {
        let last = self.shells.len() - 1;
        self.derivative_in_shell(last, self.shells[last].outer, order)
    }

    /// Largest value jump across shell boundaries.
    pub fn continuity_defect(&self) -> f64 {
        (1..self.shells.len())
            .map(|i| {
                let r = self.shells[i].inner;
                (self.value_in_shell(i, r) - self.value_in_shell(i - 1, r)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `σ u′(r)` from `−r/N` over the shells, probed at
    /// `samples` points per shell.
    pub fn flux_defect(&self, samples: usize) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for (i, s) in self.shells.iter().enumerate() {
            for j in 0..=samples {
                let r = s.inner + (s.outer - s.inner) * j as f64 / samples.max(1) as f64;
                let flux = s.sigma * self.derivative_in_shell(i, r, 1);
                worst = worst.max((flux + r / n).abs());
            }
        }
        worst
    }

    /// `(r, u, u′, 1-based phase index)` at `count` equispaced radii.
    pub fn sample(&self, count: usize) -> Vec<(f64, f64, f64, usize)> {
        let outer = self.config.outer_radius();
        (0..count)
            .map(|j| {
                let r = outer * j as f64 / (count.max(2) - 1) as f64;
                let i = self.shell_index(r);
                (
                    r,
                    self.value_in_shell(i, r),
                    self.derivative_in_shell(i, r, 1),
                    self.phase_of_shell(i),
                )
            })
            .collect()
    }

    fn phase_of_shell(&self, index: usize) -> usize {
        let r = self.shells[index].outer;
        self.config
            .radii
            .iter()
            .position(|&big_r| r <= big_r * (1.0 + 1e-15))
            .map_or(self.config.layers(), |p| p + 1)
    }
}

/// The layered radial solution: for `R_{k−1} ≤ r ≤ R_k`,
/// `u = (1/2N)(Σ_{j=k}^{m−1} (R_{j+1}² − R_j²)/σ_{j+1} + (R_k² − r²)/σ_k)`.
pub fn radial_solution(config: &PhaseConfig) -> RadialProfile {
    let m = config.layers();
    let n = config.dimension as f64;
    let r = &config.radii;
    let s = &config.sigmas;
    let mut shells = Vec::with_capacity(m);
    for k in 0..m {
        let tail: f64 = (k..m - 1)
            .map(|j| (r[j + 1] * r[j + 1] - r[j] * r[j]) / s[j + 1])
            .sum();
        shells.push(Shell {
            inner: if k == 0 { 0.0 } else { r[k - 1] },
            outer: r[k],
            sigma: s[k],
            constant: (tail + r[k] * r[k] / s[k]) / (2.0 * n),
        });
    }
    RadialProfile {
        config: config.clone(),
        shells,
    }
}

/// The solution with `σ₁ = σ₂ = σ₃`: the third shell's quadratic extended to
/// the whole ball of radius `R₃`, unchanged outside it.
pub fn merged_solution(config: &PhaseConfig) -> Result<RadialProfile> {
    if config.layers() < 3 {
        return Err(Error::Domain("the merged solution needs at least three layers"));
    }
    let u = radial_solution(config);
    let mut shells = Vec::with_capacity(config.layers() - 2);
    shells.push(Shell {
        inner: 0.0,
        ..u.shells[2]
    });
    shells.extend_from_slice(&u.shells[3..]);
    let mut sigmas = config.sigmas.clone();
    sigmas[0] = sigmas[2];
    sigmas[1] = sigmas[2];
    Ok(RadialProfile {
        config: PhaseConfig::new(config.radii.clone(), sigmas, config.dimension)?,
        shells,
    })
}

/// Absorbs the innermost phase: `ũ = (σ₁/σ₂)(u − α₁) + α₁` in `Ω₁`, `u`
/// elsewhere. The result solves the problem with layers `Ω₂ ⊂ … ⊂ Ω_m`
/// exactly when `α₁ = u|∂Ω₁`.
pub fn phase_collapse(profile: &RadialProfile, alpha1: f64) -> Result<RadialProfile> {
    let config = &profile.config;
    if config.layers() < 2 || profile.shells.len() < 2 {
        return Err(Error::Domain("phase collapse needs at least two layers"));
    }
    let r1 = config.radii[0];
    let ratio = config.sigmas[0] / config.sigmas[1];
    // earlier collapses may leave several shells inside Ω₁
    let shells = profile
        .shells
        .iter()
        .map(|s| {
            if s.outer <= r1 {
                Shell {
                    sigma: s.sigma / ratio,
                    constant: ratio * (s.constant - alpha1) + alpha1,
                    ..*s
                }
            } else {
                *s
            }
        })
        .collect();
    Ok(RadialProfile {
        config: config.outer_layers(1)?,
        shells,
    })
}
