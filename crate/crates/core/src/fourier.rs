//! Real trigonometric series on a circle.
//!
//! A [`FourierField`] stores `f(θ) = mean + Σ_{k=1..K} (a_k cos kθ + b_k sin kθ)`
//! with raw (unnormalized) cosine and sine coefficients. Unit-L² spherical
//! harmonics on the unit circle are `cos kθ / √π` and `sin kθ / √π`; the
//! Dirichlet-to-Neumann eigenvalues do not depend on that normalization.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    mean: f64,
    modes: Vec<(f64, f64)>,
    zero_mean: bool,
}

impl FourierField {
    /// The zero field with `truncation` modes.
    pub fn zeros(truncation: usize) -> Self {
        FourierField {
            mean: 0.0,
            modes: vec![(0.0, 0.0); truncation],
            zero_mean: false,
        }
    }

    pub fn constant(value: f64, truncation: usize) -> Self {
        FourierField {
            mean: value,
            ..Self::zeros(truncation)
        }
    }

    /// `amplitude · cos(kθ)` for `k ≥ 0` (k = 0 gives a constant).
    pub fn cosine(k: usize, amplitude: f64, truncation: usize) -> Self {
        let mut field = Self::zeros(truncation.max(k));
        if k == 0 {
            field.mean = amplitude;
        } else {
            field.modes[k - 1].0 = amplitude;
        }
        field
    }

    /// `amplitude · sin(kθ)` for `k ≥ 1`.
    pub fn sine(k: usize, amplitude: f64, truncation: usize) -> Self {
        assert!(k >= 1, "sin(0θ) vanishes identically");
        let mut field = Self::zeros(truncation.max(k));
        field.modes[k - 1].1 = amplitude;
        field
    }

    /// Builds a field from `(k, a_k, b_k)` triples; modes may appear in any
    /// order and repeated modes are summed.
    pub fn from_modes(mean: f64, modes: &[(usize, f64, f64)], truncation: usize) -> Result<Self> {
        let mut field = Self::constant(mean, truncation);
        for &(k, a, b) in modes {
            if k == 0 {
                if b != 0.0 {
                    return Err(Error::Domain("mode 0 has no sine component"));
                }
                field.mean += a;
                continue;
            }
            if k > truncation {
                return Err(Error::TruncationMismatch {
                    field: k,
                    spectrum: truncation,
                });
            }
            field.modes[k - 1].0 += a;
            field.modes[k - 1].1 += b;
        }
        Ok(field)
    }

    /// Discrete Fourier projection of samples taken at `θ_j = 2πj/M`.
    ///
    /// Requires `truncation < M/2` so that every retained mode is resolved.
    pub fn from_samples(samples: &[f64], truncation: usize) -> Result<Self> {
        let m = samples.len();
        if m == 0 || 2 * truncation >= m {
            return Err(Error::Config("too few samples for the requested truncation"));
        }
        let table = TrigTable::new(m);
        let mean = samples.iter().sum::<f64>() / m as f64;
        let mut modes = Vec::with_capacity(truncation);
        for k in 1..=truncation {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &f) in samples.iter().enumerate() {
                let (c, s) = table.cos_sin(j * k);
                a += f * c;
                b += f * s;
            }
            modes.push((2.0 * a / m as f64, 2.0 * b / m as f64));
        }
        Ok(FourierField {
            mean,
            modes,
            zero_mean: false,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn truncation(&self) -> usize {
        self.modes.len()
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    /// `(a_k, b_k)`; zero beyond the truncation, `(mean, 0)` for `k = 0`.
    pub fn mode(&self, k: usize) -> (f64, f64) {
        if k == 0 {
            (self.mean, 0.0)
        } else {
            self.modes.get(k - 1).copied().unwrap_or((0.0, 0.0))
        }
    }

    pub fn set_mode(&mut self, k: usize, a: f64, b: f64) {
        if k == 0 {
            self.mean = a;
            self.zero_mean = false;
            return;
        }
        if k > self.modes.len() {
            self.modes.resize(k, (0.0, 0.0));
        }
        self.modes[k - 1] = (a, b);
    }

    /// `(k, a_k, b_k)` for `k = 1..=K`.
    pub fn modes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (i + 1, a, b))
    }

    /// The same field with the mean removed and flagged zero-mean.
    pub fn zero_mean_part(&self) -> Self {
        FourierField {
            mean: 0.0,
            modes: self.modes.clone(),
            zero_mean: true,
        }
    }

    /// Pads with zeros or drops trailing modes.
    pub fn with_truncation(&self, truncation: usize) -> Self {
        let mut modes = self.modes.clone();
        modes.resize(truncation, (0.0, 0.0));
        FourierField {
            mean: self.mean,
            modes,
            zero_mean: self.zero_mean,
        }
    }

    /// Highest mode with a nonzero coefficient (0 for constants).
    pub fn degree(&self) -> usize {
        self.modes
            .iter()
            .rposition(|&(a, b)| a != 0.0 || b != 0.0)
            .map_or(0, |i| i + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.mean == 0.0 && self.modes.iter().all(|&(a, b)| a == 0.0 && b == 0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.derivative(theta, 0)
    }

    /// `order`-th derivative in θ.
    pub fn derivative(&self, theta: f64, order: u32) -> f64 {
        let mut value = if order == 0 { self.mean } else { 0.0 };
        for (i, &(a, b)) in self.modes.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            // derivatives of (cos, sin) repeat with period 4
            let (dc, ds) = match order % 4 {
                0 => (c, s),
                1 => (-s, c),
                2 => (-c, -s),
                _ => (s, -c),
            };
            value += k.powi(order as i32) * (a * dc + b * ds);
        }
        value
    }

    /// θ-derivative as a field.
    pub fn differentiate(&self) -> Self {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let k = (i + 1) as f64;
                (k * b, -k * a)
            })
            .collect();
        FourierField {
            mean: 0.0,
            modes,
            zero_mean: true,
        }
    }

    /// Values at `θ_j = 2πj/M`.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        let table = TrigTable::new(m);
        (0..m)
            .map(|j| {
                let mut v = self.mean;
                for (i, &(a, b)) in self.modes.iter().enumerate() {
                    let (c, s) = table.cos_sin(j * (i + 1));
                    v += a * c + b * s;
                }
                v
            })
            .collect()
    }

    /// L² norm on the unit circle: `sqrt(2π mean² + π Σ (a_k² + b_k²))`.
    pub fn l2_norm(&self) -> f64 {
        let modes: f64 = self.modes.iter().map(|&(a, b)| a * a + b * b).sum();
        (TAU * self.mean * self.mean + PI * modes).sqrt()
    }

    /// Euclidean norm of the coefficient vector (mean included).
    pub fn coefficient_norm(&self) -> f64 {
        let modes: f64 = self.modes.iter().map(|&(a, b)| a * a + b * b).sum();
        (self.mean * self.mean + modes).sqrt()
    }

    /// Supremum over a grid fine enough to resolve every retained mode.
    pub fn sup_norm(&self) -> f64 {
        let m = (8 * self.truncation()).max(64);
        self.sample(m).into_iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `θ ↦ f(θ − φ)`.
    pub fn rotated(&self, phi: f64) -> Self {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let (s, c) = ((i + 1) as f64 * phi).sin_cos();
                (a * c - b * s, a * s + b * c)
            })
            .collect();
        FourierField {
            mean: self.mean,
            modes,
            zero_mean: self.zero_mean,
        }
    }

    /// Mode-wise map `(k, a, b) ↦ (k, g(k)·a, g(k)·b)`; the mean is sent
    /// through `g(0)`.
    pub fn map_modes(&self, mut gain: impl FnMut(usize) -> f64) -> Self {
        let g0 = gain(0);
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let g = gain(i + 1);
                (g * a, g * b)
            })
            .collect();
        FourierField {
            mean: if g0 == 0.0 { 0.0 } else { g0 * self.mean },
            modes,
            zero_mean: self.zero_mean || g0 == 0.0,
        }
    }

    /// Flattened zero-mean coordinates `[a_1, b_1, …, a_K, b_K]`.
    pub fn to_coefficients(&self) -> Vec<f64> {
        self.modes.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// Inverse of [`to_coefficients`](Self::to_coefficients).
    pub fn from_coefficients(coefficients: &[f64]) -> Self {
        let modes = coefficients
            .chunks(2)
            .map(|c| (c[0], c.get(1).copied().unwrap_or(0.0)))
            .collect();
        FourierField {
            mean: 0.0,
            modes,
            zero_mean: true,
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.truncation().max(other.truncation());
        let modes = (1..=n)
            .map(|k| {
                let (a1, b1) = self.mode(k);
                let (a2, b2) = other.mode(k);
                (op(a1, a2), op(b1, b2))
            })
            .collect();
        FourierField {
            mean: op(self.mean, other.mean),
            modes,
            zero_mean: self.zero_mean && other.zero_mean,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        FourierField {
            mean: factor * self.mean,
            modes: self.modes.iter().map(|&(a, b)| (factor * a, factor * b)).collect(),
            zero_mean: self.zero_mean,
        }
    }
}

impl Add for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: Self) -> FourierField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: Self) -> FourierField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &FourierField {
    type Output = FourierField;
    fn neg(self) -> FourierField {
        self.scaled(-1.0)
    }
}

impl Mul<&FourierField> for f64 {
    type Output = FourierField;
    fn mul(self, rhs: &FourierField) -> FourierField {
        rhs.scaled(self)
    }
}

/// Exact `cos`/`sin` of `2π n / M` by table lookup on `n mod M`.
pub(crate) struct TrigTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigTable {
    pub(crate) fn new(m: usize) -> Self {
        let (sin, cos) = (0..m)
            .map(|j| (TAU * j as f64 / m as f64).sin_cos())
            .unzip();
        TrigTable { cos, sin }
    }

    #[inline]
    pub(crate) fn cos_sin(&self, n: usize) -> (f64, f64) {
        let i = n % self.cos.len();
        (self.cos[i], self.sin[i])
    }
}

/// `θ_j = 2πj/M`.
pub fn uniform_nodes(m: usize) -> Vec<f64> {
    (0..m).map(|j| TAU * j as f64 / m as f64).collect()
}

/// First and second θ-derivatives of periodic samples by Fourier
/// interpolation (Nyquist mode dropped).
pub fn spectral_derivatives(samples: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = samples.len();
    let field = FourierField::from_samples(samples, (m - 1) / 2)?;
    let d1 = field.differentiate();
    let d2 = d1.differentiate();
    Ok((d1.sample(m), d2.sample(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_recovers_trigonometric_polynomial() {
        let f = FourierField::from_modes(0.3, &[(1, 1.0, -0.5), (4, 0.25, 0.125)], 6).unwrap();
        let g = FourierField::from_samples(&f.sample(32), 6).unwrap();
        assert!((&f - &g).coefficient_norm() < 1e-14);
    }

    #[test]
    fn derivative_matches_differentiate() {
        let f = FourierField::from_modes(0.0, &[(2, 0.7, 0.1), (3, -0.2, 0.4)], 3).unwrap();
        let df = f.differentiate();
        for &t in &[0.0, 0.4, 2.0, 5.5] {
            assert!((f.derivative(t, 1) - df.eval(t)).abs() < 1e-13);
            assert!((f.derivative(t, 2) - df.derivative(t, 1)).abs() < 1e-12);
            assert!((f.derivative(t, 3) - df.derivative(t, 2)).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_shifts_argument() {
        let f = FourierField::from_modes(0.1, &[(1, 1.0, 0.0), (3, 0.2, -0.3)], 3).unwrap();
        let phi = 0.37;
        let g = f.rotated(phi);
        for &t in &[0.0, 1.0, 2.5] {
            assert!((g.eval(t) - f.eval(t - phi)).abs() < 1e-14);
        }
    }

    #[test]
    fn l2_norm_of_cosine() {
        let f = FourierField::cosine(2, 1.0, 4);
        assert!((f.l2_norm() - PI.sqrt()).abs() < 1e-15);
        assert!((FourierField::constant(1.0, 2).l2_norm() - TAU.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn undersampled_projection_is_rejected() {
        assert!(FourierField::from_samples(&[1.0; 8], 4).is_err());
    }

    #[test]
    fn zero_mean_flag_implies_zero_mean() {
        let f = FourierField::constant(2.0, 3).zero_mean_part();
        assert!(f.is_zero_mean());
        assert_eq!(f.mean(), 0.0);
    }

    #[test]
    fn spectral_derivative_of_smooth_sample() {
        let m = 64;
        let nodes = uniform_nodes(m);
        let samples: Vec<f64> = nodes.iter().map(|t| (t.cos()).exp()).collect();
        let (d1, d2) = spectral_derivatives(&samples).unwrap();
        for (j, t) in nodes.iter().enumerate() {
            let e = t.cos().exp();
            assert!((d1[j] + t.sin() * e).abs() < 1e-12);
            assert!((d2[j] - (t.sin().powi(2) - t.cos()) * e).abs() < 1e-11);
        }
    }
}
