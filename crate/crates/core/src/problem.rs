//! Problem data: potential samples, transfer matrix, interval and boundary angles.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagate::{GaussTable, DEFAULT_STEPS};

/// Potential sampled on a uniform grid over `[-S, S]`, evaluated by piecewise
/// cubic Hermite interpolation.
///
/// The grid must contain `x = 0` as a node. Slopes are estimated separately on
/// each half so a kink (or jump in derivative) at the origin is not smeared.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    half_width: f64,
    samples: Vec<f64>,
    left_slopes: Vec<f64>,
    right_slopes: Vec<f64>,
    spacing: f64,
    origin: usize,
    zero: bool,
}

impl Potential {
    pub fn new(half_width: f64, samples: Vec<f64>) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Config(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::Config(format!(
                "potential needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|q| !q.is_finite()) {
            return Err(Error::Config(format!("potential sample {i} is not finite")));
        }
        if !(samples.len() - 1).is_multiple_of(2) {
            return Err(Error::Config(format!(
                "potential grid of {} samples does not contain x = 0 as a node (need an odd count)",
                samples.len()
            )));
        }
        let origin = (samples.len() - 1) / 2;
        let spacing = 2.0 * half_width / (samples.len() - 1) as f64;
        let left_slopes = half_slopes(&samples[..=origin], spacing);
        let right_slopes = half_slopes(&samples[origin..], spacing);
        let zero = samples.iter().all(|&q| q == 0.0);
        Ok(Self {
            half_width,
            samples,
            left_slopes,
            right_slopes,
            spacing,
            origin,
            zero,
        })
    }

    /// Identically zero potential (three samples suffice).
    pub fn zero(half_width: f64) -> Result<Self> {
        Self::new(half_width, vec![0.0; 3])
    }

    /// Samples `f` on a grid of `count` points (count must be odd).
    pub fn from_fn(half_width: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let step = 2.0 * half_width / (count.max(2) - 1) as f64;
        let samples = (0..count)
            .map(|j| f(-half_width + j as f64 * step))
            .collect();
        Self::new(half_width, samples)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Evaluates the interpolant. `right` selects the half used at `x = 0`.
    pub fn eval(&self, x: f64, right: bool) -> f64 {
        if self.zero {
            return 0.0;
        }
        let x = x.clamp(-self.half_width, self.half_width);
        let right = right || x > 0.0;
        let (values, slopes, offset) = if right {
            (&self.samples[self.origin..], &self.right_slopes, 0.0)
        } else {
            (
                &self.samples[..=self.origin],
                &self.left_slopes,
                self.half_width,
            )
        };
        let t = (x + offset) / self.spacing;
        let j = (t.floor().max(0.0) as usize).min(values.len() - 2);
        let s = t - j as f64;
        let h = self.spacing;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * values[j]
            + (s3 - 2.0 * s2 + s) * h * slopes[j]
            + (-2.0 * s3 + 3.0 * s2) * values[j + 1]
            + (s3 - s2) * h * slopes[j + 1]
    }
}

fn half_slopes(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    if n == 2 {
        let d = (f[1] - f[0]) / h;
        return vec![d, d];
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    out
}

/// Real 2x2 transfer matrix normalized to unit determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl TransferMatrix {
    pub const IDENTITY: Self = Self {
        m11: 1.0,
        m12: 0.0,
        m21: 0.0,
        m22: 1.0,
    };

    /// Builds the matrix, rescaling by `1/sqrt(det)` so that `det = 1`.
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Result<Self> {
        if ![m11, m12, m21, m22].iter().all(|v| v.is_finite()) {
            return Err(Error::Config(
                "transfer matrix entries must be finite".into(),
            ));
        }
        let det = m11 * m22 - m12 * m21;
        if !(det > 0.0) {
            return Err(Error::Config(format!(
                "transfer matrix must have positive determinant, got {det}"
            )));
        }
        let scale = det.sqrt().recip();
        let (m11, m12, m21, m22) = if (det - 1.0).abs() < 4.0 * f64::EPSILON {
            (m11, m12, m21, m22)
        } else {
            (m11 * scale, m12 * scale, m21 * scale, m22 * scale)
        };
        if m12 == 0.0 && m11 + m22 == 0.0 {
            return Err(Error::Config("m12 and m11 + m22 cannot both vanish".into()));
        }
        Ok(Self { m11, m12, m21, m22 })
    }

    pub fn diag(a: f64, d: f64) -> Result<Self> {
        Self::new(a, 0.0, 0.0, d)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Self {
        Self {
            m11: self.m22,
            m12: -self.m12,
            m21: -self.m21,
            m22: self.m11,
        }
    }

    /// Applies the matrix to a `(value, derivative)` pair.
    pub fn apply<T>(&self, y: T, dy: T) -> (T, T)
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        (y * self.m11 + dy * self.m12, y * self.m21 + dy * self.m22)
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.m11, self.m12], [self.m21, self.m22]]
    }
}

/// The triple `(q, M, S)` together with the integration resolution.
#[derive(Debug, Clone)]
pub struct Problem {
    potential: Potential,
    transfer: TransferMatrix,
    table: Arc<GaussTable>,
}

impl Problem {
    pub fn new(potential: Potential, transfer: TransferMatrix) -> Self {
        let table = Arc::new(GaussTable::new(&potential, DEFAULT_STEPS));
        Self {
            potential,
            transfer,
            table,
        }
    }

    /// Overrides the number of integration steps per half interval (rounded up to even).
    pub fn with_steps(mut self, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::Config(format!(
                "need at least 2 steps per side, got {steps}"
            )));
        }
        let steps = steps + steps % 2;
        self.table = Arc::new(GaussTable::new(&self.potential, steps));
        Ok(self)
    }

    pub fn steps(&self) -> usize {
        self.table.steps
    }

    pub(crate) fn table(&self) -> &GaussTable {
        &self.table
    }

    /// Zero potential on `[-S, S]`.
    pub fn free(half_width: f64, transfer: TransferMatrix) -> Result<Self> {
        Ok(Self::new(Potential::zero(half_width)?, transfer))
    }

    pub fn half_width(&self) -> f64 {
        self.potential.half_width
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn transfer(&self) -> &TransferMatrix {
        &self.transfer
    }
}

/// Boundary angles: `alpha` in `[0, pi)` at `-S`, `beta` in `(0, pi]` at `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryAngles {
    pub alpha: f64,
    pub beta: f64,
}

impl BoundaryAngles {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..PI).contains(&alpha) {
            return Err(Error::Config(format!(
                "alpha must lie in [0, pi), got {alpha}"
            )));
        }
        if !(beta > 0.0 && beta <= PI) {
            return Err(Error::Config(format!(
                "beta must lie in (0, pi], got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn dirichlet_dirichlet() -> Self {
        Self {
            alpha: 0.0,
            beta: PI,
        }
    }

    pub fn neumann_neumann() -> Self {
        Self {
            alpha: PI / 2.0,
            beta: PI / 2.0,
        }
    }

    pub fn neumann_dirichlet() -> Self {
        Self {
            alpha: PI / 2.0,
            beta: PI,
        }
    }

    pub fn alpha_is_zero(&self) -> bool {
        self.alpha == 0.0
    }

    /// `sin(beta)` with the Dirichlet case pinned to exactly zero.
    pub fn sin_beta(&self) -> f64 {
        if self.beta == PI {
            0.0
        } else {
            self.beta.sin()
        }
    }

    pub fn cos_beta(&self) -> f64 {
        if self.beta == PI {
            -1.0
        } else {
            self.beta.cos()
        }
    }

    pub fn sin_alpha(&self) -> f64 {
        if self.alpha == 0.0 {
            0.0
        } else {
            self.alpha.sin()
        }
    }

    pub fn cos_alpha(&self) -> f64 {
        if self.alpha == 0.0 {
            1.0
        } else {
            self.alpha.cos()
        }
    }
}

/// `lambda` together with `zeta = sqrt(lambda)` on the branch `Im zeta >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    pub lambda: Complex64,
    pub zeta: Complex64,
}

impl SpectralParameter {
    pub fn from_lambda(lambda: Complex64) -> Self {
        Self {
            lambda,
            zeta: principal_sqrt(lambda),
        }
    }

    pub fn from_real(lambda: f64) -> Self {
        Self::from_lambda(Complex64::new(lambda, 0.0))
    }

    pub fn from_zeta(zeta: Complex64) -> Self {
        Self {
            lambda: zeta * zeta,
            zeta,
        }
    }
}

/// Square root with `Im >= 0`; negative reals map to `+i sqrt(|x|)`.
pub fn principal_sqrt(lambda: Complex64) -> Complex64 {
    if lambda.im == 0.0 {
        if lambda.re >= 0.0 {
            Complex64::new(lambda.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-lambda.re).sqrt())
        }
    } else {
        let z = lambda.sqrt();
        if z.im < 0.0 {
            -z
        } else {
            z
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfer_matrix_is_normalized() {
        let m = TransferMatrix::new(4.0, 0.0, 0.0, 1.0).unwrap();
        assert!((m.det() - 1.0).abs() < 1e-15);
        assert!((m.m11 - 2.0).abs() < 1e-15);
        assert!((m.m22 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn transfer_matrix_rejects_bad_determinant() {
        assert!(TransferMatrix::new(1.0, 0.0, 0.0, -1.0).is_err());
        assert!(TransferMatrix::new(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn transfer_matrix_accepts_rotation() {
        // With det = 1 and m12 = 0 the trace cannot vanish, so a quarter turn is admissible.
        assert!(TransferMatrix::new(0.0, 1.0, -1.0, 0.0).is_ok());
        assert!(TransferMatrix::new(1.0, 0.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn potential_requires_origin_node() {
        assert!(Potential::new(1.0, vec![0.0; 4]).is_err());
        assert!(Potential::new(1.0, vec![0.0, f64::NAN, 0.0]).is_err());
        assert!(Potential::new(1.0, vec![0.0; 5]).is_ok());
    }

    #[test]
    fn cubic_interpolation_reproduces_quadratics() {
        let p = Potential::from_fn(1.0, 21, |x| 1.0 + x - 2.0 * x * x).unwrap();
        for &x in &[-0.93, -0.5, -0.01, 0.0, 0.017, 0.44, 0.999] {
            let exact = 1.0 + x - 2.0 * x * x;
            assert!((p.eval(x, x >= 0.0) - exact).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn interpolation_respects_kink_at_origin() {
        let p = Potential::from_fn(1.0, 41, |x: f64| x.abs()).unwrap();
        assert!((p.eval(-0.3, false) - 0.3).abs() < 1e-12);
        assert!((p.eval(0.3, true) - 0.3).abs() < 1e-12);
        assert!((p.eval(-0.01, false) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn angles_validate_ranges() {
        assert!(BoundaryAngles::new(PI, 1.0).is_err());
        assert!(BoundaryAngles::new(0.0, 0.0).is_err());
        assert!(BoundaryAngles::new(0.0, PI).is_ok());
    }

    #[test]
    fn principal_branch() {
        let p = SpectralParameter::from_real(-4.0);
        assert_eq!(p.zeta, Complex64::new(0.0, 2.0));
        let p = SpectralParameter::from_lambda(Complex64::new(-1.0, -1e-3));
        assert!(p.zeta.im > 0.0);
        assert!((p.zeta * p.zeta - p.lambda).norm() < 1e-15);
    }
}
