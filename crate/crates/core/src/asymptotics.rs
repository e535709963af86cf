//! Leading-order large-`|lambda|` behaviour of `v_beta`, `Delta_{alpha,beta}` and `m`.
//!
//! The classical displays normalize the terminal solution with `v(S) = -sin(beta)`
//! (and `v'(S) = 1` in the Dirichlet case). Every formula here is returned in the
//! normalization of [`crate::forward::v_solution`], `v(S) = sin(beta)`,
//! `v'(S) = cos(beta)`, which differs by an overall sign for `beta` in `(0, pi]`.
//! `beta = 0` keeps the printed sign, because `v'(S) = cos 0 = 1` already agrees.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problem::{principal_sqrt, BoundaryAngles, TransferMatrix};

/// Case labels for the asymptotic formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AsymptoticRegime {
    pub alpha_zero: bool,
    pub beta_pi: bool,
    pub m12_zero: bool,
}

impl AsymptoticRegime {
    pub fn classify(angles: &BoundaryAngles, m: &TransferMatrix) -> Self {
        Self {
            alpha_zero: angles.alpha == 0.0,
            beta_pi: angles.beta == PI,
            m12_zero: m.m12 == 0.0,
        }
    }
}

/// Leading `(value, derivative)` pair of `v_beta(x, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingTerm {
    pub value: Complex64,
    pub derivative: Complex64,
    /// Set when `beta = 0`, which is outside the admissible `(0, pi]` range.
    pub extrapolated: bool,
}

/// `sin(sqrt(lambda) S) / sqrt(lambda)`, continuous through `lambda = 0`.
fn sin_over_root(root: Complex64, s: f64) -> Complex64 {
    let u = root * s;
    if u.norm() < 1e-4 {
        let u2 = u * u;
        s * (1.0 - u2 / 6.0 + u2 * u2 / 120.0)
    } else {
        u.sin() / root
    }
}

/// Leading term of `v_beta` at `x` (the right-hand formulas are used at `x = 0`).
///
/// The caller is expected to stay in the regime `2 S |sqrt(lambda)| >= 10`.
pub fn v_leading(
    half_width: f64,
    m: &TransferMatrix,
    beta: f64,
    x: f64,
    lambda: Complex64,
) -> Result<LeadingTerm> {
    if !(0.0..=PI).contains(&beta) {
        return Err(Error::Config(format!("beta = {beta} outside [0, pi]")));
    }
    if x.abs() > half_width {
        return Err(Error::Config(format!("x = {x} outside [-S, S]")));
    }
    let s = half_width;
    let r = principal_sqrt(lambda);
    let u = r * s;
    let (su, cu) = (u.sin(), u.cos());
    let rx = r * x;
    let (sx, cx) = (rx.sin(), rx.cos());
    let dirichlet = beta == 0.0 || beta == PI;
    let (value, derivative) = if dirichlet {
        if x >= 0.0 {
            let w = r * (s - x);
            (-sin_over_root(r, s - x), w.cos())
        } else if m.m12 != 0.0 {
            (-m.m12 * cu * cx, m.m12 * r * cu * sx)
        } else {
            (
                -m.m22 * sin_over_root(r, s) * cx + m.m11 * sin_over_root(r, x) * cu,
                m.m22 * su * sx + m.m11 * cu * cx,
            )
        }
    } else {
        let sb = beta.sin();
        if x >= 0.0 {
            let w = r * (s - x);
            (-sb * w.cos(), -r * sb * w.sin())
        } else if m.m12 != 0.0 {
            (r * m.m12 * sb * cx * su, -lambda * m.m12 * sb * sx * su)
        } else {
            (
                -m.m22 * sb * cx * cu - m.m11 * sb * sx * su,
                m.m22 * r * sb * sx * cu - m.m11 * r * sb * cx * su,
            )
        }
    };
    let sign = if beta == 0.0 { 1.0 } else { -1.0 };
    Ok(LeadingTerm {
        value: value * sign,
        derivative: derivative * sign,
        extrapolated: beta == 0.0,
    })
}

/// Leading term of the characteristic function `Delta_{alpha,beta}(lambda)`.
pub fn delta_leading(
    half_width: f64,
    m: &TransferMatrix,
    angles: &BoundaryAngles,
    lambda: Complex64,
) -> Complex64 {
    let regime = AsymptoticRegime::classify(angles, m);
    let r = principal_sqrt(lambda);
    let u = r * half_width;
    let (su, cu) = (u.sin(), u.cos());
    let sa = angles.sin_alpha();
    let sb = angles.sin_beta();
    let tr = m.trace();
    let printed = match (regime.m12_zero, regime.alpha_zero, regime.beta_pi) {
        (true, false, false) => -sa * sb * tr * r * (u * 2.0).sin() / 2.0,
        (true, false, true) => -sa * tr * su * su,
        (true, true, true) => tr * sin_over_root(r, half_width) * cu,
        (true, true, false) => m.m22 * sb * cu * cu - m.m11 * sb * su * su,
        (false, false, false) => lambda * sa * sb * m.m12 * su * su,
        (false, false, true) => -sa * m.m12 * r * cu * su,
        (false, true, true) => m.m12 * cu * cu,
        (false, true, false) => -m.m12 * r * sb * cu * su,
    };
    -printed
}

/// Size of the error term accompanying [`delta_leading`] (without its constant).
pub fn delta_error_envelope(
    half_width: f64,
    m: &TransferMatrix,
    angles: &BoundaryAngles,
    lambda: Complex64,
) -> f64 {
    let regime = AsymptoticRegime::classify(angles, m);
    let r = principal_sqrt(lambda);
    let growth = (2.0 * half_width * r.im.abs()).exp();
    let root = r.norm().max(f64::MIN_POSITIVE);
    let power = match (regime.m12_zero, regime.alpha_zero, regime.beta_pi) {
        (true, false, false) => 1.0,
        (true, false, true) => 1.0 / root,
        (true, true, true) => 1.0 / (root * root),
        (true, true, false) => 1.0 / root,
        (false, false, false) => root,
        (false, false, true) => 1.0,
        (false, true, true) => 1.0 / root,
        (false, true, false) => 1.0,
    };
    growth * power
}

/// Leading behaviour of `m_{alpha,beta}(lambda)` as `lambda -> -infinity`:
/// `-i sqrt(lambda)` when `alpha = 0`, `cot(alpha)` otherwise.
pub fn m_asymptote(angles: &BoundaryAngles, lambda: f64) -> Result<Complex64> {
    if !(lambda < 0.0) {
        return Err(Error::Precondition(format!(
            "m asymptote is defined along the negative real axis, got lambda = {lambda}"
        )));
    }
    if angles.alpha == 0.0 {
        Ok(Complex64::new((-lambda).sqrt(), 0.0))
    } else {
        Ok(Complex64::new(1.0 / angles.alpha.tan(), 0.0))
    }
}

/// Leading `(v(-S), v'(-S))` at `lambda = -k^2`, assembled from the
/// exponential-order displays for `v` (both the value and the derivative
/// display are used; the derivative carries the extra factor `-k`).
pub fn v_left_end_negative_axis(
    half_width: f64,
    m: &TransferMatrix,
    beta: f64,
    k: f64,
) -> (f64, f64) {
    let growth = (2.0 * half_width * k).exp();
    let tr = m.trace();
    let printed_value = if beta == PI {
        -(k * m.m12 + tr) / (4.0 * k) * growth
    } else {
        -(k * k * m.m12 + k * tr + m.m21) * beta.sin() / (4.0 * k) * growth
    };
    // printed derivative = -k * printed value; convert to the forward normalization.
    (-printed_value, k * printed_value)
}

/// `e^(-2 k S) Delta_{alpha,beta}(-k^2)` for `q = 0` with the same jump, in closed
/// form. Unlike the leading terms it is uniform in `M` and the angles, and it does
/// not overflow for large `k`.
pub fn delta_free_scaled(
    half_width: f64,
    m: &TransferMatrix,
    angles: &BoundaryAngles,
    k: f64,
) -> f64 {
    let decay = (-2.0 * k * half_width).exp();
    let ch = 0.5 * (1.0 + decay);
    let sh_over_k = if k * half_width < 1e-4 {
        half_width * (1.0 + (k * half_width).powi(2) / 6.0) * (-k * half_width).exp()
    } else {
        0.5 * (1.0 - decay) / k
    };
    // (y, y') at S, carried one half-width to the left, each scaled by e^(-k S)
    let carry = |y: f64, dy: f64| (y * ch - dy * sh_over_k, -y * k * k * sh_over_k + dy * ch);
    let (y0, dy0) = carry(angles.sin_beta(), angles.beta.cos());
    let (u, du) = (m.m22 * y0 - m.m12 * dy0, -m.m21 * y0 + m.m11 * dy0);
    let (y, dy) = carry(u, du);
    dy * angles.sin_alpha() - y * angles.alpha.cos()
}

/// `sqrt(-lambda_0)` for the lowest eigenvalue of the `q = 0` problem with the same
/// jump and angles when it is negative, `0` otherwise. Deep negative eigenvalues come
/// from strongly attracting Robin ends or a small `|m12|`.
pub fn free_depth(half_width: f64, m: &TransferMatrix, angles: &BoundaryAngles) -> f64 {
    // geometric grid in k; at large k the scaled function is a cubic in k
    let points = 6000;
    let (lo, hi) = (1e-3f64, 1e12f64);
    let ratio = (hi / lo).powf(1.0 / points as f64);
    let f = |k: f64| delta_free_scaled(half_width, m, angles, k);
    let mut depth = 0.0;
    let mut k = lo;
    let mut prev = f(k);
    for _ in 0..points {
        let next_k = k * ratio;
        let next = f(next_k);
        if prev == 0.0 || prev * next < 0.0 {
            depth = next_k;
        }
        k = next_k;
        prev = next;
    }
    depth
}

/// Number of zeros (with multiplicity) of the leading term of `Delta` in
/// `[0, lambda_top)`. Used to cross-check that a numerical scan did not skip roots.
pub fn leading_zero_count(
    half_width: f64,
    m: &TransferMatrix,
    angles: &BoundaryAngles,
    lambda_top: f64,
) -> usize {
    if !(lambda_top > 0.0) {
        return 0;
    }
    let regime = AsymptoticRegime::classify(angles, m);
    let u = lambda_top.sqrt() * half_width;
    // zeros strictly below u of sin (n >= 1), cos, and sin(2u) (n >= 1)
    let below = |start: f64, period: f64| -> usize {
        if u <= start {
            0
        } else {
            ((u - start) / period).ceil() as usize
        }
    };
    let n_sin = below(PI, PI);
    let n_cos = below(PI / 2.0, PI);
    let n_sin2 = below(PI / 2.0, PI / 2.0);
    match (regime.m12_zero, regime.alpha_zero, regime.beta_pi) {
        (true, false, false) => 1 + n_sin2,
        (true, false, true) => 1 + 2 * n_sin,
        (true, true, true) => n_sin + n_cos,
        (true, true, false) => {
            let theta = (m.m22 / m.m11).abs().sqrt().atan();
            below(theta, PI) + below(PI - theta, PI)
        }
        (false, false, false) => 2 + 2 * n_sin,
        (false, false, true) => 1 + n_sin + n_cos,
        (false, true, true) => 2 * n_cos,
        (false, true, false) => 1 + n_sin + n_cos,
    }
}
