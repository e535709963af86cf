//! Full-line scattering for a potential supported in `[-S, S]` with the
//! transfer condition at the origin.
//!
//! Outside `[-S, S]` the Jost solutions are plane waves, so they are started
//! from exact exponential data at `x = S` (for `f_+`) and `x = -S` (for `f_-`)
//! and integrated across the interval.

mod fit;
mod recover;

pub use fit::{retrieve_from_reflection, PhaseRetrieval, Rational, RationalFit};
pub use recover::{
    neumann_data_from_scattering, recover_w_at_s, recover_w_from_source, w_at_s_from_coefficients,
    ForwardModel, GridSource, NeumannData, RecoveredW, ScatteringSource,
};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{Problem, SpectralParameter};
use crate::propagate::{propagate, propagate_ends, Direction};
use crate::roots::illinois;
use crate::state::{StateMatrix, Trajectory};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(e^{s i zeta x}, s i zeta e^{s i zeta x})` for `s = +-1`.
fn plane_wave(zeta: Complex64, x: f64, sign: f64) -> [Complex64; 2] {
    let e = (I * zeta * (sign * x)).exp();
    [e, I * zeta * sign * e]
}

fn check_zeta(zeta: Complex64) -> Result<()> {
    if zeta.norm() == 0.0 {
        return Err(Error::Singular("zeta = 0 is excluded".into()));
    }
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(Error::Precondition(format!("zeta = {zeta} is not finite")));
    }
    Ok(())
}

/// Jost solutions on `[-S, S]`.
///
/// `f_plus` holds `f_+(x, zeta)` in column 0 and `f_+(x, -zeta)` in column 1;
/// `f_minus` holds `f_-(x, zeta)` in column 0 and `f_-(x, -zeta)` in column 1.
#[derive(Debug, Clone)]
pub struct JostPair {
    pub zeta: SpectralParameter,
    pub half_width: f64,
    pub f_plus: Trajectory,
    pub f_minus: Trajectory,
}

impl JostPair {
    /// `(f_+, f_+')` at `x`: the plane wave for `x >= S`, the trajectory otherwise.
    pub fn f_plus_at(&self, x: f64) -> Option<[Complex64; 2]> {
        if x >= self.half_width {
            return Some(plane_wave(self.zeta.zeta, x, 1.0));
        }
        find_sample(&self.f_plus, x)
    }

    /// `(f_-, f_-')` at `x`: the plane wave for `x <= -S`, the trajectory otherwise.
    pub fn f_minus_at(&self, x: f64) -> Option<[Complex64; 2]> {
        if x <= -self.half_width {
            return Some(plane_wave(self.zeta.zeta, x, -1.0));
        }
        find_sample(&self.f_minus, x)
    }
}

fn find_sample(t: &Trajectory, x: f64) -> Option<[Complex64; 2]> {
    t.samples
        .iter()
        .chain(t.nodes.iter())
        .find(|s| s.x == x)
        .map(|s| s.cols[0])
}

/// Jost solutions at `zeta` (`Im zeta >= 0`, `zeta != 0`), sampled at `samples` inside `[-S, S]`.
pub fn jost(problem: &Problem, zeta: Complex64, samples: &[f64]) -> Result<JostPair> {
    check_zeta(zeta)?;
    if zeta.im < 0.0 {
        return Err(Error::Precondition(format!(
            "Jost solutions are defined for Im zeta >= 0, got {zeta}"
        )));
    }
    let s = problem.half_width();
    let lambda = zeta * zeta;
    let plus = StateMatrix::new(s, plane_wave(zeta, s, 1.0), plane_wave(zeta, s, -1.0));
    let minus = StateMatrix::new(-s, plane_wave(zeta, -s, -1.0), plane_wave(zeta, -s, 1.0));
    Ok(JostPair {
        zeta: SpectralParameter::from_zeta(zeta),
        half_width: s,
        f_plus: propagate(problem, plus, lambda, Direction::RightToLeft, samples)?,
        f_minus: propagate(problem, minus, lambda, Direction::LeftToRight, samples)?,
    })
}

/// Where the expansion `f_- = A f_+(., -zeta) + B f_+(., zeta)` is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingPoint {
    /// `x = S`, where `f_+` is an exact plane wave.
    Right,
    /// `x = -S`, where `f_-` is an exact plane wave.
    Left,
}

/// Solves `[g1 g2] [A; B] = target` for 2-vectors of (value, derivative).
fn solve_expansion(
    g1: [Complex64; 2],
    g2: [Complex64; 2],
    target: [Complex64; 2],
) -> (Complex64, Complex64) {
    let det = g1[0] * g2[1] - g2[0] * g1[1];
    let a = (target[0] * g2[1] - g2[0] * target[1]) / det;
    let b = (g1[0] * target[1] - target[0] * g1[1]) / det;
    (a, b)
}

/// Coefficients `(A(zeta), B(zeta))` of `f_-(x, zeta) = A f_+(x, -zeta) + B f_+(x, zeta)`,
/// valid for any nonzero complex `zeta` (the analytic continuation off the real axis).
pub fn coefficients_at(
    problem: &Problem,
    zeta: Complex64,
    point: MatchingPoint,
) -> Result<(Complex64, Complex64)> {
    check_zeta(zeta)?;
    let s = problem.half_width();
    let lambda = zeta * zeta;
    match point {
        MatchingPoint::Right => {
            let ends = propagate_ends(
                problem,
                [plane_wave(zeta, -s, -1.0)],
                lambda,
                Direction::LeftToRight,
            )?;
            Ok(solve_expansion(
                plane_wave(zeta, s, -1.0),
                plane_wave(zeta, s, 1.0),
                ends.end[0],
            ))
        }
        MatchingPoint::Left => {
            let ends = propagate_ends(
                problem,
                [plane_wave(zeta, s, -1.0), plane_wave(zeta, s, 1.0)],
                lambda,
                Direction::RightToLeft,
            )?;
            Ok(solve_expansion(
                ends.end[0],
                ends.end[1],
                plane_wave(zeta, -s, -1.0),
            ))
        }
    }
}

/// `(A(xi), B(xi))` for real `xi != 0`, matched at `x = S`.
pub fn scattering_coefficients(problem: &Problem, xi: f64) -> Result<(Complex64, Complex64)> {
    if xi == 0.0 {
        return Err(Error::Singular(
            "scattering coefficients are undefined at xi = 0".into(),
        ));
    }
    coefficients_at(problem, Complex64::new(xi, 0.0), MatchingPoint::Right)
}

/// Largest difference between the coefficients matched at `x = S` and at `x = -S`.
pub fn matching_discrepancy(problem: &Problem, xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::Singular(
            "scattering coefficients are undefined at xi = 0".into(),
        ));
    }
    let z = Complex64::new(xi, 0.0);
    let (a1, b1) = coefficients_at(problem, z, MatchingPoint::Right)?;
    let (a2, b2) = coefficients_at(problem, z, MatchingPoint::Left)?;
    Ok((a1 - a2).norm().max((b1 - b2).norm()))
}

/// Reflection data on a real grid, optionally with `A`, `B`, and the bound states `eta_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    pub half_width: f64,
    pub xi: Vec<f64>,
    pub reflection: Vec<Complex64>,
    pub coefficients: Option<Vec<(Complex64, Complex64)>>,
    pub bound_states: Vec<f64>,
}

impl ScatteringData {
    pub fn new(
        half_width: f64,
        xi: Vec<f64>,
        reflection: Vec<Complex64>,
        coefficients: Option<Vec<(Complex64, Complex64)>>,
        bound_states: Vec<f64>,
    ) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Config(format!("S = {half_width} must be positive")));
        }
        if xi.len() != reflection.len() {
            return Err(Error::Config(
                "grid and reflection samples differ in length".into(),
            ));
        }
        if let Some(ab) = &coefficients {
            if ab.len() != xi.len() {
                return Err(Error::Config(
                    "grid and A/B samples differ in length".into(),
                ));
            }
        }
        if xi.iter().any(|x| *x == 0.0 || !x.is_finite()) {
            return Err(Error::Config(
                "grid must be finite and exclude xi = 0".into(),
            ));
        }
        if xi.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("grid must be strictly increasing".into()));
        }
        if bound_states.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("bound states eta_j must be positive".into()));
        }
        Ok(Self {
            half_width,
            xi,
            reflection,
            coefficients,
            bound_states,
        })
    }

    /// `R = 0` on the whole grid (to `tol`) and no bound states.
    pub fn is_trivial(&self, tol: f64) -> bool {
        self.bound_states.is_empty() && self.reflection.iter().all(|r| r.norm() <= tol)
    }
}

/// Reflection coefficient `R = B / A`, with `A` and `B`, on `xi_grid`, plus the bound states.
pub fn reflection(problem: &Problem, xi_grid: &[f64]) -> Result<ScatteringData> {
    let ab: Vec<(Complex64, Complex64)> = xi_grid
        .par_iter()
        .map(|&xi| scattering_coefficients(problem, xi))
        .collect::<Result<_>>()?;
    let r = ab.iter().map(|(a, b)| b / a).collect();
    ScatteringData::new(
        problem.half_width(),
        xi_grid.to_vec(),
        r,
        Some(ab),
        bound_states(problem)?,
    )
}

/// `A(i eta)`, which is real.
fn a_on_imaginary_axis(problem: &Problem, eta: f64) -> Result<f64> {
    let s = problem.half_width();
    let decay = (-eta * s).exp();
    let ends = propagate_ends(
        problem,
        [[decay, eta * decay]],
        -eta * eta,
        Direction::LeftToRight,
    )?;
    let [f, df] = ends.end[0];
    // Wronskian with f_+ = e^{-eta x} at S, divided by 2 i zeta = -2 eta
    let w = f * (-eta * decay) - df * decay;
    Ok(w / (-2.0 * eta))
}

/// Bound states `eta_j > 0` (line eigenvalues `-eta_j^2`): sign changes of `A(i eta)` on
/// `(0, 50/S]`, refined by bracketing.
pub fn bound_states(problem: &Problem) -> Result<Vec<f64>> {
    let s = problem.half_width();
    let top = 50.0 / s;
    let count = 1600;
    let f = |eta: f64| a_on_imaginary_axis(problem, eta);
    let mut found = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for j in 1..=count {
        let eta = top * j as f64 / count as f64;
        let v = f(eta)?;
        if v == 0.0 {
            found.push(eta);
        } else if let Some((pe, pv)) = prev {
            if pv != 0.0 && (pv < 0.0) != (v < 0.0) {
                found.push(illinois(&f, pe, pv, eta, v)?);
            }
        }
        prev = Some((eta, v));
    }
    found.sort_by(|a, b| b.total_cmp(a));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::TransferMatrix;
    use std::f64::consts::PI;

    fn free(m: TransferMatrix) -> Problem {
        Problem::free(PI / 2.0, m).unwrap()
    }

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn free_jost_is_plane_wave() {
        let p = free(TransferMatrix::IDENTITY);
        let z = c(1.3);
        let j = jost(&p, z, &[-1.0, 0.5]).unwrap();
        for x in [-1.0, 0.5] {
            let want = plane_wave(z, x, 1.0);
            let got = j.f_plus_at(x).unwrap();
            assert!((got[0] - want[0]).norm() < 1e-12 && (got[1] - want[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_jump_mode_matching() {
        let p = free(TransferMatrix::diag(2.0, 0.5).unwrap());
        let xi = 0.8;
        let j = jost(&p, c(xi), &[-0.7]).unwrap();
        let h1 = j.f_plus_at(-0.7).unwrap()[0];
        let want = 1.25 * (I * xi * -0.7).exp() - 0.75 * (-I * xi * -0.7).exp();
        assert!((h1 - want).norm() < 1e-12);
        let h2 = j.f_minus.at_origin_right().cols[0];
        assert!((h2[0] - c(2.0)).norm() < 1e-12);
        assert!((h2[1] - (-I * xi / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_jump_coefficients() {
        let p = free(TransferMatrix::diag(2.0, 0.5).unwrap());
        for xi in [-3.0, 0.1, 1.0, 7.5] {
            let (a, b) = scattering_coefficients(&p, xi).unwrap();
            assert!((a - c(1.25)).norm() < 1e-12);
            assert!((b - c(0.75)).norm() < 1e-12);
        }
        assert!(matches!(
            scattering_coefficients(&p, 0.0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn shear_jump_coefficient() {
        let p = free(TransferMatrix::new(1.0, 1.0, 0.0, 1.0).unwrap());
        let (a, _) = scattering_coefficients(&p, 1.0).unwrap();
        assert!((a - Complex64::new(1.0, -0.5)).norm() < 1e-12);
        assert!(matching_discrepancy(&p, 1.0).unwrap() < 1e-10);
    }

    #[test]
    fn bound_state_of_attractive_jump() {
        // A(i eta) = 1 - eta / 2
        let p = free(TransferMatrix::new(1.0, -1.0, 0.0, 1.0).unwrap());
        let b = bound_states(&p).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0] - 2.0).abs() < 1e-10);
        assert!(bound_states(&free(TransferMatrix::IDENTITY))
            .unwrap()
            .is_empty());
    }
}
