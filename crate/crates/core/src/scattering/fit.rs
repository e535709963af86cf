//! Experimental stand-ins for analytic continuation when only gridded data exist.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::recover::ScatteringSource;
use super::ScatteringData;
use crate::error::{Error, Result};

/// `P(z / scale) / Q(z / scale)` with `Q(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub numerator: Vec<Complex64>,
    pub denominator: Vec<Complex64>,
    pub scale: f64,
}

fn horner(coeffs: &[Complex64], t: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
}

impl Rational {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let t = z / self.scale;
        horner(&self.numerator, t) / horner(&self.denominator, t)
    }

    /// Linearized least-squares fit `P(t) - v Q(t) = 0` of type `(degree, degree)`.
    pub fn fit(points: &[f64], values: &[Complex64], degree: usize) -> Result<Self> {
        let unknowns = 2 * degree + 1;
        if points.len() < unknowns {
            return Err(Error::InsufficientData(format!(
                "a degree-{degree} rational fit needs at least {unknowns} samples"
            )));
        }
        let scale = points
            .iter()
            .fold(0.0f64, |a, x| a.max(x.abs()))
            .max(1e-300);
        let a = DMatrix::from_fn(points.len(), unknowns, |i, j| {
            let t = Complex64::new(points[i] / scale, 0.0);
            if j <= degree {
                t.powu(j as u32)
            } else {
                -values[i] * t.powu((j - degree) as u32)
            }
        });
        let b = DMatrix::from_fn(points.len(), 1, |i, _| values[i]);
        let x = a
            .svd(true, true)
            .solve(&b, 1e-13)
            .map_err(|e| Error::Singular(e.to_string()))?;
        let numerator = (0..=degree).map(|j| x[(j, 0)]).collect();
        let mut denominator = vec![Complex64::new(1.0, 0.0)];
        denominator.extend((degree + 1..unknowns).map(|j| x[(j, 0)]));
        Ok(Self {
            numerator,
            denominator,
            scale,
        })
    }
}

/// Experimental continuation of gridded `A`, `B` by rational least squares.
///
/// The samples are mirrored with `A(-xi) = conj A(xi)` before fitting. The
/// fit is only trustworthy near the real grid; `residual` is the largest
/// misfit on the grid.
#[derive(Debug, Clone)]
pub struct RationalFit {
    pub a: Rational,
    pub b: Rational,
    pub half_width: f64,
    pub residual: f64,
}

impl RationalFit {
    pub fn new(data: &ScatteringData, degree: usize) -> Result<Self> {
        let ab = data.coefficients.as_ref().ok_or_else(|| {
            Error::InsufficientData("a rational fit needs A and B samples".into())
        })?;
        let mut xs = Vec::with_capacity(2 * ab.len());
        let mut av = Vec::with_capacity(2 * ab.len());
        let mut bv = Vec::with_capacity(2 * ab.len());
        for (&x, &(a, b)) in data.xi.iter().zip(ab) {
            xs.push(x);
            av.push(a);
            bv.push(b);
            if !data.xi.contains(&-x) {
                xs.push(-x);
                av.push(a.conj());
                bv.push(b.conj());
            }
        }
        let fa = Rational::fit(&xs, &av, degree)?;
        let fb = Rational::fit(&xs, &bv, degree)?;
        let residual = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let z = Complex64::new(x, 0.0);
                (fa.eval(z) - av[i]).norm().max((fb.eval(z) - bv[i]).norm())
            })
            .fold(0.0, f64::max);
        Ok(Self {
            a: fa,
            b: fb,
            half_width: data.half_width,
            residual,
        })
    }
}

impl ScatteringSource for RationalFit {
    fn half_width(&self) -> f64 {
        self.half_width
    }

    fn coefficients(&self, zeta: Complex64) -> Result<(Complex64, Complex64)> {
        Ok((self.a.eval(zeta), self.b.eval(zeta)))
    }
}

/// `A` and `B` reconstructed from `R` alone.
#[derive(Debug, Clone)]
pub struct PhaseRetrieval {
    pub coefficients: Vec<(Complex64, Complex64)>,
    /// Largest change of the phase when the quadrature grid is halved.
    pub quadrature_error: f64,
}

/// `arg A` as the Hilbert transform of the even function `g = log|A| - log|A(xi_max)|`,
/// on the grid points selected by `stride`.
fn hilbert_phase(xi: &[f64], g: &[f64], stride: usize) -> Vec<f64> {
    let idx: Vec<usize> = (0..xi.len()).step_by(stride).collect();
    let t: Vec<f64> = idx.iter().map(|&i| xi[i]).collect();
    let gv: Vec<f64> = idx.iter().map(|&i| g[i]).collect();
    let top = *t.last().expect("nonempty grid");
    let n = t.len();
    let slope = |k: usize| -> f64 {
        if n < 2 {
            0.0
        } else if k == 0 {
            (gv[1] - gv[0]) / (t[1] - t[0])
        } else if k == n - 1 {
            (gv[k] - gv[k - 1]) / (t[k] - t[k - 1])
        } else {
            (gv[k + 1] - gv[k - 1]) / (t[k + 1] - t[k - 1])
        }
    };
    (0..n)
        .map(|k| {
            let x = t[k];
            let integrand = |j: usize| -> f64 {
                if j == k {
                    -slope(k)
                } else {
                    (gv[j] - gv[k]) * 2.0 * x / (x * x - t[j] * t[j])
                }
            };
            // [0, t_0] with the integrand frozen at its first value
            let mut acc = integrand(0) * t[0];
            for j in 1..n {
                acc += 0.5 * (integrand(j - 1) + integrand(j)) * (t[j] - t[j - 1]);
            }
            if x < top {
                acc += gv[k] * ((top + x) / (top - x)).ln();
            }
            acc / std::f64::consts::PI
        })
        .collect()
}

/// Experimental reconstruction of `A` and `B = R A` from reflection data on a
/// positive grid, for data without bound states and with `A` tending to a
/// constant: `|A|^2 = 1/(1 - |R|^2)` and `arg A` is the Hilbert transform of
/// `log|A|` minus its value at the end of the grid. The grid should start
/// close to zero and extend to where `|R|` is negligible.
pub fn retrieve_from_reflection(data: &ScatteringData) -> Result<PhaseRetrieval> {
    if !data.bound_states.is_empty() {
        return Err(Error::Precondition(
            "phase retrieval from R alone is only available without bound states".into(),
        ));
    }
    if data.xi.len() < 8 || data.xi[0] <= 0.0 {
        return Err(Error::InsufficientData(
            "phase retrieval needs at least 8 samples on a positive grid".into(),
        ));
    }
    if let Some(r) = data.reflection.iter().find(|r| !(r.norm() < 1.0)) {
        return Err(Error::Precondition(format!(
            "|R| = {} is not below 1",
            r.norm()
        )));
    }
    let log_mod: Vec<f64> = data
        .reflection
        .iter()
        .map(|r| -0.5 * (1.0 - r.norm_sqr()).ln())
        .collect();
    // Generic data have `A ~ 1/xi` at zero energy. That log singularity is
    // removed with `log(zeta / (zeta + i c))`, whose phase is known in closed form.
    let near_zero_slope = (log_mod[1] - log_mod[0]) / (data.xi[1].ln() - data.xi[0].ln());
    let pole = if near_zero_slope < -0.5 { 1.0 } else { 0.0 };
    let c = 1.0 / data.half_width;
    let regular: Vec<f64> = log_mod
        .iter()
        .zip(&data.xi)
        .map(|(v, x)| v + pole * 0.5 * (x * x / (x * x + c * c)).ln())
        .collect();
    let at_end = *regular.last().expect("nonempty");
    let g: Vec<f64> = regular.iter().map(|v| v - at_end).collect();
    let closed = |x: f64| pole * (c / x).atan();
    let phase: Vec<f64> = hilbert_phase(&data.xi, &g, 1)
        .into_iter()
        .zip(&data.xi)
        .map(|(p, &x)| p + closed(x))
        .collect();
    let coarse: Vec<f64> = hilbert_phase(&data.xi, &g, 2)
        .into_iter()
        .zip(data.xi.iter().step_by(2))
        .map(|(p, &x)| p + closed(x))
        .collect();
    let quadrature_error = coarse
        .iter()
        .enumerate()
        .map(|(k, c)| (c - phase[2 * k]).abs())
        .fold(0.0, f64::max);
    let coefficients = log_mod
        .iter()
        .zip(&phase)
        .zip(&data.reflection)
        .map(|((m, p), r)| {
            let a = Complex64::from_polar(m.exp(), *p);
            (a, r * a)
        })
        .collect();
    Ok(PhaseRetrieval {
        coefficients,
        quadrature_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Potential, Problem, TransferMatrix};
    use crate::scattering::reflection;
    use std::f64::consts::PI;

    #[test]
    fn rational_fit_reproduces_rational_data() {
        let f = |z: Complex64| (1.0 + z * 0.3) / (1.0 - z * Complex64::new(0.0, 0.2));
        let xs: Vec<f64> = (1..40).map(|i| i as f64 * 0.25).collect();
        let vs: Vec<Complex64> = xs.iter().map(|&x| f(Complex64::new(x, 0.0))).collect();
        let r = Rational::fit(&xs, &vs, 1).unwrap();
        let z = Complex64::new(0.0, 1.0);
        assert!((r.eval(z) - f(z)).norm() < 1e-10);
    }

    #[test]
    fn constant_coefficients_continue_exactly() {
        let p = Problem::free(PI / 2.0, TransferMatrix::diag(2.0, 0.5).unwrap()).unwrap();
        let xi: Vec<f64> = (1..=20).map(|i| i as f64 * 0.5).collect();
        let data = reflection(&p, &xi).unwrap();
        let fit = RationalFit::new(&data, 2).unwrap();
        assert!(fit.residual < 1e-10);
        let (a, b) = fit.coefficients(Complex64::new(0.0, 1.0)).unwrap();
        assert!((a - 1.25).norm() < 1e-8 && (b - 0.75).norm() < 1e-8);
    }

    #[test]
    fn phase_retrieval_for_a_barrier() {
        let q = Potential::from_fn(PI / 2.0, 201, |x| 3.0 * (-6.0 * x * x).exp()).unwrap();
        let p = Problem::new(q, TransferMatrix::IDENTITY);
        let xi: Vec<f64> = (1..=1200).map(|i| i as f64 * 0.025).collect();
        let data = reflection(&p, &xi).unwrap();
        assert!(data.bound_states.is_empty());
        let bare = ScatteringData {
            coefficients: None,
            ..data.clone()
        };
        let pr = retrieve_from_reflection(&bare).unwrap();
        let exact = data.coefficients.as_ref().unwrap();
        for k in [40, 120, 400] {
            let (a, _) = pr.coefficients[k];
            assert!(
                (a - exact[k].0).norm() < 1e-4,
                "xi {}: {a} vs {}",
                xi[k],
                exact[k].0
            );
        }
        assert!(pr.quadrature_error < 1e-3);
    }
}
