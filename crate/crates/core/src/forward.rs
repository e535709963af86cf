//! Forward spectral quantities: the solutions `w_alpha` and `v_beta`, the
//! characteristic function, eigenvalues, the m-function and norming constants.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::asymptotics::{delta_free_scaled, free_depth, leading_zero_count};
use crate::error::{Error, Result};
use crate::problem::{principal_sqrt, BoundaryAngles, Problem, TransferMatrix};
use crate::propagate::{propagate, propagate_ends, square_integral, Direction, Scalar};
use crate::roots::{lambda_of, scan_zeros, Scan};
use crate::state::{StateMatrix, Trajectory};

/// Eigenvalues below this magnitude are reported as exactly zero.
pub const ZERO_EIGENVALUE_SNAP: f64 = 1e-8;

/// Relative distance (in units of [`local_spacing`]) inside which `m` refuses to evaluate.
pub const POLE_GUARD: f64 = 1e-8;

/// Sorted eigenvalues of one boundary value problem, optionally with norming constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDataset {
    pub angles: BoundaryAngles,
    pub eigenvalues: Vec<f64>,
    pub norming_constants: Option<Vec<f64>>,
}

impl SpectralDataset {
    pub fn new(
        angles: BoundaryAngles,
        eigenvalues: Vec<f64>,
        norming_constants: Option<Vec<f64>>,
    ) -> Result<Self> {
        if eigenvalues.iter().any(|l| !l.is_finite()) {
            return Err(Error::Config("eigenvalues must be finite".into()));
        }
        if let Some(w) = eigenvalues.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::Config(format!(
                "eigenvalues must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(a) = &norming_constants {
            if a.len() != eigenvalues.len() {
                return Err(Error::Config(format!(
                    "{} norming constants for {} eigenvalues",
                    a.len(),
                    eigenvalues.len()
                )));
            }
            if let Some(bad) = a.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
                return Err(Error::Config(format!(
                    "norming constant {bad} is not positive"
                )));
            }
        }
        Ok(Self {
            angles,
            eigenvalues,
            norming_constants,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Typical gap between neighbouring eigenvalues near `lambda`.
pub fn local_spacing(half_width: f64, lambda: f64) -> f64 {
    let base = PI / (2.0 * half_width);
    (PI * lambda.abs().sqrt() / half_width).max(base * base)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= PI {
        Ok(())
    } else {
        Err(Error::Config(format!("beta = {beta} outside (0, pi]")))
    }
}

/// `(v(S), v'(S)) = (sin beta, cos beta)`, with `beta = pi` pinned to `(0, -1)`.
fn terminal_column(beta: f64) -> [f64; 2] {
    if beta == PI {
        [0.0, -1.0]
    } else {
        let (s, c) = beta.sin_cos();
        [s, c]
    }
}

fn initial_column(angles: &BoundaryAngles) -> [f64; 2] {
    [angles.sin_alpha(), angles.cos_alpha()]
}

/// Solution `v_beta` (column 0) propagated from `x = S`, with a unit-determinant
/// companion in column 1.
pub fn v_solution(
    problem: &Problem,
    beta: f64,
    lambda: Complex64,
    samples: &[f64],
) -> Result<Trajectory> {
    check_beta(beta)?;
    let [s, c] = terminal_column(beta);
    let init = StateMatrix::from_real(problem.half_width(), [s, c], [-c, s]);
    propagate(problem, init, lambda, Direction::RightToLeft, samples)
}

/// Fundamental system `W_alpha` from `x = -S`: column 0 is `u_alpha`, column 1 is `w_alpha`.
pub fn w_solution(
    problem: &Problem,
    alpha: f64,
    lambda: Complex64,
    samples: &[f64],
) -> Result<Trajectory> {
    if !(0.0..PI).contains(&alpha) {
        return Err(Error::Config(format!("alpha = {alpha} outside [0, pi)")));
    }
    let init = StateMatrix::initial_h_alpha(-problem.half_width(), alpha);
    propagate(problem, init, lambda, Direction::LeftToRight, samples)
}

fn v_left_end<T: Scalar>(problem: &Problem, beta: f64, lambda: T) -> Result<[T; 2]> {
    let [s, c] = terminal_column(beta);
    let ends = propagate_ends(
        problem,
        [[T::real(s), T::real(c)]],
        lambda,
        Direction::RightToLeft,
    )?;
    Ok(ends.end[0])
}

/// `(Delta_{alpha,beta}, Delta_{alpha+pi/2,beta})` from `v_beta` at `-S`.
fn delta_pair<T: Scalar>(problem: &Problem, angles: &BoundaryAngles, lambda: T) -> Result<(T, T)> {
    let [v, dv] = v_left_end(problem, angles.beta, lambda)?;
    let (sa, ca) = (angles.sin_alpha(), angles.cos_alpha());
    Ok((dv * sa - v * ca, v * sa + dv * ca))
}

/// Characteristic function `Delta_{alpha,beta}(lambda) = v'(-S) sin(alpha) - v(-S) cos(alpha)`.
pub fn delta(problem: &Problem, angles: &BoundaryAngles, lambda: Complex64) -> Result<Complex64> {
    if lambda.im == 0.0 {
        return delta_real(problem, angles, lambda.re).map(|d| Complex64::new(d, 0.0));
    }
    Ok(delta_pair(problem, angles, lambda)?.0)
}

/// [`delta`] along the real axis, in real arithmetic.
pub fn delta_real(problem: &Problem, angles: &BoundaryAngles, lambda: f64) -> Result<f64> {
    Ok(delta_pair(problem, angles, lambda)?.0)
}

/// `d Delta / d lambda` on the real axis by Richardson-extrapolated central differences.
pub fn delta_derivative(problem: &Problem, angles: &BoundaryAngles, lambda: f64) -> Result<f64> {
    let h = 1e-3 * local_spacing(problem.half_width(), lambda);
    let central = |h: f64| -> Result<f64> {
        Ok(
            (delta_real(problem, angles, lambda + h)? - delta_real(problem, angles, lambda - h)?)
                / (2.0 * h),
        )
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `k_n = Delta_{alpha+pi/2,beta}(lambda_n)`, the factor in `v_beta = k_n w_alpha`
/// at an eigenvalue.
pub fn proportionality_constant(
    problem: &Problem,
    angles: &BoundaryAngles,
    lambda_n: f64,
) -> Result<f64> {
    Ok(delta_pair(problem, angles, lambda_n)?.1)
}

/// Starting point of an eigenvalue scan: `-k` below the lowest eigenvalue, with
/// the characteristic function tracking its `q = 0` counterpart at `-k^2` and `-4k^2`.
///
/// The `q = 0` problem bounds the spectrum from below by `-free_depth^2`, and a
/// potential lowers it by at most `depth^2 = max(-q)`.
fn scan_start<F>(
    f: &F,
    half_width: f64,
    m: &TransferMatrix,
    angles: &BoundaryAngles,
    depth: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let s = half_width;
    let bottom = free_depth(s, m, angles).hypot(depth);
    let mut k = (2.0 / s).max(1.25 * bottom + 1.0);
    let settled = |k: f64| -> Result<bool> {
        let reference = delta_free_scaled(s, m, angles, k);
        let ratio = f(-k * k)? * (-2.0 * k * s).exp() / reference;
        Ok(ratio > 0.5 && ratio < 1.5)
    };
    while 2.0 * k * 2.0 * s <= 600.0 {
        if settled(k)? && settled(2.0 * k)? {
            return Ok(-k);
        }
        k *= 2.0;
    }
    Err(Error::NonConvergent(format!(
        "no scan start found above lambda = {:.3e}: the spectrum reaches below the range where \
         the characteristic function is representable",
        -k * k
    )))
}

/// Smallest `n_max` zeros of a real characteristic function `f` for a problem
/// of half-width `half_width` and transfer matrix `m`.
///
/// `depth` bounds `sqrt(-lambda_0)` from above when the lowest eigenvalue may
/// be negative, and `lift` bounds the upward shift of the spectrum.
pub(crate) fn spectrum_zeros<F>(
    f: &F,
    half_width: f64,
    m: &TransferMatrix,
    angles: &BoundaryAngles,
    n_max: usize,
    depth: f64,
    lift: f64,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    if n_max == 0 {
        return Err(Error::Config("n_max must be at least 1".into()));
    }
    let s = half_width;
    let t_start = scan_start(f, s, m, angles, depth)?;
    let scan = Scan {
        t_start,
        dt: PI / (16.0 * s),
        count: n_max,
        t_limit: 2.0 * ((n_max as f64 + 8.0) * PI / s + lift) + 1.0,
    };
    let mut zeros = scan_zeros(f, scan)?;
    for z in zeros.iter_mut() {
        if z.abs() < ZERO_EIGENVALUE_SNAP {
            *z = 0.0;
        }
    }
    let last = *zeros.last().expect("n_max >= 1");
    if last > 0.0 {
        let t_top = last.sqrt() + PI / (8.0 * s);
        let lambda_top = lambda_of(t_top);
        let predicted = leading_zero_count(s, m, angles, lambda_top);
        let found = zeros.len();
        if found + 2 < predicted {
            return Err(Error::MissedRoots {
                found,
                predicted,
                lambda_top,
            });
        }
    }
    Ok(zeros)
}

/// The `n_max` smallest eigenvalues of the problem with boundary angles `angles`.
pub fn eigenvalues(
    problem: &Problem,
    angles: &BoundaryAngles,
    n_max: usize,
) -> Result<SpectralDataset> {
    let samples = problem.potential().samples();
    let depth = (-problem.potential().min()).max(0.0).sqrt();
    let lift = samples.iter().fold(0.0f64, |a, q| a.max(q.abs())).sqrt();
    let f = |lam: f64| delta_real(problem, angles, lam);
    let zeros = spectrum_zeros(
        &f,
        problem.half_width(),
        problem.transfer(),
        angles,
        n_max,
        depth,
        lift,
    )?;
    SpectralDataset::new(*angles, zeros, None)
}

/// Eigenvalues together with their norming constants.
pub fn spectral_data(
    problem: &Problem,
    angles: &BoundaryAngles,
    n_max: usize,
) -> Result<SpectralDataset> {
    let mut data = eigenvalues(problem, angles, n_max)?;
    let a = norming_constants(problem, angles, &data.eigenvalues)?;
    data.norming_constants = Some(a);
    Ok(data)
}

fn m_from_parts(delta: Complex64, numerator: Complex64) -> Complex64 {
    numerator / delta
}

/// Titchmarsh-Weyl function `m_{alpha,beta}(lambda) = Delta_{alpha+pi/2,beta} / Delta_{alpha,beta}`.
///
/// Refuses to evaluate within [`POLE_GUARD`] (relative to the local eigenvalue
/// spacing) of a zero of `Delta`.
pub fn m_function(
    problem: &Problem,
    angles: &BoundaryAngles,
    lambda: Complex64,
) -> Result<Complex64> {
    let (d, num) = if lambda.im == 0.0 {
        let (d, num) = delta_pair(problem, angles, lambda.re)?;
        (Complex64::new(d, 0.0), Complex64::new(num, 0.0))
    } else {
        delta_pair(problem, angles, lambda)?
    };
    let m = m_from_parts(d, num);
    let zeta = principal_sqrt(lambda);
    if d.norm() == 0.0 || !(m.norm() <= 1e4 * (1.0 + zeta.norm())) {
        let spacing = local_spacing(problem.half_width(), lambda.re);
        let h = 1e-4 * spacing;
        let shift = Complex64::new(h, 0.0);
        let slope = (delta_pair(problem, angles, lambda + shift)?.0
            - delta_pair(problem, angles, lambda - shift)?.0)
            / (2.0 * h);
        let step = d / slope;
        if step.norm() <= POLE_GUARD * spacing {
            return Err(Error::Pole {
                lambda: lambda.to_string(),
                eigenvalue: (lambda - step).re,
            });
        }
    }
    Ok(m)
}

/// [`m_function`] over a grid, evaluated in parallel.
pub fn m_function_grid(
    problem: &Problem,
    angles: &BoundaryAngles,
    lambdas: &[Complex64],
) -> Result<Vec<Complex64>> {
    lambdas
        .par_iter()
        .map(|&l| m_function(problem, angles, l))
        .collect()
}

fn m_real_unguarded(problem: &Problem, angles: &BoundaryAngles, lambda: f64) -> Result<f64> {
    let (d, num) = delta_pair(problem, angles, lambda)?;
    Ok(num / d)
}

/// Residue of `m` at an eigenvalue, from `m(lambda_n + e) e` averaged over
/// `e = +-1e-5, +-1e-6` times the local spacing.
pub fn m_residue(problem: &Problem, angles: &BoundaryAngles, lambda_n: f64) -> Result<f64> {
    let scale = local_spacing(problem.half_width(), lambda_n);
    let mut acc = 0.0;
    for rel in [1e-5, 1e-6] {
        let e = rel * scale;
        acc += m_real_unguarded(problem, angles, lambda_n + e)? * e;
        acc -= m_real_unguarded(problem, angles, lambda_n - e)? * e;
    }
    Ok(acc / 4.0)
}

/// Sub-steps per integration step that keep `sqrt|lambda| h` near 0.15 in the quadrature.
fn quadrature_refinement(problem: &Problem, lambda: f64) -> usize {
    let qmax = problem
        .potential()
        .samples()
        .iter()
        .fold(0.0f64, |a, q| a.max(q.abs()));
    let h = problem.half_width() / problem.steps() as f64;
    let k = (lambda.abs() + qmax).sqrt();
    ((k * h / 0.15).ceil() as usize).clamp(1, 64)
}

/// Norming constant `a_n = integral of w_alpha(x, lambda_n)^2` over `[-S, S]`.
pub fn norming_constant(problem: &Problem, angles: &BoundaryAngles, lambda_n: f64) -> Result<f64> {
    let d = delta_real(problem, angles, lambda_n)?;
    let slope = delta_derivative(problem, angles, lambda_n)?;
    let spacing = local_spacing(problem.half_width(), lambda_n);
    if !(d.abs() <= 1e-9 * slope.abs() * spacing) {
        return Err(Error::Precondition(format!(
            "lambda = {lambda_n} is not an eigenvalue (|Delta| = {:.3e})",
            d.abs()
        )));
    }
    let refine = quadrature_refinement(problem, lambda_n);
    square_integral(problem, initial_column(angles), lambda_n, refine)
}

/// [`norming_constant`] for every eigenvalue in `eigenvalues`, evaluated in parallel.
pub fn norming_constants(
    problem: &Problem,
    angles: &BoundaryAngles,
    eigenvalues: &[f64],
) -> Result<Vec<f64>> {
    eigenvalues
        .par_iter()
        .map(|&l| norming_constant(problem, angles, l))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Potential;

    fn free(m: TransferMatrix) -> Problem {
        Problem::free(PI / 2.0, m).unwrap()
    }

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn v_terminal_values() {
        let p = free(TransferMatrix::IDENTITY);
        let t = v_solution(&p, PI, c(4.0), &[]).unwrap();
        assert!(t.at_left_end().value(0).norm() < 1e-12);
        assert_eq!(t.at_right_end().value(0), c(0.0));
        assert_eq!(t.at_right_end().derivative(0), c(-1.0));
        let t = v_solution(&p, PI / 2.0, c(1.0), &[]).unwrap();
        assert!((t.at_left_end().value(0) - c(-1.0)).norm() < 1e-12);
        assert!(v_solution(&p, 0.0, c(1.0), &[]).is_err());
    }

    #[test]
    fn free_delta_closed_forms() {
        let p = free(TransferMatrix::IDENTITY);
        let dd = BoundaryAngles::dirichlet_dirichlet();
        for &l in &[0.5f64, 2.0, 7.3] {
            let r = l.sqrt();
            let want = -(PI * r).sin() / r;
            assert!((delta_real(&p, &dd, l).unwrap() - want).abs() < 1e-12);
        }
        assert!(delta_real(&p, &dd, 4.0).unwrap().abs() < 1e-14);
        let nn = BoundaryAngles::neumann_neumann();
        assert!(delta_real(&p, &nn, 1.0).unwrap().abs() < 1e-13);
        let want = 1.5 * (1.5 * PI).sin();
        assert!((delta_real(&p, &nn, 2.25).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn delta_is_real_on_real_axis() {
        let p = free(TransferMatrix::new(1.0, 1.0, 0.0, 1.0).unwrap());
        let a = BoundaryAngles::new(0.7, 2.0).unwrap();
        let d = delta(&p, &a, c(3.3)).unwrap();
        assert_eq!(d.im, 0.0);
        let off = delta(&p, &a, Complex64::new(3.3, 1e-9)).unwrap();
        assert!((off.re - d.re).abs() < 1e-7);
    }

    #[test]
    fn free_spectra() {
        let p = free(TransferMatrix::IDENTITY);
        let dd = eigenvalues(&p, &BoundaryAngles::dirichlet_dirichlet(), 5).unwrap();
        for (n, l) in dd.eigenvalues.iter().enumerate() {
            let want = ((n + 1) * (n + 1)) as f64;
            assert!((l - want).abs() < 1e-10, "{l} vs {want}");
        }
        let nd = eigenvalues(&p, &BoundaryAngles::neumann_dirichlet(), 3).unwrap();
        for (n, l) in nd.eigenvalues.iter().enumerate() {
            let want = (n as f64 + 0.5).powi(2);
            assert!((l - want).abs() < 1e-10, "{l} vs {want}");
        }
        let nn = eigenvalues(&p, &BoundaryAngles::neumann_neumann(), 4).unwrap();
        assert_eq!(nn.eigenvalues[0], 0.0);
        for (n, l) in nn.eigenvalues.iter().enumerate() {
            assert!((l - (n * n) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn m_closed_form_and_pole() {
        let p = free(TransferMatrix::IDENTITY);
        let dd = BoundaryAngles::dirichlet_dirichlet();
        let m = m_function(&p, &dd, c(-1.0)).unwrap();
        let coth_pi = 1.0 / PI.tanh();
        assert!((m.re - coth_pi).abs() < 1e-10);
        assert_eq!(m.im, 0.0);
        match m_function(&p, &dd, c(4.0)) {
            Err(Error::Pole { eigenvalue, .. }) => assert!((eigenvalue - 4.0).abs() < 1e-6),
            other => panic!("expected pole error, got {other:?}"),
        }
    }

    #[test]
    fn norming_constants_free() {
        let p = free(TransferMatrix::IDENTITY);
        let dd = BoundaryAngles::dirichlet_dirichlet();
        for n in 1..=4 {
            let l = (n * n) as f64;
            let a = norming_constant(&p, &dd, l).unwrap();
            assert!((a - PI / (2.0 * l)).abs() < 1e-10, "n = {n}: {a}");
        }
        let nn = BoundaryAngles::neumann_neumann();
        assert!((norming_constant(&p, &nn, 0.0).unwrap() - PI).abs() < 1e-12);
        assert!(matches!(
            norming_constant(&p, &dd, 2.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn residue_and_derivative_identity() {
        let q = Potential::from_fn(PI / 2.0, 201, |x| 2.0 * (-4.0 * x * x).exp()).unwrap();
        let p = Problem::new(q, TransferMatrix::new(1.0, 1.0, 0.0, 1.0).unwrap());
        let a = BoundaryAngles::new(0.4, 2.5).unwrap();
        let ev = eigenvalues(&p, &a, 4).unwrap();
        for &l in &ev.eigenvalues {
            let an = norming_constant(&p, &a, l).unwrap();
            let kn = proportionality_constant(&p, &a, l).unwrap();
            let dp = delta_derivative(&p, &a, l).unwrap();
            assert!((dp - kn * an).abs() <= 1e-6 * dp.abs(), "lambda {l}");
            let res = m_residue(&p, &a, l).unwrap();
            assert!((res * an - 1.0).abs() < 1e-4, "lambda {l}");
        }
    }

    #[test]
    fn close_pairs_are_resolved() {
        // q = 0, M = [[1,1],[0,1]], Dirichlet ends: zeros of cos(u) and of a
        // partner shifted by about 4/S in lambda.
        let p = free(TransferMatrix::new(1.0, 1.0, 0.0, 1.0).unwrap());
        let dd = BoundaryAngles::dirichlet_dirichlet();
        let ev = eigenvalues(&p, &dd, 40).unwrap();
        assert_eq!(ev.len(), 40);
        for &l in &ev.eigenvalues {
            let d = delta_real(&p, &dd, l).unwrap();
            let dp = delta_derivative(&p, &dd, l).unwrap();
            assert!(d.abs() <= 1e-9 * dp.abs() * local_spacing(p.half_width(), l));
        }
    }

    #[test]
    fn dataset_validation() {
        let a = BoundaryAngles::dirichlet_dirichlet();
        assert!(SpectralDataset::new(a, vec![1.0, 1.0], None).is_err());
        assert!(SpectralDataset::new(a, vec![1.0, 2.0], Some(vec![1.0, -1.0])).is_err());
        assert!(SpectralDataset::new(a, vec![1.0, 2.0], Some(vec![1.0])).is_err());
        assert!(SpectralDataset::new(a, vec![1.0, 2.0], Some(vec![1.0, 2.0])).is_ok());
    }
}
