//! Recovery of the fundamental system at `x = S` from scattering coefficients,
//! and the Neumann-Neumann / Neumann-Dirichlet spectral data that follow from it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{coefficients_at, MatchingPoint, ScatteringData, I};
use crate::error::{Error, Result};
use crate::forward::{local_spacing, spectrum_zeros, SpectralDataset};
use crate::problem::{principal_sqrt, BoundaryAngles, Problem, TransferMatrix};

/// Supplier of `(A(zeta), B(zeta))` at arbitrary nonzero complex `zeta`.
pub trait ScatteringSource: Sync {
    fn half_width(&self) -> f64;
    fn coefficients(&self, zeta: Complex64) -> Result<(Complex64, Complex64)>;
}

/// Exact coefficients from integrating the problem itself.
#[derive(Debug, Clone)]
pub struct ForwardModel {
    pub problem: Problem,
}

impl ForwardModel {
    pub fn new(problem: Problem) -> Self {
        Self { problem }
    }
}

impl ScatteringSource for ForwardModel {
    fn half_width(&self) -> f64 {
        self.problem.half_width()
    }

    fn coefficients(&self, zeta: Complex64) -> Result<(Complex64, Complex64)> {
        coefficients_at(&self.problem, zeta, MatchingPoint::Right)
    }
}

/// Gridded `A`, `B` samples usable only at the real grid points themselves.
#[derive(Debug, Clone)]
pub struct GridSource<'a> {
    pub data: &'a ScatteringData,
}

impl ScatteringSource for GridSource<'_> {
    fn half_width(&self) -> f64 {
        self.data.half_width
    }

    fn coefficients(&self, zeta: Complex64) -> Result<(Complex64, Complex64)> {
        let ab = self.data.coefficients.as_ref().ok_or_else(|| {
            Error::InsufficientData("A and B samples are required for recovery".into())
        })?;
        if zeta.im == 0.0 {
            if let Ok(i) = self.data.xi.binary_search_by(|x| x.total_cmp(&zeta.re)) {
                return Ok(ab[i]);
            }
            if let Ok(i) = self.data.xi.binary_search_by(|x| x.total_cmp(&-zeta.re)) {
                return Ok((ab[i].0.conj(), ab[i].1.conj()));
            }
        }
        Err(Error::InsufficientData(format!(
            "zeta = {zeta} is not a grid point; use a continuation such as RationalFit"
        )))
    }
}

/// `W(S)` at one spectral point: `u_alpha` and `w_alpha` with their derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredW {
    pub zeta: Complex64,
    pub w1: Complex64,
    pub w2: Complex64,
    pub dw1: Complex64,
    pub dw2: Complex64,
}

/// Builds `W(S, zeta)` from `(A, B)` at `zeta` and at `-zeta`:
///
/// `[w1 w2] = [e^{-i zeta S}, e^{i zeta S}] [[A(zeta), B(-zeta)], [B(zeta), A(-zeta)]] P H_alpha`
///
/// with `P = [[e^{-i zeta S}/2, -e^{-i zeta S}/(2 i zeta)], [e^{i zeta S}/2, e^{i zeta S}/(2 i zeta)]]`;
/// the derivative row uses `[-i zeta e^{-i zeta S}, i zeta e^{i zeta S}]`. For real `zeta`,
/// `A(-zeta)` and `B(-zeta)` are the complex conjugates.
pub fn w_at_s_from_coefficients(
    zeta: Complex64,
    at_zeta: (Complex64, Complex64),
    at_minus_zeta: (Complex64, Complex64),
    alpha: f64,
    half_width: f64,
) -> RecoveredW {
    let s = half_width;
    let em = (-I * zeta * s).exp();
    let ep = (I * zeta * s).exp();
    let (a, b) = at_zeta;
    let (a_bar, b_bar) = at_minus_zeta;
    let two_iz = 2.0 * I * zeta;
    let p = [[em / 2.0, -em / two_iz], [ep / 2.0, ep / two_iz]];
    let k = [[a, b_bar], [b, a_bar]];
    let (sa, ca) = if alpha == 0.0 {
        (0.0, 1.0)
    } else {
        alpha.sin_cos()
    };
    let h = [[ca, sa], [-sa, ca]];
    let mul = |x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2]| {
        let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        r
    };
    let hc = h.map(|row| row.map(|v| Complex64::new(v, 0.0)));
    let core = mul(mul(k, p), hc);
    let value_row = [em, ep];
    let deriv_row = [-I * zeta * em, I * zeta * ep];
    let row = |r: [Complex64; 2], col: usize| r[0] * core[0][col] + r[1] * core[1][col];
    RecoveredW {
        zeta,
        w1: row(value_row, 0),
        w2: row(value_row, 1),
        dw1: row(deriv_row, 0),
        dw2: row(deriv_row, 1),
    }
}

/// `W(S, zeta)` from a coefficient source (continuation to complex `zeta` allowed).
pub fn recover_w_from_source(
    source: &dyn ScatteringSource,
    alpha: f64,
    zeta: Complex64,
) -> Result<RecoveredW> {
    let at = source.coefficients(zeta)?;
    let minus = if zeta.im == 0.0 {
        (at.0.conj(), at.1.conj())
    } else {
        source.coefficients(-zeta)?
    };
    Ok(w_at_s_from_coefficients(
        zeta,
        at,
        minus,
        alpha,
        source.half_width(),
    ))
}

/// `W(S, xi)` on the grid of `data`, which must carry `A` and `B`.
pub fn recover_w_at_s(data: &ScatteringData, alpha: f64) -> Result<Vec<RecoveredW>> {
    let ab = data.coefficients.as_ref().ok_or_else(|| {
        Error::InsufficientData(
            "A and B samples are required; reconstruct them from R with retrieve_from_reflection first"
                .into(),
        )
    })?;
    Ok(data
        .xi
        .iter()
        .zip(ab)
        .map(|(&xi, &(a, b))| {
            let z = Complex64::new(xi, 0.0);
            w_at_s_from_coefficients(z, (a, b), (a.conj(), b.conj()), alpha, data.half_width)
        })
        .collect())
}

/// Real `W(S, lambda)` for `alpha = pi/2` from the source. Near `lambda = 0`,
/// where `zeta` vanishes, the entire function is evaluated as a Richardson
/// combination of symmetric averages.
fn neumann_w_at_s(source: &dyn ScatteringSource, lambda: f64) -> Result<RecoveredW> {
    let direct = |l: f64| -> Result<RecoveredW> {
        let zeta = principal_sqrt(Complex64::new(l, 0.0));
        recover_w_from_source(source, PI / 2.0, zeta)
    };
    if lambda.abs() >= 2.5e-4 {
        return direct(lambda);
    }
    let avg = |d: f64| -> Result<[Complex64; 4]> {
        let p = direct(lambda + d)?;
        let m = direct(lambda - d)?;
        Ok([
            (p.w1 + m.w1) / 2.0,
            (p.w2 + m.w2) / 2.0,
            (p.dw1 + m.dw1) / 2.0,
            (p.dw2 + m.dw2) / 2.0,
        ])
    };
    let coarse = avg(2e-3)?;
    let fine = avg(1e-3)?;
    let r: Vec<Complex64> = (0..4).map(|i| (4.0 * fine[i] - coarse[i]) / 3.0).collect();
    Ok(RecoveredW {
        zeta: principal_sqrt(Complex64::new(lambda, 0.0)),
        w1: r[0],
        w2: r[1],
        dw1: r[2],
        dw2: r[3],
    })
}

/// Spectral data of the Neumann-Neumann and Neumann-Dirichlet problems on `[-S, S]`.
#[derive(Debug, Clone)]
pub struct NeumannData {
    /// `alpha = beta = pi/2`, with norming constants.
    pub neumann_neumann: SpectralDataset,
    /// `alpha = pi/2`, `beta = pi`.
    pub neumann_dirichlet: SpectralDataset,
}

/// Neumann-Neumann eigenvalues and norming constants, and Neumann-Dirichlet
/// eigenvalues, from scattering coefficients.
///
/// With `w2 = w_{pi/2}`: `Delta_NN = -w2'(S)`, `Delta_ND = -w2(S)`, and
/// `v(-S) = -w1'(S)` for the Neumann `v`, so `a_n = Delta_NN'(lambda_n) / v(-S, lambda_n)`.
/// `depth` is a lower-bound hint `sqrt(-lambda_0)` (for example the largest bound-state `eta`).
pub fn neumann_data_from_scattering(
    source: &dyn ScatteringSource,
    transfer: &TransferMatrix,
    n_max: usize,
    depth: f64,
) -> Result<NeumannData> {
    let s = source.half_width();
    let nn_angles = BoundaryAngles::neumann_neumann();
    let nd_angles = BoundaryAngles::neumann_dirichlet();
    let delta_nn = |l: f64| -> Result<f64> { Ok(-neumann_w_at_s(source, l)?.dw2.re) };
    let delta_nd = |l: f64| -> Result<f64> { Ok(-neumann_w_at_s(source, l)?.w2.re) };
    let nn = spectrum_zeros(&delta_nn, s, transfer, &nn_angles, n_max, depth, 0.0)?;
    let nd = spectrum_zeros(&delta_nd, s, transfer, &nd_angles, n_max, depth, 0.0)?;
    let norming: Vec<f64> = nn
        .par_iter()
        .map(|&l| {
            let h = 1e-3 * local_spacing(s, l);
            let central =
                |h: f64| -> Result<f64> { Ok((delta_nn(l + h)? - delta_nn(l - h)?) / (2.0 * h)) };
            let slope = (4.0 * central(0.5 * h)? - central(h)?) / 3.0;
            let v_left = -neumann_w_at_s(source, l)?.dw1.re;
            Ok(slope / v_left)
        })
        .collect::<Result<_>>()?;
    Ok(NeumannData {
        neumann_neumann: SpectralDataset::new(nn_angles, nn, Some(norming))?,
        neumann_dirichlet: SpectralDataset::new(nd_angles, nd, None)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{eigenvalues, norming_constant, w_solution};

    fn free(m: TransferMatrix) -> Problem {
        Problem::free(PI / 2.0, m).unwrap()
    }

    #[test]
    fn free_recovery_is_free_propagator() {
        let p = free(TransferMatrix::IDENTITY);
        let src = ForwardModel::new(p);
        let w = recover_w_from_source(&src, PI / 2.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((w.w2 - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn recovery_matches_propagation_off_axis() {
        let p = free(TransferMatrix::new(1.0, 1.0, 0.0, 1.0).unwrap());
        let src = ForwardModel::new(p.clone());
        for alpha in [0.0, 0.9, PI / 2.0] {
            for lambda in [
                Complex64::new(-1.0, 0.0),
                Complex64::new(4.0, 0.0),
                Complex64::new(2.0, 1.5),
            ] {
                let zeta = principal_sqrt(lambda);
                let w = recover_w_from_source(&src, alpha, zeta).unwrap();
                let t = w_solution(&p, alpha, lambda, &[]).unwrap();
                let end = t.at_right_end();
                for (got, want) in [
                    (w.w1, end.value(0)),
                    (w.w2, end.value(1)),
                    (w.dw1, end.derivative(0)),
                    (w.dw2, end.derivative(1)),
                ] {
                    assert!(
                        (got - want).norm() < 1e-9 * (1.0 + want.norm()),
                        "{alpha} {lambda}"
                    );
                }
            }
        }
    }

    #[test]
    fn free_neumann_data() {
        let src = ForwardModel::new(free(TransferMatrix::IDENTITY));
        let d = neumann_data_from_scattering(&src, &TransferMatrix::IDENTITY, 4, 0.0).unwrap();
        let nn = &d.neumann_neumann;
        for (n, l) in nn.eigenvalues.iter().enumerate() {
            assert!((l - (n * n) as f64).abs() < 1e-8, "{l}");
        }
        let a = nn.norming_constants.as_ref().unwrap();
        assert!((a[0] - PI).abs() < 1e-7, "{}", a[0]);
        for v in &a[1..] {
            assert!((v - PI / 2.0).abs() < 1e-7);
        }
        for (n, l) in d.neumann_dirichlet.eigenvalues.iter().enumerate() {
            assert!((l - (n as f64 + 0.5).powi(2)).abs() < 1e-8);
        }
    }

    #[test]
    fn diagonal_jump_neumann_data_matches_direct() {
        let m = TransferMatrix::diag(2.0, 0.5).unwrap();
        let p = free(m);
        let src = ForwardModel::new(p.clone());
        let d = neumann_data_from_scattering(&src, &m, 5, 0.0).unwrap();
        let nn = BoundaryAngles::neumann_neumann();
        let direct = eigenvalues(&p, &nn, 5).unwrap();
        let a = d.neumann_neumann.norming_constants.as_ref().unwrap();
        for (i, (&x, &y)) in d
            .neumann_neumann
            .eigenvalues
            .iter()
            .zip(&direct.eigenvalues)
            .enumerate()
        {
            assert!((x - y).abs() < 1e-6 * (1.0 + y.abs()));
            let an = norming_constant(&p, &nn, y).unwrap();
            assert!((a[i] - an).abs() < 1e-6 * an, "{} vs {}", a[i], an);
        }
    }

    #[test]
    fn grid_source_needs_grid_points() {
        let p = free(TransferMatrix::diag(2.0, 0.5).unwrap());
        let data = super::super::reflection(&p, &[0.5, 1.0]).unwrap();
        let g = GridSource { data: &data };
        assert!(g.coefficients(Complex64::new(1.0, 0.0)).is_ok());
        assert!(g.coefficients(Complex64::new(-0.5, 0.0)).is_ok());
        assert!(matches!(
            g.coefficients(Complex64::new(0.7, 0.0)),
            Err(Error::InsufficientData(_))
        ));
        let bare = ScatteringData {
            coefficients: None,
            ..data
        };
        assert!(matches!(
            recover_w_at_s(&bare, 0.0),
            Err(Error::InsufficientData(_))
        ));
    }
}
