//! Reconstruction of the m-function from two spectra, or from one spectrum
//! together with its norming constants.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default truncation of products and series.
pub const DEFAULT_TRUNCATION: usize = 2000;

/// Smallest `k` used when extracting the constant of the two-spectra formula.
pub const DEFAULT_K0: f64 = 25.0;

/// Sum with a fixed binary tree, so the result does not depend on scheduling.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return values.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    if values.len() >= 1 << 14 {
        let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
        a + b
    } else {
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

fn check_increasing(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{name}: values must be finite")));
    }
    if let Some(w) = v.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::Config(format!(
            "{name}: values must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn check_alpha(name: &str, a: f64) -> Result<()> {
    if (0.0..PI).contains(&a) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {a} outside [0, pi)")))
    }
}

/// Distance below which `lambda` is treated as sitting on a listed eigenvalue.
fn on_pole(values: &[f64], lambda: Complex64) -> Option<f64> {
    values.iter().enumerate().find_map(|(i, &l)| {
        let gap = values
            .get(i + 1)
            .map(|n| n - l)
            .or_else(|| i.checked_sub(1).map(|p| l - values[p]))
            .unwrap_or(1.0);
        ((lambda - l).norm() <= 1e-12 * gap.max(l.abs()).max(1.0)).then_some(l)
    })
}

/// Two spectra for the boundary angles `alpha` and `alpha_prime` (same `beta`).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSpectraInput {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub alpha: f64,
    pub alpha_prime: f64,
    pub truncation: usize,
}

impl TwoSpectraInput {
    pub fn new(
        lambdas: Vec<f64>,
        mus: Vec<f64>,
        alpha: f64,
        alpha_prime: f64,
        truncation: usize,
    ) -> Result<Self> {
        check_increasing("lambdas", &lambdas)?;
        check_increasing("mus", &mus)?;
        check_alpha("alpha", alpha)?;
        check_alpha("alpha_prime", alpha_prime)?;
        if alpha == alpha_prime {
            return Err(Error::Config("alpha and alpha_prime must differ".into()));
        }
        if truncation == 0 || truncation > lambdas.len().min(mus.len()) {
            return Err(Error::InsufficientData(format!(
                "truncation {truncation} needs at least that many values in both spectra ({} and {} given)",
                lambdas.len(),
                mus.len()
            )));
        }
        Ok(Self {
            lambdas,
            mus,
            alpha,
            alpha_prime,
            truncation,
        })
    }

    /// True when either spectrum contains `0`, which switches that product to `Delta / lambda`.
    pub fn has_zero_eigenvalue(&self) -> bool {
        self.lambdas[..self.truncation].contains(&0.0) || self.mus[..self.truncation].contains(&0.0)
    }
}

fn log_factor(root: f64, lambda: Complex64) -> Complex64 {
    if root == 0.0 {
        lambda.ln()
    } else {
        (1.0 - lambda / root).ln()
    }
}

/// `prod (1 - lambda/mu_n) / prod (1 - lambda/lambda_n)` over the first `N` terms of each
/// spectrum, evaluated as a sum of logarithms. A zero eigenvalue contributes the factor `lambda`.
pub fn hadamard_ratio(input: &TwoSpectraInput, lambda: Complex64) -> Result<Complex64> {
    let n = input.truncation;
    if let Some(l) = on_pole(&input.lambdas[..n], lambda) {
        return Err(Error::Pole {
            lambda: lambda.to_string(),
            eigenvalue: l,
        });
    }
    if on_pole(&input.mus[..n], lambda).is_some() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let terms: Vec<Complex64> = (0..n)
        .map(|i| log_factor(input.mus[i], lambda) - log_factor(input.lambdas[i], lambda))
        .collect();
    let r = pairwise_sum(&terms).exp();
    if lambda.im == 0.0 {
        Ok(Complex64::new(r.re, 0.0))
    } else {
        Ok(r)
    }
}

/// Extrapolated constant with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantEstimate {
    pub value: f64,
    pub error: f64,
}

/// Linear least squares `min |A x - b|` via the normal equations.
fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let cols = rows[0].len();
    let a = nalgebra::DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let b = nalgebra::DVector::from_column_slice(rhs);
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Singular(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

/// The limit expression whose value at `lambda -> -infinity` is the constant `C`,
/// evaluated at `lambda = -k^2`.
fn limit_expression(input: &TwoSpectraInput, k: f64) -> Result<f64> {
    let ratio = hadamard_ratio(input, Complex64::new(-k * k, 0.0))?.re;
    let (a, ap) = (input.alpha, input.alpha_prime);
    let value = if a == 0.0 {
        k * ap.sin() / ratio
    } else if ap == 0.0 {
        1.0 / (k * a.sin() * ratio)
    } else {
        ap.sin() / a.sin() / ratio
    };
    Ok(value)
}

/// Constant `C = C_{alpha'} / C_{alpha}` of the two-spectra formula.
///
/// The limit expression is sampled at `k = k0 2^{j/2}`, `j = 0..6`, and
/// `log |E(k)|` is fitted by `c0 + c1/k + c2/k^2 + c3/k^3 + d k^2`; the `k^2`
/// term absorbs the truncation of the products. The error estimate is the
/// change in `c0` when the `1/k^3` term is dropped.
pub fn constant_c(input: &TwoSpectraInput) -> Result<ConstantEstimate> {
    constant_c_with(input, DEFAULT_K0)
}

pub fn constant_c_with(input: &TwoSpectraInput, k0: f64) -> Result<ConstantEstimate> {
    let ks: Vec<f64> = (0..7).map(|j| k0 * 2f64.powf(j as f64 / 2.0)).collect();
    let mut values = Vec::with_capacity(ks.len());
    for &k in &ks {
        values.push(limit_expression(input, k)?);
    }
    let sign = values.last().copied().unwrap_or(0.0).signum();
    if values
        .iter()
        .any(|v| !v.is_finite() || v.signum() != sign || *v == 0.0)
    {
        return Err(Error::NonConvergent(format!(
            "limit expression changes sign or is not finite along lambda = -k^2 ({values:?}); increase the truncation N"
        )));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let full: Vec<Vec<f64>> = ks
        .iter()
        .map(|k| vec![1.0, 1.0 / k, 1.0 / (k * k), 1.0 / (k * k * k), k * k])
        .collect();
    let reduced: Vec<Vec<f64>> = full.iter().map(|r| vec![r[0], r[1], r[2], r[4]]).collect();
    let x = least_squares(&full, &logs)?;
    let y = least_squares(&reduced, &logs)?;
    let k_max = *ks.last().expect("nonempty");
    let truncation_share = (x[4] * k_max * k_max).abs();
    let value = sign * x[0].exp();
    let error = (x[0].exp() - y[0].exp()).abs();
    if !value.is_finite() || truncation_share > 0.1 || error > 1e-2 * value.abs() {
        return Err(Error::NonConvergent(format!(
            "constant C did not settle (estimate {value}, spread {error:.2e}, truncation share {truncation_share:.2e}); increase the truncation N"
        )));
    }
    Ok(ConstantEstimate { value, error })
}

/// m-function reconstructed from two spectra, with the constant `C` cached.
#[derive(Debug, Clone)]
pub struct TwoSpectraModel {
    pub input: TwoSpectraInput,
    pub constant: ConstantEstimate,
}

impl TwoSpectraModel {
    pub fn new(input: TwoSpectraInput) -> Result<Self> {
        let constant = constant_c(&input)?;
        Ok(Self { input, constant })
    }

    /// `cot(alpha - alpha') - C cosec(alpha - alpha') * ratio(lambda)`.
    pub fn m(&self, lambda: Complex64) -> Result<Complex64> {
        let d = self.input.alpha - self.input.alpha_prime;
        let ratio = hadamard_ratio(&self.input, lambda)?;
        Ok(1.0 / d.tan() - self.constant.value / d.sin() * ratio)
    }

    /// Estimated truncation error of [`TwoSpectraModel::m`] at `lambda`.
    pub fn tail_bound(&self, lambda: Complex64) -> Result<f64> {
        let n = self.input.truncation;
        let (Some(tl), Some(tm)) = (
            TailModel::fit(&self.input.lambdas[..n], None),
            TailModel::fit(&self.input.mus[..n], None),
        ) else {
            return Ok(f64::NAN);
        };
        let t1 = tm.sum(|l, _| Complex64::new(1.0 / l, 0.0))
            - tl.sum(|l, _| Complex64::new(1.0 / l, 0.0));
        let d = self.input.alpha - self.input.alpha_prime;
        let ratio = hadamard_ratio(&self.input, lambda)?;
        Ok((self.constant.value / d.sin() * ratio * lambda * t1).norm())
    }
}

/// Two-spectra reconstruction at a single point.
pub fn m_from_two_spectra(input: &TwoSpectraInput, lambda: Complex64) -> Result<Complex64> {
    TwoSpectraModel::new(input.clone())?.m(lambda)
}

/// Power-law fit of one index family: `sqrt(lambda_j) ~ kappa (j + offset)` and
/// `a_j ~ amp * lambda_j^(-power)`.
#[derive(Debug, Clone, Copy)]
struct Family {
    kappa: f64,
    offset: f64,
    amp: f64,
    power: f64,
}

impl Family {
    fn fit(idx: &[usize], eigenvalues: &[f64], norming: Option<&[f64]>) -> Option<Self> {
        if idx.iter().any(|&j| eigenvalues[j] <= 0.0) {
            return None;
        }
        let regress = |xs: &[f64], ys: &[f64]| -> (f64, f64) {
            let m = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / m;
            let my = ys.iter().sum::<f64>() / m;
            let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            let slope = sxy / sxx;
            (slope, my - slope * mx)
        };
        let js: Vec<f64> = idx.iter().map(|&j| j as f64).collect();
        let roots: Vec<f64> = idx.iter().map(|&j| eigenvalues[j].sqrt()).collect();
        let (kappa, intercept) = regress(&js, &roots);
        if !(kappa > 0.0) {
            return None;
        }
        let (amp, power) = match norming {
            Some(a) => {
                let ll: Vec<f64> = idx.iter().map(|&j| eigenvalues[j].ln()).collect();
                let la: Vec<f64> = idx.iter().map(|&j| a[j].ln()).collect();
                let (slope, icpt) = regress(&ll, &la);
                (icpt.exp(), -slope)
            }
            None => (1.0, 0.0),
        };
        Some(Self {
            kappa,
            offset: intercept / kappa,
            amp,
            power,
        })
    }
}

/// Asymptotic model of the discarded eigenvalues and norming constants.
///
/// A jump at the midpoint splits the spectrum into two interleaved families
/// (even and odd indices), each with its own offset and norming amplitude, so
/// the two parities are fitted separately.
#[derive(Debug, Clone, Copy)]
struct TailModel {
    start: usize,
    families: [Family; 2],
}

impl TailModel {
    fn fit(eigenvalues: &[f64], norming: Option<&[f64]>) -> Option<Self> {
        let n = eigenvalues.len();
        if n < 8 {
            return None;
        }
        let w = (n / 2).min(64) & !1;
        let idx: Vec<usize> = (n - w..n).collect();
        let families = if n < 16 {
            let f = Family::fit(&idx, eigenvalues, norming)?;
            [f, f]
        } else {
            let even: Vec<usize> = idx.iter().copied().filter(|j| j % 2 == 0).collect();
            let odd: Vec<usize> = idx.iter().copied().filter(|j| j % 2 == 1).collect();
            [
                Family::fit(&even, eigenvalues, norming)?,
                Family::fit(&odd, eigenvalues, norming)?,
            ]
        };
        Some(Self { start: n, families })
    }

    fn eigenvalue(&self, j: usize) -> f64 {
        let f = &self.families[j % 2];
        let r = f.kappa * (j as f64 + f.offset);
        r * r
    }

    fn norming(&self, j: usize) -> f64 {
        let f = &self.families[j % 2];
        f.amp * self.eigenvalue(j).powf(-f.power)
    }

    /// Power-law estimate of the sum of `term` over the indices of one parity from
    /// `cutoff` on, with the fitted exponent.
    fn remainder(
        &self,
        parity: usize,
        cutoff: usize,
        term: &impl Fn(usize) -> Complex64,
    ) -> Option<(Complex64, f64)> {
        // first index of this parity at or past the cutoff, and one about half as large
        let jb = cutoff + (cutoff + parity) % 2;
        let ja = cutoff / 2 + (cutoff / 2 + parity) % 2;
        let (ta, tb) = (term(ja), term(jb));
        if tb.norm() == 0.0 {
            return Some((tb, f64::INFINITY));
        }
        let offset = self.families[parity].offset;
        let (xa, xb) = (ja as f64 + offset, jb as f64 + offset);
        let p = (ta.norm() / tb.norm()).ln() / (xb / xa).ln();
        if !(p > 1.05) || !p.is_finite() {
            return None;
        }
        // sum over jb, jb + 2, ... of tb (x / xb)^(-p), by the midpoint integral
        Some((
            tb * (xb.powf(p) * (xb - 1.0).powf(1.0 - p) / (2.0 * (p - 1.0))),
            p,
        ))
    }

    /// Sum of `g(lambda_j, a_j)` over the discarded indices: explicit model
    /// terms up to `5 N`, then a power-law remainder for each family. The
    /// remainder's relative error decays like `J^-2` in the cutoff `J`, so the
    /// remainders at `J / 2` and `J` are combined by Richardson extrapolation.
    fn sum(&self, g: impl Fn(f64, f64) -> Complex64) -> Complex64 {
        let term = |j: usize| g(self.eigenvalue(j), self.norming(j));
        let first = self.start;
        let mid = 5 * self.start / 2;
        let last = 5 * self.start;
        let lower: Vec<Complex64> = (first..mid).map(term).collect();
        let mut total = pairwise_sum(&lower);
        for parity in 0..2 {
            let upper: Vec<Complex64> = (mid..last).filter(|j| j % 2 == parity).map(term).collect();
            let upper = pairwise_sum(&upper);
            total += upper;
            let Some((full, p)) = self.remainder(parity, last, &term) else {
                continue;
            };
            total += full;
            if let Some((half, _)) = self.remainder(parity, mid, &term) {
                if p.is_finite() {
                    total += (upper + full - half) / (2f64.powf(p + 1.0) - 1.0);
                }
            }
        }
        total
    }
}

/// Value of a truncated series together with its estimated truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEstimate<T> {
    pub value: T,
    pub tail_bound: f64,
}

/// Mittag-Leffler representation `m(lambda) = m(sigma) + sum (1/a_n)(1/(lambda-lambda_n) - 1/(sigma-lambda_n))`.
///
/// With `sigma = 0` this is `m(0) + sum (1/a_n)(1/(lambda-lambda_n) + 1/lambda_n)`,
/// which for `alpha = 0` equals `m(0) + lambda sum 1/(a_n lambda_n (lambda - lambda_n))`.
#[derive(Debug, Clone)]
pub struct MittagLefflerModel {
    pub eigenvalues: Vec<f64>,
    pub norming_constants: Vec<f64>,
    pub alpha: f64,
    pub truncation: usize,
    /// Base point `sigma` and `m(sigma)`.
    pub base: (f64, f64),
    tail: Option<TailModel>,
}

impl MittagLefflerModel {
    /// Builds the model. `m_at_zero` is required for `alpha = 0`; for
    /// `alpha != 0` it is computed from `m(sigma) = cot(alpha) + sum 1/(a_n (sigma - lambda_n))`
    /// when absent.
    pub fn new(
        eigenvalues: Vec<f64>,
        norming_constants: Vec<f64>,
        alpha: f64,
        truncation: usize,
        m_at_zero: Option<f64>,
    ) -> Result<Self> {
        check_increasing("eigenvalues", &eigenvalues)?;
        check_alpha("alpha", alpha)?;
        if norming_constants.len() < eigenvalues.len().min(truncation) {
            return Err(Error::InsufficientData(
                "norming constants required for every retained eigenvalue".into(),
            ));
        }
        if let Some(a) = norming_constants
            .iter()
            .find(|a| !(**a > 0.0) || !a.is_finite())
        {
            return Err(Error::Precondition(format!(
                "norming constant {a} is not positive"
            )));
        }
        if truncation == 0 || truncation > eigenvalues.len() {
            return Err(Error::InsufficientData(format!(
                "truncation {truncation} exceeds the {} eigenvalues supplied",
                eigenvalues.len()
            )));
        }
        let eigenvalues = eigenvalues[..truncation].to_vec();
        let norming_constants = norming_constants[..truncation].to_vec();
        let tail = TailModel::fit(&eigenvalues, Some(&norming_constants));
        let zero_in_spectrum = eigenvalues.contains(&0.0);
        let base = match m_at_zero {
            Some(m0) => {
                if zero_in_spectrum {
                    return Err(Error::Precondition(
                        "m(0) is undefined because 0 is an eigenvalue".into(),
                    ));
                }
                (0.0, m0)
            }
            None if alpha == 0.0 => {
                return Err(Error::InsufficientData(
                    "m(0) must be supplied when alpha = 0".into(),
                ))
            }
            None => {
                let sigma = if zero_in_spectrum || eigenvalues[0] < 0.0 {
                    eigenvalues[0] - 1.0
                } else {
                    0.0
                };
                let terms: Vec<Complex64> = eigenvalues
                    .iter()
                    .zip(&norming_constants)
                    .map(|(l, a)| Complex64::new(1.0 / (a * (sigma - l)), 0.0))
                    .collect();
                let mut sum = pairwise_sum(&terms).re;
                if let Some(t) = &tail {
                    sum += t
                        .sum(|l, a| Complex64::new(1.0 / (a * (sigma - l)), 0.0))
                        .re;
                }
                (sigma, 1.0 / alpha.tan() + sum)
            }
        };
        Ok(Self {
            eigenvalues,
            norming_constants,
            alpha,
            truncation,
            base,
            tail,
        })
    }

    fn term(sigma: f64, lambda: Complex64, l: f64, a: f64) -> Complex64 {
        (sigma - lambda) / ((lambda - l) * (sigma - l) * a)
    }

    /// Evaluates the expansion with the analytic tail correction; the bound is
    /// `sum_{n>=N} |lambda-sigma| / (a_n (lambda_n-sigma)^2) (1 + |lambda-sigma| / dist)`.
    pub fn m(&self, lambda: Complex64) -> Result<SeriesEstimate<Complex64>> {
        if let Some(l) = on_pole(&self.eigenvalues, lambda) {
            return Err(Error::Pole {
                lambda: lambda.to_string(),
                eigenvalue: l,
            });
        }
        let sigma = self.base.0;
        let terms: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .zip(&self.norming_constants)
            .map(|(&l, &a)| Self::term(sigma, lambda, l, a))
            .collect();
        let mut value = self.base.1 + pairwise_sum(&terms);
        let mut bound = 0.0;
        if let Some(t) = &self.tail {
            value += t.sum(|l, a| Self::term(sigma, lambda, l, a));
            let shift = (lambda - sigma).norm();
            let dist = (lambda - t.eigenvalue(t.start)).norm();
            bound = t
                .sum(|l, a| Complex64::new(shift / (a * (l - sigma).powi(2)), 0.0))
                .re
                * (1.0 + shift / dist);
        }
        if lambda.im == 0.0 {
            value.im = 0.0;
        }
        Ok(SeriesEstimate {
            value,
            tail_bound: bound,
        })
    }

    /// `m'(0) = -sum 1/(a_n lambda_n^2)`, with the analytic tail correction.
    pub fn m_prime_at_zero(&self) -> Result<SeriesEstimate<f64>> {
        if self.eigenvalues.contains(&0.0) {
            return Err(Error::Precondition(
                "m'(0) series requires 0 not to be an eigenvalue".into(),
            ));
        }
        let terms: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .zip(&self.norming_constants)
            .map(|(l, a)| Complex64::new(-1.0 / (a * l * l), 0.0))
            .collect();
        let mut value = pairwise_sum(&terms).re;
        let mut bound = 0.0;
        if let Some(t) = &self.tail {
            let tail = t.sum(|l, a| Complex64::new(-1.0 / (a * l * l), 0.0)).re;
            value += tail;
            bound = tail.abs();
        }
        Ok(SeriesEstimate {
            value,
            tail_bound: bound,
        })
    }
}

/// One-spectrum-plus-norming-constants reconstruction at a single point.
pub fn m_from_norming(
    model: &MittagLefflerModel,
    lambda: Complex64,
) -> Result<SeriesEstimate<Complex64>> {
    model.m(lambda)
}

/// `m'(0)` of the model.
pub fn m_prime_at_zero(model: &MittagLefflerModel) -> Result<SeriesEstimate<f64>> {
    model.m_prime_at_zero()
}

/// `m(0)` for `alpha = 0` from the constant `c` in `m(lambda) = -i sqrt(lambda) + c + O(1/sqrt(lambda))`:
/// the limit of `k - lambda sum 1/(a_n lambda_n (lambda - lambda_n))` along `lambda = -k^2`,
/// extrapolated in `1/k`, plus `c`.
pub fn m_at_zero_from_constant(
    eigenvalues: &[f64],
    norming_constants: &[f64],
    truncation: usize,
    c: f64,
) -> Result<ConstantEstimate> {
    let n = truncation
        .min(eigenvalues.len())
        .min(norming_constants.len());
    if n < 8 {
        return Err(Error::InsufficientData(
            "at least 8 eigenvalues with norming constants are needed".into(),
        ));
    }
    let eig = &eigenvalues[..n];
    let a = &norming_constants[..n];
    check_increasing("eigenvalues", eig)?;
    if eig.contains(&0.0) {
        return Err(Error::Precondition(
            "0 is an eigenvalue, so m(0) is undefined".into(),
        ));
    }
    let tail = TailModel::fit(eig, Some(a));
    let k_top = (eig[n - 1].abs().sqrt() / 4.0).min(80.0);
    let ks: Vec<f64> = (0..5).map(|j| k_top / 2f64.powf(j as f64 / 2.0)).collect();
    let series = |lambda: f64| -> f64 {
        let g = |l: f64, an: f64| Complex64::new(1.0 / (an * l * (lambda - l)), 0.0);
        let terms: Vec<Complex64> = eig.iter().zip(a).map(|(&l, &an)| g(l, an)).collect();
        let mut s = pairwise_sum(&terms).re;
        if let Some(t) = &tail {
            s += t.sum(g).re;
        }
        s
    };
    let values: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let lambda = -k * k;
            k - lambda * series(lambda)
        })
        .collect();
    let rows: Vec<Vec<f64>> = ks
        .iter()
        .map(|k| vec![1.0, 1.0 / k, 1.0 / (k * k)])
        .collect();
    let x = least_squares(&rows, &values)?;
    let short: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0], r[1]]).collect();
    let y = least_squares(&short, &values)?;
    Ok(ConstantEstimate {
        value: x[0] + c,
        error: (x[0] - y[0]).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares(n: usize, shift: f64, from: usize) -> Vec<f64> {
        (from..from + n)
            .map(|k| (k as f64 + shift).powi(2))
            .collect()
    }

    fn free_two_spectra(n: usize) -> TwoSpectraInput {
        TwoSpectraInput::new(squares(n, 0.0, 1), squares(n, 0.5, 0), 0.0, PI / 2.0, n).unwrap()
    }

    #[test]
    fn ratio_at_zero_is_one() {
        let input = free_two_spectra(50);
        let r = hadamard_ratio(&input, Complex64::new(0.0, 0.0)).unwrap();
        assert!((r - 1.0).norm() < 1e-15);
    }

    #[test]
    fn ratio_matches_closed_form() {
        // cos(pi z) / (sin(pi z) / (pi z)) at z = i
        let input = free_two_spectra(2000);
        let r = hadamard_ratio(&input, Complex64::new(-1.0, 0.0)).unwrap();
        let want = PI / PI.tanh();
        assert!((r.re - want).abs() < 1e-3, "{r}");
        assert_eq!(r.im, 0.0);
    }

    #[test]
    fn ratio_pole_is_reported() {
        let input = free_two_spectra(10);
        assert!(matches!(
            hadamard_ratio(&input, Complex64::new(4.0, 0.0)),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn free_constant_and_m() {
        let model = TwoSpectraModel::new(free_two_spectra(2000)).unwrap();
        assert!(
            (model.constant.value - 1.0 / PI).abs() < 1e-4,
            "{:?}",
            model.constant
        );
        let m = model.m(Complex64::new(-1.0, 0.0)).unwrap();
        assert!((m.re - 1.0 / PI.tanh()).abs() < 1e-3);
    }

    #[test]
    fn input_validation() {
        assert!(TwoSpectraInput::new(vec![1.0, 0.5], vec![1.0, 2.0], 0.0, 1.0, 2).is_err());
        assert!(TwoSpectraInput::new(vec![1.0, 2.0], vec![1.0, 2.0], 1.0, 1.0, 2).is_err());
        assert!(matches!(
            TwoSpectraInput::new(vec![1.0, 2.0], vec![1.0, 2.0], 0.0, 1.0, 3),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn m_prime_free_dirichlet() {
        let n = 100_000;
        let eig = squares(n, 0.0, 1);
        let a: Vec<f64> = eig.iter().map(|l| PI / (2.0 * l)).collect();
        let model =
            MittagLefflerModel::new(eig.clone(), a.clone(), 0.0, n, Some(1.0 / PI)).unwrap();
        let d = model.m_prime_at_zero().unwrap();
        assert!((d.value + PI / 3.0).abs() < 1e-6, "{d:?}");
        let doubled: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let half = MittagLefflerModel::new(eig, doubled, 0.0, n, Some(1.0 / PI))
            .unwrap()
            .m_prime_at_zero()
            .unwrap();
        assert!((half.value * 2.0 - d.value).abs() < 1e-12);
    }

    #[test]
    fn m_at_zero_from_vanishing_constant() {
        let n = 4000;
        let eig = squares(n, 0.0, 1);
        let a: Vec<f64> = eig.iter().map(|l| PI / (2.0 * l)).collect();
        let m0 = m_at_zero_from_constant(&eig, &a, n, 0.0).unwrap();
        assert!((m0.value - 1.0 / PI).abs() < 1e-4, "{m0:?}");
    }

    #[test]
    fn alpha_zero_requires_constant() {
        let eig = squares(10, 0.0, 1);
        let a = vec![1.0; 10];
        assert!(matches!(
            MittagLefflerModel::new(eig, a, 0.0, 10, None),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let v: Vec<Complex64> = (0..100_000)
            .map(|i| Complex64::new(i as f64, 1.0))
            .collect();
        let s = pairwise_sum(&v);
        assert_eq!(s, Complex64::new(4_999_950_000.0, 100_000.0));
    }
}
