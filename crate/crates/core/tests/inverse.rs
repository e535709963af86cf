mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use sltransfer::inverse::{
    constant_c, hadamard_ratio, m_at_zero_from_constant, m_from_two_spectra, MittagLefflerModel,
    TwoSpectraInput,
};
use sltransfer::{m_function, spectral_data, BoundaryAngles, Error};

fn squares(n: usize, shift: f64, from: usize) -> Vec<f64> {
    (from..from + n)
        .map(|k| (k as f64 + shift).powi(2))
        .collect()
}

/// Free problem on `[-pi/2, pi/2]` with beta = pi: Dirichlet spectrum `n^2`, Neumann-Dirichlet `(n + 1/2)^2`.
fn free_input(n: usize) -> TwoSpectraInput {
    TwoSpectraInput::new(squares(n, 0.0, 1), squares(n, 0.5, 0), 0.0, PI / 2.0, n).unwrap()
}

fn real(z: Complex64) -> f64 {
    assert!(z.im.abs() < 1e-12 * z.re.abs().max(1.0), "{z}");
    z.re
}

#[test]
fn hadamard_ratio_closed_form() {
    // prod cos / prod sinc = pi sqrt(lambda) cot(pi sqrt(lambda))
    let input = free_input(2000);
    let r = real(hadamard_ratio(&input, Complex64::new(-1.0, 0.0)).unwrap());
    assert!(rel(r, PI / PI.tanh()) < 1e-6, "{r}");
    let r = real(hadamard_ratio(&input, Complex64::new(-1e4, 0.0)).unwrap());
    assert!(rel(r, 100.0 * PI) < 1e-2, "{r}");
}

#[test]
fn two_spectra_reproduce_free_m_function() {
    let input = free_input(2000);
    let c = constant_c(&input).unwrap();
    assert!((c.value - 1.0 / PI).abs() < 1e-4, "{c:?}");
    let m = real(m_from_two_spectra(&input, Complex64::new(-1.0, 0.0)).unwrap());
    assert!(rel(m, 1.0 / PI.tanh()) < 1e-4, "{m}");
    let m = real(m_from_two_spectra(&input, Complex64::new(-4.0, 0.0)).unwrap());
    assert!(rel(m, 2.0 / (2.0 * PI).tanh()) < 1e-4, "{m}");
}

#[test]
fn two_spectra_with_roles_swapped() {
    // lambda = Neumann-Dirichlet, mu = Dirichlet: m_{pi/2, pi}(-1) = -tanh(pi)
    let n = 2000;
    let input =
        TwoSpectraInput::new(squares(n, 0.5, 0), squares(n, 0.0, 1), PI / 2.0, 0.0, n).unwrap();
    let m = real(m_from_two_spectra(&input, Complex64::new(-1.0, 0.0)).unwrap());
    assert!(rel(m, -PI.tanh()) < 1e-4, "{m}");
}

#[test]
fn two_spectra_with_zero_eigenvalue() {
    // alpha = pi/2, alpha' = 0, beta = pi/2: Neumann-Neumann n^2 from 0, Dirichlet-Neumann (n + 1/2)^2
    let n = 2000;
    let input =
        TwoSpectraInput::new(squares(n, 0.0, 0), squares(n, 0.5, 0), PI / 2.0, 0.0, n).unwrap();
    assert!(input.has_zero_eigenvalue());
    let p = Fixture::Free.problem();
    let angles = BoundaryAngles::new(PI / 2.0, PI / 2.0).unwrap();
    for lam in PROBES {
        let z = Complex64::new(lam, 0.0);
        let got = real(m_from_two_spectra(&input, z).unwrap());
        let want = m_function(&p, &angles, z).unwrap().re;
        assert!(rel(got, want) < 1e-3, "m({lam}) = {got} vs {want}");
    }
}

#[test]
fn dirichlet_norming_inversion_through_m_at_zero() {
    let n = 4000;
    let eig = squares(n, 0.0, 1);
    let a: Vec<f64> = eig.iter().map(|l| PI / (2.0 * l)).collect();
    // m(-k^2) = k coth(pi k) = k + o(1), so the constant is 0 and m(0) = 1/pi
    let m0 = m_at_zero_from_constant(&eig, &a, n, 0.0).unwrap();
    assert!((m0.value - 1.0 / PI).abs() < 1e-6, "{m0:?}");
    let model = MittagLefflerModel::new(eig, a, 0.0, n, Some(m0.value)).unwrap();
    for lam in PROBES {
        let k = (-lam).sqrt();
        let got = model.m(Complex64::new(lam, 0.0)).unwrap().value.re;
        assert!(rel(got, k / (PI * k).tanh()) < 1e-6, "m({lam}) = {got}");
    }
}

#[test]
fn norming_inversion_of_bump_matches_direct_evaluation() {
    let p = Fixture::Bump.problem();
    let angles = BoundaryAngles::new(PI / 2.0, 2.0).unwrap();
    let data = spectral_data(&p, &angles, 200).unwrap();
    let model = MittagLefflerModel::new(
        data.eigenvalues,
        data.norming_constants.unwrap(),
        angles.alpha,
        200,
        None,
    )
    .unwrap();
    for z in [Complex64::new(-3.0, 0.0), Complex64::new(2.0, 1.5)] {
        let got = model.m(z).unwrap();
        let want = m_function(&p, &angles, z).unwrap();
        assert!(
            (got.value - want).norm() < 1e-5 * want.norm(),
            "m({z}) = {} vs {want}",
            got.value
        );
    }
}

#[test]
fn missing_inputs_are_reported() {
    let eig = squares(20, 0.0, 1);
    let a = vec![1.0; 20];
    assert!(matches!(
        MittagLefflerModel::new(eig.clone(), a.clone(), 0.0, 20, None),
        Err(Error::InsufficientData(_))
    ));
    assert!(matches!(
        MittagLefflerModel::new(eig.clone(), a[..5].to_vec(), PI / 2.0, 20, None),
        Err(Error::InsufficientData(_))
    ));
    assert!(matches!(
        TwoSpectraInput::new(eig.clone(), squares(10, 0.5, 0), 0.0, PI / 2.0, 20),
        Err(Error::InsufficientData(_))
    ));
    let pole = free_input(50);
    assert!(matches!(
        hadamard_ratio(&pole, Complex64::new(4.0, 0.0)),
        Err(Error::Pole { .. })
    ));
}
