//! Command-line front end. Each subcommand resolves a [`RunConfig`], runs one
//! pipeline and emits CSV whose header echoes the resolved config and its hash.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotics::delta_leading;
use crate::error::{Error, Result};
use crate::forward::{
    delta, eigenvalues, m_function, norming_constants, spectral_data, w_solution,
};
use crate::inverse::{
    constant_c_with, m_at_zero_from_constant, MittagLefflerModel, TwoSpectraInput, TwoSpectraModel,
    DEFAULT_K0, DEFAULT_TRUNCATION,
};
use crate::io::{
    fmt_f64, read_scattering, read_spectrum, write_probe, write_scattering, write_spectrum,
    write_table, Header, ProbeRow, ProblemFile,
};
use crate::problem::{BoundaryAngles, Problem};
use crate::scattering::{
    neumann_data_from_scattering, recover_w_at_s, reflection, retrieve_from_reflection,
    ForwardModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Eigenvalues and norming constants of the problem file.
    ForwardSpectrum,
    /// m-function on a lambda grid.
    MEval,
    /// m-function rebuilt from two spectra (--spectrum for alpha, --second-spectrum for alpha').
    InvertTwoSpectra,
    /// m-function rebuilt from one spectrum with norming constants.
    InvertNorming,
    /// Reflection coefficient, A, B and bound states on a xi grid.
    ScatterForward,
    /// W(S, xi) recovered from a scattering file.
    ScatterRecover,
    /// Forward scattering, recovery and Neumann spectral data, compared with direct values.
    RoundTrip,
    /// Exact against leading-order characteristic function along lambda = -k^2.
    CheckAsymptotics,
}

#[derive(Debug, Clone, Default, Serialize, Args)]
pub struct Flags {
    /// Problem definition (JSON with S, q_samples, M, alpha, beta).
    #[arg(long, global = true)]
    pub problem: Option<PathBuf>,
    /// Boundary angle at -S (radians); overrides the problem file.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Boundary angle at S (radians); overrides the problem file.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Second boundary angle at -S for two-spectra inversion.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_prime: Option<f64>,
    /// Number of eigenvalues to compute.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Number of spectral terms kept by the inversions.
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// Integrator steps per half interval.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Probe grid: comma list `a,b,c` or `start:stop:count`, increasing.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Pass threshold for round-trip deviations and unitarity.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Spectra CSV (`n,lambda[,a_n]`).
    #[arg(long, global = true)]
    pub spectrum: Option<PathBuf>,
    /// Spectra CSV for alpha'.
    #[arg(long, global = true)]
    pub second_spectrum: Option<PathBuf>,
    /// Scattering CSV; its JSON sidecar is read from the same stem.
    #[arg(long, global = true)]
    pub scattering: Option<PathBuf>,
    /// m(0), required by norming inversion when alpha = 0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub m_zero: Option<f64>,
    /// Constant c in m = -i sqrt(lambda) + c + ..., used to derive m(0) when alpha = 0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub asymptotic_constant: Option<f64>,
    /// First limit point for the two-spectra constant.
    #[arg(long, global = true)]
    pub k0: Option<f64>,
    /// Skip norming constants in forward-spectrum.
    #[arg(long, global = true)]
    pub no_norming: bool,
    /// Allow the experimental reconstruction of A, B from R alone.
    #[arg(long, global = true)]
    pub phase_retrieval: bool,
}

#[derive(Debug, Parser)]
#[command(
    name = "sltransfer",
    version,
    about = "Spectral and scattering computations for Sturm-Liouville problems with a point transfer condition"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

/// Resolved configuration of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: Command,
    pub problem: Option<PathBuf>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub alpha_prime: Option<f64>,
    pub n_max: Option<usize>,
    pub truncation: Option<usize>,
    pub steps: Option<usize>,
    pub grid: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub tolerance: f64,
    pub spectrum: Option<PathBuf>,
    pub second_spectrum: Option<PathBuf>,
    pub scattering: Option<PathBuf>,
    pub m_zero: Option<f64>,
    pub asymptotic_constant: Option<f64>,
    pub k0: Option<f64>,
    pub norming: bool,
    pub phase_retrieval: bool,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Parses `a,b,c` or `start:stop:count` into an increasing finite grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::Config(format!("grid '{text}': {msg}"));
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad("range form is start:stop:count".into()));
        }
        let a: f64 = parts[0].parse().map_err(|_| bad("bad start".into()))?;
        let b: f64 = parts[1].parse().map_err(|_| bad("bad stop".into()))?;
        let n: usize = parts[2].parse().map_err(|_| bad("bad count".into()))?;
        match n {
            0 => return Err(bad("count must be positive".into())),
            1 if a == b => vec![a],
            1 => return Err(bad("a single point needs start = stop".into())),
            _ => (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("'{}' is not a number", s.trim())))
            })
            .collect::<Result<_>>()?
    };
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(bad("values must be finite".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(bad("values must be strictly increasing".into()));
    }
    Ok(grid)
}

impl RunConfig {
    pub fn new(subcommand: Command, flags: Flags) -> Result<Self> {
        let tolerance = flags.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if flags.k0.is_some_and(|k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::Config("k0 must be positive".into()));
        }
        let grid = flags.grid.as_deref().map(parse_grid).transpose()?;
        let mut config = Self {
            subcommand,
            problem: flags.problem,
            alpha: flags.alpha,
            beta: flags.beta,
            alpha_prime: flags.alpha_prime,
            n_max: flags.n_max,
            truncation: flags.truncation,
            steps: flags.steps,
            grid,
            out: flags.out,
            tolerance,
            spectrum: flags.spectrum,
            second_spectrum: flags.second_spectrum,
            scattering: flags.scattering,
            m_zero: flags.m_zero,
            asymptotic_constant: flags.asymptotic_constant,
            k0: flags.k0,
            norming: !flags.no_norming,
            phase_retrieval: flags.phase_retrieval,
        };
        if let Some(path) = &config.problem {
            let pf = ProblemFile::load(path)?;
            config.alpha.get_or_insert(pf.alpha);
            config.beta.get_or_insert(pf.beta);
        }
        Ok(config)
    }

    /// Parses command-line arguments (program name first).
    pub fn from_args<I, T>(args: I) -> std::result::Result<Result<Self>, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let parsed = Cli::try_parse_from(args)?;
        Ok(Self::new(parsed.command, parsed.flags))
    }

    fn header(&self) -> Result<Header> {
        Header::new(self)
    }

    fn problem(&self) -> Result<(Problem, BoundaryAngles)> {
        let path = self
            .problem
            .as_ref()
            .ok_or_else(|| Error::Config("--problem is required".into()))?;
        let (problem, _) = ProblemFile::load(path)?.build(self.steps)?;
        let angles = BoundaryAngles::new(self.require_alpha()?, self.require_beta()?)?;
        Ok((problem, angles))
    }

    fn require_alpha(&self) -> Result<f64> {
        self.alpha
            .ok_or_else(|| Error::Config("--alpha (or --problem) is required".into()))
    }

    fn require_beta(&self) -> Result<f64> {
        self.beta
            .ok_or_else(|| Error::Config("--beta (or --problem) is required".into()))
    }

    fn require_grid(&self) -> Result<&[f64]> {
        self.grid
            .as_deref()
            .ok_or_else(|| Error::Config("--grid is required".into()))
    }
}

/// What a run produced: text for stdout and whether all checks passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub stdout: String,
    pub passed: bool,
}

impl Report {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            passed: true,
        }
    }
}

/// Writes `body` to `--out` when given; otherwise returns it for stdout.
fn emit(config: &RunConfig, body: Vec<u8>) -> Result<String> {
    match &config.out {
        Some(path) => {
            fs::write(path, body)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => String::from_utf8(body).map_err(|e| Error::Parse(e.to_string())),
    }
}

pub fn run(config: &RunConfig) -> Result<Report> {
    match config.subcommand {
        Command::ForwardSpectrum => run_forward(config),
        Command::MEval => run_m_eval(config),
        Command::InvertTwoSpectra | Command::InvertNorming => run_invert(config),
        Command::ScatterForward | Command::ScatterRecover | Command::RoundTrip => {
            run_scatter(config)
        }
        Command::CheckAsymptotics => run_check_asymptotics(config),
    }
}

pub fn run_forward(config: &RunConfig) -> Result<Report> {
    let (problem, angles) = config.problem()?;
    let n = config.n_max.unwrap_or(10);
    let data = if config.norming {
        spectral_data(&problem, &angles, n)?
    } else {
        eigenvalues(&problem, &angles, n)?
    };
    let mut body = Vec::new();
    write_spectrum(&mut body, &config.header()?, &data)?;
    Ok(Report::ok(emit(config, body)?))
}

fn run_m_eval(config: &RunConfig) -> Result<Report> {
    let (problem, angles) = config.problem()?;
    let rows = config
        .require_grid()?
        .iter()
        .map(|&l| {
            Ok(ProbeRow {
                lambda: l,
                m: m_function(&problem, &angles, Complex64::new(l, 0.0))?,
                tail_bound: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut body = Vec::new();
    write_probe(&mut body, &config.header()?, &[], &rows)?;
    Ok(Report::ok(emit(config, body)?))
}

fn spectrum_path(path: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    path.clone()
        .ok_or_else(|| Error::Config(format!("--{flag} is required")))
}

pub fn run_invert(config: &RunConfig) -> Result<Report> {
    let mut config = config.clone();
    let grid = config.require_grid()?.to_vec();
    let alpha = config.require_alpha()?;
    let first = read_spectrum(&spectrum_path(&config.spectrum, "spectrum")?)?;
    let mut comments = Vec::new();
    let rows: Vec<ProbeRow> = match config.subcommand {
        Command::InvertTwoSpectra => {
            let second =
                read_spectrum(&spectrum_path(&config.second_spectrum, "second-spectrum")?)?;
            let alpha_prime = config
                .alpha_prime
                .ok_or_else(|| Error::Config("--alpha-prime is required".into()))?;
            let available = first.eigenvalues.len().min(second.eigenvalues.len());
            let n = *config
                .truncation
                .get_or_insert(DEFAULT_TRUNCATION.min(available));
            let input =
                TwoSpectraInput::new(first.eigenvalues, second.eigenvalues, alpha, alpha_prime, n)?;
            let k0 = *config.k0.get_or_insert(DEFAULT_K0);
            let constant = constant_c_with(&input, k0)?;
            comments.push(format!(
                "constant: {} error: {}",
                fmt_f64(constant.value),
                fmt_f64(constant.error)
            ));
            let model = TwoSpectraModel { input, constant };
            grid.iter()
                .map(|&l| {
                    let z = Complex64::new(l, 0.0);
                    Ok(ProbeRow {
                        lambda: l,
                        m: model.m(z)?,
                        tail_bound: model.tail_bound(z)?,
                    })
                })
                .collect::<Result<_>>()?
        }
        _ => {
            let norming = first.norming_constants.ok_or_else(|| {
                Error::InsufficientData(
                    "norming constants required: the spectrum file has no a_n column".into(),
                )
            })?;
            let n = *config
                .truncation
                .get_or_insert(DEFAULT_TRUNCATION.min(first.eigenvalues.len()));
            if alpha == 0.0 && config.m_zero.is_none() {
                if let Some(c) = config.asymptotic_constant {
                    let est = m_at_zero_from_constant(&first.eigenvalues, &norming, n, c)?;
                    comments.push(format!(
                        "m_zero_from_constant: {} error: {}",
                        fmt_f64(est.value),
                        fmt_f64(est.error)
                    ));
                    config.m_zero = Some(est.value);
                }
            }
            let model =
                MittagLefflerModel::new(first.eigenvalues, norming, alpha, n, config.m_zero)?;
            if let Ok(d) = model.m_prime_at_zero() {
                comments.push(format!(
                    "m_prime_at_zero: {} tail_bound: {}",
                    fmt_f64(d.value),
                    fmt_f64(d.tail_bound)
                ));
            }
            grid.iter()
                .map(|&l| {
                    let est = model.m(Complex64::new(l, 0.0))?;
                    Ok(ProbeRow {
                        lambda: l,
                        m: est.value,
                        tail_bound: est.tail_bound,
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    let mut body = Vec::new();
    write_probe(&mut body, &config.header()?, &comments, &rows)?;
    Ok(Report::ok(emit(&config, body)?))
}

pub fn run_scatter(config: &RunConfig) -> Result<Report> {
    match config.subcommand {
        Command::ScatterForward => scatter_forward(config),
        Command::ScatterRecover => scatter_recover(config),
        _ => round_trip(config),
    }
}

fn max_unitarity_defect(data: &crate::scattering::ScatteringData) -> f64 {
    data.coefficients.as_ref().map_or(0.0, |ab| {
        ab.iter()
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    })
}

fn scatter_forward(config: &RunConfig) -> Result<Report> {
    let (problem, _) = config.problem()?;
    let out = config
        .out
        .as_ref()
        .ok_or_else(|| Error::Config("--out is required (CSV plus JSON sidecar)".into()))?;
    let data = reflection(&problem, config.require_grid()?)?;
    write_scattering(out, &config.header()?, &data)?;
    let defect = max_unitarity_defect(&data);
    let max_r = data.reflection.iter().map(|r| r.norm()).fold(0.0, f64::max);
    Ok(Report {
        stdout: format!(
            "points: {}\nbound_states: {:?}\nmax |R|: {}\nmax unitarity defect: {}\n",
            data.xi.len(),
            data.bound_states,
            fmt_f64(max_r),
            fmt_f64(defect)
        ),
        passed: defect <= config.tolerance,
    })
}

fn scatter_recover(config: &RunConfig) -> Result<Report> {
    let path = spectrum_path(&config.scattering, "scattering")?;
    let mut data = read_scattering(&path)?;
    let alpha = config.alpha.unwrap_or(PI / 2.0);
    let mut comments = Vec::new();
    if data.coefficients.is_none() {
        if !config.phase_retrieval {
            return Err(Error::InsufficientData(
                "the scattering file has no A, B columns; pass --phase-retrieval to reconstruct them from R".into(),
            ));
        }
        let pr = retrieve_from_reflection(&data)?;
        comments.push(format!(
            "experimental phase retrieval, quadrature_error: {}",
            fmt_f64(pr.quadrature_error)
        ));
        data.coefficients = Some(pr.coefficients);
    }
    let w = recover_w_at_s(&data, alpha)?;
    let mut config = config.clone();
    config.alpha = Some(alpha);
    let rows = w.iter().map(|r| {
        vec![
            r.zeta.re, r.w1.re, r.w1.im, r.w2.re, r.w2.im, r.dw1.re, r.dw1.im, r.dw2.re, r.dw2.im,
        ]
    });
    let mut body = Vec::new();
    write_table(
        &mut body,
        &config.header()?,
        &comments,
        &[
            "xi", "Re_w1", "Im_w1", "Re_w2", "Im_w2", "Re_dw1", "Im_dw1", "Re_dw2", "Im_dw2",
        ],
        rows,
    )?;
    Ok(Report::ok(emit(&config, body)?))
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn round_trip(config: &RunConfig) -> Result<Report> {
    let mut config = config.clone();
    let (problem, angles) = config.problem()?;
    let n = *config.n_max.get_or_insert(8);
    let grid = config
        .grid
        .get_or_insert_with(|| (1..=40).map(|i| 0.25 * i as f64).collect())
        .clone();
    let data = reflection(&problem, &grid)?;

    let recovered = recover_w_at_s(&data, angles.alpha)?;
    let mut w_dev = 0.0f64;
    for r in &recovered {
        let traj = w_solution(&problem, angles.alpha, r.zeta * r.zeta, &[])?;
        let end = traj.at_right_end();
        let exact = [
            end.value(0),
            end.value(1),
            end.derivative(0),
            end.derivative(1),
        ];
        let got = [r.w1, r.w2, r.dw1, r.dw2];
        let scale = exact.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (g, e) in got.iter().zip(&exact) {
            w_dev = w_dev.max((g - e).norm() / scale);
        }
    }

    let depth = data.bound_states.first().copied().unwrap_or(0.0);
    let nd = neumann_data_from_scattering(
        &ForwardModel::new(problem.clone()),
        problem.transfer(),
        n,
        depth,
    )?;
    let nn_direct = eigenvalues(&problem, &BoundaryAngles::neumann_neumann(), n)?;
    let nd_direct = eigenvalues(&problem, &BoundaryAngles::neumann_dirichlet(), n)?;
    let a_direct = norming_constants(
        &problem,
        &BoundaryAngles::neumann_neumann(),
        &nn_direct.eigenvalues,
    )?;
    let a_rec = nd
        .neumann_neumann
        .norming_constants
        .clone()
        .unwrap_or_default();

    let mut lines = Vec::new();
    let mut spec_dev = 0.0f64;
    let mut norm_dev = 0.0f64;
    let sets: [(&str, &[f64], &[f64]); 3] = [
        (
            "nn_lambda",
            &nd.neumann_neumann.eigenvalues,
            &nn_direct.eigenvalues,
        ),
        (
            "nd_lambda",
            &nd.neumann_dirichlet.eigenvalues,
            &nd_direct.eigenvalues,
        ),
        ("nn_a", &a_rec, &a_direct),
    ];
    for (name, got, want) in sets {
        if got.len() != want.len() {
            return Err(Error::MissedRoots {
                found: got.len(),
                predicted: want.len(),
                lambda_top: want.last().copied().unwrap_or(0.0),
            });
        }
        for (i, (g, w)) in got.iter().zip(want.iter()).enumerate() {
            let d = relative(*g, *w);
            if name == "nn_a" {
                norm_dev = norm_dev.max(d);
            } else {
                spec_dev = spec_dev.max(d);
            }
            lines.push(format!(
                "{name},{i},{},{},{}",
                fmt_f64(*g),
                fmt_f64(*w),
                fmt_f64(d)
            ));
        }
    }

    let header = config.header()?;
    let mut body = Vec::new();
    writeln!(body, "# config: {}", header.config)?;
    writeln!(body, "# config_hash: {}", header.hash)?;
    writeln!(body, "quantity,n,recovered,direct,deviation")?;
    for l in &lines {
        writeln!(body, "{l}")?;
    }
    let summary = format!(
        "max W(S) deviation: {}\nmax spectral deviation: {}\nmax norming deviation: {}\n",
        fmt_f64(w_dev),
        fmt_f64(spec_dev),
        fmt_f64(norm_dev)
    );
    let mut stdout = emit(&config, body)?;
    stdout.push_str(&summary);
    Ok(Report {
        stdout,
        passed: w_dev <= config.tolerance
            && spec_dev <= config.tolerance
            && norm_dev <= config.tolerance,
    })
}

fn run_check_asymptotics(config: &RunConfig) -> Result<Report> {
    let mut config = config.clone();
    let (problem, angles) = config.problem()?;
    let ks = config
        .grid
        .get_or_insert_with(|| vec![10.0, 20.0, 40.0, 80.0])
        .clone();
    let rows = ks
        .iter()
        .map(|&k| {
            let l = Complex64::new(-k * k, 0.0);
            let exact = delta(&problem, &angles, l)?.re;
            let lead = delta_leading(problem.half_width(), problem.transfer(), &angles, l).re;
            Ok(vec![k, exact, lead, exact / lead])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut body = Vec::new();
    write_table(
        &mut body,
        &config.header()?,
        &[],
        &["k", "exact", "leading", "ratio"],
        rows,
    )?;
    Ok(Report::ok(emit(&config, body)?))
}

/// Process exit code for a run result: 0 success, 1 numerical failure, 2 usage or config error.
pub fn exit_code(result: &Result<Report>) -> i32 {
    match result {
        Ok(r) if r.passed => 0,
        Ok(_) => 1,
        Err(e) if e.is_usage() => 2,
        Err(_) => 1,
    }
}

/// Runs with the given arguments, writing to the supplied streams; returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::from_args(args) {
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
        Ok(Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
        Ok(Ok(c)) => c,
    };
    let result = run(&config);
    match &result {
        Ok(r) => {
            let _ = write!(stdout, "{}", r.stdout);
            if !r.passed {
                let _ = writeln!(
                    stderr,
                    "error: deviation exceeds tolerance {}",
                    config.tolerance
                );
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
        }
    }
    exit_code(&result)
}
