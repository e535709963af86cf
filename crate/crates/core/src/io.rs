//! File formats: problem JSON, spectra and probe CSV, scattering CSV with a JSON sidecar.
//!
//! Every CSV written here starts with two comment lines, `# config: <json>`
//! and `# config_hash: <sha256 of that json>`, followed by a column header.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forward::SpectralDataset;
use crate::problem::{BoundaryAngles, Potential, Problem, TransferMatrix};
use crate::scattering::ScatteringData;

/// Problem definition file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "S")]
    pub half_width: f64,
    pub q_samples: Vec<f64>,
    #[serde(rename = "M")]
    pub transfer: [[f64; 2]; 2],
    pub alpha: f64,
    pub beta: f64,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// The problem (normalizing `M` to unit determinant) and its boundary angles.
    pub fn build(&self, steps: Option<usize>) -> Result<(Problem, BoundaryAngles)> {
        let [[m11, m12], [m21, m22]] = self.transfer;
        let potential = Potential::new(self.half_width, self.q_samples.clone())?;
        let mut problem = Problem::new(potential, TransferMatrix::new(m11, m12, m21, m22)?);
        if let Some(n) = steps {
            problem = problem.with_steps(n)?;
        }
        Ok((problem, BoundaryAngles::new(self.alpha, self.beta)?))
    }
}

/// The resolved run configuration echoed at the top of every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub config: String,
    pub hash: String,
}

impl Header {
    pub fn new<T: Serialize>(config: &T) -> Result<Self> {
        let config = serde_json::to_string(config)
            .map_err(|e| Error::Config(format!("config is not serializable: {e}")))?;
        let hash = format!("{:x}", Sha256::digest(config.as_bytes()));
        Ok(Self { config, hash })
    }

    fn write(&self, w: &mut dyn Write) -> Result<()> {
        writeln!(w, "# config: {}", self.config)?;
        writeln!(w, "# config_hash: {}", self.hash)?;
        Ok(())
    }
}

/// Shortest round-trip text, switching to exponent form for very large or small magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes a header, a column line and numeric rows.
pub fn write_table(
    w: &mut dyn Write,
    header: &Header,
    extra_comments: &[String],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    header.write(w)?;
    for c in extra_comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{}", columns.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Spectra CSV: `n,lambda,a_n` (or `n,lambda` without norming constants).
pub fn write_spectrum(w: &mut dyn Write, header: &Header, data: &SpectralDataset) -> Result<()> {
    let columns: &[&str] = if data.norming_constants.is_some() {
        &["n", "lambda", "a_n"]
    } else {
        &["n", "lambda"]
    };
    let rows = data.eigenvalues.iter().enumerate().map(|(n, &l)| {
        let mut row = vec![n as f64, l];
        if let Some(a) = &data.norming_constants {
            row.push(a[n]);
        }
        row
    });
    write_table(w, header, &[], columns, rows)
}

/// One m-function evaluation for the probe CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub lambda: f64,
    pub m: Complex64,
    pub tail_bound: f64,
}

/// Probe CSV: `lambda,m_real,m_imag,tail_bound`.
pub fn write_probe(
    w: &mut dyn Write,
    header: &Header,
    extra_comments: &[String],
    rows: &[ProbeRow],
) -> Result<()> {
    write_table(
        w,
        header,
        extra_comments,
        &["lambda", "m_real", "m_imag", "tail_bound"],
        rows.iter()
            .map(|r| vec![r.lambda, r.m.re, r.m.im, r.tail_bound]),
    )
}

/// Numeric columns of a CSV file with `#` comments, addressed by header name.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| csv_error(source, e))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| csv_error(source, e))?;
            let line = record.position().map_or(0, |p| p.line());
            let row = record
                .iter()
                .zip(&columns)
                .map(|(cell, col)| {
                    cell.parse::<f64>().map_err(|_| {
                        Error::Parse(format!(
                            "{source}: line {line}: column {col}: '{cell}' is not a number"
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    fn require(&self, name: &str, what: &str) -> Result<Vec<f64>> {
        self.column(name)
            .ok_or_else(|| Error::Parse(format!("{what}: missing column '{name}'")))
    }
}

fn csv_error(source: &str, e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Parse(format!("{source}: line {}: {e}", p.line())),
        None => Error::Parse(format!("{source}: {e}")),
    }
}

/// Eigenvalues and optional norming constants read from a spectra CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFile {
    pub eigenvalues: Vec<f64>,
    pub norming_constants: Option<Vec<f64>>,
}

pub fn read_spectrum(path: &Path) -> Result<SpectrumFile> {
    let table = Table::load(path)?;
    let what = path.display().to_string();
    Ok(SpectrumFile {
        eigenvalues: table.require("lambda", &what)?,
        norming_constants: table.column("a_n"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Sidecar {
    bound_states: Vec<f64>,
    #[serde(rename = "S")]
    half_width: f64,
}

/// Path of the JSON sidecar that accompanies a scattering CSV.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Scattering CSV `xi,Re_R,Im_R[,Re_A,Im_A,Re_B,Im_B]` plus sidecar `{bound_states, S}`.
pub fn write_scattering(csv_path: &Path, header: &Header, data: &ScatteringData) -> Result<()> {
    let mut columns = vec!["xi", "Re_R", "Im_R"];
    if data.coefficients.is_some() {
        columns.extend(["Re_A", "Im_A", "Re_B", "Im_B"]);
    }
    let rows = data.xi.iter().enumerate().map(|(i, &x)| {
        let r = data.reflection[i];
        let mut row = vec![x, r.re, r.im];
        if let Some(ab) = &data.coefficients {
            let (a, b) = ab[i];
            row.extend([a.re, a.im, b.re, b.im]);
        }
        row
    });
    let mut buf = Vec::new();
    write_table(&mut buf, header, &[], &columns, rows)?;
    fs::write(csv_path, buf)?;
    let sidecar = Sidecar {
        bound_states: data.bound_states.clone(),
        half_width: data.half_width,
    };
    let json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| Error::Config(format!("sidecar: {e}")))?;
    fs::write(sidecar_path(csv_path), json + "\n")?;
    Ok(())
}

pub fn read_scattering(csv_path: &Path) -> Result<ScatteringData> {
    let table = Table::load(csv_path)?;
    let what = csv_path.display().to_string();
    let side_path = sidecar_path(csv_path);
    let side_text = fs::read_to_string(&side_path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", side_path.display())))?;
    let sidecar: Sidecar = serde_json::from_str(&side_text)
        .map_err(|e| Error::Parse(format!("{}: {e}", side_path.display())))?;
    let xi = table.require("xi", &what)?;
    let pair = |re: &str, im: &str| -> Result<Vec<Complex64>> {
        let r = table.require(re, &what)?;
        let i = table.require(im, &what)?;
        Ok(r.into_iter()
            .zip(i)
            .map(|(a, b)| Complex64::new(a, b))
            .collect())
    };
    let reflection = pair("Re_R", "Im_R")?;
    let coefficients = if table.column("Re_A").is_some() {
        Some(
            pair("Re_A", "Im_A")?
                .into_iter()
                .zip(pair("Re_B", "Im_B")?)
                .collect(),
        )
    } else {
        None
    };
    ScatteringData::new(
        sidecar.half_width,
        xi,
        reflection,
        coefficients,
        sidecar.bound_states,
    )
}
